#pragma once

// Real geodesic spray, RK4 geodesics, Berwald residuals and the polygonal
// length of great circles on the unit sphere.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ufinsler/errors.hpp"
#include "ufinsler/geometry.hpp"
#include "ufinsler/metric.hpp"
#include "ufinsler/tensors.hpp"

namespace ufinsler {

/// F(z, v) = sqrt(r phi(t, s)).
inline double finsler_norm(const MetricDefn& metric, const PointDirection& p) {
  return std::sqrt(p.r() * eval_phi(metric, p.t(), p.s()).value);
}

struct SprayScalars {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
};

struct SprayCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  /// G^i assembled in real coordinates.
  RVector G;
};

/// c1..c4 depend on (t, s) only.
inline SprayScalars spray_scalars(const PhiAt& f) {
  require_nonsingular(f);
  const double t = f.t;
  const double s = f.s;
  const double phi = f.phi.value;
  const double pt = f.phi.dt;
  const double ps = f.phi.ds;
  const double pst = f.phi.dts;
  const double pss = f.phi.dss;
  const double c0 = f.c0();
  const double a = f.c0_plus_t_phis();
  const double k_tilde = f.k_tilde();
  // c2 numerator; it reappears inside c1.
  const double m2 = s * ps * (pt + ps) - phi * (pt - ps);
  SprayScalars c;
  c.c1 = (c0 * a * (phi * (pst + pss) - ps * (pt + ps)) - (t - s) * phi * pss * m2) /
         (f.L() * c0);
  c.c2 = m2 / (2.0 * c0 * a);
  c.c3 = (a * (pt - s * pst) + s * pss * ((t - s) * pt - phi)) / k_tilde;
  c.c4 = ps / c0;
  return c;
}

inline SprayScalars spray_scalars(const MetricDefn& metric, double t, double s) {
  return spray_scalars(phi_at(metric, t, s));
}

/// G = [c1 <x|u>^2 + r c2] x + c1 <x|u><u|Jx> Jx + c3 <x|u> u + c4 <u|Jx> Ju.
inline SprayCoefficients spray_coefficients(const MetricDefn& metric, const PointDirection& p) {
  const SprayScalars c = spray_scalars(metric, p.t(), p.s());
  const double xu = p.xu();
  const double uJx = p.uJx();
  SprayCoefficients out{c.c1, c.c2, c.c3, c.c4, {}};
  out.G = (c.c1 * xu * xu + p.r() * c.c2) * p.x() + (c.c1 * xu * uJx) * p.Jx() +
          (c.c3 * xu) * p.u() + (c.c4 * uJx) * p.Ju();
  return out;
}

/// G_{l;k} u^k - G_{;l} for G = F^2, in closed form.
inline RVector spray_source(const PhiAt& f, const PointDirection& p) {
  const double s = f.s;
  const double pt = f.phi.dt;
  const double ps = f.phi.ds;
  const double mixed = f.phi.dts + f.phi.dss;
  const double xu = p.xu();
  const double uJx = p.uJx();
  return (4.0 * (pt - s * mixed) * xu) * p.u() + (4.0 * ps * uJx) * p.Ju() +
         (2.0 * (ps - pt) * p.r()) * p.x() +
         (4.0 * mixed) * (xu * xu * p.x() + xu * uJx * p.Jx());
}

/// G^i = (1/4) g^{ij} (G_{j;k} u^k - G_{;j}) with the closed-form inverse.
inline RVector spray_direct(const MetricDefn& metric, const PointDirection& p) {
  const PhiAt f = phi_at(metric, p);
  return 0.25 * (inverse_fundamental_tensor(metric, p) * spray_source(f, p));
}

// ---------------------------------------------------------------------------
// Geodesics

struct TracePoint {
  double tau = 0.0;
  RVector x;
  RVector u;
  double F = 0.0;
};

struct GeodesicTrace {
  double h = 0.0;
  std::vector<TracePoint> points;
};

/// Raised when a geodesic leaves the domain or the convex region; keeps the
/// steps computed so far.
class IntegrationAbort : public DomainError {
 public:
  IntegrationAbort(const std::string& what, GeodesicTrace partial)
      : DomainError(what), partial_(std::move(partial)) {}
  const GeodesicTrace& partial_trace() const noexcept { return partial_; }

 private:
  GeodesicTrace partial_;
};

/// Fixed-step RK4 for x' = u, u' = -2 G(x, u).
inline GeodesicTrace integrate_geodesic(const MetricDefn& metric, const RVector& x0,
                                        const RVector& u0, double h, std::size_t steps) {
  if (!(h > 0.0)) throw std::invalid_argument("step h must be positive");
  if (x0.size() != u0.size() || x0.size() % 2 != 0 || x0.size() < 2) {
    throw std::invalid_argument("x0 and u0 must be real vectors of equal even length");
  }
  GeodesicTrace trace;
  trace.h = h;

  auto abort = [&](const std::string& why) -> IntegrationAbort {
    return IntegrationAbort("geodesic aborted after " + std::to_string(trace.points.size()) +
                                " recorded points: " + why,
                            trace);
  };
  auto accel = [&](const RVector& x, const RVector& u) -> RVector {
    return -2.0 * spray_coefficients(metric, PointDirection::from_real(x, u)).G;
  };
  auto record = [&](double tau, const RVector& x, const RVector& u) {
    const PointDirection p = PointDirection::from_real(x, u);
    if (convexity_report(metric, p.t(), p.s(), p.n()).convex != Verdict::yes) {
      throw DomainError("metric is not strongly convex at the current point");
    }
    trace.points.push_back(TracePoint{tau, x, u, finsler_norm(metric, p)});
  };

  RVector x = x0;
  RVector u = u0;
  try {
    record(0.0, x, u);
  } catch (const DomainError& e) {
    throw abort(e.what());
  }
  for (std::size_t k = 1; k <= steps; ++k) {
    try {
      const RVector k1x = u;
      const RVector k1u = accel(x, u);
      const RVector k2x = u + 0.5 * h * k1u;
      const RVector k2u = accel(x + 0.5 * h * k1x, k2x);
      const RVector k3x = u + 0.5 * h * k2u;
      const RVector k3u = accel(x + 0.5 * h * k2x, k3x);
      const RVector k4x = u + h * k3u;
      const RVector k4u = accel(x + h * k3x, k4x);
      x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      record(static_cast<double>(k) * h, x, u);
    } catch (const DomainError& e) {
      throw abort(e.what());
    }
  }
  return trace;
}

inline void write_trace_csv(std::ostream& out, const GeodesicTrace& trace) {
  const Eigen::Index m = trace.points.empty() ? 0 : trace.points.front().x.size();
  out << "tau";
  for (Eigen::Index i = 1; i <= m; ++i) out << ",x_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",u_" << i;
  out << ",F\n";
  for (const auto& pt : trace.points) {
    write_exact(out, pt.tau);
    for (Eigen::Index i = 0; i < m; ++i) write_exact(out << ',', pt.x[i]);
    for (Eigen::Index i = 0; i < m; ++i) write_exact(out << ',', pt.u[i]);
    write_exact(out << ',', pt.F) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Berwald residuals

struct BerwaldResidual {
  double dc1_ds = 0.0;
  double dc3_ds = 0.0;
  double dc4_ds = 0.0;
  double d2c2_ds2 = 0.0;
  /// phi phi_ss / c0^2, the analytic value of dc4/ds.
  double dc4_ds_analytic = 0.0;

  double max_abs() const {
    return std::max({std::abs(dc1_ds), std::abs(dc3_ds), std::abs(dc4_ds), std::abs(d2c2_ds2)});
  }
};

// The spray scalars come out of cancelling sums (c1 of a Hermitian metric is
// zero but evaluates to ~1e-14), and a difference quotient divides that noise
// by h or h^2. These steps keep it near 1e-11.
inline constexpr double kBerwaldFirstStep = 1e-3;
inline constexpr double kBerwaldSecondStep = 1e-2;

namespace detail {

// Nodes s + (first + k) h, k = 0..nodes-1, all inside [lo, hi].
struct Stencil {
  double h;
  int first;  // offset of the leftmost node in units of h
};

// Central when the nodes fit with at most a 4x smaller step, otherwise
// one-sided towards the wider side of [lo, hi].
inline Stencil fit_stencil(double s, double lo, double hi, double h, int nodes, bool central_allowed) {
  const double left = s - lo;
  const double right = hi - s;
  if (central_allowed) {
    const int half = (nodes - 1) / 2;
    const double h_central = std::min(h, std::min(left, right) / half);
    if (h_central >= 0.25 * h) return {h_central, -half};
  }
  if (right >= left) return {std::min(h, right / (nodes - 1)), 0};
  return {std::min(h, left / (nodes - 1)), -(nodes - 1)};
}

}  // namespace detail

/// Partial derivatives in s of the spray scalars at fixed t. Central
/// differences in the interior; second-order one-sided near the ends of the
/// admissible s-interval.
inline BerwaldResidual berwald_residual(const MetricDefn& metric, double t, double s) {
  const PhiAt f = phi_at(metric, t, s);
  require_nonsingular(f);
  BerwaldResidual out;
  out.dc4_ds_analytic = f.phi.value * f.phi.dss / (f.c0() * f.c0());
  if (t <= 0.0) {
    // s is pinned to 0 when t = 0; there is no s-direction to differentiate along.
    return out;
  }
  const double hi = metric.guard.gap_above ? std::min(t, t - 2.0 * *metric.guard.gap_above) : t;
  const double lo = 0.0;
  auto at = [&](double sk) { return spray_scalars(metric, t, std::clamp(sk, lo, hi)); };
  // c4 = phi_s / c0 has a pole where c0 vanishes; dc0/ds = -s phi_ss gives the
  // distance to it to first order, and the steps shrink with that distance.
  double reach = 1.0;
  const double dc0 = s * f.phi.dss;
  if (dc0 != 0.0) reach = std::min(reach, std::abs(f.c0() / dc0));

  {
    const detail::Stencil st = detail::fit_stencil(s, lo, hi, kBerwaldFirstStep * reach, 3, true);
    std::array<SprayScalars, 3> c;
    for (int k = 0; k < 3; ++k) c[k] = at(s + (st.first + k) * st.h);
    // Weights for f' at s from nodes at offsets first, first+1, first+2.
    std::array<double, 3> w{};
    if (st.first == -1) w = {-0.5, 0.0, 0.5};
    else if (st.first == 0) w = {-1.5, 2.0, -0.5};
    else w = {0.5, -2.0, 1.5};
    for (int k = 0; k < 3; ++k) {
      out.dc1_ds += w[k] * c[k].c1 / st.h;
      out.dc3_ds += w[k] * c[k].c3 / st.h;
      out.dc4_ds += w[k] * c[k].c4 / st.h;
    }
  }
  {
    // A central second difference needs three nodes; a second-order one-sided one needs four.
    detail::Stencil st = detail::fit_stencil(s, lo, hi, kBerwaldSecondStep * reach, 3, true);
    std::array<double, 4> w{1.0, -2.0, 1.0, 0.0};
    int nodes = 3;
    if (st.first != -1) {
      st = detail::fit_stencil(s, lo, hi, kBerwaldSecondStep * reach, 4, false);
      nodes = 4;
      if (st.first == 0) w = {2.0, -5.0, 4.0, -1.0};
      else w = {-1.0, 4.0, -5.0, 2.0};
    }
    for (int k = 0; k < nodes; ++k) {
      out.d2c2_ds2 += w[k] * at(s + (st.first + k) * st.h).c2 / (st.h * st.h);
    }
  }
  return out;
}

inline BerwaldResidual berwald_residual(const MetricDefn& metric, const PointDirection& p) {
  return berwald_residual(metric, p.t(), p.s());
}

// ---------------------------------------------------------------------------
// Unit sphere

/// phi scaled so that phi(1, 0) = 1. Metrics that are undefined at t = 1
/// raise UnboundedAtPole.
inline MetricDefn normalize_metric(const MetricDefn& metric) {
  double phi10 = 0.0;
  try {
    phi10 = eval_phi(metric, 1.0, 0.0).value;
  } catch (const Error& e) {
    throw UnboundedAtPole("phi(1, 0) is not finite for metric '" + metric.name +
                          "': " + e.what());
  }
  MetricDefn out = metric;
  out.scale = metric.scale / phi10;
  return out;
}

struct SphereLengthExperiment {
  double alpha = 0.0;
  long m = 0;
  CVector z;
  CVector w;
  /// Sum of F over the chords of the inscribed polygon.
  double L_m_sum = 0.0;
  /// 2 m sin(alpha / 2m) sqrt(phi(1, sin^2(alpha / 2m))).
  double L_m_closed = 0.0;
  double abs_err_vs_alpha() const { return std::abs(L_m_sum - alpha); }
};

namespace detail {

inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += v[i];
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

}  // namespace detail

/// Length of the m-gon inscribed in the great circle z cos(tau) + w sin(tau),
/// 0 <= tau <= alpha, with z = A e1 and w = A e2.
inline SphereLengthExperiment polygonal_length(const MetricDefn& metric, double alpha, long m,
                                               Eigen::Index n = 2,
                                               const std::optional<CMatrix>& rotation = {},
                                               unsigned workers = 1) {
  if (!(alpha > 0.0 && alpha < std::numbers::pi / 2.0)) throw std::invalid_argument("alpha must lie in (0, pi/2)");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  SphereLengthExperiment ex;
  ex.alpha = alpha;
  ex.m = m;
  ex.z = CVector::Zero(n);
  ex.w = CVector::Zero(n);
  ex.z[0] = 1.0;
  ex.w[1] = 1.0;
  if (rotation) {
    if (rotation->rows() != n || rotation->cols() != n) {
      throw std::invalid_argument("rotation must be n x n");
    }
    ex.z = *rotation * ex.z;
    ex.w = *rotation * ex.w;
  }
  const double half = std::sin(alpha / (2.0 * static_cast<double>(m)));
  try {
    ex.L_m_closed = static_cast<double>(m) * 2.0 * half *
                    std::sqrt(eval_phi(metric, 1.0, half * half).value);
  } catch (const DomainError& e) {
    throw UnboundedAtPole(std::string("metric undefined on the unit sphere: ") + e.what());
  }
  auto curve = [&](long i) -> CVector {
    const double tau = alpha * static_cast<double>(i) / static_cast<double>(m);
    return std::cos(tau) * ex.z + std::sin(tau) * ex.w;
  };
  std::vector<double> pieces(static_cast<std::size_t>(m));
  parallel_for_index(pieces.size(), workers, [&](std::size_t i) {
    const long k = static_cast<long>(i);
    const CVector a = curve(k);
    pieces[i] = finsler_norm(metric, PointDirection(a, curve(k + 1) - a));
  });
  ex.L_m_sum = detail::pairwise_sum(pieces, 0, pieces.size());
  return ex;
}

}  // namespace ufinsler
