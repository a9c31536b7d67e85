#pragma once

// Complex geodesic spray and holomorphic sectional curvature.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "ufinsler/errors.hpp"
#include "ufinsler/geometry.hpp"
#include "ufinsler/metric.hpp"
#include "ufinsler/parallel.hpp"
#include "ufinsler/tensors.hpp"

namespace ufinsler {

struct CurvatureReport {
  double K_F = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double k5 = 0.0;
  bool at_origin = false;
};

struct ComplexSprayScalars {
  double k1 = 0.0;
  double k4 = 0.0;
  double k5 = 0.0;
};

inline ComplexSprayScalars complex_spray_scalars(const PhiAt& f) {
  const double t = f.t;
  const double s = f.s;
  const double phi = f.phi.value;
  const double sum1 = f.phi.dt + f.phi.ds;
  const double sum2 = f.phi.dts + f.phi.dss;
  const double a = f.c0_plus_t_phis();
  ComplexSprayScalars k;
  k.k1 = f.k1();
  k.k4 = (a + s * (t - s) * f.phi.dss) * sum1 - s * a * sum2;
  k.k5 = phi * sum2 - f.phi.ds * sum1;
  if (std::abs(k.k1) < kSingularTolerance * phi * phi) {
    throw SingularTensor("k1 vanishes; the Levi matrix is singular");
  }
  return k;
}

/// 2 GG^gamma = k2 conj<z,v> v^gamma + k3 conj<z,v>^2 z^gamma, k2 = k4/k1, k3 = k5/k1.
inline CVector complex_spray(const MetricDefn& metric, const PointDirection& p) {
  const ComplexSprayScalars k = complex_spray_scalars(phi_at(metric, p));
  const Complex w = std::conj(p.zv());
  return (k.k4 / k.k1) * w * p.v() + (k.k5 / k.k1) * w * w * p.z();
}

/// Holomorphic sectional curvature in closed form from the jet of phi at (t, s).
inline CurvatureReport holomorphic_curvature(const MetricDefn& metric, double t, double s) {
  const PhiAt f = phi_at(metric, t, s);
  const ComplexSprayScalars k = complex_spray_scalars(f);
  const double phi = f.phi.value;
  const double ps = f.phi.ds;
  const double sum1 = f.phi.dt + f.phi.ds;
  const double sum2 = f.phi.dts + f.phi.dss;
  const double gap = t - s;
  const double brace =
      k.k1 * (s * (f.phi.dtt + 2.0 * f.phi.dts + f.phi.dss) + sum1) -
      s * s * gap * phi * sum2 * sum2 + 2.0 * s * s * gap * ps * sum2 * sum1 -
      s * (f.c0() + gap * ps + s * gap * f.phi.dss) * sum1 * sum1;
  CurvatureReport rep;
  rep.k1 = k.k1;
  rep.k4 = k.k4;
  rep.k5 = k.k5;
  rep.k2 = k.k4 / k.k1;
  rep.k3 = k.k5 / k.k1;
  rep.K_F = -2.0 * brace / (phi * phi * k.k1);
  rep.at_origin = t == 0.0 && s == 0.0;
  return rep;
}

inline CurvatureReport holomorphic_curvature(const MetricDefn& metric, const PointDirection& p) {
  return holomorphic_curvature(metric, p.t(), p.s());
}

/// K_F(0, v) = -2 [phi_t + phi_s](0, 0) / phi(0, 0)^2.
inline double origin_curvature(const MetricDefn& metric) {
  const Jet2 phi = eval_phi(metric, 0.0, 0.0);
  return -2.0 * (phi.dt + phi.ds) / (phi.value * phi.value) + 0.0;  // maps -0 to 0
}

inline constexpr double kWirtingerStep = 1e-5;

/// K_F from its definition: -2/G^2 G_gamma d/dconj(z^nu) (2 GG^gamma) conj(v^nu),
/// with central Wirtinger differences in z and G_gamma = conj(v^gamma) phi + r phi_s s_gamma.
inline double curvature_oracle(const MetricDefn& metric, const PointDirection& p) {
  const Eigen::Index n = p.n();
  const Jet2 phi = eval_phi(metric, p.t(), p.s());
  const double G = p.r() * phi.value;
  const CVector s_a = s_alpha(p);
  CVector G_a(n);
  for (Eigen::Index g = 0; g < n; ++g) {
    G_a[g] = std::conj(p.v()[g]) * phi.value + p.r() * phi.ds * s_a[g];
  }
  const double h = kWirtingerStep * std::max(1.0, p.z().norm());
  auto spray_at = [&](Eigen::Index nu, Complex dz) {
    CVector z = p.z();
    z[nu] += dz;
    return complex_spray(metric, PointDirection(z, p.v()));
  };
  // D^gamma = sum_nu d/dconj(z^nu) (2 GG^gamma) conj(v^nu)
  CVector D = CVector::Zero(n);
  for (Eigen::Index nu = 0; nu < n; ++nu) {
    const CVector d_re = (spray_at(nu, Complex(h, 0.0)) - spray_at(nu, Complex(-h, 0.0))) / (2.0 * h);
    const CVector d_im = (spray_at(nu, Complex(0.0, h)) - spray_at(nu, Complex(0.0, -h))) / (2.0 * h);
    D += 0.5 * (d_re + Complex(0.0, 1.0) * d_im) * std::conj(p.v()[nu]);
  }
  Complex acc{0.0, 0.0};
  for (Eigen::Index g = 0; g < n; ++g) acc += G_a[g] * D[g];
  return -2.0 * acc.real() / (G * G);
}

struct WeaklyBerwaldResidual {
  /// phi(phi_st + phi_ss) - phi_s(phi_t + phi_s) - g(t) k1
  double residual = 0.0;
  double g = 0.0;
};

/// Residual of the weakly complex Berwald equation k5 = g(t) k1. Without a
/// supplied g the point-fitted value k5/k1 is used and reported.
inline WeaklyBerwaldResidual weakly_berwald_residual(
    const MetricDefn& metric, double t, double s,
    const std::optional<std::function<double(double)>>& g_of_t = std::nullopt) {
  const ComplexSprayScalars k = complex_spray_scalars(phi_at(metric, t, s));
  WeaklyBerwaldResidual out;
  out.g = g_of_t ? (*g_of_t)(t) : k.k5 / k.k1;
  out.residual = k.k5 - out.g * k.k1;
  return out;
}

inline WeaklyBerwaldResidual weakly_berwald_residual(
    const MetricDefn& metric, const PointDirection& p,
    const std::optional<std::function<double(double)>>& g_of_t = std::nullopt) {
  return weakly_berwald_residual(metric, p.t(), p.s(), g_of_t);
}

// ---------------------------------------------------------------------------
// Curvature maps

struct CurvatureRow {
  double t = 0.0;
  double s = 0.0;
  double K_F = std::numeric_limits<double>::quiet_NaN();
  double k1 = std::numeric_limits<double>::quiet_NaN();
  double k4 = std::numeric_limits<double>::quiet_NaN();
  double k5 = std::numeric_limits<double>::quiet_NaN();
  bool excluded = false;
};

/// Evaluates K_F at each (t, s); points outside the domain or with k1 = 0
/// keep NaN fields and are flagged.
inline std::vector<CurvatureRow> curvature_map(const MetricDefn& metric,
                                               const std::vector<std::pair<double, double>>& ts,
                                               unsigned workers = 1) {
  std::vector<CurvatureRow> rows(ts.size());
  parallel_for_index(rows.size(), workers, [&](std::size_t i) {
    CurvatureRow& row = rows[i];
    row.t = ts[i].first;
    row.s = ts[i].second;
    try {
      const CurvatureReport rep = holomorphic_curvature(metric, row.t, row.s);
      row.K_F = rep.K_F;
      row.k1 = rep.k1;
      row.k4 = rep.k4;
      row.k5 = rep.k5;
    } catch (const DomainError&) {
      row.excluded = true;
    }
  });
  return rows;
}

inline void write_curvature_csv(std::ostream& out, const std::vector<CurvatureRow>& rows) {
  out << "t,s,K_F,k1,k4,k5\n";
  for (const auto& row : rows) {
    write_exact(out, row.t) << ',';
    write_exact(out, row.s) << ',';
    write_exact(out, row.K_F) << ',';
    write_exact(out, row.k1) << ',';
    write_exact(out, row.k4) << ',';
    write_exact(out, row.k5) << '\n';
  }
}

}  // namespace ufinsler
