#pragma once

// Fundamental tensors of F = sqrt(r phi(t, s)) and the convexity criteria.
//
// Both the complex Levi matrix and the real fundamental tensor are rank-2 or
// rank-3 updates of c0 * I, which gives closed forms for the real inverse and
// for the full spectra of both matrices.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ufinsler/errors.hpp"
#include "ufinsler/geometry.hpp"
#include "ufinsler/jet.hpp"
#include "ufinsler/metric.hpp"
#include "ufinsler/parallel.hpp"

namespace ufinsler {

/// Relative threshold for the strict inequalities of the convexity criteria.
inline constexpr double kStrictTolerance = 1e-12;
/// Absolute threshold below which a closed-form denominator counts as zero.
inline constexpr double kSingularTolerance = 1e-12;

enum class Verdict { no, marginal, yes };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::no: return "false";
    case Verdict::marginal: return "marginal";
    case Verdict::yes: return "true";
  }
  return "false";
}

/// `value > 0` decided against eps * max(1, phi^2); the open band around zero is marginal.
inline Verdict strictly_positive(double value, double phi) {
  const double band = kStrictTolerance * std::max(1.0, phi * phi);
  if (value > band) return Verdict::yes;
  if (value > -band) return Verdict::marginal;
  return Verdict::no;
}

inline Verdict all_of(std::initializer_list<Verdict> verdicts) {
  Verdict out = Verdict::yes;
  for (Verdict v : verdicts) {
    if (v == Verdict::no) return Verdict::no;
    if (v == Verdict::marginal) out = Verdict::marginal;
  }
  return out;
}

/// phi and the scalar combinations that recur in every closed form.
struct PhiAt {
  double t = 0.0;
  double s = 0.0;
  Jet2 phi;

  double c0() const { return phi.value - s * phi.ds; }
  /// c0 + t phi_s = phi + (t - s) phi_s
  double c0_plus_t_phis() const { return c0() + t * phi.ds; }
  double k1() const {
    return c0() * c0_plus_t_phis() + s * (t - s) * phi.value * phi.dss;
  }
  double k_tilde() const {
    return c0() * c0_plus_t_phis() + 2.0 * s * (t - s) * phi.value * phi.dss;
  }
  /// (c0 + t phi_s) * k_tilde, the determinant of c0 I_3 + B^T B X.
  double L() const { return c0_plus_t_phis() * k_tilde(); }
};

inline PhiAt phi_at(const MetricDefn& metric, double t, double s) {
  return PhiAt{t, s, eval_phi(metric, t, s)};
}

inline PhiAt phi_at(const MetricDefn& metric, const PointDirection& p) {
  return phi_at(metric, p.t(), p.s());
}

// ---------------------------------------------------------------------------
// Matrices

/// G_{a b-bar} = c0 I + B X B^* with B = [s_a | conj z^a], X = diag(r phi_ss, phi_s).
inline CMatrix levi_matrix(const MetricDefn& metric, const PointDirection& p) {
  const PhiAt f = phi_at(metric, p);
  const Eigen::Index n = p.n();
  const CVector sa = s_alpha(p);
  const CVector zc = p.z().conjugate();
  CMatrix h = f.c0() * CMatrix::Identity(n, n);
  h += (p.r() * f.phi.dss) * sa * sa.adjoint();
  h += f.phi.ds * zc * zc.adjoint();
  return h;
}

/// g_ij = c0 delta_ij + (1/2) r phi_ss s_i s_j + phi_s (x^i x^j + Jx^i Jx^j).
inline RMatrix real_fundamental_tensor(const MetricDefn& metric, const PointDirection& p) {
  const PhiAt f = phi_at(metric, p);
  const Eigen::Index m = 2 * p.n();
  const RVector si = s_gradient_u(p);
  RMatrix g = f.c0() * RMatrix::Identity(m, m);
  g += (0.5 * p.r() * f.phi.dss) * si * si.transpose();
  g += f.phi.ds * (p.x() * p.x().transpose() + p.Jx() * p.Jx().transpose());
  return g;
}

/// X^j = phi s_j - 2 s (t - s) phi_s u^j / r.
inline RVector inverse_direction_vector(const PhiAt& f, const PointDirection& p) {
  return f.phi.value * s_gradient_u(p) - (2.0 * f.s * (f.t - f.s) * f.phi.ds / p.r()) * p.u();
}

inline void require_nonsingular(const PhiAt& f) {
  if (std::abs(f.c0()) < kSingularTolerance) throw SingularTensor("c0 = phi - s phi_s vanishes");
  if (std::abs(f.c0_plus_t_phis()) < kSingularTolerance) {
    throw SingularTensor("c0 + t phi_s vanishes");
  }
  if (std::abs(f.L()) < kSingularTolerance) throw SingularTensor("L vanishes");
}

/// g^{jk} = (1/c0) { delta - r phi_ss/(2L) X^j X^k - phi_s/(c0 + t phi_s) (x x + Jx Jx) }.
inline RMatrix inverse_fundamental_tensor(const MetricDefn& metric, const PointDirection& p) {
  const PhiAt f = phi_at(metric, p);
  require_nonsingular(f);
  const Eigen::Index m = 2 * p.n();
  const RVector xv = inverse_direction_vector(f, p);
  RMatrix gi = RMatrix::Identity(m, m);
  gi -= (p.r() * f.phi.dss / (2.0 * f.L())) * xv * xv.transpose();
  gi -= (f.phi.ds / f.c0_plus_t_phis()) *
        (p.x() * p.x().transpose() + p.Jx() * p.Jx().transpose());
  return gi / f.c0();
}

struct TensorPair {
  CMatrix levi;
  RMatrix real_metric;
  RMatrix real_inverse;
  double L = 0.0;
  RVector X_vec;
};

inline TensorPair tensor_pair(const MetricDefn& metric, const PointDirection& p) {
  const PhiAt f = phi_at(metric, p);
  TensorPair out;
  out.levi = levi_matrix(metric, p);
  out.real_metric = real_fundamental_tensor(metric, p);
  out.real_inverse = inverse_fundamental_tensor(metric, p);
  out.L = f.L();
  out.X_vec = inverse_direction_vector(f, p);
  return out;
}

// ---------------------------------------------------------------------------
// Spectra

/// Real roots of lambda^2 - b lambda + c, smaller first, without cancellation.
inline std::pair<double, double> quadratic_roots(double b, double c) {
  double disc = b * b - 4.0 * c;
  if (disc < 0.0) {
    // The matrices are symmetric/Hermitian, so only rounding can make disc negative.
    const double scale = std::max({b * b, std::abs(4.0 * c), std::numeric_limits<double>::min()});
    if (disc < -1e-10 * scale) {
      throw InternalInconsistency("negative discriminant in the spectrum of a symmetric matrix");
    }
    disc = 0.0;
  }
  const double root = std::sqrt(disc);
  const double q = 0.5 * (b + std::copysign(root, b));
  if (q == 0.0) return {0.0, 0.0};
  double r1 = q;
  double r2 = c / q;
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

struct Spectra {
  /// Eigenvalues of the n x n Levi matrix, ascending, with multiplicity.
  std::vector<double> complex_eigen;
  /// Eigenvalues of the 2n x 2n real fundamental tensor, ascending, with multiplicity.
  std::vector<double> real_eigen;
};

inline Spectra eigen_spectra(const PhiAt& f, Eigen::Index n) {
  if (n < 2) throw std::invalid_argument("closed-form spectra need n >= 2");
  const double c0 = f.c0();
  const double tps = f.t * f.phi.ds;
  const double gap = f.s * (f.t - f.s) * f.phi.dss;
  Spectra out;
  out.complex_eigen.assign(static_cast<std::size_t>(n - 2), c0);
  const auto [a1, a2] = quadratic_roots(2.0 * c0 + tps + gap, f.k1());
  out.complex_eigen.push_back(a1);
  out.complex_eigen.push_back(a2);
  out.real_eigen.assign(static_cast<std::size_t>(2 * n - 3), c0);
  out.real_eigen.push_back(c0 + tps);
  const auto [b1, b2] = quadratic_roots(2.0 * c0 + tps + 2.0 * gap, f.k_tilde());
  out.real_eigen.push_back(b1);
  out.real_eigen.push_back(b2);
  std::sort(out.complex_eigen.begin(), out.complex_eigen.end());
  std::sort(out.real_eigen.begin(), out.real_eigen.end());
  return out;
}

inline Spectra eigen_spectra(const MetricDefn& metric, const PointDirection& p) {
  return eigen_spectra(phi_at(metric, p), p.n());
}

// ---------------------------------------------------------------------------
// Verdicts

struct ConvexityReport {
  double t = 0.0;
  double s = 0.0;
  double phi = 0.0;
  double c0 = 0.0;
  double k1 = 0.0;
  double k_tilde = 0.0;
  double c0_plus_t_phis = 0.0;
  std::vector<double> complex_eigen;
  std::vector<double> real_eigen;
  Verdict pseudoconvex = Verdict::no;
  Verdict convex = Verdict::no;
  Eigen::Index n = 0;
};

/// Both verdicts at the invariants (t, s) in dimension n.
///
/// Pseudoconvex: k1 > 0 for n = 2, c0 > 0 and k1 > 0 for n >= 3.
/// Convex: c0 > 0, c0 + t phi_s > 0 and k_tilde > 0.
inline ConvexityReport convexity_report(const MetricDefn& metric, double t, double s,
                                        Eigen::Index n) {
  const PhiAt f = phi_at(metric, t, s);
  ConvexityReport rep;
  rep.t = t;
  rep.s = s;
  rep.n = n;
  rep.phi = f.phi.value;
  rep.c0 = f.c0();
  rep.k1 = f.k1();
  rep.k_tilde = f.k_tilde();
  rep.c0_plus_t_phis = f.c0_plus_t_phis();
  const Spectra spectra = eigen_spectra(f, n);
  rep.complex_eigen = spectra.complex_eigen;
  rep.real_eigen = spectra.real_eigen;
  const Verdict c0_pos = strictly_positive(rep.c0, rep.phi);
  const Verdict k1_pos = strictly_positive(rep.k1, rep.phi);
  rep.pseudoconvex = n == 2 ? k1_pos : all_of({c0_pos, k1_pos});
  rep.convex = all_of({c0_pos, strictly_positive(rep.c0_plus_t_phis, rep.phi),
                       strictly_positive(rep.k_tilde, rep.phi)});
  return rep;
}

inline ConvexityReport pseudoconvexity_check(const MetricDefn& metric, const PointDirection& p) {
  return convexity_report(metric, p.t(), p.s(), p.n());
}

inline ConvexityReport convexity_check(const MetricDefn& metric, const PointDirection& p) {
  return convexity_report(metric, p.t(), p.s(), p.n());
}

// ---------------------------------------------------------------------------
// Region sweep

struct SweepRow {
  double t = 0.0;
  double s = 0.0;
  double c0 = std::numeric_limits<double>::quiet_NaN();
  double k1 = std::numeric_limits<double>::quiet_NaN();
  double k_tilde = std::numeric_limits<double>::quiet_NaN();
  Verdict pseudoconvex = Verdict::no;
  Verdict convex = Verdict::no;
  bool excluded = false;
};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

/// Row-major (t outer, s inner) grid of grid_n x grid_n nodes including both
/// endpoints, restricted to s <= t. Cells outside the metric's domain are kept
/// and flagged `excluded`.
inline std::vector<SweepRow> region_sweep(const MetricDefn& metric, Range t_range, Range s_range,
                                          std::size_t grid_n, Eigen::Index n = 3,
                                          unsigned workers = 1) {
  if (grid_n < 2) throw std::invalid_argument("grid_n must be >= 2");
  auto node = [&](const Range& r, std::size_t i) {
    return r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
  };
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < grid_n; ++i) {
    const double t = node(t_range, i);
    for (std::size_t j = 0; j < grid_n; ++j) {
      const double s = node(s_range, j);
      if (s <= t) rows.push_back(SweepRow{.t = t, .s = s});
    }
  }
  parallel_for_index(rows.size(), workers, [&](std::size_t k) {
    SweepRow& row = rows[k];
    try {
      const ConvexityReport rep = convexity_report(metric, row.t, row.s, n);
      row.c0 = rep.c0;
      row.k1 = rep.k1;
      row.k_tilde = rep.k_tilde;
      row.pseudoconvex = rep.pseudoconvex;
      row.convex = rep.convex;
    } catch (const DomainError&) {
      row.excluded = true;
    }
  });
  return rows;
}

/// Writes a double with 17 significant digits (exact round trip).
inline std::ostream& write_exact(std::ostream& out, double v) {
  if (std::isnan(v)) return out << "nan";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17) << v;
  out.flags(flags);
  out.precision(precision);
  return out;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "t,s,c0,k1,ktilde,pseudoconvex,convex,excluded\n";
  for (const auto& row : rows) {
    write_exact(out, row.t) << ',';
    write_exact(out, row.s) << ',';
    write_exact(out, row.c0) << ',';
    write_exact(out, row.k1) << ',';
    write_exact(out, row.k_tilde) << ',';
    out << to_string(row.pseudoconvex) << ',' << to_string(row.convex) << ','
        << (row.excluded ? "true" : "false") << '\n';
  }
}

}  // namespace ufinsler
