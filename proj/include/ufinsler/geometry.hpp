#pragma once

// Complex/real data of a point with direction, the invariants (r, t, s), the
// complex structure J and the closed-form derivatives of s.
//
// Conventions: <z, v> = sum_a z^a conj(v^a) (linear in the first slot);
// z^a = x^a + i x^{a+n}, v^a = u^a + i u^{a+n}; J x^a = x^{a+n}, J x^{a+n} = -x^a.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "ufinsler/errors.hpp"

namespace ufinsler {

using Complex = std::complex<double>;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

/// Squared norms of v below this are treated as the zero direction.
inline constexpr double kZeroDirectionThreshold = 1e-300;

struct Invariants {
  double r;
  double t;
  double s;
};

/// <z, v> = sum z^a conj(v^a).
inline Complex inner(const CVector& z, const CVector& v) {
  Complex acc{0.0, 0.0};
  for (Eigen::Index a = 0; a < z.size(); ++a) acc += z[a] * std::conj(v[a]);
  return acc;
}

inline Invariants scalar_invariants(const CVector& z, const CVector& v) {
  if (z.size() != v.size()) throw std::invalid_argument("z and v must have the same dimension");
  const double r = v.squaredNorm();
  if (!(r >= kZeroDirectionThreshold)) throw ZeroDirection("direction v is zero");
  const double t = z.squaredNorm();
  double s = std::norm(inner(z, v)) / r;
  // Cauchy-Schwarz holds exactly; clip the rounding excess when z is parallel to v.
  if (s > t) s = t;
  return {r, t, s};
}

/// (x^1..x^n, x^{n+1}..x^{2n}) = (Re z, Im z).
inline RVector realify(const CVector& z) {
  const Eigen::Index n = z.size();
  RVector x(2 * n);
  x.head(n) = z.real();
  x.tail(n) = z.imag();
  return x;
}

inline CVector complexify(const RVector& x) {
  if (x.size() % 2 != 0) throw std::invalid_argument("real vector must have even length");
  const Eigen::Index n = x.size() / 2;
  CVector z(n);
  for (Eigen::Index a = 0; a < n; ++a) z[a] = Complex(x[a], x[a + n]);
  return z;
}

inline RVector apply_J(const RVector& w) {
  if (w.size() % 2 != 0) throw std::invalid_argument("real vector must have even length");
  const Eigen::Index n = w.size() / 2;
  RVector out(2 * n);
  out.head(n) = w.tail(n);
  out.tail(n) = -w.head(n);
  return out;
}

/// Matrix of J, so that apply_J(w) == j_matrix(n) * w.
inline RMatrix j_matrix(Eigen::Index n) {
  RMatrix j = RMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    j(a, a + n) = 1.0;
    j(a + n, a) = -1.0;
  }
  return j;
}

/// A base point z with a nonzero direction v, plus derived real data.
class PointDirection {
 public:
  PointDirection(CVector z, CVector v)
      : z_(std::move(z)), v_(std::move(v)), inv_(scalar_invariants(z_, v_)) {
    if (z_.size() < 1) throw std::invalid_argument("dimension n must be positive");
    x_ = realify(z_);
    u_ = realify(v_);
    jx_ = apply_J(x_);
    ju_ = apply_J(u_);
    zv_ = inner(z_, v_);
  }

  static PointDirection from_real(const RVector& x, const RVector& u) {
    return PointDirection(complexify(x), complexify(u));
  }

  Eigen::Index n() const noexcept { return z_.size(); }
  const CVector& z() const noexcept { return z_; }
  const CVector& v() const noexcept { return v_; }
  const RVector& x() const noexcept { return x_; }
  const RVector& u() const noexcept { return u_; }
  const RVector& Jx() const noexcept { return jx_; }
  const RVector& Ju() const noexcept { return ju_; }
  double r() const noexcept { return inv_.r; }
  double t() const noexcept { return inv_.t; }
  double s() const noexcept { return inv_.s; }
  Invariants invariants() const noexcept { return inv_; }
  /// <z, v>
  Complex zv() const noexcept { return zv_; }
  /// <x|u>
  double xu() const { return x_.dot(u_); }
  /// <u|Jx>
  double uJx() const { return u_.dot(jx_); }

 private:
  CVector z_;
  CVector v_;
  Invariants inv_;
  RVector x_, u_, jx_, ju_;
  Complex zv_;
};

/// Canonical point with prescribed invariants (t, s) and r = 1:
/// z = (sqrt t, 0, ...), v = (sqrt(s/t), sqrt(1 - s/t), 0, ...). Needs n >= 2.
inline PointDirection point_from_ts(Eigen::Index n, double t, double s) {
  if (n < 2) throw std::invalid_argument("a (t, s) witness needs n >= 2");
  if (!(t >= 0.0) || !(s >= 0.0) || s > t) throw DomainError("need 0 <= s <= t");
  CVector z = CVector::Zero(n);
  CVector v = CVector::Zero(n);
  if (t == 0.0) {
    v[0] = 1.0;
    return PointDirection(z, v);
  }
  const double ratio = std::min(1.0, s / t);
  z[0] = std::sqrt(t);
  v[0] = std::sqrt(ratio);
  v[1] = std::sqrt(1.0 - ratio);
  return PointDirection(z, v);
}

/// Closed-form first and second derivatives of s (and t) in real coordinates.
struct SDerivatives {
  RVector s_i;            ///< ds/du^i
  RVector s_semicolon_i;  ///< ds/dx^i
  RVector t_semicolon_i;  ///< dt/dx^i
  RMatrix s_ij;           ///< d2s/du^i du^j
  RMatrix s_i_semicolon_j;  ///< d2s/du^i dx^j
};

inline RVector s_gradient_u(const PointDirection& p) {
  const double r = p.r();
  return (2.0 / r) * (p.xu() * p.x() + p.uJx() * p.Jx() - p.s() * p.u());
}

inline RVector s_gradient_x(const PointDirection& p) {
  return (2.0 / p.r()) * (p.xu() * p.u() - p.uJx() * p.Ju());
}

inline SDerivatives s_derivative_suite(const PointDirection& p) {
  const Eigen::Index m = 2 * p.n();
  const double r = p.r();
  const double s = p.s();
  const double xu = p.xu();
  const double uJx = p.uJx();
  const RVector& x = p.x();
  const RVector& u = p.u();
  const RVector& jx = p.Jx();
  const RVector& ju = p.Ju();

  SDerivatives d;
  d.s_i = s_gradient_u(p);
  d.s_semicolon_i = s_gradient_x(p);
  d.t_semicolon_i = 2.0 * x;
  d.s_ij = (2.0 / r) * (x * x.transpose() + jx * jx.transpose() - d.s_i * u.transpose() -
                        u * d.s_i.transpose() - s * RMatrix::Identity(m, m));
  // d/du^i of s_{;j}; the last term is <u|Jx> d(Ju)^j/du^i = <u|Jx> J_{ji}.
  const RVector w = xu * u - uJx * ju;
  d.s_i_semicolon_j = -(4.0 / (r * r)) * u * w.transpose() +
                      (2.0 / r) * (x * u.transpose() + xu * RMatrix::Identity(m, m) -
                                   jx * ju.transpose() - uJx * j_matrix(p.n()).transpose());
  return d;
}

/// Wirtinger derivative ds/dv^a = (<z,v> conj(z^a) - s conj(v^a)) / r.
inline CVector s_alpha(const PointDirection& p) {
  const Eigen::Index n = p.n();
  CVector out(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    out[a] = (p.zv() * std::conj(p.z()[a]) - p.s() * std::conj(p.v()[a])) / p.r();
  }
  return out;
}

/// Haar-like random unitary from the QR factorization (modified Gram-Schmidt)
/// of a seeded complex Gaussian matrix.
inline CMatrix random_unitary(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = Complex(normal(rng), normal(rng));
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < j; ++k) {
        const Complex proj = a.col(k).dot(a.col(j));  // conj(q_k) . a_j
        a.col(j) -= proj * a.col(k);
      }
    }
    a.col(j) /= a.col(j).norm();
  }
  return a;
}

}  // namespace ufinsler
