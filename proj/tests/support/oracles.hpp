#pragma once

// Independent numerical reference implementations used only by the tests.
// None of them touches the closed forms they are compared against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ufinsler/ufinsler.hpp"

namespace oracle {

using ufinsler::CMatrix;
using ufinsler::Complex;
using ufinsler::CVector;
using ufinsler::RMatrix;
using ufinsler::RVector;

/// Cyclic Jacobi rotations on a symmetric matrix. Stops when the
/// off-diagonal Frobenius norm falls below 1e-14 times the full norm or after
/// 100 sweeps. Returns ascending eigenvalues.
inline std::vector<double> jacobi_eigenvalues(RMatrix a) {
  const Eigen::Index m = a.rows();
  if (a.cols() != m) throw std::invalid_argument("square matrix required");
  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) total += a(i, j) * a(i, j);
  }
  const double threshold = 1e-14 * std::sqrt(total);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) off += 2.0 * a(i, j) * a(i, j);
    }
    if (std::sqrt(off) <= threshold) break;
    for (Eigen::Index p = 0; p < m; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(out.begin(), out.end());
  return out;
}

/// Eigenvalues of a Hermitian matrix A + iB through the real symmetric
/// embedding [[A, -B], [B, A]], whose spectrum is that of A + iB doubled.
inline std::vector<double> hermitian_eigenvalues(const CMatrix& h) {
  const Eigen::Index n = h.rows();
  RMatrix big(2 * n, 2 * n);
  big.topLeftCorner(n, n) = h.real();
  big.topRightCorner(n, n) = -h.imag();
  big.bottomLeftCorner(n, n) = h.imag();
  big.bottomRightCorner(n, n) = h.real();
  const std::vector<double> doubled = jacobi_eigenvalues(big);
  std::vector<double> out;
  for (std::size_t k = 0; k < doubled.size(); k += 2) out.push_back(0.5 * (doubled[k] + doubled[k + 1]));
  return out;
}

/// Largest |a_k - b_k| after sorting both; infinite on a size mismatch.
inline double multiset_distance(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) return INFINITY;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

/// Gauss-Jordan elimination with partial pivoting.
inline RMatrix gauss_jordan_inverse(RMatrix a) {
  const Eigen::Index m = a.rows();
  RMatrix inv = RMatrix::Identity(m, m);
  for (Eigen::Index col = 0; col < m; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < m; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (a(pivot, col) == 0.0) throw std::runtime_error("singular matrix");
    a.row(col).swap(a.row(pivot));
    inv.row(col).swap(inv.row(pivot));
    const double d = a(col, col);
    a.row(col) /= d;
    inv.row(col) /= d;
    for (Eigen::Index r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      a.row(r) -= f * a.row(col);
      inv.row(r) -= f * inv.row(col);
    }
  }
  return inv;
}

inline double max_abs(const RMatrix& m) { return m.cwiseAbs().maxCoeff(); }

/// G(x, u) = F^2 = r phi(t, s) evaluated from scratch on real coordinates.
inline double energy(const ufinsler::MetricDefn& metric, const RVector& x, const RVector& u) {
  const auto p = ufinsler::PointDirection::from_real(x, u);
  return p.r() * ufinsler::eval_phi(metric, p.t(), p.s()).value;
}

/// (1/2) d^2 G / du^i du^j by central differences of G.
inline RMatrix fd_fundamental_tensor(const ufinsler::MetricDefn& metric, const RVector& x,
                                     const RVector& u, double h = 1e-4) {
  const Eigen::Index m = x.size();
  const double step = h * std::max(1.0, u.norm());
  RMatrix out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      RVector pp = u, pm = u, mp = u, mm = u;
      pp[i] += step; pp[j] += step;
      pm[i] += step; pm[j] -= step;
      mp[i] -= step; mp[j] += step;
      mm[i] -= step; mm[j] -= step;
      const double d2 = (energy(metric, x, pp) - energy(metric, x, pm) - energy(metric, x, mp) +
                         energy(metric, x, mm)) /
                        (4.0 * step * step);
      out(i, j) = out(j, i) = 0.5 * d2;
    }
  }
  return out;
}

/// dG/du^j, differentiated numerically (central, relative step).
inline RVector fd_energy_gradient_u(const ufinsler::MetricDefn& metric, const RVector& x,
                                    const RVector& u, double h) {
  const Eigen::Index m = x.size();
  RVector g(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    RVector up = u, um = u;
    up[j] += h;
    um[j] -= h;
    g[j] = (energy(metric, x, up) - energy(metric, x, um)) / (2.0 * h);
  }
  return g;
}

/// Third assembly of the spray: G^i = (1/4) g^{ij} (G_{j;k} u^k - G_{;j}) with
/// every derivative of G = r phi taken by finite differences and g^{ij} from
/// Gauss-Jordan inversion of the numerically differentiated Hessian.
inline RVector fd_spray(const ufinsler::MetricDefn& metric, const RVector& x, const RVector& u) {
  const Eigen::Index m = x.size();
  const double hx = 1e-5 * std::max(1.0, x.norm());
  const double hu = 1e-5 * std::max(1.0, u.norm());
  // G_{;j}
  RVector gx(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    RVector xp = x, xm = x;
    xp[j] += hx;
    xm[j] -= hx;
    gx[j] = (energy(metric, xp, u) - energy(metric, xm, u)) / (2.0 * hx);
  }
  // G_{j;k} u^k: derivative of dG/du^j along x + eps u.
  const double he = hx / std::max(1.0, u.norm());
  const RVector mixed = (fd_energy_gradient_u(metric, x + he * u, u, hu) -
                         fd_energy_gradient_u(metric, x - he * u, u, hu)) /
                        (2.0 * he);
  const RMatrix g = fd_fundamental_tensor(metric, x, u);
  return 0.25 * gauss_jordan_inverse(g) * (mixed - gx);
}

/// Wirtinger derivative ds/dv^a = (d/dRe v^a - i d/dIm v^a) s / 2 by central differences.
inline CVector fd_s_alpha(const ufinsler::PointDirection& p, double h = 1e-6) {
  const Eigen::Index n = p.n();
  CVector out(n);
  auto s_at = [&](const CVector& v) { return ufinsler::scalar_invariants(p.z(), v).s; };
  for (Eigen::Index a = 0; a < n; ++a) {
    CVector vr_p = p.v(), vr_m = p.v(), vi_p = p.v(), vi_m = p.v();
    vr_p[a] += h;
    vr_m[a] -= h;
    vi_p[a] += Complex(0.0, h);
    vi_m[a] -= Complex(0.0, h);
    const double d_re = (s_at(vr_p) - s_at(vr_m)) / (2.0 * h);
    const double d_im = (s_at(vi_p) - s_at(vi_m)) / (2.0 * h);
    out[a] = 0.5 * Complex(d_re, -d_im);
  }
  return out;
}

/// Relative error with a floor on the scale, for quantities that may vanish.
inline double rel_err(double got, double want, double floor = 1.0) {
  return std::abs(got - want) / std::max(floor, std::abs(want));
}

inline double rel_err(const RVector& got, const RVector& want, double floor = 1.0) {
  return (got - want).cwiseAbs().maxCoeff() / std::max(floor, want.cwiseAbs().maxCoeff());
}

}  // namespace oracle
