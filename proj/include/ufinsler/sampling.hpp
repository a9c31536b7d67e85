#pragma once

// Seeded random points (z, v) inside a metric's domain.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ufinsler/errors.hpp"
#include "ufinsler/geometry.hpp"
#include "ufinsler/metric.hpp"
#include "ufinsler/tensors.hpp"

namespace ufinsler {

enum class Requirement { in_domain, pseudoconvex, convex };

struct SampleOptions {
  Requirement requirement = Requirement::in_domain;
  /// Relative margin demanded of the strict inequalities and of the guard.
  double margin = 1e-3;
  std::size_t max_attempts = 100000;
};

namespace detail {

inline CVector gaussian_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector out(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const double re = normal(rng);
    const double im = normal(rng);
    out[a] = Complex(re, im);
  }
  return out;
}

inline bool comfortably_positive(double value, double phi, double margin) {
  return value > margin * std::max(1.0, phi * phi);
}

inline bool meets(const MetricDefn& metric, double t, double s, Eigen::Index n,
                  const SampleOptions& opt) {
  const double m = opt.margin;
  if (!metric.guard.admits(t + m * std::max(1.0, t), s + 2.0 * m * std::max(1.0, t))) {
    return false;
  }
  PhiAt f;
  try {
    f = phi_at(metric, t, s);
  } catch (const DomainError&) {
    return false;
  }
  const double phi = f.phi.value;
  switch (opt.requirement) {
    case Requirement::in_domain:
      return true;
    case Requirement::pseudoconvex:
      return comfortably_positive(f.k1(), phi, m) &&
             (n == 2 || comfortably_positive(f.c0(), phi, m));
    case Requirement::convex:
      return comfortably_positive(f.c0(), phi, m) &&
             comfortably_positive(f.c0_plus_t_phis(), phi, m) &&
             comfortably_positive(f.k_tilde(), phi, m);
  }
  return false;
}

}  // namespace detail

/// Draws t uniformly in [0, sample_t_max) and s/t uniformly in [0, 1], then
/// realizes (t, s) by a random z and a randomly scaled and rotated v. Draws
/// that miss the domain or the requirement are rejected.
inline PointDirection random_point(const MetricDefn& metric, Eigen::Index n, std::mt19937_64& rng,
                                   const SampleOptions& opt = {}) {
  if (n < 2) throw std::invalid_argument("random points need n >= 2");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
    const double t = metric.sample_t_max * unit(rng);
    const double ratio = unit(rng);
    const CVector z_dir = detail::gaussian_vector(n, rng).normalized();
    CVector perp = detail::gaussian_vector(n, rng);
    perp -= z_dir.dot(perp) * z_dir;
    perp.normalize();
    const double phase = 2.0 * std::numbers::pi * unit(rng);
    const double scale_phase = 2.0 * std::numbers::pi * unit(rng);
    const double scale = std::exp(std::log(2.0) * (2.0 * unit(rng) - 1.0));
    const double s = t * ratio;
    if (!detail::meets(metric, t, s, n, opt)) continue;
    const CVector z = std::sqrt(t) * z_dir;
    const CVector v = std::polar(scale, scale_phase) *
                      (std::sqrt(ratio) * std::polar(1.0, phase) * z_dir +
                       std::sqrt(1.0 - ratio) * perp);
    try {
      PointDirection p(z, v);
      // Rounding moves (t, s) slightly; re-check on the realized invariants.
      if (detail::meets(metric, p.t(), p.s(), n, opt)) return p;
    } catch (const DomainError&) {
    }
  }
  throw DomainError("no admissible random point found for metric '" + metric.name + "'");
}

inline std::vector<PointDirection> random_points(const MetricDefn& metric, Eigen::Index n,
                                                 std::size_t count, std::uint64_t seed,
                                                 const SampleOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::vector<PointDirection> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_point(metric, n, rng, opt));
  return out;
}

}  // namespace ufinsler
