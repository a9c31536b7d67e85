#pragma once

// Second-order forward-mode jets in the two invariants (t, s).
//
// A Jet2 carries a function value together with every partial derivative up
// to total order two. Arithmetic applies the product, quotient and chain
// rules to second order, so any expression built from seeded coordinates
// returns phi, phi_t, phi_s, phi_tt, phi_ts and phi_ss in one pass.

#include <cmath>
#include <cstdlib>
#include <string>

#include "ufinsler/errors.hpp"

namespace ufinsler {

enum class Variable { t, s };

struct Jet2 {
  double value = 0.0;
  double dt = 0.0;
  double ds = 0.0;
  double dtt = 0.0;
  double dts = 0.0;
  double dss = 0.0;

  static constexpr Jet2 constant(double c) noexcept { return Jet2{c, 0, 0, 0, 0, 0}; }

  friend bool operator==(const Jet2&, const Jet2&) = default;
};

/// Jet of the coordinate function `which` at (t0, s0).
constexpr Jet2 jet_seed(Variable which, double t0, double s0) noexcept {
  return which == Variable::t ? Jet2{t0, 1, 0, 0, 0, 0} : Jet2{s0, 0, 1, 0, 0, 0};
}

namespace detail {

// Composition f(a) given f, f' and f'' at a.value.
constexpr Jet2 compose(const Jet2& a, double f0, double f1, double f2) noexcept {
  return Jet2{f0,
              f1 * a.dt,
              f1 * a.ds,
              f2 * a.dt * a.dt + f1 * a.dtt,
              f2 * a.dt * a.ds + f1 * a.dts,
              f2 * a.ds * a.ds + f1 * a.dss};
}

}  // namespace detail

constexpr Jet2 operator-(const Jet2& a) noexcept {
  return Jet2{-a.value, -a.dt, -a.ds, -a.dtt, -a.dts, -a.dss};
}

constexpr Jet2 operator+(const Jet2& a, const Jet2& b) noexcept {
  return Jet2{a.value + b.value, a.dt + b.dt, a.ds + b.ds,
              a.dtt + b.dtt, a.dts + b.dts, a.dss + b.dss};
}

constexpr Jet2 operator-(const Jet2& a, const Jet2& b) noexcept {
  return Jet2{a.value - b.value, a.dt - b.dt, a.ds - b.ds,
              a.dtt - b.dtt, a.dts - b.dts, a.dss - b.dss};
}

constexpr Jet2 operator*(const Jet2& a, const Jet2& b) noexcept {
  return Jet2{a.value * b.value,
              a.dt * b.value + a.value * b.dt,
              a.ds * b.value + a.value * b.ds,
              a.dtt * b.value + 2.0 * a.dt * b.dt + a.value * b.dtt,
              a.dts * b.value + a.dt * b.ds + a.ds * b.dt + a.value * b.dts,
              a.dss * b.value + 2.0 * a.ds * b.ds + a.value * b.dss};
}

constexpr Jet2 operator*(double c, const Jet2& a) noexcept {
  return Jet2{c * a.value, c * a.dt, c * a.ds, c * a.dtt, c * a.dts, c * a.dss};
}

constexpr Jet2 operator*(const Jet2& a, double c) noexcept { return c * a; }
constexpr Jet2 operator+(const Jet2& a, double c) noexcept { return a + Jet2::constant(c); }
constexpr Jet2 operator+(double c, const Jet2& a) noexcept { return Jet2::constant(c) + a; }
constexpr Jet2 operator-(const Jet2& a, double c) noexcept { return a - Jet2::constant(c); }
constexpr Jet2 operator-(double c, const Jet2& a) noexcept { return Jet2::constant(c) - a; }

inline Jet2 reciprocal(const Jet2& a) {
  if (a.value == 0.0) throw EvalError("division by zero in jet arithmetic");
  const double inv = 1.0 / a.value;
  return detail::compose(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }
inline Jet2 operator/(const Jet2& a, double c) { return a / Jet2::constant(c); }
inline Jet2 operator/(double c, const Jet2& a) { return c * reciprocal(a); }

inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.value);
  return detail::compose(a, e, e, e);
}

inline Jet2 log(const Jet2& a) {
  if (!(a.value > 0.0)) throw EvalError("log of non-positive value");
  const double inv = 1.0 / a.value;
  return detail::compose(a, std::log(a.value), inv, -inv * inv);
}

inline Jet2 sqrt(const Jet2& a) {
  if (!(a.value > 0.0)) throw EvalError("sqrt of non-positive value");
  const double r = std::sqrt(a.value);
  return detail::compose(a, r, 0.5 / r, -0.25 / (r * a.value));
}

/// Integer power by repeated squaring; exact for negative bases.
inline Jet2 pow(const Jet2& a, long exponent) {
  if (exponent < 0) return reciprocal(pow(a, -exponent));
  Jet2 result = Jet2::constant(1.0);
  Jet2 base = a;
  for (long e = exponent; e > 0; e >>= 1) {
    if (e & 1) result = result * base;
    if (e > 1) base = base * base;
  }
  return result;
}

/// Real power; fractional exponents require a positive base.
inline Jet2 pow(const Jet2& a, double exponent) {
  if (exponent == std::trunc(exponent) && std::abs(exponent) < 1e9) {
    return pow(a, static_cast<long>(exponent));
  }
  if (!(a.value > 0.0)) throw EvalError("fractional power of non-positive base");
  const double p = exponent;
  const double f0 = std::pow(a.value, p);
  return detail::compose(a, f0, p * f0 / a.value, p * (p - 1.0) * f0 / (a.value * a.value));
}

/// a^b with a jet-valued exponent, lifted through exp(b log a).
inline Jet2 pow(const Jet2& a, const Jet2& b) {
  if (b.dt == 0.0 && b.ds == 0.0 && b.dtt == 0.0 && b.dts == 0.0 && b.dss == 0.0) {
    return pow(a, b.value);
  }
  if (!(a.value > 0.0)) throw EvalError("variable power of non-positive base");
  return exp(b * log(a));
}

}  // namespace ufinsler
