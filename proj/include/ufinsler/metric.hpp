#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ufinsler/errors.hpp"
#include "ufinsler/expr.hpp"
#include "ufinsler/jet.hpp"

namespace ufinsler {

/// Admissible region of (t, s) beyond 0 <= s <= t.
struct DomainGuard {
  /// Strict upper bound t < t_below.
  std::optional<double> t_below;
  /// Strict lower bound t - s > gap_above (singular set of the Wrona metric).
  std::optional<double> gap_above;

  bool admits(double t, double s) const noexcept {
    if (!std::isfinite(t) || !std::isfinite(s)) return false;
    if (t_below && !(t < *t_below)) return false;
    if (gap_above && !(t - s > *gap_above)) return false;
    return true;
  }

  bool unrestricted() const noexcept { return !t_below && !gap_above; }

  std::string describe() const {
    std::ostringstream out;
    out.precision(17);
    if (unrestricted()) return "none";
    if (t_below) out << "t < " << *t_below;
    if (t_below && gap_above) out << " and ";
    if (gap_above) out << "t - s > " << *gap_above;
    return out.str();
  }
};

/// Default singular-set margin for metrics that blow up on z = lambda v.
inline constexpr double kWronaDelta = 1e-9;

struct MetricDefn {
  std::string name;
  /// Source text of phi(t, s) in the expression language.
  std::string source;
  ExprPtr body;
  DomainGuard guard;
  /// Whether phi(1, 0) is finite and what it is; empty for ad-hoc expressions.
  std::optional<std::string> normalization_note;
  /// Positive multiplier applied to phi (set by normalize_metric).
  double scale = 1.0;
  /// Suggested upper bound on t when drawing random points for this metric.
  double sample_t_max = 1.0;
};

/// Full second-order jet of phi at (t, s).
///
/// Requires 0 <= s <= t (with a rounding allowance) and the metric's guard;
/// raises DomainError otherwise, and EvalError from the jet arithmetic.
inline Jet2 eval_phi(const MetricDefn& metric, double t, double s) {
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  if (!(s >= -slack && s <= t + slack)) {
    throw DomainError("(t, s) outside the Cauchy-Schwarz range 0 <= s <= t");
  }
  if (!metric.guard.admits(t, s)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "metric '" << metric.name << "' undefined at (t, s) = (" << t << ", " << s
        << "); guard: " << metric.guard.describe();
    throw DomainError(msg.str());
  }
  Jet2 phi = evaluate(metric.body, t, s);
  if (metric.scale != 1.0) phi = metric.scale * phi;
  if (!std::isfinite(phi.value) || !(phi.value > 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "phi = " << phi.value << " is not positive at (t, s) = (" << t << ", " << s << ")";
    throw DomainError(msg.str());
  }
  return phi;
}

inline MetricDefn make_metric(std::string name, std::string source, DomainGuard guard = {},
                              std::optional<std::string> note = std::nullopt,
                              double sample_t_max = 1.0) {
  MetricDefn m;
  m.name = std::move(name);
  m.body = parse_metric(source);
  m.source = std::move(source);
  m.guard = guard;
  m.normalization_note = std::move(note);
  m.sample_t_max = sample_t_max;
  return m;
}

/// The named metrics used throughout the library and its tests.
inline const std::vector<MetricDefn>& catalog() {
  static const std::vector<MetricDefn> entries = [] {
    const double sqrt3 = std::sqrt(3.0);
    std::vector<MetricDefn> v;
    v.push_back(make_metric("euclidean", "1", {}, "phi(1,0) = 1", 2.0));
    v.push_back(make_metric("hermitian", "1+s", {}, "phi(1,0) = 1", 2.0));
    v.push_back(make_metric("ball-quadratic", "(1+s)^2", {.t_below = 1.0},
                            "phi(1,0) = 1 but t = 1 lies outside the unit ball", 0.9));
    v.push_back(make_metric("four-minus-s2", "4-s^2", {.t_below = sqrt3}, "phi(1,0) = 4",
                            sqrt3));
    v.push_back(make_metric("weakly-berwald-neg", "(1-t+s)^2/(1-t)^3", {.t_below = 1.0},
                            "phi(1,0) unbounded", 0.9));
    v.push_back(make_metric("weakly-berwald-pos", "(1+t-s)^2/(1+t)^3", {}, "phi(1,0) = 1/2",
                            0.9));
    v.push_back(make_metric("flat-exp", "exp(s-t)", {}, "phi(1,0) = exp(-1)", 1.0));
    v.push_back(make_metric("flat-quadratic", "1+(s-t)+(s-t)^2", {}, "phi(1,0) = 1", 1.0));
    v.push_back(make_metric("wrona", "1/(t-s)", {.gap_above = kWronaDelta}, "phi(1,0) = 1",
                            2.0));
    v.push_back(make_metric("bergman", "1/(1-t)+s/(1-t)^2", {.t_below = 1.0},
                            "phi(1,0) unbounded", 0.9));
    return v;
  }();
  return entries;
}

inline std::optional<MetricDefn> lookup(std::string_view name) {
  for (const auto& m : catalog()) {
    if (m.name == name) return m;
  }
  return std::nullopt;
}

/// Resolves a catalog name or an expression. An expression structurally equal
/// to a catalog body inherits that entry's guard and metadata.
inline MetricDefn resolve_metric(std::string_view name_or_expression) {
  if (auto m = lookup(name_or_expression)) return *m;
  MetricDefn m;
  m.body = parse_metric(name_or_expression);
  m.source = std::string(name_or_expression);
  for (const auto& entry : catalog()) {
    if (equal(entry.body, m.body)) {
      MetricDefn inherited = entry;
      inherited.source = m.source;
      return inherited;
    }
  }
  m.name = m.source;
  return m;
}

}  // namespace ufinsler
