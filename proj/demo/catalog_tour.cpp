// Walks the built-in metrics: where each is convex, its curvature at the
// origin, and the great-circle length experiment.

#include <cstdio>
#include <numbers>

#include "ufinsler/ufinsler.hpp"

using namespace ufinsler;

int main() {
  std::printf("%-20s %-22s %9s %9s %12s\n", "metric", "phi", "convex %", "K(0,v)", "|L - pi/4|");
  for (const auto& m : catalog()) {
    const auto rows = region_sweep(m, {0.0, m.sample_t_max}, {0.0, m.sample_t_max}, 60);
    std::size_t inside = 0, convex = 0;
    for (const auto& r : rows) {
      if (r.excluded) continue;
      ++inside;
      if (r.convex == Verdict::yes) ++convex;
    }

    char origin[32] = "-";
    try {
      std::snprintf(origin, sizeof origin, "%.6g", origin_curvature(m));
    } catch (const DomainError&) {
    }

    char length[32] = "-";
    try {
      const auto ex = polygonal_length(normalize_metric(m), std::numbers::pi / 4, 4096);
      std::snprintf(length, sizeof length, "%.3e", ex.abs_err_vs_alpha());
    } catch (const UnboundedAtPole&) {
    }

    std::printf("%-20s %-22s %9.1f %9s %12s\n", m.name.c_str(), m.source.c_str(),
                100.0 * static_cast<double>(convex) / static_cast<double>(inside), origin, length);
  }
}
