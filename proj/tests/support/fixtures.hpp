#pragma once

#include <cstdint>
#include <vector>

#include "ufinsler/ufinsler.hpp"

namespace fixtures {

inline std::vector<ufinsler::PointDirection> points(const ufinsler::MetricDefn& metric,
                                                    Eigen::Index n, std::size_t count,
                                                    std::uint64_t seed,
                                                    ufinsler::Requirement req) {
  ufinsler::SampleOptions opt;
  opt.requirement = req;
  return ufinsler::random_points(metric, n, count, seed, opt);
}

inline std::vector<ufinsler::PointDirection> convex_points(const ufinsler::MetricDefn& metric,
                                                           Eigen::Index n, std::size_t count,
                                                           std::uint64_t seed) {
  return points(metric, n, count, seed, ufinsler::Requirement::convex);
}

/// Metrics with phi_ss identically zero (phi affine in s).
inline bool hermitian_type(const std::string& name) {
  return name == "euclidean" || name == "hermitian" || name == "bergman";
}

inline ufinsler::MetricDefn metric(const std::string& name) { return *ufinsler::lookup(name); }

}  // namespace fixtures
