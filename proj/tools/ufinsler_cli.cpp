// ufinsler: command-line driver for U(n)-invariant complex Finsler metrics.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ufinsler/ufinsler.hpp"

namespace {

using namespace ufinsler;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConvex = 2;
constexpr int kExitUsage = 64;
constexpr int kExitDomain = 65;

constexpr const char* kConventions =
    "Conventions: z, v are points of C^n; <z,v> = sum_a z^a conj(v^a);\n"
    "r = |v|^2, t = |z|^2, s = |<z,v>|^2 / |v|^2 (so 0 <= s <= t);\n"
    "F(z,v) = sqrt(r * phi(t,s)). Real coordinates x = (Re z, Im z), u = (Re v, Im v).\n"
    "All quantities are dimensionless.\n"
    "Metrics: a catalog name (see `ufinsler catalog`) or an expression in t and s\n"
    "using + - * / ^, exp, log, sqrt, e.g. \"(1+s)^2\" or \"4-s^2\".\n"
    "Exit codes: 0 ok (check: all convex), 2 some point not convex, 1 error,\n"
    "64 usage or expression syntax error, 65 domain error.";

// json::dump prints the shortest round-trip form of a double; output here
// carries 17 significant digits like the CSV writers.
void write_json(std::ostream& out, const json& j, int depth = 0) {
  const std::string pad(static_cast<std::size_t>(2 * depth + 2), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (!std::isfinite(d)) {
      out << "null";
      return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    out << buf;
  } else if (j.is_object() && !j.empty()) {
    out << "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) out << ",\n";
      first = false;
      out << pad << json(key).dump() << ": ";
      write_json(out, value, depth + 1);
    }
    out << '\n' << close << '}';
  } else if (j.is_array() && !j.empty()) {
    out << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out << ",\n";
      out << pad;
      write_json(out, j[i], depth + 1);
    }
    out << '\n' << close << ']';
  } else {
    out << j.dump();
  }
}

std::string json_text(const json& j) {
  std::ostringstream out;
  write_json(out, j);
  out << '\n';
  return out.str();
}

struct Common {
  std::string metric = "euclidean";
  int n = 3;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string output = "-";
  unsigned workers = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_format = true) {
  cmd->add_option("--metric", c.metric, "Catalog name or phi(t,s) expression")
      ->capture_default_str();
  cmd->add_option("-n,--n", c.n, "Complex dimension n (>= 2)")
      ->check(CLI::Range(2, 64))
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "Seed for random points")->capture_default_str();
  if (with_format) {
    cmd->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }
  cmd->add_option("-o,--output", c.output, "Output file, '-' for stdout")->capture_default_str();
  cmd->add_option("--workers", c.workers,
                  "Worker threads (default: $UFINSLER_WORKERS or hardware concurrency)");
  cmd->footer(kConventions);
}

unsigned workers_of(const Common& c) { return c.workers > 0 ? c.workers : default_workers(); }

/// Parses "a", "bi", "a+bi", "a-bi", "i", "-i".
Complex parse_complex(std::string token) {
  auto fail = [&]() -> Complex { throw CLI::ValidationError("complex number", "cannot parse '" + token + "'"); };
  std::string body;
  for (char ch : token) {
    if (ch != ' ') body += ch;
  }
  if (body.empty()) return fail();
  auto to_double = [&](const std::string& text) -> double {
    if (text.empty() || text == "+") return 1.0;
    if (text == "-") return -1.0;
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != text.size()) fail();
    return value;
  };
  const char last = body.back();
  if (last != 'i' && last != 'j') return {to_double(body), 0.0};
  body.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, to_double(body)};
  return {to_double(body.substr(0, split)), to_double(body.substr(split))};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

CVector parse_complex_vector(const std::string& text) {
  const auto items = split_list(text);
  CVector out(static_cast<Eigen::Index>(items.size()));
  for (std::size_t k = 0; k < items.size(); ++k) out[static_cast<Eigen::Index>(k)] = parse_complex(items[k]);
  return out;
}

RVector parse_real_vector(const std::string& text) {
  const auto items = split_list(text);
  RVector out(static_cast<Eigen::Index>(items.size()));
  for (std::size_t k = 0; k < items.size(); ++k) {
    const Complex c = parse_complex(items[k]);
    if (c.imag() != 0.0) throw CLI::ValidationError("real vector", "'" + items[k] + "' is not real");
    out[static_cast<Eigen::Index>(k)] = c.real();
  }
  return out;
}

std::pair<double, double> parse_pair(const std::string& text, const std::string& what) {
  const auto items = split_list(text);
  if (items.size() != 2) throw CLI::ValidationError(what, "expected two comma-separated numbers");
  return {parse_complex(items[0]).real(), parse_complex(items[1]).real()};
}

/// Writes to the configured destination only after the whole result is ready.
void emit(const Common& c, const std::string& text) {
  if (c.output == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(c.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + c.output + "'");
  out << text;
}

std::string exact(double v) {
  std::ostringstream out;
  write_exact(out, v);
  return out.str();
}

/// Points requested through --z/--v, --point-ts or --random.
struct PointSource {
  std::string z;
  std::string v;
  std::vector<std::string> point_ts;
  std::size_t random = 0;
};

void add_point_source(CLI::App* cmd, PointSource& src) {
  auto* z = cmd->add_option("--z", src.z, "Base point z as a comma-separated complex list, e.g. 0.3+0.1i,0.2");
  auto* v = cmd->add_option("--v", src.v, "Direction v, same format as --z");
  z->needs(v);
  v->needs(z);
  cmd->add_option("--point-ts", src.point_ts,
                  "Invariants t,s; realized by z=(sqrt t,0,..), v=(sqrt(s/t),sqrt(1-s/t),0,..). Repeatable");
  cmd->add_option("--random", src.random, "Number of random points in the metric's domain");
}

std::vector<PointDirection> collect_points(const MetricDefn& metric, const Common& c,
                                           const PointSource& src) {
  std::vector<PointDirection> pts;
  if (!src.z.empty()) {
    const CVector z = parse_complex_vector(src.z);
    const CVector v = parse_complex_vector(src.v);
    if (z.size() != v.size()) throw CLI::ValidationError("--z/--v", "z and v must have the same length");
    pts.emplace_back(z, v);
  }
  for (const auto& item : src.point_ts) {
    const auto [t, s] = parse_pair(item, "--point-ts");
    pts.push_back(point_from_ts(c.n, t, s));
  }
  if (src.random > 0) {
    const auto sampled = random_points(metric, c.n, src.random, c.seed);
    pts.insert(pts.end(), sampled.begin(), sampled.end());
  }
  return pts;
}

// ---------------------------------------------------------------------------

int cmd_catalog(const Common& c) {
  std::ostringstream out;
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& m : catalog()) {
      arr.push_back({{"name", m.name},
                     {"phi", m.source},
                     {"guard", m.guard.describe()},
                     {"normalization", m.normalization_note.value_or("")}});
    }
    out << json_text(arr);
  } else {
    out << "name,phi,guard,normalization\n";
    for (const auto& m : catalog()) {
      out << m.name << ",\"" << m.source << "\",\"" << m.guard.describe() << "\",\""
          << m.normalization_note.value_or("") << "\"\n";
    }
  }
  emit(c, out.str());
  return kExitOk;
}

int cmd_check(const Common& c, const PointSource& src) {
  const MetricDefn metric = resolve_metric(c.metric);
  const auto pts = collect_points(metric, c, src);
  if (pts.empty()) throw CLI::ValidationError("check", "give --z/--v, --point-ts or --random");
  std::vector<ConvexityReport> reports(pts.size());
  parallel_for_index(pts.size(), workers_of(c), [&](std::size_t i) {
    reports[i] = convexity_check(metric, pts[i]);
  });
  bool all_convex = true;
  for (const auto& r : reports) all_convex = all_convex && r.convex == Verdict::yes;

  std::ostringstream out;
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& r : reports) {
      arr.push_back({{"t", r.t},
                     {"s", r.s},
                     {"phi", r.phi},
                     {"c0", r.c0},
                     {"c0_plus_t_phis", r.c0_plus_t_phis},
                     {"k1", r.k1},
                     {"ktilde", r.k_tilde},
                     {"complex_eigen", r.complex_eigen},
                     {"real_eigen", r.real_eigen},
                     {"pseudoconvex", to_string(r.pseudoconvex)},
                     {"convex", to_string(r.convex)}});
    }
    out << json_text(json{{"metric", metric.name}, {"n", c.n}, {"points", arr}});
  } else {
    out << "t,s,phi,c0,c0_plus_t_phis,k1,ktilde,min_complex_eigen,min_real_eigen,pseudoconvex,convex\n";
    for (const auto& r : reports) {
      out << exact(r.t) << ',' << exact(r.s) << ',' << exact(r.phi) << ',' << exact(r.c0) << ','
          << exact(r.c0_plus_t_phis) << ',' << exact(r.k1) << ',' << exact(r.k_tilde) << ','
          << exact(r.complex_eigen.front()) << ',' << exact(r.real_eigen.front()) << ','
          << to_string(r.pseudoconvex) << ',' << to_string(r.convex) << '\n';
    }
  }
  emit(c, out.str());
  return all_convex ? kExitOk : kExitNotConvex;
}

struct GridOptions {
  std::string t_range;
  std::string s_range;
  std::size_t grid = 50;
};

void add_grid(CLI::App* cmd, GridOptions& g) {
  cmd->add_option("--t-range", g.t_range, "lo,hi for t (default 0 to the metric's sampling bound)");
  cmd->add_option("--s-range", g.s_range, "lo,hi for s (default same as t)");
  cmd->add_option("--grid", g.grid, "Nodes per axis, endpoints included")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000}))
      ->capture_default_str();
}

std::pair<Range, Range> ranges_of(const MetricDefn& metric, const GridOptions& g) {
  Range t{0.0, metric.sample_t_max};
  if (!g.t_range.empty()) {
    const auto [lo, hi] = parse_pair(g.t_range, "--t-range");
    t = {lo, hi};
  }
  Range s = t;
  if (!g.s_range.empty()) {
    const auto [lo, hi] = parse_pair(g.s_range, "--s-range");
    s = {lo, hi};
  }
  return {t, s};
}

int cmd_sweep(const Common& c, const GridOptions& g) {
  const MetricDefn metric = resolve_metric(c.metric);
  const auto [t, s] = ranges_of(metric, g);
  const auto rows = region_sweep(metric, t, s, g.grid, c.n, workers_of(c));
  std::ostringstream out;
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"t", r.t},
                     {"s", r.s},
                     {"c0", r.c0},
                     {"k1", r.k1},
                     {"ktilde", r.k_tilde},
                     {"pseudoconvex", to_string(r.pseudoconvex)},
                     {"convex", to_string(r.convex)},
                     {"excluded", r.excluded}});
    }
    out << json_text(arr);
  } else {
    write_sweep_csv(out, rows);
  }
  emit(c, out.str());
  return kExitOk;
}

int cmd_curvature(const Common& c, const PointSource& src, const GridOptions& g, bool origin,
                  bool use_grid) {
  const MetricDefn metric = resolve_metric(c.metric);
  std::vector<std::pair<double, double>> ts;
  if (origin) {
    // Fails loudly when 0 is outside the domain.
    eval_phi(metric, 0.0, 0.0);
    ts.emplace_back(0.0, 0.0);
  }
  for (const auto& p : collect_points(metric, c, src)) ts.emplace_back(p.t(), p.s());
  if (use_grid) {
    const auto [tr, sr] = ranges_of(metric, g);
    for (std::size_t i = 0; i < g.grid; ++i) {
      const double t = tr.lo + (tr.hi - tr.lo) * static_cast<double>(i) / static_cast<double>(g.grid - 1);
      for (std::size_t j = 0; j < g.grid; ++j) {
        const double s = sr.lo + (sr.hi - sr.lo) * static_cast<double>(j) / static_cast<double>(g.grid - 1);
        if (s <= t) ts.emplace_back(t, s);
      }
    }
  }
  if (ts.empty()) {
    throw CLI::ValidationError("curvature", "give --origin, --grid-map, --z/--v, --point-ts or --random");
  }
  const auto rows = curvature_map(metric, ts, workers_of(c));
  std::ostringstream out;
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"t", r.t}, {"s", r.s}, {"K_F", r.K_F}, {"k1", r.k1}, {"k4", r.k4}, {"k5", r.k5}});
    }
    out << json_text(arr);
  } else {
    write_curvature_csv(out, rows);
  }
  emit(c, out.str());
  return kExitOk;
}

struct GeodesicOptions {
  std::string x0;
  std::string u0;
  std::string z;
  std::string v;
  double h = 1e-3;
  std::size_t steps = 1000;
};

std::string trace_text(const Common& c, const GeodesicTrace& trace) {
  std::ostringstream out;
  if (c.format == "json") {
    json pts = json::array();
    for (const auto& p : trace.points) {
      pts.push_back({{"tau", p.tau},
                     {"x", std::vector<double>(p.x.data(), p.x.data() + p.x.size())},
                     {"u", std::vector<double>(p.u.data(), p.u.data() + p.u.size())},
                     {"F", p.F}});
    }
    out << json_text(json{{"h", trace.h}, {"points", pts}});
  } else {
    write_trace_csv(out, trace);
  }
  return out.str();
}

int cmd_geodesic(const Common& c, const GeodesicOptions& g) {
  const MetricDefn metric = resolve_metric(c.metric);
  RVector x0;
  RVector u0;
  if (!g.z.empty()) {
    x0 = realify(parse_complex_vector(g.z));
    u0 = realify(parse_complex_vector(g.v));
  } else if (!g.x0.empty()) {
    x0 = parse_real_vector(g.x0);
    u0 = parse_real_vector(g.u0);
  } else {
    throw CLI::ValidationError("geodesic", "give --x0/--u0 or --z/--v");
  }
  if (x0.size() != u0.size() || x0.size() % 2 != 0) {
    throw CLI::ValidationError("geodesic", "initial position and velocity need the same even length");
  }
  try {
    emit(c, trace_text(c, integrate_geodesic(metric, x0, u0, g.h, g.steps)));
  } catch (const IntegrationAbort& e) {
    emit(c, trace_text(c, e.partial_trace()));
    throw;
  }
  return kExitOk;
}

struct SphereOptions {
  double alpha = std::numbers::pi / 4.0;
  long m = 4096;
  bool no_normalize = false;
  std::optional<std::uint64_t> rotation_seed;
};

int cmd_sphere_length(const Common& c, const SphereOptions& o) {
  MetricDefn metric = resolve_metric(c.metric);
  if (!o.no_normalize) metric = normalize_metric(metric);
  std::optional<CMatrix> rotation;
  if (o.rotation_seed) rotation = random_unitary(c.n, *o.rotation_seed);
  const SphereLengthExperiment ex = polygonal_length(metric, o.alpha, o.m, c.n, rotation, workers_of(c));
  std::ostringstream out;
  if (c.format == "csv") {
    out << "alpha,m,L_m_sum,L_m_closed,abs_err_vs_alpha\n"
        << exact(ex.alpha) << ',' << ex.m << ',' << exact(ex.L_m_sum) << ','
        << exact(ex.L_m_closed) << ',' << exact(ex.abs_err_vs_alpha()) << '\n';
  } else {
    out << json_text(json{{"alpha", ex.alpha},
                          {"m", ex.m},
                          {"L_m_sum", ex.L_m_sum},
                          {"L_m_closed", ex.L_m_closed},
                          {"abs_err_vs_alpha", ex.abs_err_vs_alpha()}});
  }
  emit(c, out.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convexity, geodesics and curvature of U(n)-invariant complex Finsler metrics"};
  app.footer(kConventions);
  app.require_subcommand(1);

  auto* catalog_cmd = app.add_subcommand("catalog", "List the built-in metrics");
  Common catalog_common;
  catalog_cmd->add_option("--format", catalog_common.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  catalog_cmd->add_option("-o,--output", catalog_common.output, "Output file, '-' for stdout");
  catalog_cmd->footer(kConventions);

  auto* check_cmd = app.add_subcommand("check", "Strong pseudoconvexity and convexity at points");
  Common check_common;
  PointSource check_points;
  add_common(check_cmd, check_common);
  add_point_source(check_cmd, check_points);

  auto* sweep_cmd = app.add_subcommand("sweep", "Convexity verdicts on a (t,s) grid, CSV rows with s <= t");
  Common sweep_common;
  GridOptions sweep_grid;
  add_common(sweep_cmd, sweep_common);
  add_grid(sweep_cmd, sweep_grid);

  auto* curv_cmd = app.add_subcommand("curvature", "Holomorphic sectional curvature K_F");
  Common curv_common;
  PointSource curv_points;
  GridOptions curv_grid;
  bool curv_origin = false;
  bool curv_use_grid = false;
  add_common(curv_cmd, curv_common);
  add_point_source(curv_cmd, curv_points);
  add_grid(curv_cmd, curv_grid);
  curv_cmd->add_flag("--origin", curv_origin, "Evaluate at z = 0");
  curv_cmd->add_flag("--grid-map", curv_use_grid, "Evaluate on the (t,s) grid given by --grid/--t-range/--s-range");

  auto* geo_cmd = app.add_subcommand("geodesic", "Integrate a real geodesic with fixed-step RK4");
  Common geo_common;
  GeodesicOptions geo;
  add_common(geo_cmd, geo_common);
  geo_cmd->add_option("--x0", geo.x0, "Initial position in R^2n, comma-separated");
  geo_cmd->add_option("--u0", geo.u0, "Initial velocity in R^2n, comma-separated");
  geo_cmd->add_option("--z", geo.z, "Initial position as a complex list (alternative to --x0)");
  geo_cmd->add_option("--v", geo.v, "Initial velocity as a complex list (alternative to --u0)");
  geo_cmd->add_option("--step", geo.h, "RK4 step size")->check(CLI::PositiveNumber)->capture_default_str();
  geo_cmd->add_option("--steps", geo.steps, "Number of steps")->capture_default_str();

  auto* sphere_cmd = app.add_subcommand("sphere-length",
                                        "Polygonal length of a great-circle arc of the unit sphere");
  Common sphere_common;
  sphere_common.n = 2;
  sphere_common.format = "json";
  SphereOptions sphere;
  add_common(sphere_cmd, sphere_common);
  sphere_cmd->add_option("--alpha", sphere.alpha, "Arc angle in radians, 0 < alpha < pi/2")
      ->capture_default_str();
  sphere_cmd->add_option("--m", sphere.m, "Number of polygon edges")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sphere_cmd->add_flag("--no-normalize", sphere.no_normalize, "Skip scaling phi so that phi(1,0) = 1");
  sphere_cmd->add_option("--rotation-seed", sphere.rotation_seed,
                         "Rotate the great circle by a seeded random unitary matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*catalog_cmd) return cmd_catalog(catalog_common);
    if (*check_cmd) return cmd_check(check_common, check_points);
    if (*sweep_cmd) return cmd_sweep(sweep_common, sweep_grid);
    if (*curv_cmd) return cmd_curvature(curv_common, curv_points, curv_grid, curv_origin, curv_use_grid);
    if (*geo_cmd) return cmd_geodesic(geo_common, geo);
    if (*sphere_cmd) return cmd_sphere_length(sphere_common, sphere);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "expression error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
