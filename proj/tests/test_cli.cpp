#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" UFINSLER_CLI_PATH "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("check exit codes", "[cli]") {
  CHECK(run("check --metric \"(1+s)^2\" --n 3 --random 100 --seed 7").code == 0);
  CHECK(run("check --metric \"1\" --n 2 --random 10").code == 0);

  const Run bad = run("check --metric \"4-s^2\" --n 3 --point-ts 1.7292,0.8646");
  CHECK(bad.code == 2);
  const auto rows = csv(bad.out);
  REQUIRE(rows.size() == 2);
  const double k_tilde = std::stod(rows[1][column(rows[0], "ktilde")]);
  CHECK(std::abs(k_tilde + 1.381) < 2e-3);
  CHECK(rows[1][column(rows[0], "pseudoconvex")] == "true");
  CHECK(rows[1][column(rows[0], "convex")] == "false");
}

TEST_CASE("check accepts explicit points", "[cli]") {
  const Run r = run("check --metric hermitian --n 2 --z 0.3+0.1i,0.2 --v 1,-0.5i --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["points"].size() == 1);
  // t = 0.09 + 0.01 + 0.04
  CHECK(std::abs(j["points"][0]["t"].get<double>() - 0.14) < 1e-15);
  CHECK(j["points"][0]["convex"] == "true");
}

TEST_CASE("sweep output", "[cli]") {
  const Run e = run("sweep --metric euclidean --t-range 0,1 --s-range 0,1 --grid 3");
  REQUIRE(e.code == 0);
  const auto rows = csv(e.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0].size() == 8);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][column(rows[0], "convex")] == "true");

  const Run f = run("sweep --metric \"4-s^2\" --t-range 0,1.7320508075688772 --s-range 0,1.7320508075688772 --grid 200");
  REQUIRE(f.code == 0);
  const auto frows = csv(f.out);
  bool yes = false, no = false;
  for (std::size_t i = 1; i < frows.size(); ++i) {
    const std::string& v = frows[i][column(frows[0], "convex")];
    yes = yes || v == "true";
    no = no || v == "false";
  }
  CHECK(yes);
  CHECK(no);

  const auto wrows = csv(run("sweep --metric wrona --t-range 0,2 --s-range 0,2 --grid 5").out);
  for (std::size_t i = 1; i < wrows.size(); ++i) {
    const bool diagonal = wrows[i][0] == wrows[i][1];
    CHECK((wrows[i][column(wrows[0], "excluded")] == "true") == diagonal);
  }
}

TEST_CASE("curvature output", "[cli]") {
  const auto origin = csv(run("curvature --metric \"(1-t+s)^2/(1-t)^3\" --origin").out);
  REQUIRE(origin.size() == 2);
  CHECK(std::stod(origin[1][column(origin[0], "K_F")]) == -6.0);

  const Run flat = run("curvature --metric \"exp(s-t)\" --random 50 --seed 3");
  REQUIRE(flat.code == 0);
  const auto rows = csv(flat.out);
  REQUIRE(rows.size() == 51);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::abs(std::stod(rows[i][column(rows[0], "K_F")])) < 1e-10);

  const auto euclid = csv(run("curvature --metric euclidean --random 5").out);
  for (std::size_t i = 1; i < euclid.size(); ++i) CHECK(std::stod(euclid[i][column(euclid[0], "K_F")]) == 0.0);
}

TEST_CASE("geodesic output", "[cli]") {
  const Run line = run("geodesic --metric euclidean --n 2 --x0 0,0,0,0 --u0 1,2,3,4 --step 0.5 --steps 2");
  REQUIRE(line.code == 0);
  const auto rows = csv(line.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][0] == "tau");
  CHECK(rows[3][1] == "1");
  CHECK(rows[3][4] == "4");

  const Run herm = run("geodesic --metric hermitian --z 0.4+0.1i,-0.2+0.3i --v 0.2-0.5i,0.6+0.1i --step 0.001 --steps 1000");
  REQUIRE(herm.code == 0);
  const auto hrows = csv(herm.out);
  REQUIRE(hrows.size() == 1002);
  const std::size_t f = column(hrows[0], "F");
  const double f0 = std::stod(hrows[1][f]);
  for (std::size_t i = 1; i < hrows.size(); ++i) CHECK(std::abs(std::stod(hrows[i][f]) - f0) / f0 < 1e-8);

  const Run abort = run("geodesic --metric wrona --n 2 --z 1,0 --v 1,0.3 --steps 5");
  CHECK(abort.code == 65);
  CHECK(abort.out.rfind("tau,", 0) == 0);
}

TEST_CASE("sphere-length output", "[cli]") {
  CHECK(run("sphere-length --metric bergman").code == 65);
  const Run e = run("sphere-length --metric euclidean --alpha 0.78539816339744828 --m 4096");
  REQUIRE(e.code == 0);
  const auto je = nlohmann::json::parse(e.out);
  CHECK(je["abs_err_vs_alpha"].get<double>() < 1e-6);
  CHECK(je["m"] == 4096);
  const auto jw = nlohmann::json::parse(run("sphere-length --metric wrona").out);
  CHECK(jw["abs_err_vs_alpha"].get<double>() < 1e-5);
  CHECK(std::abs(jw["L_m_sum"].get<double>() - jw["L_m_closed"].get<double>()) < 1e-12);
  // 17 significant digits
  CHECK(e.out.find("\"alpha\": 0.78539816339744828") != std::string::npos);
}

TEST_CASE("usage and expression errors", "[cli]") {
  CHECK(run("").code == 64);
  CHECK(run("no-such-command").code == 64);
  CHECK(run("check --n 1 --random 1").code == 64);
  CHECK(run("check --metric \"1+\" --random 1").code == 64);
  CHECK(run("check --metric \"foo(t)\" --random 1").code == 64);
  CHECK(run("check --metric euclidean --z 1,2 --v 0,0 --n 2").code == 65);
  CHECK(run("--help").code == 0);
}

TEST_CASE("output is deterministic", "[cli]") {
  const std::string args = "check --metric four-minus-s2 --random 200 --seed 11";
  const Run a = run(args + " --workers 1");
  const Run b = run(args + " --workers 6");
  const Run c = run(args, "UFINSLER_WORKERS=3");
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  CHECK(run(args + " --workers 1").out == a.out);
  CHECK(run("sweep --metric wrona --grid 40 --workers 1").out == run("sweep --metric wrona --grid 40 --workers 8").out);
  CHECK(run("curvature --metric bergman --random 30 --seed 2 --workers 1").out ==
        run("curvature --metric bergman --random 30 --seed 2 --workers 4").out);
}

TEST_CASE("help documents the conventions", "[cli]") {
  for (const char* sub : {"", "check", "sweep", "curvature", "geodesic", "sphere-length", "catalog"}) {
    INFO(sub);
    const Run r = run(std::string(sub) + " --help");
    CHECK(r.code == 0);
    CHECK(r.out.find("t = |z|^2") != std::string::npos);
    CHECK(r.out.find("s = |<z,v>|^2 / |v|^2") != std::string::npos);
  }
}

TEST_CASE("catalog lists every metric", "[cli]") {
  const auto j = nlohmann::json::parse(run("catalog --format json").out);
  CHECK(j.size() == 10);
  CHECK(j[0]["name"] == "euclidean");
}
