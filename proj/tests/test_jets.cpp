#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "ufinsler/jet.hpp"
#include "ufinsler/metric.hpp"

using namespace ufinsler;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

void require_jet(const Jet2& got, const Jet2& want, double tol = 1e-14) {
  CHECK_THAT(got.value, WithinAbs(want.value, tol));
  CHECK_THAT(got.dt, WithinAbs(want.dt, tol));
  CHECK_THAT(got.ds, WithinAbs(want.ds, tol));
  CHECK_THAT(got.dtt, WithinAbs(want.dtt, tol));
  CHECK_THAT(got.dts, WithinAbs(want.dts, tol));
  CHECK_THAT(got.dss, WithinAbs(want.dss, tol));
}

}  // namespace

TEST_CASE("seeded coordinates", "[jets]") {
  CHECK(jet_seed(Variable::t, 3.0, 1.0) == Jet2{3, 1, 0, 0, 0, 0});
  CHECK(jet_seed(Variable::s, 3.0, 1.0) == Jet2{1, 0, 1, 0, 0, 0});
  CHECK(jet_seed(Variable::t, 0.0, 0.0) == Jet2{0, 1, 0, 0, 0, 0});
}

TEST_CASE("product and quotient rules", "[jets]") {
  const Jet2 s = jet_seed(Variable::s, 2.0, 3.0);
  CHECK(s * s == Jet2{9, 0, 6, 0, 0, 2});

  const Jet2 t = jet_seed(Variable::t, 3.0, 1.0);
  const Jet2 s1 = jet_seed(Variable::s, 3.0, 1.0);
  require_jet(Jet2::constant(1.0) / (t - s1), Jet2{0.5, -0.25, 0.25, 0.25, -0.25, 0.25});

  const Jet2 t0 = jet_seed(Variable::t, 0.0, 0.0);
  const Jet2 s0 = jet_seed(Variable::s, 0.0, 0.0);
  require_jet(pow(1.0 + s0, 2L) / (1.0 - t0), Jet2{1, 1, 2, 2, 2, 2});
}

TEST_CASE("mixed partial of a product", "[jets]") {
  // (t s)_ts = 1
  const Jet2 t = jet_seed(Variable::t, 0.7, 0.2);
  const Jet2 s = jet_seed(Variable::s, 0.7, 0.2);
  require_jet(t * s, Jet2{0.14, 0.2, 0.7, 0, 1, 0});
}

TEST_CASE("elementary functions", "[jets]") {
  const double t0 = 0.8;
  const double s0 = 0.3;
  const Jet2 t = jet_seed(Variable::t, t0, s0);
  const Jet2 s = jet_seed(Variable::s, t0, s0);
  const double e = std::exp(s0 - t0);
  require_jet(exp(s - t), Jet2{e, -e, e, e, -e, e});
  // log(t + s): first partials 1/w, second -1/w^2
  const double w = t0 + s0;
  require_jet(log(t + s), Jet2{std::log(w), 1 / w, 1 / w, -1 / (w * w), -1 / (w * w), -1 / (w * w)});
  // sqrt(t): d = 1/(2 sqrt t), dd = -1/(4 t^{3/2})
  require_jet(sqrt(t), Jet2{std::sqrt(t0), 0.5 / std::sqrt(t0), 0, -0.25 / std::pow(t0, 1.5), 0, 0});
  // t^{1.5}
  require_jet(pow(t, 1.5), Jet2{std::pow(t0, 1.5), 1.5 * std::sqrt(t0), 0, 0.75 / std::sqrt(t0), 0, 0});
}

TEST_CASE("integer powers of negative bases are exact", "[jets]") {
  const Jet2 t = jet_seed(Variable::t, 3.0, 0.0);
  const Jet2 base = 1.0 - t;  // value -2
  // (1-t)^3 = -8, d/dt = -3(1-t)^2 = -12, d2/dt2 = 6(1-t) = -12
  require_jet(pow(base, 3L), Jet2{-8, -12, 0, -12, 0, 0});
  require_jet(pow(base, 3.0), Jet2{-8, -12, 0, -12, 0, 0});
  // (1-t)^-1 = -1/2, d/dt = 1/(1-t)^2 = 1/4, d2/dt2 = 2/(1-t)^3 = -1/4
  require_jet(pow(base, -1L), Jet2{-0.5, 0.25, 0, -0.25, 0, 0});
}

TEST_CASE("domain errors", "[jets]") {
  const Jet2 zero = Jet2::constant(0.0);
  const Jet2 neg = Jet2::constant(-1.0);
  CHECK_THROWS_AS(Jet2::constant(1.0) / zero, DomainError);
  CHECK_THROWS_AS(log(zero), DomainError);
  CHECK_THROWS_AS(log(neg), DomainError);
  CHECK_THROWS_AS(sqrt(neg), DomainError);
  CHECK_THROWS_AS(pow(neg, 0.5), DomainError);
  CHECK_THROWS_AS(pow(zero, -2L), DomainError);
}

TEST_CASE("constants carry no derivatives", "[jets]") {
  const Jet2 c = evaluate(parse_metric("2.5*exp(1)/3"), 0.4, 0.1);
  CHECK(c.dt == 0.0);
  CHECK(c.ds == 0.0);
  CHECK(c.dtt == 0.0);
  CHECK(c.dts == 0.0);
  CHECK(c.dss == 0.0);
}

TEST_CASE("polynomials of degree two have exact jets", "[jets][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng), e = u(rng), f = u(rng);
    const double t0 = u(rng), s0 = u(rng);
    const Jet2 t = jet_seed(Variable::t, t0, s0);
    const Jet2 s = jet_seed(Variable::s, t0, s0);
    const Jet2 p = a + b * t + c * s + d * t * t + e * t * s + f * s * s;
    const double value = a + b * t0 + c * s0 + d * t0 * t0 + e * t0 * s0 + f * s0 * s0;
    require_jet(p, Jet2{value, b + 2 * d * t0 + e * s0, c + e * t0 + 2 * f * s0, 2 * d, e, 2 * f},
                1e-13);
  }
}

TEST_CASE("addition and multiplication are associative and commutative", "[jets][property]") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  auto random_jet = [&] { return Jet2{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)}; };
  auto close = [](const Jet2& x, const Jet2& y) {
    const double fields_x[] = {x.value, x.dt, x.ds, x.dtt, x.dts, x.dss};
    const double fields_y[] = {y.value, y.dt, y.ds, y.dtt, y.dts, y.dss};
    for (int i = 0; i < 6; ++i) {
      const double scale = std::max({1.0, std::abs(fields_x[i]), std::abs(fields_y[i])});
      if (std::abs(fields_x[i] - fields_y[i]) > 1e-14 * scale * 8) return false;
    }
    return true;
  };
  for (int k = 0; k < 200; ++k) {
    const Jet2 a = random_jet(), b = random_jet(), c = random_jet();
    CHECK(close(a + b, b + a));
    CHECK(close(a * b, b * a));
    CHECK(close((a + b) + c, a + (b + c)));
    CHECK(close((a * b) * c, a * (b * c)));
  }
}

TEST_CASE("catalog jets agree with finite differences", "[jets][property]") {
  constexpr double h = 1e-5;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& metric : catalog()) {
    INFO(metric.name);
    int checked = 0;
    while (checked < 50) {
      const double t = metric.sample_t_max * (0.05 + 0.9 * unit(rng));
      const double s = t * (0.05 + 0.9 * unit(rng));
      if (!metric.guard.admits(t + 1e-3, s + 2e-3)) continue;
      ++checked;
      const Jet2 j = eval_phi(metric, t, s);
      auto f = [&](double tt, double ss) { return eval_phi(metric, tt, ss); };
      const double fd_t = (f(t + h, s).value - f(t - h, s).value) / (2 * h);
      const double fd_s = (f(t, s + h).value - f(t, s - h).value) / (2 * h);
      // Second partials as differences of the (exact) first partials.
      const double fd_tt = (f(t + h, s).dt - f(t - h, s).dt) / (2 * h);
      const double fd_ts = (f(t, s + h).dt - f(t, s - h).dt) / (2 * h);
      const double fd_ss = (f(t, s + h).ds - f(t, s - h).ds) / (2 * h);
      // Relative error; partials that vanish identically are compared on the scale 1.
      auto rel = [](double got, double want) {
        return std::abs(got - want) / std::max(1.0, std::abs(want));
      };
      CHECK(rel(j.dt, fd_t) < 1e-6);
      CHECK(rel(j.ds, fd_s) < 1e-6);
      CHECK(rel(j.dtt, fd_tt) < 1e-6);
      CHECK(rel(j.dts, fd_ts) < 1e-6);
      CHECK(rel(j.dss, fd_ss) < 1e-6);
    }
  }
}
