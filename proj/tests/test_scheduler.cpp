#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "netmimo/error.hpp"
#include "netmimo/scheduler.hpp"

using namespace netmimo;

TEST_CASE("proportional fairness splits evenly") {
  const auto p = schedule({4, 2, 1}, {UtilityKind::ProportionalFair});
  for (double r : p.rho) CHECK(r == 1.0 / 3.0);
  CHECK(p.rates[0] == doctest::Approx(4.0 / 3.0));
  CHECK(p.rates[1] == doctest::Approx(2.0 / 3.0));
  CHECK(p.rates[2] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("max-min equalizes the rates") {
  const auto p = schedule({4, 2, 1}, {UtilityKind::MaxMin});
  CHECK(p.rho[0] == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
  CHECK(p.rho[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-15));
  CHECK(p.rho[2] == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
  for (double r : p.rates) CHECK(r == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("random rate vectors") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 12.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> r(1 + rng() % 16);
    for (double& v : r) v = u(rng);
    const auto mm = schedule(r, {UtilityKind::MaxMin});
    double inv = 0.0;
    for (double v : r) inv += 1.0 / v;
    const auto [lo, hi] = std::minmax_element(mm.rates.begin(), mm.rates.end());
    CHECK(*hi - *lo < 1e-12);
    for (std::size_t k = 0; k < r.size(); ++k) CHECK(mm.rho[k] == doctest::Approx(1.0 / r[k] / inv).epsilon(1e-14));
    CHECK(std::accumulate(mm.rho.begin(), mm.rho.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));

    const auto pf = schedule(r, {UtilityKind::ProportionalFair});
    for (double x : pf.rho) CHECK(x == 1.0 / static_cast<double>(r.size()));
    const auto a1 = schedule(r, {UtilityKind::AlphaFair, 1.0});
    for (std::size_t k = 0; k < r.size(); ++k) CHECK(std::abs(a1.rho[k] - pf.rho[k]) < 1e-6);
  }
}

TEST_CASE("alpha-fair matches its stationarity condition") {
  // Maximizing sum (rho R)^(1-a)/(1-a) on the simplex gives rho ~ R^((1-a)/a).
  const std::vector<double> r{5.0, 2.5, 1.0, 0.4};
  for (double a : {0.5, 2.0, 4.0}) {
    const auto p = schedule(r, {UtilityKind::AlphaFair, a});
    std::vector<double> want(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) want[k] = std::pow(r[k], (1.0 - a) / a);
    const double s = std::accumulate(want.begin(), want.end(), 0.0);
    // The solver stops on a 1e-10 utility gain, which pins rho only to about
    // the square root of that; the utility itself must be at the optimum.
    std::vector<double> best(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
      CHECK(std::abs(p.rho[k] - want[k] / s) < 1e-4);
      best[k] = want[k] / s * r[k];
    }
    const double u_best = utility_of(best, {UtilityKind::AlphaFair, a});
    CHECK(p.utility_value <= u_best + 1e-12 * std::abs(u_best));
    CHECK(p.utility_value >= u_best - 1e-9 * std::max(1.0, std::abs(u_best)));
    CHECK(p.utility_value == doctest::Approx(utility_of(p.rates, {UtilityKind::AlphaFair, a})));
  }
  // Large alpha approaches max-min.
  const auto big = schedule(r, {UtilityKind::AlphaFair, 200.0});
  const auto mm = schedule(r, {UtilityKind::MaxMin});
  for (std::size_t k = 0; k < r.size(); ++k) CHECK(std::abs(big.rho[k] - mm.rho[k]) < 0.02);
}

TEST_CASE("single bin") {
  for (auto u : {Utility{UtilityKind::ProportionalFair}, Utility{UtilityKind::MaxMin}, Utility{UtilityKind::AlphaFair, 3.0}}) {
    const auto p = schedule({2.5}, u);
    REQUIRE(p.rho.size() == 1);
    CHECK(p.rho[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("scale equivariance") {
  const std::vector<double> r{3.0, 1.0, 7.0};
  std::vector<double> r2;
  for (double v : r) r2.push_back(2.5 * v);
  for (auto k : {UtilityKind::ProportionalFair, UtilityKind::MaxMin}) {
    const auto a = schedule(r, {k});
    const auto b = schedule(r2, {k});
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(b.rho[i] == doctest::Approx(a.rho[i]).epsilon(1e-14));
      CHECK(b.rates[i] == doctest::Approx(2.5 * a.rates[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("throughput") {
  SchedulePlan p;
  p.rates = {4.0, 3.5, 2.5};
  CHECK(system_throughput(p, 20e6) == doctest::Approx(200e6));
  const auto eq = schedule({1.7, 1.7, 1.7, 1.7}, {UtilityKind::ProportionalFair});
  CHECK(system_throughput(eq) == doctest::Approx(1.7 * 20e6));
}

TEST_CASE("simplex projection") {
  const auto p = project_to_simplex({0.5, 2.0, -1.0});
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(1.0));
  CHECK(p[2] == doctest::Approx(0.0));
  const auto q = project_to_simplex({0.2, 0.3, 0.1});
  CHECK(q[0] == doctest::Approx(0.2 + 0.4 / 3));
  CHECK(std::accumulate(q.begin(), q.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(schedule({1.0, 0.0}, {UtilityKind::ProportionalFair}), DomainError);
  CHECK_THROWS_AS(schedule({1.0, -2.0}, {UtilityKind::MaxMin}), DomainError);
  CHECK_THROWS_AS(schedule({}, {UtilityKind::MaxMin}), ConfigError);
  CHECK_THROWS_AS(parse_utility("fastest"), ConfigError);
  CHECK(parse_utility("alpha", 2.0).alpha == 2.0);
  CHECK(parse_utility("maxmin").kind == UtilityKind::MaxMin);
}
