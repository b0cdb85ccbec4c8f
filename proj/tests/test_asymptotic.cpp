#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "netmimo/asymptotic.hpp"
#include "netmimo/error.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace netmimo;

TEST_CASE("single-user beamforming on the toy ring") {
  auto scn = support::ring(4, 1, 1, 1, 0.25, 1.0);
  scn.override_gains(support::toy_gains(scn.layout()));
  const SchemeConfig cfg{1, 1, 0, 1, 1.0, 2.0};
  const double xi = 1.0 / 2.21;
  const double eta = 1.21;
  const double zeta = 0.0201 / 2.21;
  const double sinr = 2.0 * xi / (1.0 + eta + 2.0 * zeta);
  const auto r = rate_lsubf(scn, cfg);
  CHECK(r.group_rate == doctest::Approx(std::log2(1.0 + sinr)).epsilon(1e-13));
  REQUIRE(r.coefficients.size() == 2);
  CHECK(r.coefficients[0].interference == doctest::Approx(eta));
  CHECK(r.coefficients[0].contamination == doctest::Approx(zeta));
  CHECK(r.coefficients[0].signal == doctest::Approx(xi));
}

TEST_CASE("single-cell zero forcing on the toy ring") {
  auto scn = support::ring(4, 1, 1, 2, 0.25, 1.0);
  scn.override_gains(support::toy_gains(scn.layout()));
  const SchemeConfig cfg{1, 1, 1, 2, 1.0, 2.0};
  // Noise 1/(alpha Q S) = 0.5, pilot set {0, 2}.
  const double xi000 = 1.0 / 1.51;
  const double alpha = 0.51 / 1.51 + 0.01 * (1.0 - 0.01 / 1.51) + 0.2;
  const double beta = 0.0001 / 1.51;
  const double sinr = xi000 / (1.0 + alpha + beta);
  const auto r = rate_lzfbf_single(scn, cfg);
  CHECK(r.group_rate == doctest::Approx(std::log2(1.0 + sinr)).epsilon(1e-13));
  CHECK(r.coefficients[1].interference == doctest::Approx(alpha));
  CHECK(r.coefficients[1].contamination == doctest::Approx(beta));
}

TEST_CASE("isolated cluster collapses to the own term") {
  // F = B leaves one active cluster, Q = 1 keeps it alone in its pilot set.
  const auto scn = support::ring(4, 1, 4, 1, 0.3);
  const SchemeConfig cfg{4, 1, 0, 1, 2.0, 10.0};
  const auto r = rate_lsubf(scn, cfg);
  double expected = 0.0;
  for (int x = 0; x < 2; ++x) {
    const auto t = link_coefficients(scn, x, 0, 0, cfg.S);
    expected += std::log2(1.0 + (cfg.M / cfg.S) * t.xi / (1.0 / cfg.F + t.g));
  }
  CHECK(r.group_rate == doctest::Approx(cfg.S / (2 * cfg.F) * expected).epsilon(1e-12));
}

TEST_CASE("closed forms match the reference evaluation") {
  const PathlossModel pl{1e6, 3.76, 0.05};
  for (double x : {0.025, 0.175, 0.325, 0.475}) {
    CAPTURE(x);
    for (int F : {1, 2, 3}) {
      for (int Q : {1, 2}) {
        const auto s1 = support::ring(24, 1, F, Q, x, 10.0, pl);
        for (double S : {0.5, 3.0}) {
          const SchemeConfig lsu{F, 1, 0, Q, S, 30.0};
          CHECK(rate_lsubf(s1, lsu).group_rate == doctest::Approx(oracle::lsubf(s1, lsu)).epsilon(1e-10));
          for (int J : {1, Q}) {
            const SchemeConfig zf{F, 1, J, Q, S, 30.0};
            CHECK(rate_lzfbf_single(s1, zf).group_rate == doctest::Approx(oracle::lzfbf_single(s1, zf)).epsilon(1e-10));
          }
        }
        const auto s2 = support::ring(24, 2, F, Q, x, 10.0, pl);
        for (double S : {0.5, 3.0}) {
          const SchemeConfig lsu{F, 2, 0, Q, S, 30.0};
          CHECK(rate_lsubf(s2, lsu).group_rate == doctest::Approx(oracle::lsubf(s2, lsu)).epsilon(1e-10));
          for (int J : {1, Q, 2 * (Q - 1) + 1}) {
            const SchemeConfig zf{F, 2, J, Q, S, 30.0};
            CHECK(rate_lzfbf_cluster(s2, zf).group_rate == doctest::Approx(oracle::lzfbf_cluster(s2, zf)).epsilon(1e-10));
          }
        }
      }
    }
  }
}

TEST_CASE("masked zero forcing counts the far BS as interference") {
  const auto scn = support::ring(24, 2, 1, 2, 0.1);
  const SchemeConfig masked{1, 2, 3, 2, 2.0, 30.0};
  const auto c = lzfbf_cluster_coefficients(scn, masked);
  const auto& cl = scn.clusters();
  for (int i = 0; i < 2; ++i) {
    const Point x = scn.bin().locations[static_cast<std::size_t>(i)];
    const auto E = nearest_zf_clusters(scn.layout(), cl, scn.reuse(), x, 3);
    REQUIRE(E.size() == 2);
    // The same zero-forcing set treated without masks nulls both BSs of
    // every cluster in E; masking leaves the far BS as full interference.
    double extra = 0.0;
    for (int e : E) {
      const int near = cl.closest_member(scn.layout(), x, e);
      for (int b = 0; b < 2; ++b) {
        if (b != near) extra += oracle::xi(scn, i, 0, cl.member(e, b), masked.S) / 2.0;
      }
    }
    const double unmasked = c[static_cast<std::size_t>(i)].interference - extra;
    CHECK(extra > 0.0);
    CHECK(c[static_cast<std::size_t>(i)].interference > unmasked);
    CHECK(unmasked > 0.0);
  }
  const auto one = lzfbf_cluster_coefficients(scn, {1, 2, 1, 2, 2.0, 30.0});
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(one[i].interference >= c[i].interference);
}

TEST_CASE("massive-MIMO limit") {
  for (double x : {0.025, 0.225, 0.475}) {
    const auto scn = support::ring(24, 1, 1, 1, x);
    const auto lim = rate_massive_limit(scn, {1, 1, 0, 1, 2.0, 1.0});
    const auto zf = rate_lzfbf_single(scn, {1, 1, 1, 1, 2.0, 1e8});
    CHECK(zf.group_rate == doctest::Approx(lim.group_rate).epsilon(1e-3));
    // Matched filtering keeps intra-cell interference of order g(x,0) S / M,
    // which with G0 = 1e6 needs far more than 1e8 antennas to vanish.
    double gap = 1e300;
    for (double M : {1e6, 1e8, 1e10, 1e13}) {
      const double g = lim.group_rate - rate_lsubf(scn, {1, 1, 0, 1, 2.0, M}).group_rate;
      CHECK(g >= 0.0);
      CHECK(g < gap);
      gap = g;
    }
    CHECK(gap < 1e-3 * lim.group_rate);
    // Reference: S/m * sum log2(1 + g0^2 / sum g_c^2).
    double ref = 0.0;
    for (int i = 0; i < 2; ++i) {
      double den = 0.0;
      for (int c = 1; c < 24; ++c) den += scn.gain(i, 0, c) * scn.gain(i, 0, c);
      ref += std::log2(1.0 + scn.gain(i, 0, 0) * scn.gain(i, 0, 0) / den);
    }
    CHECK(lim.group_rate == doctest::Approx(2.0 / 2.0 * ref).epsilon(1e-12));
  }
}

TEST_CASE("massive-MIMO limit is scale invariant and capped when isolated") {
  auto scn = support::ring(24, 1, 1, 1, 0.2);
  const SchemeConfig cfg{1, 1, 0, 1, 1.0, 1.0};
  const double before = rate_massive_limit(scn, cfg).group_rate;
  const Scenario copy = scn;
  scn.override_gains([&copy](int l, int s, int b) { return 0.5 * copy.gain(l, s, b); });
  CHECK(rate_massive_limit(scn, cfg).group_rate == doctest::Approx(before).epsilon(1e-14));

  auto iso = support::ring(4, 1, 4, 1, 0.2);
  const auto r = rate_massive_limit(iso, {4, 1, 0, 1, 1.0, 1.0});
  CHECK(r.sinr_capped);
  CHECK(std::isfinite(r.group_rate));
  CHECK(r.group_rate == doctest::Approx(1.0 / 4 * std::log2(1.0 + 1e6)));
}

TEST_CASE("overhead factor") {
  CHECK(overhead_factor(1, 4.0, 40.0) == doctest::Approx(0.9));
  CHECK(overhead_factor(2, 20.0, 40.0) == 0.0);
  CHECK(overhead_factor(3, 20.0, 40.0) == 0.0);
  const auto scn = support::ring(24, 1, 1, 1, 0.2);
  const auto r = net_rate(rate_lsubf(scn, {1, 1, 0, 1, 4.0, 30.0}), 1, 4.0, 40.0);
  CHECK(r.net_rate == doctest::Approx(0.9 * r.group_rate));
  CHECK(r.net_rate <= r.group_rate);
}

TEST_CASE("coefficients depend on loading only through alpha Q S") {
  const auto a = support::ring(24, 2, 1, 2, 0.3, 10.0);
  const auto b = support::ring(24, 2, 1, 2, 0.3, 5.0);
  const auto ca = lzfbf_cluster_coefficients(a, {1, 2, 2, 2, 1.0, 30.0});
  const auto cb = lzfbf_cluster_coefficients(b, {1, 2, 2, 2, 2.0, 70.0});
  for (std::size_t i = 0; i < ca.size(); ++i) {
    CHECK(ca[i].signal == doctest::Approx(cb[i].signal).epsilon(1e-14));
    CHECK(ca[i].interference == doctest::Approx(cb[i].interference).epsilon(1e-14));
    CHECK(ca[i].contamination == doctest::Approx(cb[i].contamination).epsilon(1e-14));
  }
  const auto la = lsubf_coefficients(a, {1, 2, 0, 2, 1.0, 30.0});
  const auto lb = lsubf_coefficients(b, {1, 2, 0, 2, 2.0, 5.0});
  for (std::size_t i = 0; i < la.size(); ++i) CHECK(la[i].interference == doctest::Approx(lb[i].interference).epsilon(1e-14));
}

TEST_CASE("zero-forcing rates grow with M") {
  const auto s1 = support::ring(24, 1, 1, 2, 0.3);
  const auto s2 = support::ring(24, 2, 1, 2, 0.3);
  double p1 = 0.0;
  double p2 = 0.0;
  for (double M : {5.0, 6.0, 10.0, 30.0, 100.0, 1e4}) {
    const double r1 = rate_lzfbf_single(s1, {1, 1, 2, 2, 2.0, M}).group_rate;
    const double r2 = rate_lzfbf_cluster(s2, {1, 2, 3, 2, 2.0, M}).group_rate;
    CHECK(r1 >= p1);
    CHECK(r2 >= p2);
    p1 = r1;
    p2 = r2;
  }
}

TEST_CASE("infeasible zero forcing") {
  const auto scn = support::ring(24, 1, 1, 2, 0.3);
  CHECK_THROWS_AS(rate_lzfbf_single(scn, {1, 1, 2, 2, 5.0, 10.0}), InfeasibleError);
  RateOptions opt;
  opt.zero_when_infeasible = true;
  CHECK(rate_lzfbf_single(scn, {1, 1, 2, 2, 5.0, 10.0}, opt).group_rate == 0.0);
  // Continuity toward the boundary.
  double prev = 1e300;
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-9}) {
    const double r = rate_lzfbf_single(scn, {1, 1, 2, 2, 5.0 * (1.0 - eps), 10.0}).group_rate;
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("scheme structure is validated") {
  CHECK_THROWS_AS(validate_scheme({1, 1, 2, 1, 1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(validate_scheme({1, 2, 4, 2, 1.0, 1.0}), ConfigError);
  CHECK_NOTHROW(validate_scheme({1, 2, 3, 2, 1.0, 1.0}));
  CHECK(scheme_label({2, 2, 1, 2, 1.0, 1.0}) == "(2,2,1)Q2");
  const auto scn = support::ring(24, 1, 1, 1, 0.3);
  CHECK_THROWS_AS(rate_lsubf(scn, {1, 1, 1, 1, 1.0, 10.0}), ConfigError);
  CHECK_THROWS_AS(rate_lsubf(scn, {2, 1, 0, 1, 1.0, 10.0}), ConfigError);
}

TEST_CASE("rates are invariant under relabeling by a lattice shift") {
  // Reading every link through the translate by two clusters (same subband and
  // codebook) must leave the rates unchanged.
  const auto scn = support::ring(24, 2, 1, 2, 0.3);
  auto shifted = scn;
  const auto& L = scn.layout();
  shifted.override_gains([&](int l, int s, int b) { return scn.gain(l, L.bs_add(s, 2), L.bs_add(b, 2)); });
  for (int J : {0, 1, 2, 3}) {
    const SchemeConfig cfg{1, 2, J, 2, 1.5, 20.0};
    CHECK(scheme_rate(shifted, cfg).group_rate == doctest::Approx(scheme_rate(scn, cfg).group_rate).epsilon(1e-12));
  }
}
