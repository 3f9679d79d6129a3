#include <doctest.h>

#include "mapso/errors.hpp"
#include "mapso/pattern.hpp"
#include "support.hpp"

using namespace mapso;

TEST_CASE("IPSO coefficient moments") {
  const double s12 = std::sqrt(12.0);
  auto m = ipso_to_moments({0, 1, 1});
  CHECK(m.mu_phi1 == 0.5);
  CHECK(m.mu_phi2 == 0.5);
  CHECK(m.sigma_phi1 == doctest::Approx(1 / s12));
  CHECK(m.sigma_phi2 == doctest::Approx(1 / s12));
  m = ipso_to_moments({0.7, 0, 1});
  CHECK(m.mu_phi1 == 0.0);
  CHECK(m.mu_phi2 == 0.0);
  CHECK(m.sigma_phi1 == 0.0);
  CHECK(m.sigma_phi2 == 0.0);
  m = ipso_to_moments({0.5, 2, -3});
  CHECK(m.mu_phi2 == -3.0);
  CHECK(m.sigma_phi2 == doctest::Approx(6 / s12));
}

TEST_CASE("lag-1 autocorrelation") {
  CHECK(rho1(ipso_to_moments({0.73084, 1.6443, 1})) == doctest::Approx(0.08654 / 1.73084).epsilon(1e-12));
  CHECK(rho1(ipso_to_moments({0.73084, 1.6443, 1})) == doctest::Approx(0.0500).epsilon(1e-3));
  CHECK(rho1(ipso_to_moments({0.98237, 0.19824, 1})) == doctest::Approx(0.9000).epsilon(1e-4));
  CHECK(rho1(ipso_to_moments({0, 1, 1})) == 0.0);
  CHECK_THROWS_AS(rho1(ipso_to_moments({-1, 1, 1})), DegenerateError);

  SUBCASE("equals the stationary correlation of the moment system") {
    for (const auto& p : oracle::sample_stable_sets(30, 4)) {
      const auto st = oracle::stationary(build_moment_system(ipso_to_moments(p), {1, 2, -3, 1}));
      CHECK(rho1(ipso_to_moments(p)) == doctest::Approx(st.rho1).epsilon(1e-9));
    }
  }
}

TEST_CASE("autocorrelation sequence") {
  SUBCASE("pure random search is uncorrelated at every lag") {
    const auto seq = autocorrelation(ipso_to_moments({0, 1, 1}), 20);
    REQUIRE(seq.max_lag() == 20);
    CHECK(seq[0] == 1.0);
    for (std::size_t i = 1; i <= 20; ++i) CHECK(seq[i] == 0.0);
  }
  SUBCASE("other stable sets have a non-zero lag") {
    for (const auto& p : oracle::sample_stable_sets(50, 8)) {
      const auto seq = autocorrelation(ipso_to_moments(p), 20);
      double biggest = 0;
      for (std::size_t i = 1; i <= 20; ++i) biggest = std::max(biggest, std::abs(seq[i]));
      CHECK(biggest > 1e-6);
    }
  }
  SUBCASE("rho1 = 1 gives rho2 = 1") {
    // mu_l = mu_omega + 1 means mu_phi1 + mu_phi2 = 0
    const CoefficientMoments c{0.4, 0, 0.3, 0, -0.3, 0};
    const auto seq = autocorrelation(c, 2);
    CHECK(seq[1] == doctest::Approx(1.0));
    CHECK(seq[2] == doctest::Approx(1.0));
  }
  SUBCASE("rho1 = 0 gives rho2 = -mu_omega") {
    const CoefficientMoments c{0.6, 0, 0.8, 0, 0.8, 0};
    const auto seq = autocorrelation(c, 2);
    CHECK(seq[1] == doctest::Approx(0.0));
    CHECK(seq[2] == doctest::Approx(-0.6));
  }
  SUBCASE("lag-2 closed form and boundedness") {
    for (const auto& p : oracle::sample_stable_sets(60, 12)) {
      const auto c = ipso_to_moments(p);
      const auto seq = autocorrelation(c, 100);
      const double s = c.mu_phi1 + c.mu_phi2;
      CHECK(std::abs(seq[2] - (1 - 2 * s + s * s / (c.mu_omega + 1))) < 1e-12);
      for (std::size_t i = 0; i <= 100; ++i) CHECK(std::abs(seq[i]) <= 1 + 1e-9);
    }
  }
  CHECK(autocorrelation(ipso_to_moments({0.5, 1, 1}), 0).rho.size() == 1);
}

TEST_CASE("movement distance") {
  CHECK(expected_movement_distance(3.7, 1.0) == 0.0);
  CHECK(expected_movement_distance(1.0, 0.0) == 2.0);
  CHECK_THROWS_AS(expected_movement_distance(-1.0, 0.0), InputError);
}

TEST_CASE("gamma") {
  CHECK(gamma_factor({4, 0, 4, 0}, 1.0) == 0.0);
  CHECK(gamma_factor({1, 1, 1, 7}, 0.0) == doctest::Approx(2.0));
  CHECK(gamma_factor({0, 1, 2, 1}, 1.0) == doctest::Approx(20.0));
}

TEST_CASE("coefficient part of the search range") {
  SUBCASE("product with gamma is the stationary variance") {
    Rng rng(17);
    for (const auto& p : oracle::sample_stable_sets(40, 16)) {
      const AttractorMoments a{rng.uniform(-5, 5), rng.uniform(0, 3), rng.uniform(-5, 5), rng.uniform(0, 3)};
      const auto st = oracle::stationary(build_moment_system(ipso_to_moments(p), a));
      CHECK(gamma_factor(a, p.alpha) * vc(p) == doctest::Approx(st.variance).epsilon(1e-9));
      CHECK(variance_fixed_point(ipso_to_moments(p), a) ==
            doctest::Approx(gamma_factor(a, p.alpha) * vc(p)).epsilon(1e-9));
    }
  }
  SUBCASE("classic set is positive") {
    const IpsoParams p{0.7298, 1.49618, 1};
    CHECK(vc(p) > 0);
    const AttractorMoments a{0, 1, 0, 1};
    CHECK(variance_fixed_point(ipso_to_moments(p), a) == doctest::Approx(gamma_factor(a, 1) * vc(p)).epsilon(1e-9));
  }
  SUBCASE("vanishes as c goes to zero") {
    CHECK(std::abs(vc({0.5, 1e-9, 1})) < 1e-9);
    CHECK(vc({0.5, 1e-6, 1}) > vc({0.5, 1e-9, 1}));
  }
  SUBCASE("c_for_vc") {
    CHECK(c_for_vc(2.0, 1.0, 1.0) == 0.0);
    const IpsoParams p = solve_coefficients({0.8, 3.0, 1.0});
    CHECK(c_for_vc(3.0, p.omega, 1.0) == doctest::Approx(p.c).epsilon(1e-10));
    CHECK_THROWS_AS(c_for_vc(0.0, 0.5, 1.0), InputError);
    CHECK(vc({0.3, c_for_vc(0.7, 0.3, 2.0), 2.0}) == doctest::Approx(0.7).epsilon(1e-12));
  }
}

TEST_CASE("focus") {
  CHECK(focus(ipso_to_moments({0.5, 1, 1})) == 1.0);
  CHECK(focus(ipso_to_moments({0.5, 1, -3})) == doctest::Approx(9.0));
  CHECK(focus({0, 0, 0.2, 0, 0.4, 0}) == doctest::Approx(4.0));
  CHECK_THROWS_AS(focus({0, 0, 0, 0, 0.4, 0}), DegenerateError);
}

TEST_CASE("solve coefficients") {
  SUBCASE("worked example") {
    const auto p = solve_coefficients({0.5, 1.0, 1.0});
    CHECK(range_terms(1.0).m1 == 20.0);
    CHECK(range_terms(1.0).m2 == 28.0);
    CHECK(p.omega == doctest::Approx(33.5 / 38.5).epsilon(1e-12));
    CHECK(p.c == doctest::Approx(0.935065).epsilon(1e-6));
    CHECK(p.alpha == 1.0);
  }
  SUBCASE("four crossing points") {
    struct Case {
      double vc, rho, omega, c;
    };
    // frozen from an independent evaluation of the crossing conditions
    const Case cases[] = {{0.1, -0.8, -0.68, 0.576},
                          {8, -0.1, 0.652798, 1.818077},
                          {0.15, 0.1, 0.466667, 1.32},
                          {3, 0.8, 0.960666, 0.392133}};
    for (const auto& k : cases) {
      const auto p = solve_coefficients({k.rho, k.vc, 1.0});
      CHECK(p.omega == doctest::Approx(k.omega).epsilon(2e-6));
      CHECK(p.c == doctest::Approx(k.c).epsilon(2e-6));
      CHECK(rho1(ipso_to_moments(p)) == doctest::Approx(k.rho).epsilon(1e-12));
      CHECK(vc(p) == doctest::Approx(k.vc).epsilon(1e-12));
    }
  }
  SUBCASE("pattern schedule start") {
    const auto p = solve_coefficients({0.1, 25, 0.25});
    CHECK(p.alpha == 0.5);
    CHECK(p.omega == doctest::Approx(0.730366).epsilon(2e-6));
    CHECK(p.c == doctest::Approx(2.076439).epsilon(2e-6));
  }
  SUBCASE("rho1 = 0 target") {
    const auto p = solve_coefficients({0.0, 1.0, 1.0});
    CHECK(std::abs(rho1(ipso_to_moments(p))) < 1e-12);
  }
  SUBCASE("round trip and stability over the grid") {
    const double vcs[] = {0.05, 0.1, 0.15, 0.5, 1, 3, 8, 30};
    const double fs[] = {0.04, 0.25, 1, 4, 25};
    int solved = 0;
    for (int ri = -9; ri <= 9; ++ri) {
      const double r = ri / 10.0;
      for (double v : vcs) {
        for (double f : fs) {
          for (int sign : {1, -1}) {
            if (sign == -1 && f == 1) {
              CHECK_THROWS_AS(solve_coefficients({r, v, f}, sign), DegenerateError);
              continue;
            }
            const auto p = solve_coefficients({r, v, f}, sign);
            const auto m = ipso_to_moments(p);
            CHECK(relative_close(rho1(m), r, 1e-9));
            CHECK(relative_close(vc(p), v, 1e-9));
            CHECK(relative_close(focus(m), f, 1e-9));
            CHECK(ipso_is_convergent(p));
            CHECK(is_order2_convergent(m));
            ++solved;
          }
        }
      }
    }
    CHECK(solved == 19 * 8 * 5 * 2 - 19 * 8);
  }
  SUBCASE("invalid targets") {
    CHECK_THROWS_WITH_AS(solve_coefficients({1.0, 1, 1}), "rho1 must lie in (-1,1)", InputError);
    CHECK_THROWS_AS(solve_coefficients({-1.0, 1, 1}), InputError);
    CHECK_THROWS_AS(solve_coefficients({0.5, 0, 1}), InputError);
    CHECK_THROWS_AS(solve_coefficients({0.5, 1, -2}), InputError);
    CHECK_THROWS_AS(solve_coefficients({0.5, 1, 1}, 0), InputError);
  }
}

TEST_CASE("IPSO stability conditions") {
  CHECK(ipso_is_convergent({0.711897, 1.711897, 1}));
  CHECK_FALSE(ipso_is_convergent({0, 1, -1}));
  const auto s = ipso_stability({0.9, 4.5, 1});
  CHECK(s.attraction == doctest::Approx(9.0));
  CHECK(s.attraction_bound == doctest::Approx(7.6));
  CHECK_FALSE(s.convergent());
  SUBCASE("agrees with the general variance condition") {
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
      const IpsoParams p{rng.uniform(-1.2, 1.2), rng.uniform(-1, 4), rng.uniform(-2, 3)};
      CHECK(ipso_is_convergent(p) == is_order2_convergent(ipso_to_moments(p)));
    }
  }
}
