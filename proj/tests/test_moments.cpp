#include <doctest.h>

#include "mapso/errors.hpp"
#include "mapso/moments.hpp"
#include "mapso/rng.hpp"
#include "support.hpp"

using namespace mapso;

namespace {

CoefficientMoments deterministic(double w, double p1, double p2) { return {w, 0, p1, 0, p2, 0}; }

}  // namespace

TEST_CASE("derived expectations") {
  SUBCASE("zero attractors") {
    const auto e = derive_expectations(deterministic(0, 0.5, 0.5), {0, 0, 0, 0});
    CHECK(e.e_l == 0.0);
    CHECK(e.e_p == 0.0);
    CHECK(e.e_p2 == 0.0);
  }
  SUBCASE("E(l) of the low-correlation set") {
    const auto c = oracle::ipso_moments(0.73084, 1.6443, 1);
    const auto e = derive_expectations(c, {0, 1, 0, 1});
    CHECK(e.e_l == doctest::Approx(0.08654).epsilon(1e-12));
    // lag-1 correlation of the stationary solve times (omega + 1) recovers E(l)
    const auto st = oracle::stationary(build_moment_system(c, {0, 1, 0, 1}));
    CHECK(e.e_l == doctest::Approx(st.rho1 * 1.73084).epsilon(1e-9));
  }
  SUBCASE("deterministic coefficients make l deterministic") {
    const auto e = derive_expectations(deterministic(0.4, 0.3, 0.9), {1, 2, 3, 4});
    CHECK(e.e_l2 == doctest::Approx(e.e_l * e.e_l).epsilon(1e-15));
  }
  SUBCASE("E(l omega) matches a Monte Carlo of independent draws") {
    const CoefficientMoments c{0.6, 0.2, 0.7, 0.3, 0.5, 0.25};
    Rng rng(11);
    const double h = std::sqrt(3.0);
    double sum = 0, sq = 0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
      const double w = c.mu_omega + h * c.sigma_omega * (2 * rng.uniform() - 1);
      const double f1 = c.mu_phi1 + h * c.sigma_phi1 * (2 * rng.uniform() - 1);
      const double f2 = c.mu_phi2 + h * c.sigma_phi2 * (2 * rng.uniform() - 1);
      const double v = w * (1 + w - f1 - f2);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(expectation_l_omega(c) - mean) < 4 * se);
  }
}

TEST_CASE("moment system structure") {
  SUBCASE("deterministic coefficients, zero attractors give b = 0") {
    const auto s = build_moment_system(deterministic(0.5, 0.4, 0.6), {0, 0, 0, 0});
    for (double v : s.b) CHECK(v == 0.0);
  }
  SUBCASE("pure random search has E(l) = 0 in the mean row") {
    const auto s = build_moment_system(oracle::ipso_moments(0, 1, 1), {0, 1, 0, 1});
    CHECK(s.m[0][0] == doctest::Approx(0.0));
    CHECK(s.m[0][1] == doctest::Approx(0.0));
  }
  SUBCASE("shift rows") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const CoefficientMoments c{rng.uniform(-1, 1), rng.uniform(0, 1), rng.uniform(-1, 2),
                                 rng.uniform(0, 1), rng.uniform(-1, 2), rng.uniform(0, 1)};
      const AttractorMoments a{rng.uniform(-5, 5), rng.uniform(0, 3), rng.uniform(-5, 5), rng.uniform(0, 3)};
      const auto s = build_moment_system(c, a);
      const Vector5 row1{1, 0, 0, 0, 0}, row3{0, 0, 1, 0, 0};
      CHECK(s.m[1] == row1);
      CHECK(s.m[3] == row3);
      CHECK(s.b[1] == 0.0);
      CHECK(s.b[3] == 0.0);
    }
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(build_moment_system({0, -1, 0, 0, 0, 0}, {}), InputError);
    CHECK_THROWS_AS(build_moment_system({}, {std::nan(""), 0, 0, 0}), InputError);
  }
}

TEST_CASE("iteration") {
  SUBCASE("zero system stays at zero") {
    const MomentSystem s{};
    const auto traj = iterate_moments(s, MomentState{{1, 2, 3, 4, 5}}, 10);
    REQUIRE(traj.states.size() == 10);
    for (const auto& st : traj.states)
      for (double v : st.z) CHECK(v == 0.0);
  }
  SUBCASE("expectation of the classic constriction-equivalent set") {
    const auto c = oracle::ipso_moments(0.7298, 1.49618, 1);
    const AttractorMoments a{-2, 0, 6, 0};
    CHECK(expectation_fixed_point(c, a) == doctest::Approx(2.0).epsilon(1e-14));
    const auto it = iterate_to_fixed_point(build_moment_system(c, a), MomentState::from_positions(0, 0));
    REQUIRE(it.status == IterationStatus::converged);
    CHECK(it.state.mean() == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("expectation examples") {
    CHECK(expectation_fixed_point(deterministic(0, 0.3, 0.3), {0, 0, 10, 0}) == doctest::Approx(5));
    CHECK(expectation_fixed_point(deterministic(0, 1, 3), {0, 0, 4, 0}) == doctest::Approx(3));
    CHECK_THROWS_AS(expectation_fixed_point(deterministic(0, 1, -1), {0, 0, 4, 0}), DegenerateError);
  }
  SUBCASE("unstable parameters diverge") {
    for (double w : {-0.95, 0.0, 0.5, 0.95}) {
      for (double c : {4.0, 6.0, 9.0}) {
        const auto cm = oracle::ipso_moments(w, c, 1);
        const auto s = build_moment_system(cm, {1, 1, 2, 1});
        if (is_order2_convergent(cm) || oracle::spectral_radius(s.m) <= 1.0) continue;
        const auto traj = iterate_moments(s, MomentState::from_positions(0.3, -0.2), 1000);
        const double n0 = std::abs(traj.states.front().z[2]);
        const double n1 = traj.diverged ? INFINITY : std::abs(traj.states.back().z[2]);
        CHECK(n1 > 1e6 * std::max(1.0, n0));
      }
    }
  }
}

TEST_CASE("variance fixed point") {
  SUBCASE("no attractor spread, equal means") {
    CHECK(variance_fixed_point(oracle::ipso_moments(0.7298, 1.49618, 1), {3, 0, 3, 0}) == doctest::Approx(0.0));
  }
  SUBCASE("unstable input is rejected") {
    CHECK_THROWS_AS(variance_fixed_point(oracle::ipso_moments(0.9, 4.5, 1), {0, 1, 0, 1}), StabilityError);
  }
  SUBCASE("closed forms equal the direct linear solve") {
    Rng rng(21);
    int checked = 0;
    while (checked < 200) {
      const CoefficientMoments c{rng.uniform(-0.9, 0.95), rng.uniform(0, 0.3), rng.uniform(0.05, 2),
                                 rng.uniform(0, 0.8),     rng.uniform(-0.5, 2), rng.uniform(0, 0.8)};
      if (!is_order2_convergent(c) || c.mu_phi1 + c.mu_phi2 <= 0.01) continue;
      const AttractorMoments a{rng.uniform(-10, 10), rng.uniform(0, 5), rng.uniform(-10, 10), rng.uniform(0, 5)};
      const auto z = oracle::fixed_point(build_moment_system(c, a));
      const double vx = z[2] - z[0] * z[0];
      CHECK(expectation_fixed_point(c, a) == doctest::Approx(z[0]).epsilon(1e-9));
      CHECK(variance_fixed_point(c, a) == doctest::Approx(vx).epsilon(1e-8));
      ++checked;
    }
  }
}

TEST_CASE("convergence predicates") {
  CHECK(is_order1_convergent(deterministic(0.7298, 0.74809, 0.74809)));
  CHECK_FALSE(is_order1_convergent(deterministic(1.0, 0.5, 0.5)));
  CHECK_FALSE(is_order1_convergent(deterministic(0.0, 1.0, 1.0)));
  CHECK(is_order2_convergent(oracle::ipso_moments(0.7298, 1.49618, 1)));
  CHECK(is_order2_convergent(oracle::ipso_moments(0.711897, 1.711897, 1)));
  CHECK_FALSE(is_order2_convergent(oracle::ipso_moments(-1.0, 1.0, 1)));
}

TEST_CASE("spectral radius") {
  Matrix5 id{};
  for (int i = 0; i < 5; ++i) id[i][i] = 1.0;
  CHECK(spectral_radius(id) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(spectral_radius(Matrix5{}) == 0.0);
  CHECK(spectral_radius(build_moment_system(oracle::ipso_moments(0.7298, 1.49618, 1), {0, 1, 0, 1})) < 1.0);

  SUBCASE("agrees with a dense eigensolver") {
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
      const CoefficientMoments c{rng.uniform(-1.2, 1.2), rng.uniform(0, 0.5), rng.uniform(-0.5, 3),
                                 rng.uniform(0, 1),      rng.uniform(-0.5, 3), rng.uniform(0, 1)};
      const auto s = build_moment_system(c, {0, 1, 0, 1});
      const double expect = oracle::spectral_radius(s.m);
      CHECK(spectral_radius(s) == doctest::Approx(expect).epsilon(1e-6));
    }
  }
  SUBCASE("does not depend on the attractors") {
    const auto c = oracle::ipso_moments(0.6, 1.2, 1.5);
    const double r1 = spectral_radius(build_moment_system(c, {0, 1, 0, 1}));
    const double r2 = spectral_radius(build_moment_system(c, {-7, 3, 12, 0.5}));
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-10));
  }
}

TEST_CASE("fixed-point consistency over stable sets") {
  const auto sets = oracle::sample_stable_sets(40, 99);
  Rng rng(7);
  for (const auto& p : sets) {
    const auto c = oracle::ipso_moments(p.omega, p.c, p.alpha);
    const AttractorMoments a{rng.uniform(-5, 5), rng.uniform(0, 4), rng.uniform(-5, 5), rng.uniform(0, 4)};
    const auto it = iterate_to_fixed_point(build_moment_system(c, a), MomentState::from_positions(1, 0));
    REQUIRE(it.status == IterationStatus::converged);
    const double ex = expectation_fixed_point(c, a);
    const double vx = variance_fixed_point(c, a);
    CHECK(std::abs(it.state.mean() - ex) < 1e-8);
    CHECK(std::abs(it.state.variance() - vx) < 1e-8 * std::max(1.0, vx));
    CHECK(it.state.z[2] >= it.state.z[0] * it.state.z[0] - kVarianceSlack);
  }
}
