#pragma once

// Independent oracles and shared fixtures for the unit and acceptance tests.
// Nothing here calls the closed forms under test.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mapso/moments.hpp"
#include "mapso/pattern.hpp"
#include "mapso/rng.hpp"

namespace oracle {

inline Eigen::Matrix<double, 5, 5> to_eigen(const mapso::Matrix5& m) {
  Eigen::Matrix<double, 5, 5> e;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) e(i, j) = m[i][j];
  return e;
}

/// Solves (I - M) z = b directly.
inline mapso::Vector5 fixed_point(const mapso::MomentSystem& s) {
  Eigen::Matrix<double, 5, 1> b;
  for (int i = 0; i < 5; ++i) b(i) = s.b[i];
  const Eigen::Matrix<double, 5, 5> a = Eigen::Matrix<double, 5, 5>::Identity() - to_eigen(s.m);
  const Eigen::Matrix<double, 5, 1> z = a.fullPivLu().solve(b);
  mapso::Vector5 out{};
  for (int i = 0; i < 5; ++i) out[i] = z(i);
  return out;
}

inline double spectral_radius(const mapso::Matrix5& m) {
  Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> es(to_eigen(m), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Spectral radius of the block that propagates second moments (rows and
/// columns of x_t^2, x_{t-1}^2, x_t x_{t-1}).
inline double second_moment_radius(const mapso::MomentSystem& s) {
  Eigen::Matrix3d b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = s.m[i + 2][j + 2];
  Eigen::EigenSolver<Eigen::Matrix3d> es(b, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Fixed-point variance and lag-1 correlation read off the linear solve.
struct StationaryStats {
  double mean;
  double variance;
  double rho1;
};

inline StationaryStats stationary(const mapso::MomentSystem& s) {
  const auto z = fixed_point(s);
  const double var = z[2] - z[0] * z[0];
  return {z[0], var, (z[4] - z[0] * z[1]) / var};
}

/// Coefficient moments of IPSO<omega, c, alpha> straight from the uniform laws
/// phi1 ~ U[0,c], phi2 ~ U[0,alpha c].
inline mapso::CoefficientMoments ipso_moments(double omega, double c, double alpha) {
  return {omega, 0.0, c / 2.0, std::abs(c) / std::sqrt(12.0), alpha * c / 2.0,
          std::abs(alpha * c) / std::sqrt(12.0)};
}

/// Attractor moments of iid uniforms on [plo, phi] and [glo, ghi].
inline mapso::AttractorMoments uniform_attractors(double plo, double phi, double glo, double ghi) {
  return {(plo + phi) / 2.0, (phi - plo) / std::sqrt(12.0), (glo + ghi) / 2.0, (ghi - glo) / std::sqrt(12.0)};
}

/// Stable IPSO sets from a well-conditioned region: omega in [-0.5, 0.9],
/// alpha in [0.5, 2], attraction c (1 + alpha) in [0.2, 2], second-moment
/// block radius at most 0.8 so 10^5-step Monte Carlo estimates settle.
inline std::vector<mapso::IpsoParams> sample_stable_sets(std::size_t n, std::uint64_t seed) {
  mapso::Rng rng(seed);
  const auto att = uniform_attractors(-9, 11, -5, 15);
  std::vector<mapso::IpsoParams> out;
  while (out.size() < n) {
    const double omega = rng.uniform(-0.5, 0.9);
    const double alpha = rng.uniform(0.5, 2.0);
    const double s = rng.uniform(0.2, 2.0);
    const mapso::IpsoParams p{omega, s / (1.0 + alpha), alpha};
    if (!mapso::ipso_is_convergent(p)) continue;
    const auto sys = mapso::build_moment_system(ipso_moments(p.omega, p.c, p.alpha), att);
    if (second_moment_radius(sys) > 0.8) continue;
    out.push_back(p);
  }
  return out;
}

/// Two-sided rank-sum p-value by enumerating every way to choose |a| pooled
/// positions. Pooled size must stay small (C(16,8) = 12870 subsets).
inline double rank_sum_p_bruteforce(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const std::size_t n1 = a.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (pooled[j] < pooled[i]) ++less;
      if (pooled[j] == pooled[i]) ++equal;
    }
    rank[i] = less + (equal + 1.0) / 2.0;
  }
  double observed = 0;
  for (std::size_t i = 0; i < n1; ++i) observed += rank[i];
  const double centre = static_cast<double>(n1) * static_cast<double>(n + 1) / 2.0;
  const double dev = std::abs(observed - centre);

  std::size_t hits = 0, total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s += rank[i];
    ++total;
    if (std::abs(s - centre) >= dev - 1e-9) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace oracle
