#pragma once

// First- and second-order moment dynamics of the single-particle recursion
//
//   x_{t+1} = l x_t - w x_{t-1} + phi1 p + phi2 g,   l = 1 + w - phi1 - phi2,
//
// where w, phi1, phi2, p and g are independent random variables redrawn every
// step with the given means and standard deviations.

#include <array>
#include <cstddef>
#include <vector>

namespace mapso {

/// Means and standard deviations of the random coefficients w, phi1, phi2.
struct CoefficientMoments {
  double mu_omega = 0.0;
  double sigma_omega = 0.0;
  double mu_phi1 = 0.0;
  double sigma_phi1 = 0.0;
  double mu_phi2 = 0.0;
  double sigma_phi2 = 0.0;

  /// Throws InputError on a negative or non-finite field.
  void validate() const;
};

/// Means and standard deviations of the personal (p) and global (g) best.
struct AttractorMoments {
  double mu_p = 0.0;
  double sigma_p = 0.0;
  double mu_g = 0.0;
  double sigma_g = 0.0;

  double second_moment_p() const { return sigma_p * sigma_p + mu_p * mu_p; }
  double second_moment_g() const { return sigma_g * sigma_g + mu_g * mu_g; }

  void validate() const;
};

using Vector5 = std::array<double, 5>;
using Matrix5 = std::array<Vector5, 5>;

/// z_{t+1} = m z_t + b over z = [E x_t, E x_{t-1}, E x_t^2, E x_{t-1}^2, E x_t x_{t-1}].
struct MomentSystem {
  Matrix5 m{};
  Vector5 b{};

  Vector5 apply(const Vector5& z) const;
};

struct MomentState {
  Vector5 z{};

  double mean() const { return z[0]; }
  double variance() const { return z[2] - z[0] * z[0]; }
  /// Covariance of consecutive positions.
  double lag1_covariance() const { return z[4] - z[0] * z[1]; }

  /// State of a particle sitting at two known positions.
  static MomentState from_positions(double x_now, double x_prev);
};

/// Expectations that populate the moment matrix.
struct DerivedExpectations {
  double e_l = 0.0;
  double e_omega2 = 0.0;
  double e_phi1_2 = 0.0;
  double e_phi2_2 = 0.0;
  double e_omega_p = 0.0;
  double e_l2 = 0.0;
  double e_p = 0.0;
  double e_p2 = 0.0;
  double e_lp = 0.0;
};

/// Intermediate terms of the closed-form variance fixed point.
struct VarianceTerms {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
};

DerivedExpectations derive_expectations(const CoefficientMoments& coeffs,
                                        const AttractorMoments& attractors);

/// E(l w) under independence of w from phi1 and phi2.
double expectation_l_omega(const CoefficientMoments& coeffs);

MomentSystem build_moment_system(const CoefficientMoments& coeffs,
                                 const AttractorMoments& attractors);

/// Any state component above this magnitude is reported as divergence.
inline constexpr double kDivergenceThreshold = 1e100;

/// Slack allowed when checking E(x^2) >= E(x)^2 on iterated states.
inline constexpr double kVarianceSlack = 1e-9;

struct MomentTrajectory {
  std::vector<MomentState> states;  // z_1 .. z_n (shorter when diverged)
  bool diverged = false;
};

/// Runs exactly `steps` updates (fewer if a component passes the divergence threshold).
MomentTrajectory iterate_moments(const MomentSystem& system, const MomentState& z0,
                                 std::size_t steps);

struct FixedPointOptions {
  /// Stop when ||z_{t+1} - z_t||_inf <= tol * max(1, ||z_{t+1}||_inf).
  double tol = 1e-12;
  std::size_t max_steps = 1'000'000;
};

enum class IterationStatus { converged, max_steps, diverged };

struct FixedPointIteration {
  MomentState state;
  std::size_t steps = 0;
  IterationStatus status = IterationStatus::max_steps;
};

FixedPointIteration iterate_to_fixed_point(const MomentSystem& system,
                                           const MomentState& z0,
                                           const FixedPointOptions& options = {});

/// E_x = (mu_phi1 mu_p + mu_phi2 mu_g) / (mu_phi1 + mu_phi2).
double expectation_fixed_point(const CoefficientMoments& coeffs,
                               const AttractorMoments& attractors);

VarianceTerms variance_terms(const CoefficientMoments& coeffs,
                             const AttractorMoments& attractors);

/// V_x = -(k3 + k4) / (k1 k2) * (mu_omega + 1).
/// Throws StabilityError unless is_order2_convergent(coeffs).
double variance_fixed_point(const CoefficientMoments& coeffs,
                            const AttractorMoments& attractors);

bool is_order1_convergent(const CoefficientMoments& coeffs);

/// The k2 term; negative k2 is the third variance-convergence condition.
double order2_k2(const CoefficientMoments& coeffs);

bool is_order2_convergent(const CoefficientMoments& coeffs);

/// Dominant eigenvalue magnitude by power iteration.
///
/// Each iteration fits both a single dominant real eigenvalue (||M u||) and a
/// dominant pair (least-squares fit of M^2 u = a M u + b u, roots of
/// x^2 - a x - b) and keeps whichever leaves the smaller residual, so complex
/// dominant pairs converge too. The estimate is accepted once it changes by at
/// most tol * max(1, estimate) for three consecutive iterations.
///
/// Restart on stall: if the iterate is annihilated (M u = 0) or max_iter passes
/// without convergence, the iteration restarts from the next of four fixed
/// start vectors. If every start is annihilated the radius is 0. Otherwise a
/// ConvergenceError is thrown, which says nothing about whether M is stable.
double spectral_radius(const Matrix5& m, double tol = 1e-12, std::size_t max_iter = 100'000);

inline double spectral_radius(const MomentSystem& system, double tol = 1e-12,
                              std::size_t max_iter = 100'000) {
  return spectral_radius(system.m, tol, max_iter);
}

}  // namespace mapso
