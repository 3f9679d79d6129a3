#pragma once

// Movement-pattern quantities of the inertia-weight PSO particle and the
// closed-form inverse from a desired pattern to coefficients.

#include <cstddef>
#include <vector>

#include "mapso/moments.hpp"

namespace mapso {

/// Inertia PSO coefficients: phi1 ~ U[0, c], phi2 ~ U[0, alpha c], constant omega.
struct IpsoParams {
  double omega = 0.0;
  double c = 0.0;
  double alpha = 1.0;
};

/// Target movement pattern: lag-1 autocorrelation, search-range coefficient, focus.
struct MovementPattern {
  double rho1 = 0.0;
  double vc = 1.0;
  double focus = 1.0;

  /// Throws InputError unless rho1 in (-1, 1), vc > 0 and focus > 0.
  void validate() const;
};

/// rho[i] is the equilibrium correlation between x_{t+1} and x_{t+1-i}.
struct AutocorrelationSeq {
  std::vector<double> rho;

  std::size_t max_lag() const { return rho.empty() ? 0 : rho.size() - 1; }
  double operator[](std::size_t lag) const { return rho[lag]; }
};

CoefficientMoments ipso_to_moments(const IpsoParams& params);

/// mu_l / (mu_omega + 1).
double rho1(const CoefficientMoments& coeffs);

/// rho_0 = 1, rho_1 = rho1(coeffs), rho_i = mu_l rho_{i-1} - mu_omega rho_{i-2}.
AutocorrelationSeq autocorrelation(const CoefficientMoments& coeffs, std::size_t max_lag);

/// Equilibrium mean squared step length, 2 vx (1 - rho1).
double expected_movement_distance(double vx, double rho1);

/// Attractor-dependent factor in V_x = gamma * V_c.
double gamma_factor(const AttractorMoments& attractors, double alpha);

/// The m1, m2 polynomials in alpha that appear in V_c.
struct RangeTerms {
  double m1;
  double m2;
};
RangeTerms range_terms(double alpha);

/// Coefficient-only search-range factor V_c.
double vc(const IpsoParams& params);

/// The c that gives the requested V_c for fixed omega and alpha.
double c_for_vc(double vc, double omega, double alpha);

/// (mu_phi2 / mu_phi1)^2; alpha^2 for inertia PSO.
double focus(const CoefficientMoments& coeffs);

/// Closed-form (omega, c) achieving target.rho1 and target.vc with
/// alpha = alpha_sign * sqrt(target.focus). The result is substituted back and
/// a ConsistencyError is thrown if rho1 or V_c misses by more than 1e-9 relative.
IpsoParams solve_coefficients(const MovementPattern& target, int alpha_sign = +1);

/// The three inertia-PSO variance-convergence conditions, with their values.
struct IpsoStability {
  bool omega_in_range = false;   // -1 < omega < 1
  bool attraction_in_range = false;  // 0 < c (1 + alpha) < 4 (1 + omega)
  bool k2_negative = false;
  double attraction = 0.0;  // c (1 + alpha)
  double attraction_bound = 0.0;  // 4 (1 + omega)
  double k2 = 0.0;

  bool convergent() const { return omega_in_range && attraction_in_range && k2_negative; }
};

IpsoStability ipso_stability(const IpsoParams& params);

bool ipso_is_convergent(const IpsoParams& params);

/// |actual - expected| <= rel * |expected|, or <= abs_floor when expected is 0.
bool relative_close(double actual, double expected, double rel, double abs_floor = 1e-12);

}  // namespace mapso
