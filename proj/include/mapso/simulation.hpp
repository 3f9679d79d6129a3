#pragma once

// Monte Carlo runs of the single-particle recursion, plus the estimators used
// to check the closed forms against them.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "mapso/moments.hpp"
#include "mapso/pattern.hpp"

namespace mapso {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// p_t ~ U[p_range], g_t ~ U[g_range], independently every step.
struct IidUniformAttractors {
  Interval p_range{-9.0, 11.0};
  Interval g_range{-5.0, 15.0};
};

/// p_{t+1} = p_t + r_t / t and g_{t+1} = g_t + r'_t / t with r ~ U[step_range], t from 1.
struct RandomWalkAttractors {
  double p0 = 1.0;
  double g0 = 5.0;
  Interval step_range{-1.0, 1.0};
};

struct FixedAttractors {
  double p = 0.0;
  double g = 0.0;
};

using AttractorProcess = std::variant<IidUniformAttractors, RandomWalkAttractors, FixedAttractors>;

/// Throws InputError if any interval has lo >= hi or a value is non-finite.
void validate(const AttractorProcess& process);

/// Means and standard deviations of p and g for iid and fixed processes.
/// The random walk has no stationary moments and is rejected with InputError.
AttractorMoments attractor_moments(const AttractorProcess& process);

struct SimConfig {
  std::size_t iterations = 101'000;  // length of the position trace, x_0 included
  std::size_t burn_in = 1'000;
  std::uint64_t seed = 0;
  /// Initial positions; drawn uniformly over the p range (iid) or p +- 1
  /// (random walk, fixed) when absent.
  std::optional<double> x0;
  std::optional<double> x1;
  bool log_attractors = false;

  void validate() const;
};

struct SimTrace {
  std::vector<double> positions;
  /// When logged, p[t] and g[t] are the attractors used to produce x_{t+1};
  /// the first and last entries are NaN.
  std::vector<double> p;
  std::vector<double> g;
  bool diverged = false;
};

/// Runs the recursion with fresh coefficient and attractor draws every step.
///
/// Each random coefficient is uniform with the requested mean and standard
/// deviation, mu +- sqrt(3) sigma; for IpsoParams this is exactly
/// phi1 ~ U[0, c] and phi2 ~ U[0, alpha c]. Per step the draw order is
/// omega (only when sigma_omega > 0), phi1, phi2, then the attractor draws
/// (p before g). Initial positions, when not configured, are drawn first.
/// A position above 1e100 in magnitude stops the run with diverged = true.
SimTrace simulate(const CoefficientMoments& coeffs, const AttractorProcess& process,
                  const SimConfig& config);
SimTrace simulate(const IpsoParams& params, const AttractorProcess& process,
                  const SimConfig& config);

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

SampleMoments empirical_moments(const SimTrace& trace, std::size_t burn_in);

/// Lag-i Pearson correlation between the post-burn-in series and its i-shifted copy.
AutocorrelationSeq empirical_autocorrelation(const SimTrace& trace, std::size_t burn_in,
                                             std::size_t max_lag);

/// Mean of (x_{t+1} - x_t)^2 over the post-burn-in series.
double empirical_movement_distance(const SimTrace& trace, std::size_t burn_in);

/// (mean - mu_p)^2 / (mean - mu_g)^2 over the post-burn-in series.
double empirical_focus(const SimTrace& trace, std::size_t burn_in, double mu_p, double mu_g);

/// CSV with columns t,x,p,g (p and g empty unless logged).
void write_trace_csv(std::ostream& os, const SimTrace& trace);

}  // namespace mapso
