#pragma once

// Global-best inertia PSO driven by a per-iteration coefficient schedule.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "mapso/pattern.hpp"
#include "mapso/rng.hpp"
#include "mapso/schedules.hpp"

namespace mapso {

/// Minimisation problem over the box [lower, upper]. The objective must accept
/// points outside the box (particles are never clamped) and be reentrant.
struct Problem {
  std::size_t dimension = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::function<double(std::span<const double>)> objective;

  bool contains(std::span<const double> x) const;
  void validate() const;
};

struct Particle {
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> pbest;
  double pbest_value = 0.0;
};

struct SwarmState {
  std::vector<Particle> particles;
  std::vector<double> gbest;
  double gbest_value = 0.0;
  std::size_t t = 0;
  std::size_t evals = 0;
  std::size_t improved_last_step = 0;
  std::size_t nonfinite_evals = 0;

  double success_rate() const;
};

struct SwarmOptions {
  /// A new position replaces the personal best only if it improves on it by
  /// more than this and lies inside the box.
  double epsilon0 = 0.0;
};

/// Positions uniform in the box (dimension-major draw order within a particle),
/// zero velocities, pbest = x, gbest = best pbest. Costs pop_size evaluations.
SwarmState initialize(const Problem& problem, std::size_t pop_size, Rng& rng);
SwarmState initialize(const Problem& problem, std::size_t pop_size, std::uint64_t seed);

/// One synchronous iteration: every particle draws phi1 = c u and
/// phi2 = alpha c u' per dimension (u, u' ~ U[0,1), so phi2 lies on [alpha c, 0]
/// when alpha c < 0), updates velocity then position, and is evaluated; the
/// global best is refreshed after all particles have moved. A non-finite
/// objective value counts as no improvement.
void step(SwarmState& state, const Problem& problem, const IpsoParams& coeffs, Rng& rng,
          const SwarmOptions& options = {});

struct HistoryPoint {
  std::size_t evals = 0;
  double best_value = 0.0;
};

struct RunResult {
  double best_value = 0.0;
  std::vector<double> best_position;
  std::vector<HistoryPoint> history;  // one point after initialisation and after every step
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  std::size_t evals = 0;
  std::size_t nonfinite_evals = 0;
};

/// Runs until evals >= budget_evals with t_max = budget_evals / pop_size.
/// The schedule sees t = number of completed steps and the success rate of the
/// previous step. One Rng seeded with `seed` drives initialisation, the
/// schedule and all coefficient draws, in that order.
RunResult run(const Problem& problem, const ScheduleSpec& schedule, std::size_t pop_size,
              std::size_t budget_evals, std::uint64_t seed, const SwarmOptions& options = {});

/// CSV with columns evals,best_value.
void write_history_csv(std::ostream& os, const RunResult& result);

}  // namespace mapso
