#include "mapso/swarm.hpp"

#include <cmath>
#include <ostream>

#include "mapso/errors.hpp"
#include "mapso/format.hpp"

namespace mapso {

bool Problem::contains(std::span<const double> x) const {
  for (std::size_t j = 0; j < dimension; ++j) {
    if (!(x[j] >= lower[j] && x[j] <= upper[j])) return false;
  }
  return true;
}

void Problem::validate() const {
  if (dimension == 0) throw InputError("problem dimension must be positive");
  if (lower.size() != dimension || upper.size() != dimension) {
    throw InputError("problem bounds must have one entry per dimension");
  }
  for (std::size_t j = 0; j < dimension; ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) || !(lower[j] < upper[j])) {
      throw InputError("problem bounds must be finite with lower < upper");
    }
  }
  if (!objective) throw InputError("problem has no objective");
}

double SwarmState::success_rate() const {
  if (particles.empty()) return 0.0;
  return static_cast<double>(improved_last_step) / static_cast<double>(particles.size());
}

namespace {

void refresh_gbest(SwarmState& s) {
  for (const Particle& p : s.particles) {
    if (p.pbest_value < s.gbest_value) {
      s.gbest_value = p.pbest_value;
      s.gbest = p.pbest;
    }
  }
}

}  // namespace

SwarmState initialize(const Problem& problem, std::size_t pop_size, Rng& rng) {
  problem.validate();
  if (pop_size < 2) throw InputError("population size must be at least 2");
  const std::size_t d = problem.dimension;

  SwarmState s;
  s.particles.resize(pop_size);
  for (Particle& p : s.particles) {
    p.x.resize(d);
    for (std::size_t j = 0; j < d; ++j) p.x[j] = rng.uniform(problem.lower[j], problem.upper[j]);
    p.v.assign(d, 0.0);
    p.pbest = p.x;
    p.pbest_value = problem.objective(p.x);
    if (!std::isfinite(p.pbest_value)) {
      ++s.nonfinite_evals;
      p.pbest_value = HUGE_VAL;
    }
  }
  s.evals = pop_size;
  s.gbest = s.particles.front().pbest;
  s.gbest_value = s.particles.front().pbest_value;
  refresh_gbest(s);
  return s;
}

SwarmState initialize(const Problem& problem, std::size_t pop_size, std::uint64_t seed) {
  Rng rng(seed);
  return initialize(problem, pop_size, rng);
}

void step(SwarmState& s, const Problem& problem, const IpsoParams& coeffs, Rng& rng,
          const SwarmOptions& options) {
  const std::size_t d = problem.dimension;
  const double c1 = coeffs.c;
  const double c2 = coeffs.alpha * coeffs.c;
  std::size_t improved = 0;

  for (Particle& p : s.particles) {
    for (std::size_t j = 0; j < d; ++j) {
      const double phi1 = c1 * rng.uniform();
      const double phi2 = c2 * rng.uniform();
      p.v[j] = coeffs.omega * p.v[j] + phi1 * (p.pbest[j] - p.x[j]) + phi2 * (s.gbest[j] - p.x[j]);
      p.x[j] += p.v[j];
    }
    const double value = problem.objective(p.x);
    if (!std::isfinite(value)) {
      ++s.nonfinite_evals;
      continue;
    }
    if (value < p.pbest_value - options.epsilon0 && problem.contains(p.x)) {
      p.pbest = p.x;
      p.pbest_value = value;
      ++improved;
    }
  }
  s.evals += s.particles.size();
  s.improved_last_step = improved;
  ++s.t;
  refresh_gbest(s);
}

RunResult run(const Problem& problem, const ScheduleSpec& schedule, std::size_t pop_size,
              std::size_t budget_evals, std::uint64_t seed, const SwarmOptions& options) {
  if (budget_evals < pop_size) throw InputError("evaluation budget is smaller than the population");
  Rng rng(seed);
  SwarmState s = initialize(problem, pop_size, rng);
  const std::size_t t_max = budget_evals / pop_size;

  RunResult out;
  out.seed = seed;
  out.history.push_back({s.evals, s.gbest_value});
  while (s.evals < budget_evals) {
    ScheduleFeedback fb;
    fb.t = s.t;
    fb.t_max = t_max;
    fb.success_rate = s.success_rate();
    const IpsoParams coeffs = coefficients_at(schedule, fb, rng);
    step(s, problem, coeffs, rng, options);
    out.history.push_back({s.evals, s.gbest_value});
  }
  out.best_value = s.gbest_value;
  out.best_position = s.gbest;
  out.steps = s.t;
  out.evals = s.evals;
  out.nonfinite_evals = s.nonfinite_evals;
  return out;
}

void write_history_csv(std::ostream& os, const RunResult& result) {
  os << "evals,best_value\n";
  for (const auto& h : result.history) os << h.evals << ',' << format_double(h.best_value) << '\n';
}

}  // namespace mapso
