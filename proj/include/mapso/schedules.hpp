#pragma once

// Per-iteration coefficient generation: the movement-pattern-adaptive schedule
// (MAPSO) and a registry of inertia-weight baselines.

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "mapso/pattern.hpp"
#include "mapso/rng.hpp"

namespace mapso {

/// Pattern schedule constants. Times t1 and t2 are fractions of t_max.
struct MapsoConfig {
  double v_max = 25.0;
  double v_min = 5.0;
  double rho_max = 0.8;
  double rho_min = 0.1;
  double f_max = 25.0;
  double f_min = 0.25;
  double t1_frac = 0.2;
  double t2_frac = 0.8;

  void validate() const;
};

struct ScheduleFeedback {
  double success_rate = 0.0;  // fraction of particles that improved their pbest last step
  std::size_t t = 0;
  std::size_t t_max = 1;

  void validate() const;
};

using ScheduleGenerator = std::function<IpsoParams(const ScheduleFeedback&, Rng&)>;

namespace schedule {

struct Constant {
  IpsoParams params;
};

struct Mapso {
  MapsoConfig config;
};

/// omega moves linearly from omega_start (t = 0) to omega_end (t = t_max).
struct LinearInertia {
  double omega_start = 0.9;
  double omega_end = 0.4;
  double c = 1.49618;
  double alpha = 1.0;
};

/// omega = 0.5 + u / 2 with u ~ U[0, 1) drawn once per iteration.
struct RandomInertia {
  double c = 1.49618;
  double alpha = 1.0;
};

/// omega = omega_min + (omega_max - omega_min) * success_rate.
struct SuccessRateInertia {
  double omega_min = 0.0;
  double omega_max = 1.0;
  double c = 1.49618;
  double alpha = 1.0;
};

/// User-supplied generator registered under a name.
struct Registered {
  std::string name;
  ScheduleGenerator generator;
};

}  // namespace schedule

using ScheduleSpec = std::variant<schedule::Constant, schedule::Mapso, schedule::LinearInertia,
                                  schedule::RandomInertia, schedule::SuccessRateInertia,
                                  schedule::Registered>;

/// Target V_c: v_max before t1, linear down to v_min at t2, v_min afterwards.
double mapso_vc(std::size_t t, std::size_t t_max, const MapsoConfig& cfg);

/// Target rho1: rho_min outside [t1, t2], a triangle peaking at rho_max at (t1 + t2) / 2.
double mapso_rho1(std::size_t t, std::size_t t_max, const MapsoConfig& cfg);

/// Target focus: f_min before t1, 1 on [t1, t2], f_max after t2.
double mapso_focus(std::size_t t, std::size_t t_max, const MapsoConfig& cfg);

MovementPattern mapso_pattern(std::size_t t, std::size_t t_max, const MapsoConfig& cfg);

/// Coefficients for the iteration described by feedback. Only RandomInertia
/// and Registered generators may draw from rng. Throws ScheduleError when the
/// result has a non-finite field.
IpsoParams coefficients_at(const ScheduleSpec& spec, const ScheduleFeedback& feedback, Rng& rng);

/// Short human-readable form, e.g. "linear-inertia(0.9->0.4, c=1.49618, alpha=1)".
std::string describe(const ScheduleSpec& spec);

namespace presets {
ScheduleSpec mapso();
/// Constant <0.711897, 1.711897, 1>.
ScheduleSpec icpso();
/// Linear decreasing inertia 0.9 -> 0.4.
ScheduleSpec ldwpso();
/// Linear increasing inertia 0.4 -> 0.9.
ScheduleSpec liwpso();
ScheduleSpec rwpso();
/// Success-rate adaptive inertia on [0, 1].
ScheduleSpec aiwpso();
}  // namespace presets

/// Name -> schedule lookup used by experiment plans and the CLI.
class ScheduleRegistry {
 public:
  /// Registry holding mapso, icpso, ldwpso, liwpso, rwpso and aiwpso.
  static ScheduleRegistry with_builtins();

  /// Throws InputError if the name is taken or empty.
  void register_schedule(const std::string& name, ScheduleGenerator generator);
  void register_spec(const std::string& name, ScheduleSpec spec);

  bool contains(const std::string& name) const { return specs_.count(name) != 0; }
  /// Throws InputError listing the registered names when unknown.
  const ScheduleSpec& resolve(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, ScheduleSpec> specs_;
};

}  // namespace mapso
