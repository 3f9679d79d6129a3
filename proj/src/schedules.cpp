#include "mapso/schedules.hpp"

#include <cmath>
#include <sstream>

#include "mapso/errors.hpp"
#include "mapso/format.hpp"

namespace mapso {

void MapsoConfig::validate() const {
  if (!(v_max > v_min && v_min > 0.0)) throw InputError("mapso: need v_max > v_min > 0");
  if (!(rho_min > -1.0 && rho_min <= rho_max && rho_max < 1.0)) {
    throw InputError("mapso: need -1 < rho_min <= rho_max < 1");
  }
  if (!(f_max > 0.0 && f_min > 0.0)) throw InputError("mapso: f_max and f_min must be positive");
  if (!(t1_frac > 0.0 && t1_frac < t2_frac && t2_frac < 1.0)) {
    throw InputError("mapso: need 0 < t1_frac < t2_frac < 1");
  }
}

void ScheduleFeedback::validate() const {
  if (!(success_rate >= 0.0 && success_rate <= 1.0)) {
    throw InputError("schedule feedback: success_rate must lie in [0,1]");
  }
  if (t_max == 0) throw InputError("schedule feedback: t_max must be positive");
  if (t > t_max) throw InputError("schedule feedback: t exceeds t_max");
}

namespace {

struct Knots {
  double t;
  double t1;
  double t2;
};

Knots knots(std::size_t t, std::size_t t_max, const MapsoConfig& cfg) {
  if (t > t_max) throw InputError("mapso schedule: t exceeds t_max");
  const double tm = static_cast<double>(t_max);
  return {static_cast<double>(t), cfg.t1_frac * tm, cfg.t2_frac * tm};
}

double lerp(double a, double b, double s) { return a + (b - a) * s; }

}  // namespace

double mapso_vc(std::size_t t, std::size_t t_max, const MapsoConfig& cfg) {
  const auto k = knots(t, t_max, cfg);
  if (k.t < k.t1) return cfg.v_max;
  if (k.t > k.t2) return cfg.v_min;
  return lerp(cfg.v_max, cfg.v_min, (k.t - k.t1) / (k.t2 - k.t1));
}

double mapso_rho1(std::size_t t, std::size_t t_max, const MapsoConfig& cfg) {
  const auto k = knots(t, t_max, cfg);
  if (k.t < k.t1 || k.t > k.t2) return cfg.rho_min;
  const double mid = 0.5 * (k.t1 + k.t2);
  if (k.t <= mid) return lerp(cfg.rho_min, cfg.rho_max, (k.t - k.t1) / (mid - k.t1));
  return lerp(cfg.rho_max, cfg.rho_min, (k.t - mid) / (k.t2 - mid));
}

double mapso_focus(std::size_t t, std::size_t t_max, const MapsoConfig& cfg) {
  const auto k = knots(t, t_max, cfg);
  if (k.t < k.t1) return cfg.f_min;
  if (k.t > k.t2) return cfg.f_max;
  return 1.0;
}

MovementPattern mapso_pattern(std::size_t t, std::size_t t_max, const MapsoConfig& cfg) {
  return {mapso_rho1(t, t_max, cfg), mapso_vc(t, t_max, cfg), mapso_focus(t, t_max, cfg)};
}

IpsoParams coefficients_at(const ScheduleSpec& spec, const ScheduleFeedback& fb, Rng& rng) {
  fb.validate();
  const double progress = static_cast<double>(fb.t) / static_cast<double>(fb.t_max);
  const IpsoParams out = std::visit(
      [&](const auto& s) -> IpsoParams {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, schedule::Constant>) {
          return s.params;
        } else if constexpr (std::is_same_v<T, schedule::Mapso>) {
          s.config.validate();
          return solve_coefficients(mapso_pattern(fb.t, fb.t_max, s.config), +1);
        } else if constexpr (std::is_same_v<T, schedule::LinearInertia>) {
          return {lerp(s.omega_start, s.omega_end, progress), s.c, s.alpha};
        } else if constexpr (std::is_same_v<T, schedule::RandomInertia>) {
          return {0.5 + 0.5 * rng.uniform(), s.c, s.alpha};
        } else if constexpr (std::is_same_v<T, schedule::SuccessRateInertia>) {
          return {s.omega_min + (s.omega_max - s.omega_min) * fb.success_rate, s.c, s.alpha};
        } else {
          if (!s.generator) throw ScheduleError("schedule '" + s.name + "' has no generator");
          return s.generator(fb, rng);
        }
      },
      spec);
  if (!std::isfinite(out.omega) || !std::isfinite(out.c) || !std::isfinite(out.alpha)) {
    throw ScheduleError("schedule " + describe(spec) + " produced non-finite coefficients at t=" +
                        std::to_string(fb.t));
  }
  return out;
}

std::string describe(const ScheduleSpec& spec) {
  std::ostringstream os;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, schedule::Constant>) {
          os << "constant(omega=" << format_double(s.params.omega)
             << ", c=" << format_double(s.params.c) << ", alpha=" << format_double(s.params.alpha)
             << ")";
        } else if constexpr (std::is_same_v<T, schedule::Mapso>) {
          const auto& c = s.config;
          os << "mapso(vc " << format_double(c.v_max) << "->" << format_double(c.v_min) << ", rho1 "
             << format_double(c.rho_min) << "^" << format_double(c.rho_max) << ", focus "
             << format_double(c.f_min) << "/1/" << format_double(c.f_max) << ", t1="
             << format_double(c.t1_frac) << ", t2=" << format_double(c.t2_frac) << ")";
        } else if constexpr (std::is_same_v<T, schedule::LinearInertia>) {
          os << "linear-inertia(" << format_double(s.omega_start) << "->"
             << format_double(s.omega_end) << ", c=" << format_double(s.c)
             << ", alpha=" << format_double(s.alpha) << ")";
        } else if constexpr (std::is_same_v<T, schedule::RandomInertia>) {
          os << "random-inertia(c=" << format_double(s.c) << ", alpha=" << format_double(s.alpha)
             << ")";
        } else if constexpr (std::is_same_v<T, schedule::SuccessRateInertia>) {
          os << "success-rate-inertia(" << format_double(s.omega_min) << ".."
             << format_double(s.omega_max) << ", c=" << format_double(s.c)
             << ", alpha=" << format_double(s.alpha) << ")";
        } else {
          os << "registered(" << s.name << ")";
        }
      },
      spec);
  return os.str();
}

namespace presets {

ScheduleSpec mapso() { return schedule::Mapso{}; }
ScheduleSpec icpso() { return schedule::Constant{{0.711897, 1.711897, 1.0}}; }
ScheduleSpec ldwpso() { return schedule::LinearInertia{0.9, 0.4, 1.49618, 1.0}; }
ScheduleSpec liwpso() { return schedule::LinearInertia{0.4, 0.9, 1.49618, 1.0}; }
ScheduleSpec rwpso() { return schedule::RandomInertia{1.49618, 1.0}; }
ScheduleSpec aiwpso() { return schedule::SuccessRateInertia{0.0, 1.0, 1.49618, 1.0}; }

}  // namespace presets

ScheduleRegistry ScheduleRegistry::with_builtins() {
  ScheduleRegistry r;
  r.register_spec("mapso", presets::mapso());
  r.register_spec("icpso", presets::icpso());
  r.register_spec("ldwpso", presets::ldwpso());
  r.register_spec("liwpso", presets::liwpso());
  r.register_spec("rwpso", presets::rwpso());
  r.register_spec("aiwpso", presets::aiwpso());
  return r;
}

void ScheduleRegistry::register_schedule(const std::string& name, ScheduleGenerator generator) {
  if (!generator) throw InputError("schedule '" + name + "' registered without a generator");
  register_spec(name, schedule::Registered{name, std::move(generator)});
}

void ScheduleRegistry::register_spec(const std::string& name, ScheduleSpec spec) {
  if (name.empty()) throw InputError("schedule name must not be empty");
  if (!specs_.emplace(name, std::move(spec)).second) {
    throw InputError("schedule '" + name + "' is already registered");
  }
}

const ScheduleSpec& ScheduleRegistry::resolve(const std::string& name) const {
  const auto it = specs_.find(name);
  if (it == specs_.end()) {
    std::string known;
    for (const auto& [k, v] : specs_) known += (known.empty() ? "" : ", ") + k;
    throw InputError("unknown schedule '" + name + "' (registered: " + known + ")");
  }
  return it->second;
}

std::vector<std::string> ScheduleRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(specs_.size());
  for (const auto& [k, v] : specs_) out.push_back(k);
  return out;
}

}  // namespace mapso
