#include "mapso/simulation.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <span>

#include "mapso/errors.hpp"
#include "mapso/format.hpp"
#include "mapso/rng.hpp"

namespace mapso {

namespace {

const double kSqrt3 = std::sqrt(3.0);
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_interval(const Interval& r, const char* what) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi)) {
    throw InputError(std::string(what) + ": interval needs finite lo < hi");
  }
}

// Uniform variable with the given mean and standard deviation.
struct UniformDraw {
  double center;
  double half_width;
  double operator()(Rng& rng) const { return center + half_width * (2.0 * rng.uniform() - 1.0); }
};

UniformDraw matching(double mu, double sigma) { return {mu, kSqrt3 * sigma}; }

std::span<const double> post_burn_in(const SimTrace& trace, std::size_t burn_in,
                                     std::size_t min_len) {
  const auto& x = trace.positions;
  if (x.size() < burn_in || x.size() - burn_in < min_len) {
    throw InputError("not enough samples after burn-in");
  }
  return std::span<const double>(x).subspan(burn_in);
}

}  // namespace

void validate(const AttractorProcess& process) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, IidUniformAttractors>) {
          check_interval(p.p_range, "p range");
          check_interval(p.g_range, "g range");
        } else if constexpr (std::is_same_v<T, RandomWalkAttractors>) {
          check_interval(p.step_range, "step range");
          if (!std::isfinite(p.p0) || !std::isfinite(p.g0)) {
            throw InputError("random walk start must be finite");
          }
        } else {
          if (!std::isfinite(p.p) || !std::isfinite(p.g)) {
            throw InputError("fixed attractors must be finite");
          }
        }
      },
      process);
}

AttractorMoments attractor_moments(const AttractorProcess& process) {
  validate(process);
  if (const auto* iid = std::get_if<IidUniformAttractors>(&process)) {
    const double inv = 1.0 / std::sqrt(12.0);
    return {0.5 * (iid->p_range.lo + iid->p_range.hi), (iid->p_range.hi - iid->p_range.lo) * inv,
            0.5 * (iid->g_range.lo + iid->g_range.hi), (iid->g_range.hi - iid->g_range.lo) * inv};
  }
  if (const auto* fixed = std::get_if<FixedAttractors>(&process)) {
    return {fixed->p, 0.0, fixed->g, 0.0};
  }
  throw InputError("a random-walk attractor process has no stationary moments");
}

void SimConfig::validate() const {
  if (iterations < 2) throw InputError("simulation needs at least 2 iterations");
  if (burn_in >= iterations) throw InputError("burn_in must be smaller than iterations");
  if ((x0 && !std::isfinite(*x0)) || (x1 && !std::isfinite(*x1))) {
    throw InputError("initial positions must be finite");
  }
}

SimTrace simulate(const CoefficientMoments& coeffs, const AttractorProcess& process,
                  const SimConfig& config) {
  coeffs.validate();
  validate(process);
  config.validate();

  Rng rng(config.seed);
  const UniformDraw omega_draw = matching(coeffs.mu_omega, coeffs.sigma_omega);
  const UniformDraw phi1_draw = matching(coeffs.mu_phi1, coeffs.sigma_phi1);
  const UniformDraw phi2_draw = matching(coeffs.mu_phi2, coeffs.sigma_phi2);
  const bool random_omega = coeffs.sigma_omega > 0.0;

  Interval start_range;
  double p = 0.0;
  double g = 0.0;
  if (const auto* iid = std::get_if<IidUniformAttractors>(&process)) {
    start_range = iid->p_range;
  } else if (const auto* walk = std::get_if<RandomWalkAttractors>(&process)) {
    start_range = {walk->p0 - 1.0, walk->p0 + 1.0};
    p = walk->p0;
    g = walk->g0;
  } else {
    const auto& fixed = std::get<FixedAttractors>(process);
    start_range = {fixed.p - 1.0, fixed.p + 1.0};
    p = fixed.p;
    g = fixed.g;
  }

  const std::size_t n = config.iterations;
  SimTrace trace;
  trace.positions.reserve(n);
  const double x0 = config.x0 ? *config.x0 : rng.uniform(start_range.lo, start_range.hi);
  const double x1 = config.x1 ? *config.x1 : rng.uniform(start_range.lo, start_range.hi);
  trace.positions.push_back(x0);
  trace.positions.push_back(x1);
  if (config.log_attractors) {
    trace.p.assign(n, kNaN);
    trace.g.assign(n, kNaN);
  }

  double prev = x0;
  double cur = x1;
  for (std::size_t t = 1; t + 1 < n; ++t) {
    const double omega = random_omega ? omega_draw(rng) : coeffs.mu_omega;
    const double phi1 = phi1_draw(rng);
    const double phi2 = phi2_draw(rng);

    if (const auto* iid = std::get_if<IidUniformAttractors>(&process)) {
      p = rng.uniform(iid->p_range.lo, iid->p_range.hi);
      g = rng.uniform(iid->g_range.lo, iid->g_range.hi);
    }
    if (config.log_attractors) {
      trace.p[t] = p;
      trace.g[t] = g;
    }

    const double l = 1.0 + omega - phi1 - phi2;
    const double next = l * cur - omega * prev + phi1 * p + phi2 * g;
    if (!(std::abs(next) <= kDivergenceThreshold)) {
      trace.diverged = true;
      break;
    }
    trace.positions.push_back(next);
    prev = cur;
    cur = next;

    if (const auto* walk = std::get_if<RandomWalkAttractors>(&process)) {
      const double td = static_cast<double>(t);
      p += rng.uniform(walk->step_range.lo, walk->step_range.hi) / td;
      g += rng.uniform(walk->step_range.lo, walk->step_range.hi) / td;
    }
  }
  if (config.log_attractors && trace.diverged) {
    trace.p.resize(trace.positions.size());
    trace.g.resize(trace.positions.size());
    trace.p.back() = kNaN;
    trace.g.back() = kNaN;
  }
  return trace;
}

SimTrace simulate(const IpsoParams& params, const AttractorProcess& process,
                  const SimConfig& config) {
  return simulate(ipso_to_moments(params), process, config);
}

SampleMoments empirical_moments(const SimTrace& trace, std::size_t burn_in) {
  const auto x = post_burn_in(trace, burn_in, 2);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, ss / static_cast<double>(x.size() - 1)};
}

AutocorrelationSeq empirical_autocorrelation(const SimTrace& trace, std::size_t burn_in,
                                             std::size_t max_lag) {
  const auto x = post_burn_in(trace, burn_in, max_lag + 3);
  AutocorrelationSeq out;
  out.rho.assign(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    const std::size_t m = x.size() - k;
    const auto a = x.subspan(0, m);
    const auto b = x.subspan(k, m);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= static_cast<double>(m);
    mb /= static_cast<double>(m);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double da = a[i] - ma;
      const double db = b[i] - mb;
      sab += da * db;
      saa += da * da;
      sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) {
      throw DegenerateError("empirical autocorrelation undefined for a constant series");
    }
    out.rho[k] = k == 0 ? 1.0 : sab / std::sqrt(saa * sbb);
  }
  return out;
}

double empirical_movement_distance(const SimTrace& trace, std::size_t burn_in) {
  const auto x = post_burn_in(trace, burn_in, 2);
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double d = x[i] - x[i - 1];
    sum += d * d;
  }
  return sum / static_cast<double>(x.size() - 1);
}

double empirical_focus(const SimTrace& trace, std::size_t burn_in, double mu_p, double mu_g) {
  const double mean = empirical_moments(trace, burn_in).mean;
  if (mean == mu_g) throw DegenerateError("empirical focus undefined: sample mean equals mu_g");
  const double num = mean - mu_p;
  const double den = mean - mu_g;
  return (num * num) / (den * den);
}

void write_trace_csv(std::ostream& os, const SimTrace& trace) {
  os << "t,x,p,g\n";
  const bool logged = !trace.p.empty();
  for (std::size_t t = 0; t < trace.positions.size(); ++t) {
    os << t << ',' << format_double(trace.positions[t]) << ',';
    if (logged && std::isfinite(trace.p[t])) os << format_double(trace.p[t]);
    os << ',';
    if (logged && std::isfinite(trace.g[t])) os << format_double(trace.g[t]);
    os << '\n';
  }
}

}  // namespace mapso
