#include "mapso/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mapso/errors.hpp"

namespace mapso {

namespace {

bool finite_all(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double inf_norm(const Vector5& v) {
  double n = 0.0;
  for (double x : v) n = std::max(n, std::abs(x));
  return n;
}

double dot(const Vector5& a, const Vector5& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector5& a) { return std::sqrt(dot(a, a)); }

Vector5 multiply(const Matrix5& m, const Vector5& v) {
  Vector5 out{};
  for (std::size_t i = 0; i < 5; ++i) out[i] = dot(m[i], v);
  return out;
}

}  // namespace

void CoefficientMoments::validate() const {
  if (!finite_all({mu_omega, sigma_omega, mu_phi1, sigma_phi1, mu_phi2, sigma_phi2})) {
    throw InputError("coefficient moments must be finite");
  }
  if (sigma_omega < 0 || sigma_phi1 < 0 || sigma_phi2 < 0) {
    throw InputError("coefficient standard deviations must be non-negative");
  }
}

void AttractorMoments::validate() const {
  if (!finite_all({mu_p, sigma_p, mu_g, sigma_g})) {
    throw InputError("attractor moments must be finite");
  }
  if (sigma_p < 0 || sigma_g < 0) {
    throw InputError("attractor standard deviations must be non-negative");
  }
}

Vector5 MomentSystem::apply(const Vector5& z) const {
  Vector5 out = multiply(m, z);
  for (std::size_t i = 0; i < 5; ++i) out[i] += b[i];
  return out;
}

MomentState MomentState::from_positions(double x_now, double x_prev) {
  return MomentState{{x_now, x_prev, x_now * x_now, x_prev * x_prev, x_now * x_prev}};
}

DerivedExpectations derive_expectations(const CoefficientMoments& c, const AttractorMoments& a) {
  c.validate();
  a.validate();
  const double mw = c.mu_omega;
  const double m1 = c.mu_phi1;
  const double m2 = c.mu_phi2;
  const double msum = m1 + m2;

  DerivedExpectations e;
  e.e_l = 1.0 + mw - msum;
  e.e_omega2 = c.sigma_omega * c.sigma_omega + mw * mw;
  e.e_phi1_2 = c.sigma_phi1 * c.sigma_phi1 + m1 * m1;
  e.e_phi2_2 = c.sigma_phi2 * c.sigma_phi2 + m2 * m2;
  e.e_omega_p = mw * (m1 * a.mu_p + m2 * a.mu_g);
  e.e_l2 = 1.0 + e.e_omega2 + e.e_phi1_2 + e.e_phi2_2 + 2.0 * mw - 2.0 * msum -
           2.0 * mw * msum + 2.0 * m1 * m2;
  e.e_p = m1 * a.mu_p + m2 * a.mu_g;
  e.e_p2 = a.second_moment_p() * e.e_phi1_2 + a.second_moment_g() * e.e_phi2_2 +
           2.0 * m1 * m2 * a.mu_p * a.mu_g;
  e.e_lp = m1 * a.mu_p + m2 * a.mu_g + mw * m1 * a.mu_p + mw * m2 * a.mu_g -
           a.mu_p * e.e_phi1_2 - m1 * m2 * (a.mu_p + a.mu_g) - a.mu_g * e.e_phi2_2;
  return e;
}

double expectation_l_omega(const CoefficientMoments& c) {
  // E(w (1 + w - phi1 - phi2)) with w independent of the phis.
  const double e_omega2 = c.sigma_omega * c.sigma_omega + c.mu_omega * c.mu_omega;
  return c.mu_omega * (1.0 - c.mu_phi1 - c.mu_phi2) + e_omega2;
}

MomentSystem build_moment_system(const CoefficientMoments& coeffs,
                                 const AttractorMoments& attractors) {
  const DerivedExpectations e = derive_expectations(coeffs, attractors);
  const double mw = coeffs.mu_omega;
  const double e_lw = expectation_l_omega(coeffs);

  MomentSystem s;
  s.m[0] = {e.e_l, -mw, 0.0, 0.0, 0.0};
  s.m[1] = {1.0, 0.0, 0.0, 0.0, 0.0};
  s.m[2] = {2.0 * e.e_lp, -2.0 * e.e_omega_p, e.e_l2, e.e_omega2, -2.0 * e_lw};
  s.m[3] = {0.0, 0.0, 1.0, 0.0, 0.0};
  s.m[4] = {e.e_p, 0.0, e.e_l, 0.0, -mw};
  s.b = {e.e_p, 0.0, e.e_p2, 0.0, 0.0};
  return s;
}

MomentTrajectory iterate_moments(const MomentSystem& system, const MomentState& z0,
                                 std::size_t steps) {
  if (steps == 0) throw InputError("iterate_moments: steps must be at least 1");
  MomentTrajectory out;
  out.states.reserve(steps);
  Vector5 z = z0.z;
  for (std::size_t t = 0; t < steps; ++t) {
    z = system.apply(z);
    const double n = inf_norm(z);
    if (!(n <= kDivergenceThreshold)) {
      out.diverged = true;
      break;
    }
    out.states.push_back(MomentState{z});
  }
  return out;
}

FixedPointIteration iterate_to_fixed_point(const MomentSystem& system, const MomentState& z0,
                                           const FixedPointOptions& options) {
  if (!(options.tol > 0)) throw InputError("iterate_to_fixed_point: tol must be positive");
  FixedPointIteration out;
  Vector5 z = z0.z;
  for (std::size_t t = 1; t <= options.max_steps; ++t) {
    const Vector5 next = system.apply(z);
    const double n = inf_norm(next);
    if (!(n <= kDivergenceThreshold)) {
      out.state = MomentState{z};
      out.steps = t - 1;
      out.status = IterationStatus::diverged;
      return out;
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < 5; ++i) delta = std::max(delta, std::abs(next[i] - z[i]));
    z = next;
    if (delta <= options.tol * std::max(1.0, n)) {
      out.state = MomentState{z};
      out.steps = t;
      out.status = IterationStatus::converged;
      return out;
    }
  }
  out.state = MomentState{z};
  out.steps = options.max_steps;
  out.status = IterationStatus::max_steps;
  return out;
}

double expectation_fixed_point(const CoefficientMoments& c, const AttractorMoments& a) {
  const double denom = c.mu_phi1 + c.mu_phi2;
  if (denom == 0.0) {
    throw DegenerateError("expectation fixed point undefined: mu_phi1 + mu_phi2 = 0");
  }
  return (c.mu_phi1 * a.mu_p + c.mu_phi2 * a.mu_g) / denom;
}

double order2_k2(const CoefficientMoments& c) {
  const double msum = c.mu_phi1 + c.mu_phi2;
  const double k1 = msum * msum;
  return k1 * (1.0 - c.mu_omega) +
         2.0 * msum * (c.mu_omega * c.mu_omega + c.sigma_omega * c.sigma_omega - 1.0) +
         (c.sigma_phi1 * c.sigma_phi1 + c.sigma_phi2 * c.sigma_phi2) * (c.mu_omega + 1.0);
}

VarianceTerms variance_terms(const CoefficientMoments& c, const AttractorMoments& a) {
  const double msum = c.mu_phi1 + c.mu_phi2;
  const double m1s = c.mu_phi1 * c.mu_phi1;
  const double m2s = c.mu_phi2 * c.mu_phi2;
  const double s1s = c.sigma_phi1 * c.sigma_phi1;
  const double s2s = c.sigma_phi2 * c.sigma_phi2;
  const double sps = a.sigma_p * a.sigma_p;
  const double sgs = a.sigma_g * a.sigma_g;
  const double dmu = a.mu_g - a.mu_p;

  VarianceTerms k;
  k.k1 = msum * msum;
  k.k2 = order2_k2(c);
  k.k3 = k.k1 * (m1s * sps + m2s * sgs + s1s * sps + s2s * sgs);
  k.k4 = (m1s * s2s + m2s * s1s) * dmu * dmu;
  return k;
}

double variance_fixed_point(const CoefficientMoments& c, const AttractorMoments& a) {
  c.validate();
  a.validate();
  if (!is_order2_convergent(c)) {
    throw StabilityError("variance fixed point requested for coefficients that are not order-2 stable");
  }
  const VarianceTerms k = variance_terms(c, a);
  if (k.k1 == 0.0 || k.k2 == 0.0) {
    throw DegenerateError("variance fixed point undefined: k1 or k2 is zero");
  }
  return -(k.k3 + k.k4) / (k.k1 * k.k2) * (c.mu_omega + 1.0);
}

bool is_order1_convergent(const CoefficientMoments& c) {
  const double msum = c.mu_phi1 + c.mu_phi2;
  return c.mu_omega > -1.0 && c.mu_omega < 1.0 && msum > 0.0 &&
         msum < 2.0 * (c.mu_omega + 1.0);
}

bool is_order2_convergent(const CoefficientMoments& c) {
  return is_order1_convergent(c) && order2_k2(c) < 0.0;
}

namespace {

struct RadiusEstimate {
  double value;
  bool ok;
};

// Modulus of the dominant eigenvalue(s) seen through one power step.
RadiusEstimate dominant_modulus(const Vector5& u, const Vector5& y1, const Vector5& y2) {
  const double n1 = norm2(y1);
  const double lambda = dot(u, y1);
  Vector5 r1{};
  for (std::size_t i = 0; i < 5; ++i) r1[i] = y1[i] - lambda * u[i];
  const double res_single = norm2(r1) / n1;

  const double g00 = dot(y1, y1);
  const double g01 = dot(y1, u);
  const double g11 = dot(u, u);
  const double det = g00 * g11 - g01 * g01;
  const double n2 = norm2(y2);
  if (n2 == 0.0) return {0.0, true};
  if (det <= 1e-14 * g00 * g11) return {n1, true};

  const double h0 = dot(y1, y2);
  const double h1 = dot(u, y2);
  const double a = (h0 * g11 - h1 * g01) / det;
  const double b = (g00 * h1 - g01 * h0) / det;
  Vector5 r2{};
  for (std::size_t i = 0; i < 5; ++i) r2[i] = y2[i] - a * y1[i] - b * u[i];
  const double res_pair = norm2(r2) / n2;
  if (res_single <= res_pair) return {n1, true};

  const double disc = a * a + 4.0 * b;
  double modulus;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    modulus = std::max(std::abs(0.5 * (a + s)), std::abs(0.5 * (a - s)));
  } else {
    modulus = std::sqrt(-b);
  }
  return {modulus, std::isfinite(modulus)};
}

Vector5 start_vector(int attempt) {
  Vector5 v{};
  for (std::size_t i = 0; i < 5; ++i) {
    v[i] = 1.0 + 0.5 * std::sin(1.3 * static_cast<double>(i + 1) * (attempt + 1) + 0.7 * attempt);
  }
  if (attempt % 2 == 1) v[attempt % 5] = -v[attempt % 5];
  const double n = norm2(v);
  for (double& x : v) x /= n;
  return v;
}

}  // namespace

double spectral_radius(const Matrix5& m, double tol, std::size_t max_iter) {
  if (!(tol > 0)) throw InputError("spectral_radius: tol must be positive");
  if (max_iter == 0) throw InputError("spectral_radius: max_iter must be positive");
  for (const auto& row : m) {
    if (!finite_all({row[0], row[1], row[2], row[3], row[4]})) {
      throw InputError("spectral_radius: matrix has non-finite entries");
    }
  }

  constexpr int kStarts = 4;
  int annihilated = 0;
  for (int attempt = 0; attempt < kStarts; ++attempt) {
    Vector5 u = start_vector(attempt);
    double previous = std::numeric_limits<double>::quiet_NaN();
    int settled = 0;
    bool lost = false;
    for (std::size_t it = 0; it < max_iter; ++it) {
      const Vector5 y1 = multiply(m, u);
      const double n1 = norm2(y1);
      if (n1 == 0.0) {
        lost = true;
        break;
      }
      const Vector5 y2 = multiply(m, y1);
      const RadiusEstimate est = dominant_modulus(u, y1, y2);
      if (est.ok && std::abs(est.value - previous) <= tol * std::max(1.0, est.value)) {
        if (++settled >= 3) return est.value;
      } else {
        settled = 0;
      }
      previous = est.value;
      for (std::size_t i = 0; i < 5; ++i) u[i] = y1[i] / n1;
    }
    if (lost) ++annihilated;
  }
  if (annihilated == kStarts) return 0.0;
  throw ConvergenceError("spectral_radius: power iteration did not settle from any start vector");
}

}  // namespace mapso
