#include "mapso/pattern.hpp"

#include <cmath>
#include <string>

#include "mapso/errors.hpp"

namespace mapso {

namespace {
const double kInvSqrt12 = 1.0 / std::sqrt(12.0);
}

void MovementPattern::validate() const {
  if (!(rho1 > -1.0 && rho1 < 1.0)) throw InputError("rho1 must lie in (-1,1)");
  if (!(vc > 0.0) || !std::isfinite(vc)) throw InputError("vc must be positive and finite");
  if (!(focus > 0.0) || !std::isfinite(focus)) throw InputError("focus must be positive and finite");
}

CoefficientMoments ipso_to_moments(const IpsoParams& p) {
  CoefficientMoments m;
  m.mu_omega = p.omega;
  m.sigma_omega = 0.0;
  m.mu_phi1 = p.c / 2.0;
  m.sigma_phi1 = std::abs(p.c) * kInvSqrt12;
  m.mu_phi2 = p.alpha * p.c / 2.0;
  m.sigma_phi2 = std::abs(p.alpha * p.c) * kInvSqrt12;
  return m;
}

double rho1(const CoefficientMoments& c) {
  if (c.mu_omega == -1.0) throw DegenerateError("rho1 undefined for mu_omega = -1");
  const double mu_l = 1.0 + c.mu_omega - c.mu_phi1 - c.mu_phi2;
  return mu_l / (c.mu_omega + 1.0);
}

AutocorrelationSeq autocorrelation(const CoefficientMoments& c, std::size_t max_lag) {
  AutocorrelationSeq seq;
  seq.rho.resize(max_lag + 1);
  seq.rho[0] = 1.0;
  if (max_lag == 0) return seq;
  const double mu_l = 1.0 + c.mu_omega - c.mu_phi1 - c.mu_phi2;
  seq.rho[1] = rho1(c);
  for (std::size_t i = 2; i <= max_lag; ++i) {
    seq.rho[i] = mu_l * seq.rho[i - 1] - c.mu_omega * seq.rho[i - 2];
  }
  return seq;
}

double expected_movement_distance(double vx, double rho1_value) {
  if (!(vx >= 0.0)) throw InputError("expected_movement_distance: vx must be non-negative");
  return 2.0 * vx * (1.0 - rho1_value);
}

double gamma_factor(const AttractorMoments& a, double alpha) {
  const double ap1 = alpha + 1.0;
  const double dmu = a.mu_p - a.mu_g;
  return 2.0 * ap1 * ap1 * (a.sigma_p * a.sigma_p + alpha * alpha * a.sigma_g * a.sigma_g) +
         alpha * alpha * dmu * dmu;
}

RangeTerms range_terms(double alpha) {
  const double ap1sq = (alpha + 1.0) * (alpha + 1.0);
  return {ap1sq * (alpha * alpha + 3.0 * alpha + 1.0),
          ap1sq * (2.0 * alpha * alpha + 3.0 * alpha + 2.0)};
}

double vc(const IpsoParams& p) {
  const auto [m1, m2] = range_terms(p.alpha);
  const double ap1 = p.alpha + 1.0;
  const double denom = p.c * (m2 - m1 * p.omega) + ap1 * ap1 * ap1 * (6.0 * p.omega * p.omega - 6.0);
  if (denom == 0.0) throw DegenerateError("vc undefined: zero denominator");
  return -p.c * (p.omega + 1.0) / denom;
}

double c_for_vc(double target_vc, double omega, double alpha) {
  if (!(target_vc > 0.0)) throw InputError("c_for_vc: vc must be positive");
  const auto [m1, m2] = range_terms(alpha);
  const double ap1 = alpha + 1.0;
  const double denom = target_vc * (m2 - m1 * omega) + (omega + 1.0);
  if (denom == 0.0) throw DegenerateError("c_for_vc undefined: zero denominator");
  return -6.0 * target_vc * ap1 * ap1 * ap1 * (omega * omega - 1.0) / denom;
}

double focus(const CoefficientMoments& c) {
  if (c.mu_phi1 == 0.0) throw DegenerateError("focus undefined for mu_phi1 = 0");
  const double r = c.mu_phi2 / c.mu_phi1;
  return r * r;
}

bool relative_close(double actual, double expected, double rel, double abs_floor) {
  const double err = std::abs(actual - expected);
  if (expected == 0.0) return err <= abs_floor;
  return err <= rel * std::abs(expected);
}

IpsoParams solve_coefficients(const MovementPattern& target, int alpha_sign) {
  target.validate();
  if (alpha_sign != 1 && alpha_sign != -1) throw InputError("alpha_sign must be +1 or -1");
  const double alpha = alpha_sign * std::sqrt(target.focus);
  if (alpha == -1.0) throw DegenerateError("focus 1 with negative sign gives alpha = -1");

  const auto [m1, m2] = range_terms(alpha);
  const double r = target.rho1;
  const double v = target.vc;
  const double denom = m2 * v + m1 * r * v - r + 1.0;
  if (denom == 0.0) throw DegenerateError("solve_coefficients: zero denominator for omega");
  const double omega = (m1 * v + m2 * r * v + r - 1.0) / denom;
  const double c = 2.0 * (1.0 - r) * (omega + 1.0) / (alpha + 1.0);
  IpsoParams out{omega, c, alpha};

  constexpr double kRoundTrip = 1e-9;
  const double got_rho = rho1(ipso_to_moments(out));
  const double got_vc = vc(out);
  if (!relative_close(got_rho, r, kRoundTrip) || !relative_close(got_vc, v, kRoundTrip)) {
    throw ConsistencyError("solve_coefficients: round-trip residual above 1e-9 (rho1 " +
                           std::to_string(got_rho) + ", vc " + std::to_string(got_vc) + ")");
  }
  return out;
}

IpsoStability ipso_stability(const IpsoParams& p) {
  IpsoStability s;
  s.attraction = p.c * (1.0 + p.alpha);
  s.attraction_bound = 4.0 * (1.0 + p.omega);
  s.k2 = order2_k2(ipso_to_moments(p));
  s.omega_in_range = p.omega > -1.0 && p.omega < 1.0;
  s.attraction_in_range = s.attraction > 0.0 && s.attraction < s.attraction_bound;
  s.k2_negative = s.k2 < 0.0;
  return s;
}

bool ipso_is_convergent(const IpsoParams& p) { return ipso_stability(p).convergent(); }

}  // namespace mapso
