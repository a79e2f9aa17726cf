#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "omcr/units.hpp"

namespace omcr {

// Two-parameter Weibull time-to-failure model. The scale parameter is stored
// in hours; experiment inputs give it in years. beta < 1 is rejected because
// the density is singular at t = 0, which the downtime quadrature cannot
// handle (and the experiments only use beta in {2, 3}).
struct FailureModel {
  double eta_h;
  double beta;

  FailureModel(double eta_hours, double shape) : eta_h(eta_hours), beta(shape) {
    if (!(eta_h > 0.0)) throw std::invalid_argument("FailureModel: eta must be > 0");
    if (!(beta >= 1.0)) throw std::invalid_argument("FailureModel: beta must be >= 1");
  }

  static FailureModel from_years(double eta_years, double shape) {
    return FailureModel(years_to_hours(eta_years), shape);
  }
};

inline double weibull_cdf(double t_h, const FailureModel& m) {
  if (t_h < 0.0) throw std::domain_error("weibull_cdf: t must be >= 0");
  return 1.0 - std::exp(-std::pow(t_h / m.eta_h, m.beta));
}

inline double weibull_pdf(double t_h, const FailureModel& m) {
  if (t_h < 0.0) throw std::domain_error("weibull_pdf: t must be >= 0");
  if (t_h == 0.0) return m.beta > 1.0 ? 0.0 : 1.0 / m.eta_h;  // beta == 1: exponential rate
  const double z = t_h / m.eta_h;
  return (m.beta / m.eta_h) * std::pow(z, m.beta - 1.0) * std::exp(-std::pow(z, m.beta));
}

// Recursive adaptive Simpson. tol is absolute; the depth cap bounds work on
// pathological inputs (the integrands here are smooth).
namespace detail {

template <typename F>
double adaptive_simpson_step(const F& f, double a, double fa, double b, double fb, double m,
                             double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol, int max_depth = 28) {
  if (!(b >= a)) throw std::invalid_argument("adaptive_simpson: b must be >= a");
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Expected downtime over the inter-operation interval (prev_start, next_start].
struct DowntimeEstimate {
  double ttd_h = 0.0;        // expected time the site sits failed awaiting service
  double failure_prob = 0.0; // probability of failing within the interval
};

inline constexpr double kDegenerateIntervalProb = 1e-12;

// Generic form so tests can plug synthetic distributions. The failure
// probability is the interval mass cdf(next) - cdf(prev); the downtime is the
// interval length minus the conditional failure instant within it, i.e.
// ttd = next - (integral of t*pdf over the interval) / mass.
// Intervals with mass below kDegenerateIntervalProb report zero downtime.
template <typename Cdf, typename Pdf>
DowntimeEstimate expected_downtime(double prev_start_h, double next_start_h, const Cdf& cdf,
                                   const Pdf& pdf) {
  if (!(prev_start_h >= 0.0) || !(next_start_h > prev_start_h))
    throw std::invalid_argument("expected_downtime: need 0 <= prev_start < next_start");
  const double prob = cdf(next_start_h) - cdf(prev_start_h);
  if (prob < kDegenerateIntervalProb) return {};
  const double tol = 1e-8 * std::max(1.0, next_start_h - prev_start_h);
  const double mass_instant =
      adaptive_simpson([&](double t) { return t * pdf(t); }, prev_start_h, next_start_h, tol);
  double ttd = next_start_h - mass_instant / prob;
  const double len = next_start_h - prev_start_h;
  if (ttd < 0.0) ttd = 0.0;
  if (ttd > len) ttd = len;
  return {ttd, prob};
}

inline DowntimeEstimate expected_downtime(double prev_start_h, double next_start_h,
                                          const FailureModel& m) {
  return expected_downtime(
      prev_start_h, next_start_h, [&](double t) { return weibull_cdf(t, m); },
      [&](double t) { return weibull_pdf(t, m); });
}

// Average availability of one site over the horizon: the fraction of the
// horizon the equipment is probably in operation. starts is only validated
// (ordering); the downtime terms carry the schedule information.
inline double site_availability(std::span<const double> starts, std::span<const double> ttds,
                                std::span<const double> probs, double horizon_h) {
  if (!(horizon_h > 0.0)) throw std::invalid_argument("site_availability: horizon must be > 0");
  if (ttds.size() != probs.size())
    throw std::invalid_argument("site_availability: ttds/probs size mismatch");
  double prev = 0.0;
  for (double s : starts) {
    if (s < prev || s > horizon_h)
      throw std::invalid_argument("site_availability: starts must be ordered within [0, horizon]");
    prev = s;
  }
  double lost = 0.0;
  for (std::size_t i = 0; i < ttds.size(); ++i) {
    if (ttds[i] < 0.0 || probs[i] < 0.0 || probs[i] > 1.0)
      throw std::invalid_argument("site_availability: ttd/prob out of range");
    lost += ttds[i] * probs[i];
  }
  const double a = (horizon_h - lost) / horizon_h;
  return a < 0.0 ? 0.0 : (a > 1.0 ? 1.0 : a);
}

}  // namespace omcr
