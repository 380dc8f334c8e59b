// The two-parameter flexible Weibull distribution
//   G(x) = 1 - exp(-e^{w}),  w = alpha x - beta / x,  x > 0.

#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "bfw/error.hpp"
#include "bfw/special_fn.hpp"

namespace bfw {

struct FWParams {
  double alpha;  ///< growth rate, per unit time
  double beta;   ///< early-life shape, time units

  void validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
      throw domain_error("FWParams: alpha and beta must be positive and finite");
    }
  }
};

namespace detail {

inline void check_time(double x, const char* who) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw domain_error(std::string(who) + ": x must be positive and finite");
  }
}

inline double fw_exponent(double x, double alpha, double beta) { return alpha * x - beta / x; }

/// ln G(x) expressed through w; stays finite for w far below zero.
inline double log_fw_cdf_from_exponent(double w) {
  if (w < -30.0) return w - 0.5 * std::exp(w);  // ln(1 - e^{-E}) = ln E - E/2 + O(E^2)
  return log1mexp(std::exp(w));
}

/// ln(alpha + beta / x^2), safe for tiny x.
inline double log_rate_factor(double x, double alpha, double beta) {
  return std::log(alpha * x * x + beta) - 2.0 * std::log(x);
}

/// E / (e^E - 1) with the limits 1 at E -> 0 and 0 at E -> inf.
inline double e_over_expm1(double e) {
  if (e < 1e-10) return 1.0 - 0.5 * e;
  if (e > 700.0) return std::isinf(e) ? 0.0 : e * std::exp(-e);
  return e / std::expm1(e);
}

/// Positive root of alpha x^2 - t x - beta = 0 without cancellation.
inline double fw_root_from_t(double t, double alpha, double beta) {
  const double disc = std::sqrt(t * t + 4.0 * alpha * beta);
  return t >= 0.0 ? (t + disc) / (2.0 * alpha) : 2.0 * beta / (disc - t);
}

inline void check_probability_open(double u, const char* who) {
  if (!(u > 0.0 && u < 1.0)) throw domain_error(std::string(who) + ": u must lie in (0, 1)");
}

}  // namespace detail

inline double fw_cdf(double x, const FWParams& params) {
  detail::check_time(x, "fw_cdf");
  params.validate();
  return -std::expm1(-std::exp(detail::fw_exponent(x, params.alpha, params.beta)));
}

inline double fw_survival(double x, const FWParams& params) {
  detail::check_time(x, "fw_survival");
  params.validate();
  return std::exp(-std::exp(detail::fw_exponent(x, params.alpha, params.beta)));
}

inline double fw_log_pdf(double x, const FWParams& params) {
  detail::check_time(x, "fw_log_pdf");
  params.validate();
  const double w = detail::fw_exponent(x, params.alpha, params.beta);
  return detail::log_rate_factor(x, params.alpha, params.beta) + w - std::exp(w);
}

inline double fw_pdf(double x, const FWParams& params) { return std::exp(fw_log_pdf(x, params)); }

/// (alpha + beta / x^2) e^{w}
inline double fw_hazard(double x, const FWParams& params) {
  detail::check_time(x, "fw_hazard");
  params.validate();
  const double w = detail::fw_exponent(x, params.alpha, params.beta);
  return std::exp(detail::log_rate_factor(x, params.alpha, params.beta) + w);
}

/// Closed-form inverse of fw_cdf: with t = ln(-ln(1 - u)), the positive root
/// of alpha x^2 - t x - beta = 0.
inline double fw_quantile(double u, const FWParams& params) {
  detail::check_probability_open(u, "fw_quantile");
  params.validate();
  const double t = std::log(-std::log1p(-u));
  return detail::fw_root_from_t(t, params.alpha, params.beta);
}

/// Inverse of fw_survival; accurate when the survival probability is tiny.
inline double fw_quantile_from_survival(double s, const FWParams& params) {
  detail::check_probability_open(s, "fw_quantile_from_survival");
  params.validate();
  const double t = std::log(-std::log(s));
  return detail::fw_root_from_t(t, params.alpha, params.beta);
}

}  // namespace bfw
