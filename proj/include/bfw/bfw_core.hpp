// The beta flexible Weibull (BFW) distribution: the flexible Weibull CDF G
// passed through the regularized incomplete beta function,
//   F(x) = I_{G(x)}(p, q).
//
// Tail quantities are computed from ln G and ln(1 - G) = -e^{w} so that the
// survival function, hazard and cumulative hazard stay representable far into
// the right tail where 1 - G underflows.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "bfw/error.hpp"
#include "bfw/flexible_weibull.hpp"
#include "bfw/special_fn.hpp"

namespace bfw {

struct BFWParams {
  double alpha;
  double beta;
  double p;  ///< first beta shape
  double q;  ///< second beta shape

  FWParams base() const { return {alpha, beta}; }

  void validate() const {
    for (double v : {alpha, beta, p, q}) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw domain_error("BFWParams: all four parameters must be positive and finite");
      }
    }
  }

  friend bool operator==(const BFWParams&, const BFWParams&) = default;
};

namespace detail {

inline IncBetaTails bfw_tails(double x, const BFWParams& params) {
  const double w = fw_exponent(x, params.alpha, params.beta);
  return inc_beta_tails(log_fw_cdf_from_exponent(w), -std::exp(w), params.p, params.q);
}

}  // namespace detail

inline double bfw_cdf(double x, const BFWParams& params) {
  detail::check_time(x, "bfw_cdf");
  params.validate();
  return detail::bfw_tails(x, params).lower;
}

inline double bfw_survival(double x, const BFWParams& params) {
  detail::check_time(x, "bfw_survival");
  params.validate();
  return detail::bfw_tails(x, params).upper;
}

inline double bfw_log_cdf(double x, const BFWParams& params) {
  detail::check_time(x, "bfw_log_cdf");
  params.validate();
  return detail::bfw_tails(x, params).log_lower;
}

inline double bfw_log_survival(double x, const BFWParams& params) {
  detail::check_time(x, "bfw_log_survival");
  params.validate();
  return detail::bfw_tails(x, params).log_upper;
}

/// ln f(x) = ln B(p,q)^-1 + ln(alpha + beta/x^2) + w - q e^{w} + (p - 1) ln(1 - e^{-e^{w}})
inline double bfw_log_pdf(double x, const BFWParams& params) {
  detail::check_time(x, "bfw_log_pdf");
  params.validate();
  const double w = detail::fw_exponent(x, params.alpha, params.beta);
  const double e = std::exp(w);
  double shape_term;
  if (w < -30.0) {
    // w + (p - 1)(w - e/2), written so w = -inf gives -inf for every p > 0.
    shape_term = params.p * w - (params.p - 1.0) * 0.5 * e;
  } else {
    shape_term = w + (params.p - 1.0) * detail::log_fw_cdf_from_exponent(w);
  }
  return -log_beta(params.p, params.q) +
         detail::log_rate_factor(x, params.alpha, params.beta) + shape_term - params.q * e;
}

inline double bfw_pdf(double x, const BFWParams& params) { return std::exp(bfw_log_pdf(x, params)); }

/// f / S. Throws saturation_error once ln S is no longer representable.
inline double bfw_hazard(double x, const BFWParams& params) {
  const double log_s = bfw_log_survival(x, params);
  if (log_s == -std::numeric_limits<double>::infinity()) {
    throw saturation_error("bfw_hazard: survival underflows at x = " + std::to_string(x),
                           std::numeric_limits<double>::max());
  }
  return std::exp(bfw_log_pdf(x, params) - log_s);
}

/// f / F. Throws saturation_error once ln F is no longer representable.
inline double bfw_reversed_hazard(double x, const BFWParams& params) {
  const double log_f = bfw_log_cdf(x, params);
  if (log_f == -std::numeric_limits<double>::infinity()) {
    throw saturation_error("bfw_reversed_hazard: cdf underflows at x = " + std::to_string(x),
                           std::numeric_limits<double>::max());
  }
  return std::exp(bfw_log_pdf(x, params) - log_f);
}

/// H(x) = -ln S(x), the integral of the hazard over (0, x].
inline double bfw_cumulative_hazard(double x, const BFWParams& params) {
  const double log_s = bfw_log_survival(x, params);
  if (log_s == -std::numeric_limits<double>::infinity()) {
    throw saturation_error("bfw_cumulative_hazard: survival underflows at x = " + std::to_string(x),
                           std::numeric_limits<double>::max());
  }
  return -log_s;
}

/// Inverse CDF: the flexible Weibull quantile of the Beta(p, q) quantile.
inline double bfw_quantile(double u, const BFWParams& params) {
  detail::check_probability_open(u, "bfw_quantile");
  params.validate();
  const FWParams fw = params.base();
  if (u <= 0.5) {
    const double y = inv_reg_inc_beta(u, params.p, params.q);
    if (!(y > 0.0)) throw saturation_error("bfw_quantile: beta quantile underflows", 0.0);
    return fw_quantile(y, fw);
  }
  // Solve on the complementary side so 1 - y keeps its relative precision.
  const double s = inv_reg_inc_beta(1.0 - u, params.q, params.p);
  if (!(s > 0.0)) {
    throw saturation_error("bfw_quantile: beta quantile underflows",
                           std::numeric_limits<double>::max());
  }
  return fw_quantile_from_survival(s, fw);
}

namespace detail {

// ln of a Gamma(shape, 1) variate; for shape < 1 uses Gamma(shape + 1) U^{1/shape}
// so tiny variates do not underflow.
class LogGammaVariate {
 public:
  explicit LogGammaVariate(double shape)
      : shape_(shape), boosted_(shape < 1.0), gamma_(boosted_ ? shape + 1.0 : shape, 1.0) {}

  template <class Rng>
  double operator()(Rng& rng) {
    const double g = std::log(gamma_(rng));
    if (!boosted_) return g;
    const double u = 1.0 - uniform_(rng);  // (0, 1]
    return g + std::log(u) / shape_;
  }

 private:
  double shape_;
  bool boosted_;
  std::gamma_distribution<double> gamma_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace detail

/// n variates by the beta-generated construction: B ~ Beta(p, q) from two
/// gamma variates, then x = G^{-1}(B). Deterministic for a fixed seed.
inline std::vector<double> bfw_sample(std::size_t n, const BFWParams& params, std::uint64_t seed) {
  params.validate();
  std::vector<double> out;
  out.reserve(n);
  std::mt19937_64 rng(seed);
  detail::LogGammaVariate gx(params.p);
  detail::LogGammaVariate gy(params.q);
  for (std::size_t i = 0; i < n; ++i) {
    // d = ln(B / (1 - B)); then t = ln(-ln(1 - B)) = ln(log1p(e^d)).
    const double d = gx(rng) - gy(rng);
    double t;
    if (d < -30.0) {
      t = d - 0.5 * std::exp(d);
    } else if (d > 30.0) {
      t = std::log(d + std::exp(-d));
    } else {
      t = std::log(std::log1p(std::exp(d)));
    }
    out.push_back(detail::fw_root_from_t(t, params.alpha, params.beta));
  }
  return out;
}

/// Stationarity condition of the density, scaled by f / (alpha + beta/x^2):
///   -2 beta / x^3 + (alpha + beta/x^2)^2 [1 - q e^{w} + (p - 1) e^{w} / (e^{e^{w}} - 1)].
/// Positive where the density increases.
inline double bfw_mode_equation(double x, const BFWParams& params) {
  detail::check_time(x, "bfw_mode_equation");
  const double w = detail::fw_exponent(x, params.alpha, params.beta);
  const double e = std::exp(w);
  const double rate = params.alpha + params.beta / (x * x);
  const double bracket = 1.0 - params.q * e + (params.p - 1.0) * detail::e_over_expm1(e);
  return -2.0 * params.beta / (x * x * x) + rate * rate * bracket;
}

/// Location of the density peak. Scans a 400-point log grid over [1e-6, 1e4]
/// for +/- sign changes of the mode equation, bisects each, and returns the
/// one with the largest density.
inline double bfw_mode(const BFWParams& params) {
  params.validate();
  constexpr int grid = 400;
  const double lo_log = std::log(1e-6);
  const double hi_log = std::log(1e4);

  double best_x = 0.0;
  double best_logf = -std::numeric_limits<double>::infinity();
  double prev_x = 1e-6;
  double prev_g = bfw_mode_equation(prev_x, params);
  for (int i = 1; i < grid; ++i) {
    const double x = std::exp(lo_log + (hi_log - lo_log) * i / (grid - 1));
    const double g = bfw_mode_equation(x, params);
    if (prev_g > 0.0 && g <= 0.0) {
      double a = prev_x;
      double b = x;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (!(mid > a && mid < b)) break;
        if (bfw_mode_equation(mid, params) > 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      const double root =
          std::fabs(bfw_mode_equation(a, params)) < std::fabs(bfw_mode_equation(b, params)) ? a : b;
      const double lf = bfw_log_pdf(root, params);
      if (lf > best_logf) {
        best_logf = lf;
        best_x = root;
      }
    }
    prev_x = x;
    prev_g = g;
  }
  if (best_x == 0.0) {
    throw no_interior_mode_error("bfw_mode: mode equation has no sign change on [1e-6, 1e4]");
  }
  return best_x;
}

}  // namespace bfw
