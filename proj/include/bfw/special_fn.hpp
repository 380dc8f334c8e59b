// Special functions used throughout the library: log-gamma, digamma/trigamma,
// the regularized incomplete beta function and its inverse, the neutrix
// regularization of gamma at non-positive integers, and the standard normal
// quantile.
//
// Everything here is pure; no function keeps state between calls.

#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "bfw/error.hpp"

namespace bfw {

inline constexpr double euler_gamma = std::numbers::egamma_v<double>;

/// ln Γ(x) for x > 0.
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw domain_error("log_gamma: argument must be positive and finite");
  }
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // reentrant; std::lgamma writes the global signgam
#else
  return std::lgamma(x);
#endif
}

/// ln B(p, q).
inline double log_beta(double p, double q) {
  return log_gamma(p) + log_gamma(q) - log_gamma(p + q);
}

namespace detail {

inline double digamma_unchecked(double x) {
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double f = 1.0 / (x * x);
  // -sum B_2k / (2k x^2k), k = 1..7
  const double tail =
      f * (-1.0 / 12 +
           f * (1.0 / 120 +
                f * (-1.0 / 252 +
                     f * (1.0 / 240 + f * (-1.0 / 132 + f * (691.0 / 32760 + f * (-1.0 / 12)))))));
  return result + std::log(x) - 0.5 / x + tail;
}

inline double trigamma_unchecked(double x) {
  double result = 0.0;
  while (x < 10.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double f = 1.0 / (x * x);
  // sum B_2k / x^(2k+1), k = 1..7
  const double tail =
      f / x *
      (1.0 / 6 +
       f * (-1.0 / 30 +
            f * (1.0 / 42 +
                 f * (-1.0 / 30 + f * (5.0 / 66 + f * (-691.0 / 2730 + f * (7.0 / 6)))))));
  return result + 1.0 / x + 0.5 * f + tail;
}

}  // namespace detail

/// Polygamma of order 0 (digamma) or 1 (trigamma).
inline double polygamma(int order, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw domain_error("polygamma: argument must be positive and finite");
  }
  switch (order) {
    case 0:
      return detail::digamma_unchecked(x);
    case 1:
      return detail::trigamma_unchecked(x);
    default:
      throw domain_error("polygamma: only orders 0 and 1 are supported");
  }
}

inline double digamma(double x) { return polygamma(0, x); }
inline double trigamma(double x) { return polygamma(1, x); }

namespace detail {

/// ln(1 - exp(-a)) for a >= 0, accurate at both ends.
inline double log1mexp(double a) {
  if (a <= 0.0) return -std::numeric_limits<double>::infinity();
  return a < std::numbers::ln2 ? std::log(-std::expm1(-a)) : std::log1p(-std::exp(-a));
}

/// Continued fraction part of I_y(p, q) (modified Lentz). Converges fast for
/// y < (p + 1) / (p + q + 2).
inline double beta_continued_fraction(double y, double p, double q) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  constexpr int max_iter = 20000;

  const double qab = p + q;
  const double qap = p + 1.0;
  const double qam = p - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * y / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (q - m) * y / ((qam + m2) * (p + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(p + m) * (qab + m) * y / ((p + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw numeric_error("reg_inc_beta: continued fraction did not converge");
}

/// Both tails of the incomplete beta ratio together with their logarithms.
struct IncBetaTails {
  double lower;      ///< I_y(p, q)
  double upper;      ///< 1 - I_y(p, q)
  double log_lower;  ///< ln I_y(p, q), finite even when `lower` underflows
  double log_upper;  ///< ln(1 - I_y(p, q)), finite even when `upper` underflows
};

/// I_y(p, q) from ln y and ln(1 - y). Passing logarithms lets callers whose
/// y or 1 - y is tiny (e.g. exp(-e^w)) keep full relative accuracy in the
/// small tail. The tail evaluated directly is the one on the rapidly
/// converging side of the continued fraction; the other is its complement.
inline IncBetaTails inc_beta_tails(double log_y, double log_1my, double p, double q) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (log_y == -inf) return {0.0, 1.0, -inf, 0.0};
  if (log_1my == -inf) return {1.0, 0.0, 0.0, -inf};

  const double y = std::exp(log_y);
  const double lb = log_beta(p, q);
  IncBetaTails t{};
  if (y < (p + 1.0) / (p + q + 2.0)) {
    t.log_lower = p * log_y + q * log_1my - lb - std::log(p) +
                  std::log(beta_continued_fraction(y, p, q));
    t.lower = std::exp(t.log_lower);
    t.upper = -std::expm1(t.log_lower);
    t.log_upper = log1mexp(-t.log_lower);
  } else {
    const double yc = std::exp(log_1my);
    t.log_upper = q * log_1my + p * log_y - lb - std::log(q) +
                  std::log(beta_continued_fraction(yc, q, p));
    t.upper = std::exp(t.log_upper);
    t.lower = -std::expm1(t.log_upper);
    t.log_lower = log1mexp(-t.log_upper);
  }
  return t;
}

inline void check_shapes(double p, double q, const char* who) {
  if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q)) {
    throw domain_error(std::string(who) + ": shape parameters must be positive and finite");
  }
}

}  // namespace detail

/// Regularized incomplete beta function I_y(p, q), the Beta(p, q) CDF at y.
inline double reg_inc_beta(double y, double p, double q) {
  detail::check_shapes(p, q, "reg_inc_beta");
  if (!(y >= 0.0 && y <= 1.0)) throw domain_error("reg_inc_beta: y must lie in [0, 1]");
  if (y == 0.0) return 0.0;
  if (y == 1.0) return 1.0;
  return detail::inc_beta_tails(std::log(y), std::log1p(-y), p, q).lower;
}

namespace detail {

// Solves I_y(p, q) = u for u <= 1/2-ish; the caller mirrors the upper half.
inline double inv_inc_beta_lower(double u, double p, double q) {
  const double lb = log_beta(p, q);
  const double mean = p / (p + q);

  // Small-y approximation I_y ~ y^p / (p B(p, q)).
  double y = std::exp((std::log(u) + std::log(p) + lb) / p);
  if (!(y > 0.0 && y < mean)) y = mean;

  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 2000; ++iter) {
    const double f = inc_beta_tails(std::log(y), std::log1p(-y), p, q).lower - u;
    if (f == 0.0 || std::fabs(f) <= 1e-15 * u) return y;
    if (f < 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return y;

    const double log_density = (p - 1.0) * std::log(y) + (q - 1.0) * std::log1p(-y) - lb;
    double next = y - f / std::exp(log_density);
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      // Bisect, geometrically when the bracket spans orders of magnitude.
      if (lo == 0.0) {
        next = hi * 0.0625;
      } else if (hi / lo > 16.0) {
        next = std::sqrt(lo * hi);
      } else {
        next = 0.5 * (lo + hi);
      }
    }
    if (next == y) return y;
    y = next;
  }
  throw numeric_error("inv_reg_inc_beta: iteration limit reached");
}

}  // namespace detail

/// Inverse of the regularized incomplete beta function in y: returns y with
/// I_y(p, q) = u. Safeguarded Newton with a bisection fallback.
inline double inv_reg_inc_beta(double u, double p, double q) {
  detail::check_shapes(p, q, "inv_reg_inc_beta");
  if (!(u >= 0.0 && u <= 1.0)) throw domain_error("inv_reg_inc_beta: u must lie in [0, 1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  if (u > 0.5) return 1.0 - detail::inv_inc_beta_lower(1.0 - u, q, p);
  return detail::inv_inc_beta_lower(u, p, q);
}

/// Γ(-r) for integer r >= 0 under the neutrix convention
///   Γ(-r) = ((-1)^r / r!) (φ(r) - γ),  φ(r) = 1 + 1/2 + ... + 1/r,  φ(0) = 0.
/// Only the moment-series diagnostic uses this; it is not the analytic gamma.
inline double neutrix_gamma(int r) {
  if (r < 0) throw domain_error("neutrix_gamma: r must be a non-negative integer");
  double harmonic = 0.0;
  double factorial = 1.0;
  for (int i = 1; i <= r; ++i) {
    harmonic += 1.0 / i;
    factorial *= i;
  }
  const double sign = (r % 2 == 0) ? 1.0 : -1.0;
  return sign / factorial * (harmonic - euler_gamma);
}

/// Overload for a floating argument `minus_r` = -r; rejects non-integers and
/// positive values.
inline double neutrix_gamma(double minus_r) {
  if (!(minus_r <= 0.0) || std::nearbyint(minus_r) != minus_r) {
    throw domain_error("neutrix_gamma: argument must be a non-positive integer");
  }
  return neutrix_gamma(static_cast<int>(-minus_r));
}

inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// z with Φ(z) = u. Rational starting approximation followed by Halley
/// refinement against erfc.
inline double std_normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw domain_error("std_normal_quantile: u must lie in (0, 1)");
  if (u > 0.5) return -std_normal_quantile(1.0 - u);

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};

  double z;
  if (u < 0.02425) {
    const double t = std::sqrt(-2.0 * std::log(u));
    z = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  } else {
    const double t = u - 0.5;
    const double r = t * t;
    z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  for (int i = 0; i < 2; ++i) {
    const double e = std_normal_cdf(z) - u;
    const double step = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * z * z);
    z -= step / (1.0 + 0.5 * z * step);
  }
  return z;
}

}  // namespace bfw
