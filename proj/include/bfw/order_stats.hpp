// Density of the r-th order statistic of an n-sample from the BFW distribution.

#pragma once

#include <cmath>
#include <limits>

#include "bfw/bfw_core.hpp"
#include "bfw/error.hpp"

namespace bfw {

struct OrderIndex {
  int r;  ///< rank, 1-based
  int n;  ///< sample size

  void validate() const {
    if (r < 1 || n < 1 || r > n) throw domain_error("OrderIndex: require 1 <= r <= n");
  }
};

/// f_{r:n}(x) = F^{r-1} (1 - F)^{n-r} f / B(r, n - r + 1), evaluated in log space.
inline double order_stat_log_pdf(double x, const OrderIndex& idx, const BFWParams& params) {
  idx.validate();
  detail::check_time(x, "order_stat_pdf");
  params.validate();
  const auto tails = detail::bfw_tails(x, params);
  double v = bfw_log_pdf(x, params) - log_beta(idx.r, idx.n - idx.r + 1);
  if (idx.r > 1) v += (idx.r - 1) * tails.log_lower;
  if (idx.n > idx.r) v += (idx.n - idx.r) * tails.log_upper;
  return v;
}

inline double order_stat_pdf(double x, const OrderIndex& idx, const BFWParams& params) {
  return std::exp(order_stat_log_pdf(x, idx, params));
}

inline constexpr int order_stat_expansion_max_n = 30;

/// The same density written as the alternating sum
///   sum_{i=0}^{n-r} (-1)^i n! / (i! (r-1)! (n-r-i)!) F^{i+r-1} f.
/// Evaluated in long double. The sum cancels down to (1 - F)^{n-r}; when the
/// predicted cancellation ((1 + F)/(1 - F))^{n-r} would cost more than eight
/// digits, or n exceeds 30, a stability_error points callers to
/// order_stat_pdf instead.
inline double order_stat_pdf_expansion(double x, const OrderIndex& idx, const BFWParams& params) {
  idx.validate();
  detail::check_time(x, "order_stat_pdf_expansion");
  params.validate();
  if (idx.n > order_stat_expansion_max_n) {
    throw stability_error("order_stat_pdf_expansion: n > 30, use order_stat_pdf");
  }
  const int k = idx.n - idx.r;
  const long double big_f = detail::bfw_tails(x, params).lower;
  const long double f = bfw_pdf(x, params);

  if (k > 0) {
    const long double growth = big_f >= 1.0L ? std::numeric_limits<long double>::infinity()
                                             : (1.0L + big_f) / (1.0L - big_f);
    const long double condition = std::pow(growth, static_cast<long double>(k));
    if (!(condition * std::numeric_limits<long double>::epsilon() <= 1e-10L)) {
      throw stability_error(
          "order_stat_pdf_expansion: alternating sum too ill-conditioned at this x, use "
          "order_stat_pdf");
    }
  }

  // n! / ((r-1)! i! (k-i)!) = n C(n-1, r-1) C(k, i); exact integers in long double.
  long double lead = idx.n;
  for (int j = 1; j <= idx.r - 1; ++j) lead = lead * (idx.n - j) / j;
  long double binom = 1.0L;
  long double sum = 0.0L;
  long double power = std::pow(big_f, static_cast<long double>(idx.r - 1));
  for (int i = 0; i <= k; ++i) {
    const long double term = lead * binom * power;
    sum += (i % 2 == 0) ? term : -term;
    binom = binom * (k - i) / (i + 1);
    power *= big_f;
  }
  return static_cast<double>(sum * f);
}

}  // namespace bfw
