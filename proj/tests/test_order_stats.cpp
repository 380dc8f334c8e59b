#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

namespace {

using namespace bfw;

const BFWParams mle = oracle::published_mle;

TEST(OrderStat, SingleObservationIsParentDensity) {
  for (double x : {0.3, 1.0, 2.5}) {
    EXPECT_NEAR(order_stat_pdf(x, {1, 1}, mle), bfw_pdf(x, mle), 1e-14 * bfw_pdf(x, mle));
  }
}

TEST(OrderStat, MaximumClosedForm) {
  const int n = 6;
  const double f = bfw_pdf(1.0, mle);
  const double F = bfw_cdf(1.0, mle);
  EXPECT_NEAR(order_stat_pdf(1.0, {n, n}, mle), n * std::pow(F, n - 1) * f, 1e-12 * f);
}

TEST(OrderStat, IntegratesToOne) {
  for (const OrderIndex idx : {OrderIndex{2, 5}, OrderIndex{1, 3}, OrderIndex{7, 7},
                               OrderIndex{10, 25}}) {
    const double total = oracle::integrate_positive(
        [&](double t) { return order_stat_pdf(t, idx, mle); });
    EXPECT_NEAR(total, 1.0, 1e-6) << idx.r << ' ' << idx.n;
  }
}

TEST(OrderStat, SumOverRanksIsNTimesDensity) {
  for (int n : {2, 3, 5}) {
    for (int i = 0; i < 20; ++i) {
      const double x = 0.2 + 0.15 * i;
      double s = 0.0;
      for (int r = 1; r <= n; ++r) s += order_stat_pdf(x, {r, n}, mle);
      EXPECT_NEAR(s, n * bfw_pdf(x, mle), 1e-10 * n * bfw_pdf(x, mle) + 1e-300);
    }
  }
}

TEST(OrderStat, ExpansionMatchesDirectForm) {
  for (double x : {0.3, 1.0, 4.0}) {
    const double direct = order_stat_pdf(x, {3, 7}, mle);
    EXPECT_NEAR(order_stat_pdf_expansion(x, {3, 7}, mle), direct, 1e-8 * direct + 1e-300) << x;
  }
}

TEST(OrderStat, ExpansionAgreesWhereStableUpToThirty) {
  int compared = 0;
  for (int n = 1; n <= 30; ++n) {
    for (int r = 1; r <= n; ++r) {
      for (double x = 0.2; x < 3.0; x += 0.2) {
        double e;
        try {
          e = order_stat_pdf_expansion(x, {r, n}, mle);
        } catch (const stability_error&) {
          continue;
        }
        const double d = order_stat_pdf(x, {r, n}, mle);
        if (d < 1e-250) continue;
        EXPECT_NEAR(e, d, 1e-8 * d) << r << ' ' << n << ' ' << x;
        ++compared;
      }
    }
  }
  EXPECT_GT(compared, 1000);
}

TEST(OrderStat, ExpansionSpecialCases) {
  // r = n: one term.
  const double F = bfw_cdf(1.0, mle);
  const double f = bfw_pdf(1.0, mle);
  EXPECT_NEAR(order_stat_pdf_expansion(1.0, {4, 4}, mle), 4 * std::pow(F, 3) * f, 1e-13 * f);
  // r = 1, n = 2: 2 (1 - F) f.
  EXPECT_NEAR(order_stat_pdf_expansion(1.0, {1, 2}, mle), 2 * (1 - F) * f, 1e-13 * f);
}

TEST(OrderStat, ExpansionRefusesUnstableCases) {
  EXPECT_THROW(order_stat_pdf_expansion(1.0, {1, 31}, mle), stability_error);
  // F close to one with many alternating terms.
  EXPECT_THROW(order_stat_pdf_expansion(5.0, {1, 30}, mle), stability_error);
}

TEST(OrderStat, DomainErrors) {
  EXPECT_THROW(order_stat_pdf(1.0, {0, 3}, mle), domain_error);
  EXPECT_THROW(order_stat_pdf(1.0, {4, 3}, mle), domain_error);
  EXPECT_THROW(order_stat_pdf(0.0, {1, 3}, mle), domain_error);
}

}  // namespace
