#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

namespace {

using namespace bfw;

struct Instance {
  Dataset data;
  BFWParams params;
};

std::vector<Instance> random_instances(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<Instance> out;
  for (int i = 0; i < count; ++i) {
    const BFWParams truth{oracle::log_uniform(rng, 0.1, 2.0), oracle::log_uniform(rng, 0.1, 2.0),
                          oracle::log_uniform(rng, 0.5, 10.0), oracle::log_uniform(rng, 0.5, 10.0)};
    Dataset d{bfw_sample(25, truth, seed * 1000 + i), "random"};
    // Evaluate away from the generating point so the score is not near zero.
    const BFWParams at{truth.alpha * oracle::log_uniform(rng, 0.7, 1.4),
                       truth.beta * oracle::log_uniform(rng, 0.7, 1.4),
                       truth.p * oracle::log_uniform(rng, 0.7, 1.4),
                       truth.q * oracle::log_uniform(rng, 0.7, 1.4)};
    out.push_back({std::move(d), at});
  }
  return out;
}

double& component(BFWParams& p, int j) {
  switch (j) {
    case 0: return p.alpha;
    case 1: return p.beta;
    case 2: return p.p;
    default: return p.q;
  }
}

TEST(LogLikelihood, FlexibleWeibullReductionOnHundredsScale) {
  const double ll = log_likelihood(pumps_hundreds(), {0.0207, 2.5875, 1.0, 1.0});
  EXPECT_NEAR(ll, -83.3424, 5e-4);
}

TEST(LogLikelihood, SinglePointIsLogDensity) {
  const BFWParams prm{0.5, 0.5, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(log_likelihood({{1.0}, "one"}, prm), bfw_log_pdf(1.0, prm));
}

TEST(LogLikelihood, AgreesWithDirectDensity) {
  const auto d = pumps();
  double s = 0.0;
  for (double x : d.times) s += std::log(oracle::bfw_pdf_direct(x, oracle::published_mle));
  EXPECT_NEAR(log_likelihood(d, oracle::published_mle), s, 1e-10 * std::fabs(s));
}

TEST(LogLikelihood, PublishedEstimatesOnThousandsScale) {
  const double ll = log_likelihood(pumps(), oracle::published_mle);
  std::cout << "[info] log-likelihood at published estimates: " << ll << '\n';
  EXPECT_NEAR(ll, -30.768, 5e-4);
}

TEST(Score, MatchesFiniteDifferences) {
  for (const auto& [data, prm] : random_instances(50, 11)) {
    const Eigen::Vector4d g = score(data, prm);
    for (int j = 0; j < 4; ++j) {
      BFWParams base = prm;
      const double h = 1e-6 * component(base, j);
      const double fd = oracle::five_point(
          [&](double v) {
            BFWParams t = prm;
            component(t, j) = v;
            return log_likelihood(data, t);
          },
          component(base, j), h);
      // The floor covers components that are numerically zero.
      EXPECT_NEAR(g[j], fd, 1e-5 * std::max(std::fabs(fd), 1e-3)) << j;
    }
  }
}

TEST(Score, UnitShapeQComponent) {
  const auto d = pumps();
  const BFWParams prm{0.3, 0.2, 1.0, 1.0};
  double sum_e = 0.0;
  for (double x : d.times) sum_e += std::exp(prm.alpha * x - prm.beta / x);
  EXPECT_NEAR(score(d, prm)[3], d.size() - sum_e, 1e-12 * d.size());
}

TEST(ObservedInformation, MatchesFiniteDifferencesOfScore) {
  for (const auto& [data, prm] : random_instances(20, 12)) {
    const Eigen::Matrix4d info = observed_information(data, prm);
    for (int j = 0; j < 4; ++j) {
      BFWParams base = prm;
      const double h = 1e-5 * component(base, j);
      for (int k = 0; k < 4; ++k) {
        const double fd = -oracle::five_point(
            [&](double v) {
              BFWParams t = prm;
              component(t, j) = v;
              return score(data, t)[k];
            },
            component(base, j), h);
        const double scale = std::sqrt(std::fabs(info(j, j) * info(k, k)));
        EXPECT_NEAR(info(k, j), fd, 1e-4 * std::max(std::fabs(fd), 1e-3 * scale)) << k << j;
      }
    }
    EXPECT_TRUE(info.isApprox(info.transpose(), 0.0));
  }
}

TEST(ObservedInformation, ShapeBlockIsTrigamma) {
  const auto d = pumps();
  const auto info = observed_information(d, oracle::published_mle);
  const double pq = oracle::published_mle.p + oracle::published_mle.q;
  EXPECT_NEAR(info(2, 3), -23.0 * boost::math::trigamma(pq), 1e-12);
  EXPECT_NEAR(info(2, 2),
              23.0 * (boost::math::trigamma(oracle::published_mle.p) - boost::math::trigamma(pq)),
              1e-10);
}

TEST(ObservedInformation, PrintedFormDisagreesWithDerivatives) {
  // The printed alpha-beta and beta-beta entries carry an extra factor;
  // they are kept as a diagnostic only.
  const auto d = pumps();
  const auto exact = observed_information(d, oracle::published_mle);
  const auto printed = observed_information(d, oracle::published_mle, HessianForm::as_printed);
  const double fd = -oracle::five_point(
      [&](double b) {
        BFWParams t = oracle::published_mle;
        t.beta = b;
        return score(d, t)[1];
      },
      oracle::published_mle.beta, 1e-6);
  EXPECT_NEAR(exact(1, 1), fd, 1e-4 * std::fabs(fd));
  EXPECT_GT(std::fabs(printed(1, 1) - fd), 1e-2 * std::fabs(fd));
  EXPECT_EQ(exact(2, 3), printed(2, 3));
}

TEST(ObservedInformation, CovarianceNearPrintedDiagonal) {
  const auto info = observed_information(pumps(), oracle::published_mle);
  const Eigen::Matrix4d cov = info.inverse();
  const double printed[] = {2.123e-3, 5.558e-4, 3.912e3, 1.304e3};
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(cov(j, j), printed[j], 0.05 * printed[j]) << j;
}

class PumpsFit : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { fit_ = new FitResult(fit_mle(pumps())); }
  static void TearDownTestSuite() {
    delete fit_;
    fit_ = nullptr;
  }
  static FitResult* fit_;
};
FitResult* PumpsFit::fit_ = nullptr;

TEST_F(PumpsFit, DominatesPublishedEstimates) {
  EXPECT_TRUE(fit_->converged);
  EXPECT_GE(fit_->log_likelihood, log_likelihood(pumps(), oracle::published_mle) - 1e-6);
  EXPECT_LE(fit_->score_at_optimum.lpNorm<Eigen::Infinity>(), 1e-6);
  EXPECT_EQ(fit_->multistart_best_of, 16);
  std::cout << "[info] fit: ll " << fit_->log_likelihood << " at (" << fit_->estimates.alpha
            << ", " << fit_->estimates.beta << ", " << fit_->estimates.p << ", "
            << fit_->estimates.q << "), " << fit_->starts_converged << "/16 starts converged\n";
}

TEST_F(PumpsFit, TrajectoryIsMonotone) {
  ASSERT_FALSE(fit_->trajectory.empty());
  for (std::size_t i = 1; i < fit_->trajectory.size(); ++i) {
    EXPECT_GE(fit_->trajectory[i], fit_->trajectory[i - 1]) << i;
  }
  EXPECT_NEAR(fit_->trajectory.back(), fit_->log_likelihood, 1e-9);
}

TEST_F(PumpsFit, CovarianceInvertsInformation) {
  ASSERT_TRUE(fit_->covariance.has_value());
  EXPECT_TRUE(fit_->information_positive_definite);
  const Eigen::Matrix4d prod = *fit_->covariance * fit_->observed_information;
  EXPECT_LE((prod - Eigen::Matrix4d::Identity()).lpNorm<Eigen::Infinity>(), 1e-8)
      << "condition number " << fit_->condition_number;
  for (int j = 0; j < 4; ++j) EXPECT_GE((*fit_->covariance)(j, j), 0.0);
}

TEST_F(PumpsFit, IntervalsContainEstimates) {
  const double est[] = {fit_->estimates.alpha, fit_->estimates.beta, fit_->estimates.p,
                        fit_->estimates.q};
  for (int j = 0; j < 4; ++j) {
    ASSERT_TRUE(fit_->confidence_intervals[j].has_value());
    EXPECT_LE(fit_->confidence_intervals[j]->lower, est[j]);
    EXPECT_GE(fit_->confidence_intervals[j]->upper, est[j]);
    EXPECT_GE(fit_->confidence_intervals[j]->lower, 0.0);
  }
}

TEST_F(PumpsFit, RawParameterizationReachesSameOptimum) {
  FitConfig cfg;
  cfg.parameterization = Parameterization::raw;
  const auto raw = fit_mle(pumps(), cfg);
  EXPECT_NEAR(raw.log_likelihood, fit_->log_likelihood, 1e-6);
}

TEST_F(PumpsFit, SerialAndParallelAgree) {
  FitConfig cfg;
  cfg.parallel = false;
  const auto serial = fit_mle(pumps(), cfg);
  EXPECT_EQ(serial.log_likelihood, fit_->log_likelihood);
  EXPECT_EQ(serial.estimates.p, fit_->estimates.p);
}

TEST(FitMle, SyntheticRecoveryIsStatisticallyConsistent) {
  // The MLE must beat the generating point, and the likelihood-ratio
  // statistic against it must be unremarkable (chi-square, 4 df, 0.999
  // quantile 18.467). The stricter 10% recovery target is judged by the
  // acceptance binary.
  const BFWParams truth{0.5, 0.5, 2.0, 2.0};
  const Dataset d{bfw_sample(5000, truth, 42), "synthetic"};
  const auto fit = fit_mle(d);
  const double lr = 2.0 * (fit.log_likelihood - log_likelihood(d, truth));
  EXPECT_GE(lr, 0.0);
  EXPECT_LE(lr, 18.467);
}

TEST(FitMle, RejectsTooFewObservations) {
  EXPECT_THROW(fit_mle({{1.0, 2.0, 3.0, 4.0}, "four"}), domain_error);
  FitConfig cfg;
  cfg.starts = 0;
  EXPECT_THROW(fit_mle(pumps(), cfg), domain_error);
}

TEST(FitMle, ConvergenceErrorCarriesPerStartDiagnostics) {
  FitConfig cfg;
  cfg.max_iterations = 1;
  cfg.starts = 3;
  try {
    fit_mle(pumps(), cfg);
    FAIL() << "expected convergence_error";
  } catch (const convergence_error& e) {
    EXPECT_EQ(e.diagnostics().size(), 3u);
  }
}

TEST(WaldIntervals, PrintedCovarianceDiagonal) {
  const double est[] = {0.052, 0.024, 35.077, 20.328};
  const double var[] = {2.123e-3, 5.558e-4, 3.912e3, 1.304e3};
  const auto ci = wald_intervals(est, var, 0.95);
  EXPECT_EQ(ci[0]->lower, 0.0);
  EXPECT_NEAR(ci[0]->upper, 0.142, 5e-4);
  EXPECT_NEAR(ci[1]->upper, 0.070, 5e-4);
  // p and q reproduce to about 1e-2 from the rounded diagonal; see acceptance.
  EXPECT_NEAR(ci[2]->upper, 157.671, 1e-2);
  EXPECT_NEAR(ci[3]->upper, 91.105, 1e-2);
}

TEST(WaldIntervals, LevelZeroCollapses) {
  const double est[] = {1.5, 2.5};
  const double var[] = {0.3, 0.7};
  const auto ci = wald_intervals(est, var, 0.0);
  for (int j = 0; j < 2; ++j) {
    EXPECT_EQ(ci[j]->lower, est[j]);
    EXPECT_EQ(ci[j]->upper, est[j]);
  }
}

TEST(WaldIntervals, WidthScalesWithNormalQuantile) {
  const double est[] = {100.0};
  const double var[] = {4.0};
  const auto a = wald_intervals(est, var, 0.90);
  const auto b = wald_intervals(est, var, 0.95);
  const double ratio = (a[0]->upper - a[0]->lower) / (b[0]->upper - b[0]->lower);
  EXPECT_NEAR(ratio, 1.645 / 1.960, 1e-3);
}

TEST(WaldIntervals, NegativeVarianceGivesNoInterval) {
  const double est[] = {1.0, 1.0};
  const double var[] = {-1.0, 1.0};
  const auto ci = wald_intervals(est, var, 0.95);
  EXPECT_FALSE(ci[0].has_value());
  EXPECT_TRUE(ci[1].has_value());
  EXPECT_THROW(wald_intervals(est, var, 1.0), domain_error);
}

TEST(Dataset, Validation) {
  EXPECT_THROW((Dataset{{}, "empty"}.validate()), domain_error);
  EXPECT_THROW((Dataset{{1.0, -2.0}, "neg"}.validate()), domain_error);
  EXPECT_THROW((Dataset{{1.0, INFINITY}, "inf"}.validate()), domain_error);
}

}  // namespace
