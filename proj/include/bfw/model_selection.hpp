// Competitor families, goodness of fit and information criteria for comparing
// lifetime models on one dataset.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bfw/bfw_core.hpp"
#include "bfw/error.hpp"
#include "bfw/flexible_weibull.hpp"
#include "bfw/inference.hpp"
#include "bfw/optimizer.hpp"

namespace bfw {

enum class FamilyId { bfw, fw, weibull };

/// Two-parameter Weibull parameterizations, both ordered (shape, second):
///   scale: F = 1 - exp(-(x / lambda)^k), params (k, lambda)
///   rate:  F = 1 - exp(-a x^b),          params (b, a)
enum class WeibullForm { scale, rate };

struct FittedModel {
  std::vector<double> estimates;
  double log_likelihood = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
  Eigen::MatrixXd observed_information;
  std::optional<Eigen::MatrixXd> covariance;
  std::vector<std::optional<Interval>> confidence_intervals;
  std::optional<FitResult> bfw_detail;  ///< full result when the family is BFW
};

class ModelFamily {
 public:
  virtual ~ModelFamily() = default;

  virtual FamilyId id() const = 0;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> parameter_names() const = 0;
  int parameter_count() const { return static_cast<int>(parameter_names().size()); }

  virtual double cdf(double x, std::span<const double> params) const = 0;
  virtual double log_survival(double x, std::span<const double> params) const = 0;
  virtual double log_pdf(double x, std::span<const double> params) const = 0;
  virtual FittedModel fit(const Dataset& data, const FitConfig& cfg) const = 0;

  double pdf(double x, std::span<const double> params) const {
    return std::exp(log_pdf(x, params));
  }
  double survival(double x, std::span<const double> params) const {
    return std::exp(log_survival(x, params));
  }
  /// f / S in log space; saturation_error once S underflows.
  double hazard(double x, std::span<const double> params) const {
    const double ls = log_survival(x, params);
    if (ls == -std::numeric_limits<double>::infinity()) {
      throw saturation_error(name() + " hazard: survival underflows at x = " + std::to_string(x),
                             std::numeric_limits<double>::max());
    }
    return std::exp(log_pdf(x, params) - ls);
  }

  double log_likelihood(const Dataset& data, std::span<const double> params) const {
    data.validate();
    double s = 0.0;
    for (double x : data.times) s += log_pdf(x, params);
    return std::isnan(s) ? -std::numeric_limits<double>::infinity() : s;
  }

 protected:
  void check_count(std::span<const double> params) const {
    if (static_cast<int>(params.size()) != parameter_count()) {
      throw domain_error(name() + ": expected " + std::to_string(parameter_count()) +
                         " parameters, got " + std::to_string(params.size()));
    }
    for (double v : params) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw domain_error(name() + ": parameters must be positive and finite");
      }
    }
  }
};

namespace detail {

struct TwoParamModel {
  std::function<double(double, double)> value;  // log-likelihood
  std::function<Eigen::Vector2d(double, double)> gradient;
  std::function<Eigen::Matrix2d(double, double)> hessian;
};

inline FittedModel finish_fit(std::vector<double> est, double ll, int iterations,
                              const Eigen::MatrixXd& hess, double level) {
  FittedModel m;
  m.estimates = std::move(est);
  m.log_likelihood = ll;
  m.converged = true;
  m.iterations = iterations;
  m.observed_information = -hess;
  const Eigen::Index k = hess.rows();
  m.confidence_intervals.assign(k, std::nullopt);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m.observed_information);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
      (ldlt.vectorD().array() > 0.0).all()) {
    Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    if (cov.allFinite()) {
      cov = 0.5 * (cov + cov.transpose());
      std::vector<double> var(k);
      for (Eigen::Index i = 0; i < k; ++i) var[i] = cov(i, i);
      m.confidence_intervals = wald_intervals(m.estimates, var, level);
      m.covariance = std::move(cov);
    }
  }
  return m;
}

/// Log-space multi-start maximization of a two-parameter likelihood; keeps the
/// best converged start.
inline FittedModel fit_two_param(const TwoParamModel& model, const std::string& who,
                                 std::span<const std::array<double, 2>> starts,
                                 const FitConfig& cfg) {
  Objective obj;
  obj.feasible = [](const Eigen::VectorXd& z) {
    return z.allFinite() && (z.array().abs() < 600.0).all();
  };
  obj.value = [&](const Eigen::VectorXd& z) { return model.value(std::exp(z[0]), std::exp(z[1])); };
  obj.gradient = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    const Eigen::Vector2d eta = z.array().exp();
    return eta.cwiseProduct(model.gradient(eta[0], eta[1]));
  };
  obj.hessian = [&](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
    const Eigen::Vector2d eta = z.array().exp();
    Eigen::Matrix2d h = eta.asDiagonal() * model.hessian(eta[0], eta[1]) * eta.asDiagonal();
    h.diagonal() += eta.cwiseProduct(model.gradient(eta[0], eta[1]));
    return h;
  };
  obj.stationarity = [&](const Eigen::VectorXd& z) {
    return model.gradient(std::exp(z[0]), std::exp(z[1])).lpNorm<Eigen::Infinity>();
  };
  OptimizerSettings settings;
  settings.max_iterations = cfg.max_iterations;
  settings.stationarity_tol = cfg.score_tol;
  settings.rel_value_tol = cfg.rel_ll_tol;

  std::optional<OptimizeResult> best;
  std::vector<std::string> diag;
  for (const auto& s : starts) {
    Eigen::VectorXd z(2);
    z << std::log(s[0]), std::log(s[1]);
    OptimizeResult r = maximize(obj, z, settings);
    diag.push_back("start (" + std::to_string(s[0]) + ", " + std::to_string(s[1]) + "): " +
                   r.message + ", ll = " + std::to_string(r.value));
    if (r.converged && (!best || r.value > best->value)) best = std::move(r);
  }
  if (!best) throw convergence_error(who + ": no start converged", std::move(diag));
  const double a = std::exp(best->argmax[0]);
  const double b = std::exp(best->argmax[1]);
  return finish_fit({a, b}, model.value(a, b), best->iterations, model.hessian(a, b), cfg.level);
}

// Starts scaled to the data: a grid in multiples of the sample mean.
inline double sample_mean(const Dataset& data) {
  double s = 0.0;
  for (double x : data.times) s += x;
  return s / static_cast<double>(data.size());
}

}  // namespace detail

class BFWFamily final : public ModelFamily {
 public:
  FamilyId id() const override { return FamilyId::bfw; }
  std::string name() const override { return "BFW"; }
  std::vector<std::string> parameter_names() const override { return {"alpha", "beta", "p", "q"}; }

  double cdf(double x, std::span<const double> prm) const override {
    return bfw_cdf(x, to_params(prm));
  }
  double log_survival(double x, std::span<const double> prm) const override {
    return bfw_log_survival(x, to_params(prm));
  }
  double log_pdf(double x, std::span<const double> prm) const override {
    return bfw_log_pdf(x, to_params(prm));
  }

  FittedModel fit(const Dataset& data, const FitConfig& cfg) const override {
    FitResult r = fit_mle(data, cfg);
    FittedModel m;
    m.estimates = {r.estimates.alpha, r.estimates.beta, r.estimates.p, r.estimates.q};
    m.log_likelihood = r.log_likelihood;
    m.converged = r.converged;
    m.iterations = r.iterations;
    m.observed_information = r.observed_information;
    if (r.covariance) m.covariance = Eigen::MatrixXd(*r.covariance);
    m.confidence_intervals.assign(r.confidence_intervals.begin(), r.confidence_intervals.end());
    m.bfw_detail = std::move(r);
    return m;
  }

 private:
  BFWParams to_params(std::span<const double> prm) const {
    check_count(prm);
    return {prm[0], prm[1], prm[2], prm[3]};
  }
};

class FWFamily final : public ModelFamily {
 public:
  FamilyId id() const override { return FamilyId::fw; }
  std::string name() const override { return "FW"; }
  std::vector<std::string> parameter_names() const override { return {"alpha", "beta"}; }

  double cdf(double x, std::span<const double> prm) const override {
    return fw_cdf(x, to_params(prm));
  }
  double log_survival(double x, std::span<const double> prm) const override {
    const FWParams f = to_params(prm);
    detail::check_time(x, "fw_log_survival");
    return -std::exp(detail::fw_exponent(x, f.alpha, f.beta));
  }
  double log_pdf(double x, std::span<const double> prm) const override {
    return fw_log_pdf(x, to_params(prm));
  }

  FittedModel fit(const Dataset& data, const FitConfig& cfg) const override {
    data.validate();
    if (data.size() < 3) throw domain_error("FW fit: need at least 3 observations");
    const auto& xs = data.times;
    detail::TwoParamModel model;
    model.value = [&xs](double a, double b) {
      double s = 0.0;
      for (double x : xs) {
        const double w = detail::fw_exponent(x, a, b);
        s += detail::log_rate_factor(x, a, b) + w - std::exp(w);
      }
      return std::isnan(s) ? -std::numeric_limits<double>::infinity() : s;
    };
    model.gradient = [&xs](double a, double b) {
      Eigen::Vector2d g = Eigen::Vector2d::Zero();
      for (double x : xs) {
        const double e = std::exp(detail::fw_exponent(x, a, b));
        const double d = b + a * x * x;
        g[0] += x * x / d + x - x * e;
        g[1] += 1.0 / d - 1.0 / x + e / x;
      }
      return g;
    };
    model.hessian = [&xs](double a, double b) {
      double aa = 0, ab = 0, bb = 0;
      for (double x : xs) {
        const double e = std::exp(detail::fw_exponent(x, a, b));
        const double d2 = (b + a * x * x) * (b + a * x * x);
        aa += -x * x * x * x / d2 - x * x * e;
        ab += -x * x / d2 + e;
        bb += -1.0 / d2 - e / (x * x);
      }
      Eigen::Matrix2d h;
      h << aa, ab, ab, bb;
      return h;
    };
    const double mu = detail::sample_mean(data);
    std::vector<std::array<double, 2>> starts;
    for (double sa : {0.1, 1.0, 10.0}) {
      for (double sb : {0.1, 1.0, 10.0}) starts.push_back({sa / mu, sb * mu});
    }
    return detail::fit_two_param(model, "FW fit", starts, cfg);
  }

 private:
  FWParams to_params(std::span<const double> prm) const {
    check_count(prm);
    return {prm[0], prm[1]};
  }
};

class WeibullFamily final : public ModelFamily {
 public:
  explicit WeibullFamily(WeibullForm form = WeibullForm::scale) : form_(form) {}

  WeibullForm form() const { return form_; }
  FamilyId id() const override { return FamilyId::weibull; }
  std::string name() const override { return "WEIBULL2P"; }
  std::vector<std::string> parameter_names() const override {
    if (form_ == WeibullForm::scale) return {"shape", "scale"};
    return {"shape", "rate"};
  }

  double cdf(double x, std::span<const double> prm) const override {
    return -std::expm1(log_survival(x, prm));
  }
  double log_survival(double x, std::span<const double> prm) const override {
    check_count(prm);
    detail::check_time(x, "weibull_log_survival");
    return -cumulative(x, prm[0], prm[1]);
  }
  double log_pdf(double x, std::span<const double> prm) const override {
    check_count(prm);
    detail::check_time(x, "weibull_log_pdf");
    const double k = prm[0];
    const double s = prm[1];
    if (form_ == WeibullForm::scale) {
      return std::log(k / s) + (k - 1.0) * std::log(x / s) - std::pow(x / s, k);
    }
    return std::log(s * k) + (k - 1.0) * std::log(x) - s * std::pow(x, k);
  }

  FittedModel fit(const Dataset& data, const FitConfig& cfg) const override {
    data.validate();
    if (data.size() < 3) throw domain_error("Weibull fit: need at least 3 observations");
    const auto& xs = data.times;
    detail::TwoParamModel model;
    model.value = [this, &xs](double k, double s) {
      const std::array prm{k, s};
      double v = 0.0;
      for (double x : xs) v += log_pdf(x, prm);
      return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
    };
    if (form_ == WeibullForm::scale) {
      model.gradient = [&xs](double k, double lam) {
        Eigen::Vector2d g = Eigen::Vector2d::Zero();
        for (double x : xs) {
          const double u = std::log(x / lam);
          const double z = std::exp(k * u);
          g[0] += 1.0 / k + u - z * u;
          g[1] += (k / lam) * (z - 1.0);
        }
        return g;
      };
      model.hessian = [&xs](double k, double lam) {
        double kk = 0, kl = 0, ll = 0;
        for (double x : xs) {
          const double u = std::log(x / lam);
          const double z = std::exp(k * u);
          kk += -1.0 / (k * k) - z * u * u;
          kl += (-1.0 + k * z * u + z) / lam;
          ll += k / (lam * lam) * (1.0 - z - k * z);
        }
        Eigen::Matrix2d h;
        h << kk, kl, kl, ll;
        return h;
      };
    } else {
      model.gradient = [&xs](double b, double a) {
        Eigen::Vector2d g = Eigen::Vector2d::Zero();
        for (double x : xs) {
          const double lx = std::log(x);
          const double v = std::pow(x, b);
          g[0] += 1.0 / b + lx - a * v * lx;
          g[1] += 1.0 / a - v;
        }
        return g;
      };
      model.hessian = [&xs](double b, double a) {
        double bb = 0, ba = 0, aa = 0;
        for (double x : xs) {
          const double lx = std::log(x);
          const double v = std::pow(x, b);
          bb += -1.0 / (b * b) - a * v * lx * lx;
          ba += -v * lx;
          aa += -1.0 / (a * a);
        }
        Eigen::Matrix2d h;
        h << bb, ba, ba, aa;
        return h;
      };
    }
    const double mu = detail::sample_mean(data);
    std::vector<std::array<double, 2>> starts;
    for (double k : {0.5, 1.0, 2.0}) {
      for (double c : {0.5, 1.0, 2.0}) {
        const double lam = c * mu;
        starts.push_back({k, form_ == WeibullForm::scale ? lam : std::pow(lam, -k)});
      }
    }
    return detail::fit_two_param(model, "Weibull fit", starts, cfg);
  }

 private:
  double cumulative(double x, double k, double s) const {
    return form_ == WeibullForm::scale ? std::pow(x / s, k) : s * std::pow(x, k);
  }

  WeibullForm form_;
};

inline std::unique_ptr<ModelFamily> make_family(FamilyId id,
                                                WeibullForm form = WeibullForm::scale) {
  switch (id) {
    case FamilyId::bfw:
      return std::make_unique<BFWFamily>();
    case FamilyId::fw:
      return std::make_unique<FWFamily>();
    case FamilyId::weibull:
      return std::make_unique<WeibullFamily>(form);
  }
  throw domain_error("make_family: unknown family");
}

struct InformationCriteria {
  double aic;
  std::optional<double> aicc;  ///< undefined when n <= k + 1
  double bic;
  double hqic;
};

inline InformationCriteria information_criteria(double ll, int k, int n) {
  if (k < 0 || n < 1) throw domain_error("information_criteria: need k >= 0 and n >= 1");
  const double m2ll = -2.0 * ll;
  InformationCriteria c{};
  c.aic = 2.0 * k + m2ll;
  if (n > k + 1) c.aicc = c.aic + 2.0 * k * (k + 1.0) / (n - k - 1.0);
  c.bic = k * std::log(static_cast<double>(n)) + m2ll;
  c.hqic = n > 1 ? 2.0 * k * std::log(std::log(static_cast<double>(n))) + m2ll : m2ll;
  return c;
}

/// Two-sided one-sample Kolmogorov-Smirnov statistic sup |F_n - F|. Tied
/// observations are evaluated once with their cumulative count.
inline double ks_statistic(const Dataset& data, const std::function<double(double)>& cdf) {
  data.validate();
  std::vector<double> xs = data.times;
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(j) / n - f, f - static_cast<double>(i) / n});
    i = j;
  }
  return d;
}

/// Right-continuous step function: initial_value before the first breakpoint,
/// then the value of the last breakpoint at or before t.
struct StepCurve {
  double initial_value = 0.0;
  std::vector<std::pair<double, double>> breakpoints;  ///< (time, value), times increasing

  double operator()(double t) const {
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t,
                               [](double v, const auto& bp) { return v < bp.first; });
    if (it == breakpoints.begin()) return initial_value;
    return std::prev(it)->second;
  }
};

namespace detail {

// Distinct sorted times with the number of observations at or below each.
inline std::vector<std::pair<double, std::size_t>> cumulative_counts(const Dataset& data) {
  data.validate();
  std::vector<double> xs = data.times;
  std::sort(xs.begin(), xs.end());
  std::vector<std::pair<double, std::size_t>> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!out.empty() && out.back().first == xs[i]) {
      out.back().second = i + 1;
    } else {
      out.emplace_back(xs[i], i + 1);
    }
  }
  return out;
}

}  // namespace detail

inline StepCurve ecdf(const Dataset& data) {
  StepCurve c;
  const double n = static_cast<double>(data.size());
  for (const auto& [t, count] : detail::cumulative_counts(data)) {
    c.breakpoints.emplace_back(t, static_cast<double>(count) / n);
  }
  c.initial_value = 0.0;
  return c;
}

/// Kaplan-Meier survival curve for complete data: the fraction still alive.
inline StepCurve kaplan_meier(const Dataset& data) {
  StepCurve c;
  const std::size_t n = data.size();
  for (const auto& [t, count] : detail::cumulative_counts(data)) {
    c.breakpoints.emplace_back(t, static_cast<double>(n - count) / static_cast<double>(n));
  }
  c.initial_value = 1.0;
  return c;
}

struct ComparisonRow {
  std::string model;
  std::vector<std::string> parameter_names;
  std::vector<double> estimates;
  double log_likelihood = std::numeric_limits<double>::quiet_NaN();
  double minus_two_ll = std::numeric_limits<double>::quiet_NaN();
  double aic = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> aicc;
  double bic = std::numeric_limits<double>::quiet_NaN();
  double hqic = std::numeric_limits<double>::quiet_NaN();
  double ks_statistic = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  std::string error;  ///< non-empty when the family failed to fit
};

/// Fits one family and assembles its comparison row. Exceptions propagate.
/// The data are sorted first so the result does not depend on input order.
inline ComparisonRow fit_model(const ModelFamily& family, const Dataset& input,
                               const FitConfig& cfg = {}) {
  input.validate();
  Dataset data = input;
  std::sort(data.times.begin(), data.times.end());
  const int k = family.parameter_count();
  if (static_cast<int>(data.size()) < k + 1) {
    throw domain_error(family.name() + ": need at least " + std::to_string(k + 1) +
                       " observations");
  }
  const FittedModel m = family.fit(data, cfg);
  ComparisonRow row;
  row.model = family.name();
  row.parameter_names = family.parameter_names();
  row.estimates = m.estimates;
  row.log_likelihood = m.log_likelihood;
  row.minus_two_ll = -2.0 * m.log_likelihood;
  const auto ic = information_criteria(m.log_likelihood, k, static_cast<int>(data.size()));
  row.aic = ic.aic;
  row.aicc = ic.aicc;
  row.bic = ic.bic;
  row.hqic = ic.hqic;
  row.ks_statistic = ks_statistic(data, [&](double x) { return family.cdf(x, m.estimates); });
  row.converged = m.converged;
  return row;
}

/// One row per family sorted by AIC; a family that fails keeps its row with
/// the error text and sorts last. Stable, so equal AICs keep input order.
inline std::vector<ComparisonRow> compare_models(
    const Dataset& data, std::span<const std::unique_ptr<ModelFamily>> families,
    const FitConfig& cfg = {}) {
  if (families.empty()) throw domain_error("compare_models: need at least one family");
  data.validate();
  std::vector<ComparisonRow> rows;
  rows.reserve(families.size());
  for (const auto& fam : families) {
    try {
      rows.push_back(fit_model(*fam, data, cfg));
    } catch (const error& e) {
      ComparisonRow r;
      r.model = fam->name();
      r.parameter_names = fam->parameter_names();
      r.error = e.what();
      rows.push_back(std::move(r));
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    const bool fa = !a.error.empty();
    const bool fb = !b.error.empty();
    if (fa != fb) return fb;
    if (fa) return false;
    return a.aic < b.aic;
  });
  return rows;
}

}  // namespace bfw
