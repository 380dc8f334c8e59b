// Maximum-likelihood estimation for the BFW distribution from complete
// (uncensored) lifetime data: log-likelihood, analytic score and observed
// information, multi-start fitting, and Wald confidence intervals.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "bfw/bfw_core.hpp"
#include "bfw/error.hpp"
#include "bfw/flexible_weibull.hpp"
#include "bfw/optimizer.hpp"
#include "bfw/special_fn.hpp"

namespace bfw {

struct Dataset {
  std::vector<double> times;
  std::string label;

  std::size_t size() const { return times.size(); }

  void validate() const {
    if (times.empty()) throw domain_error("Dataset '" + label + "' is empty");
    for (double t : times) {
      if (!(t > 0.0) || !std::isfinite(t)) {
        throw domain_error("Dataset '" + label + "' contains a non-positive or non-finite time");
      }
    }
  }
};

/// Which closed form to use for the second derivatives involving (p - 1).
enum class HessianForm {
  exact,       ///< true second derivatives of the log-likelihood
  as_printed,  ///< the published expressions, whose alpha-beta and beta-beta entries carry an
               ///< extra factor x_i in the (p - 1) sum; diagnostics only
};

namespace detail {

// Per-observation quantities shared by the score and Hessian.
struct Obs {
  double x;
  double e;      // e^{w}
  double log_g;  // ln(1 - e^{-e^{w}})
  double rho;    // e / (e^{e} - 1)
  double kappa;  // e * d rho / d e
  double denom;  // beta + alpha x^2
};

/// e d/de [e / (e^e - 1)]
inline double e_times_rho_prime(double e) {
  if (e < 0.1) {
    const double e2 = e * e;
    return e * (-0.5 + e / 6.0 - e * e2 / 180.0 + e * e2 * e2 / 5040.0 -
                e * e2 * e2 * e2 / 151200.0);
  }
  if (e > 700.0) return std::isinf(e) ? 0.0 : e * std::exp(-e) * (1.0 - e);
  const double rho = e / std::expm1(e);
  return rho - rho * rho * std::exp(e);
}

inline Obs observe(double x, const BFWParams& prm) {
  const double w = fw_exponent(x, prm.alpha, prm.beta);
  const double e = std::exp(w);
  return {x, e, log_fw_cdf_from_exponent(w), e_over_expm1(e), e_times_rho_prime(e),
          prm.beta + prm.alpha * x * x};
}

inline double radical_inverse(unsigned index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * (index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace detail

/// Sum of ln f(x_i) over the data. Returns -inf when any term is -inf.
inline double log_likelihood(const Dataset& data, const BFWParams& params) {
  data.validate();
  params.validate();
  const double n = static_cast<double>(data.size());
  double s = n * (log_gamma(params.p + params.q) - log_gamma(params.p) - log_gamma(params.q));
  for (double x : data.times) {
    const double w = detail::fw_exponent(x, params.alpha, params.beta);
    const double e = std::exp(w);
    const double shape = w < -30.0 ? params.p * w - (params.p - 1.0) * 0.5 * e
                                   : w + (params.p - 1.0) * detail::log_fw_cdf_from_exponent(w);
    s += detail::log_rate_factor(x, params.alpha, params.beta) + shape - params.q * e;
  }
  if (std::isnan(s)) return -std::numeric_limits<double>::infinity();
  return s;
}

/// Gradient of the log-likelihood with respect to (alpha, beta, p, q).
inline Eigen::Vector4d score(const Dataset& data, const BFWParams& params) {
  data.validate();
  params.validate();
  const double n = static_cast<double>(data.size());
  const double pm1 = params.p - 1.0;
  Eigen::Vector4d g = Eigen::Vector4d::Zero();
  double sum_log_g = 0.0;
  double sum_e = 0.0;
  for (double x : data.times) {
    const auto o = detail::observe(x, params);
    g[0] += x * x / o.denom + x - params.q * x * o.e + pm1 * x * o.rho;
    g[1] += 1.0 / o.denom - 1.0 / x + params.q * o.e / x - pm1 * o.rho / x;
    sum_log_g += o.log_g;
    sum_e += o.e;
  }
  const double psi_pq = digamma(params.p + params.q);
  g[2] = n * psi_pq - n * digamma(params.p) + sum_log_g;
  g[3] = n * psi_pq - n * digamma(params.q) - sum_e;
  return g;
}

/// Matrix of second derivatives of the log-likelihood.
inline Eigen::Matrix4d log_likelihood_hessian(const Dataset& data, const BFWParams& params,
                                              HessianForm form = HessianForm::exact) {
  data.validate();
  params.validate();
  const double n = static_cast<double>(data.size());
  const double pm1 = params.p - 1.0;
  const double q = params.q;
  double aa = 0, ab = 0, ap = 0, aq = 0, bb = 0, bp = 0, bq = 0;
  for (double x : data.times) {
    const auto o = detail::observe(x, params);
    const double d2 = o.denom * o.denom;
    // With h_i = x_i kappa_i the printed forms read (p-1) sum h_i for alpha-beta
    // and (p-1) sum h_i / x_i^2 for beta-beta.
    const double ab_weight = form == HessianForm::exact ? 1.0 : x;
    const double bb_weight = form == HessianForm::exact ? 1.0 / (x * x) : 1.0 / x;
    aa += -x * x * x * x / d2 - q * x * x * o.e + pm1 * x * x * o.kappa;
    ab += -x * x / d2 + q * o.e - pm1 * ab_weight * o.kappa;
    ap += x * o.rho;
    aq += -x * o.e;
    bb += -1.0 / d2 - q * o.e / (x * x) + pm1 * bb_weight * o.kappa;
    bp += -o.rho / x;
    bq += o.e / x;
  }
  const double tri_pq = trigamma(params.p + params.q);
  Eigen::Matrix4d h;
  h << aa, ab, ap, aq,
       ab, bb, bp, bq,
       ap, bp, n * tri_pq - n * trigamma(params.p), n * tri_pq,
       aq, bq, n * tri_pq, n * tri_pq - n * trigamma(params.q);
  return h;
}

/// Observed information: the negated Hessian of the log-likelihood.
inline Eigen::Matrix4d observed_information(const Dataset& data, const BFWParams& params,
                                            HessianForm form = HessianForm::exact) {
  const Eigen::Matrix4d info = -log_likelihood_hessian(data, params, form);
  static constexpr const char* names[] = {"alpha", "beta", "p", "q"};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (!std::isfinite(info(i, j))) {
        throw numeric_error(std::string("observed_information: entry (") + names[i] + ", " +
                            names[j] + ") is not finite");
      }
    }
  }
  return info;
}

struct Interval {
  double lower;
  double upper;
};

/// Wald intervals estimate +/- z_{(1-level)/2} sqrt(var), lower ends clamped at
/// zero. A parameter whose variance is negative or non-finite gets no interval.
inline std::vector<std::optional<Interval>> wald_intervals(std::span<const double> estimates,
                                                           std::span<const double> variances,
                                                           double level) {
  if (!(level >= 0.0 && level < 1.0)) {
    throw domain_error("confidence level must lie in [0, 1)");
  }
  if (estimates.size() != variances.size()) {
    throw domain_error("wald_intervals: size mismatch");
  }
  const double z = level == 0.0 ? 0.0 : std_normal_quantile(0.5 + 0.5 * level);
  std::vector<std::optional<Interval>> out;
  out.reserve(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (!(variances[i] >= 0.0) || !std::isfinite(variances[i])) {
      out.emplace_back(std::nullopt);
      continue;
    }
    const double half = z * std::sqrt(variances[i]);
    out.push_back(Interval{std::max(0.0, estimates[i] - half), estimates[i] + half});
  }
  return out;
}

enum class Parameterization { log, raw };

struct FitConfig {
  int starts = 16;
  double score_tol = 1e-6;
  double rel_ll_tol = 1e-12;
  int max_iterations = 2000;
  double level = 0.95;
  Parameterization parameterization = Parameterization::log;
  bool parallel = true;
  double start_log_lo = std::log(1e-3);
  double start_log_hi = std::log(1e2);
};

struct StartRecord {
  BFWParams start;
  BFWParams end;
  double log_likelihood;
  bool converged;
  int iterations;
  std::string message;
};

struct FitResult {
  BFWParams estimates{};
  double log_likelihood = 0.0;
  Eigen::Vector4d score_at_optimum = Eigen::Vector4d::Zero();
  Eigen::Matrix4d observed_information = Eigen::Matrix4d::Zero();
  bool information_positive_definite = false;
  double condition_number = std::numeric_limits<double>::infinity();
  std::optional<Eigen::Matrix4d> covariance;  ///< empty when the information is singular
  double level = 0.95;
  std::array<std::optional<Interval>, 4> confidence_intervals{};
  bool converged = false;
  int iterations = 0;
  int multistart_best_of = 0;  ///< number of starts tried
  int starts_converged = 0;
  std::vector<double> trajectory;  ///< log-likelihood along the winning start
  std::vector<StartRecord> starts;
};

/// Deterministic start points: Halton sequence (bases 2, 3, 5, 7) over the
/// configured box in log-parameter space.
inline std::vector<BFWParams> multistart_points(int count, double log_lo, double log_hi) {
  static constexpr unsigned bases[] = {2, 3, 5, 7};
  std::vector<BFWParams> out;
  out.reserve(count);
  for (int i = 1; i <= count; ++i) {
    std::array<double, 4> v{};
    for (int j = 0; j < 4; ++j) {
      v[j] = std::exp(log_lo + (log_hi - log_lo) * detail::radical_inverse(i, bases[j]));
    }
    out.push_back({v[0], v[1], v[2], v[3]});
  }
  return out;
}

namespace detail {

inline BFWParams to_params(const Eigen::VectorXd& v) { return {v[0], v[1], v[2], v[3]}; }

inline Objective bfw_objective(const Dataset& data, Parameterization param) {
  Objective obj;
  if (param == Parameterization::log) {
    auto natural = [](const Eigen::VectorXd& z) { return to_params(z.array().exp().matrix()); };
    obj.feasible = [](const Eigen::VectorXd& z) {
      return z.allFinite() && (z.array().abs() < 600.0).all();
    };
    obj.value = [&data, natural](const Eigen::VectorXd& z) {
      return log_likelihood(data, natural(z));
    };
    obj.gradient = [&data, natural](const Eigen::VectorXd& z) -> Eigen::VectorXd {
      const Eigen::Vector4d eta = z.array().exp();
      return eta.cwiseProduct(score(data, natural(z)));
    };
    obj.hessian = [&data, natural](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
      const Eigen::Vector4d eta = z.array().exp();
      const BFWParams prm = natural(z);
      Eigen::Matrix4d h = eta.asDiagonal() * log_likelihood_hessian(data, prm) * eta.asDiagonal();
      h.diagonal() += eta.cwiseProduct(score(data, prm));
      return h;
    };
    obj.stationarity = [&data, natural](const Eigen::VectorXd& z) {
      return score(data, natural(z)).lpNorm<Eigen::Infinity>();
    };
  } else {
    obj.feasible = [](const Eigen::VectorXd& v) {
      return v.allFinite() && (v.array() > 0.0).all() && (v.array() < 1e250).all();
    };
    obj.value = [&data](const Eigen::VectorXd& v) { return log_likelihood(data, to_params(v)); };
    obj.gradient = [&data](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      return score(data, to_params(v));
    };
    obj.hessian = [&data](const Eigen::VectorXd& v) -> Eigen::MatrixXd {
      return log_likelihood_hessian(data, to_params(v));
    };
    obj.stationarity = [&data](const Eigen::VectorXd& v) {
      return score(data, to_params(v)).lpNorm<Eigen::Infinity>();
    };
  }
  return obj;
}

inline StartRecord run_start(const Dataset& data, const BFWParams& start, const FitConfig& cfg,
                             std::vector<double>* trajectory) {
  const Objective obj = bfw_objective(data, cfg.parameterization);
  OptimizerSettings settings;
  settings.max_iterations = cfg.max_iterations;
  settings.stationarity_tol = cfg.score_tol;
  settings.rel_value_tol = cfg.rel_ll_tol;
  Eigen::VectorXd z(4);
  z << start.alpha, start.beta, start.p, start.q;
  if (cfg.parameterization == Parameterization::log) {
    z = z.array().log();
  } else {
    settings.max_step = std::numeric_limits<double>::infinity();
  }
  OptimizeResult r;
  try {
    r = maximize(obj, z, settings);
  } catch (const error& e) {
    return {start, start, -std::numeric_limits<double>::infinity(), false, 0, e.what()};
  }
  Eigen::VectorXd end = r.argmax;
  if (cfg.parameterization == Parameterization::log) end = end.array().exp();
  if (trajectory) *trajectory = std::move(r.trajectory);
  return {start, to_params(end), r.value, r.converged, r.iterations, r.message};
}

inline std::string describe(const StartRecord& s, int index) {
  std::ostringstream os;
  os.precision(6);
  os << "start " << index << " (" << s.start.alpha << ", " << s.start.beta << ", " << s.start.p
     << ", " << s.start.q << "): " << s.message << ", ll = " << s.log_likelihood << " at ("
     << s.end.alpha << ", " << s.end.beta << ", " << s.end.p << ", " << s.end.q << ")";
  return os.str();
}

}  // namespace detail

/// Fills covariance, conditioning and intervals of `fit` from its observed information.
inline void attach_covariance(FitResult& fit) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(fit.observed_information,
                                                           Eigen::EigenvaluesOnly);
  const Eigen::Vector4d lambda = eig.eigenvalues();
  const double max_abs = lambda.cwiseAbs().maxCoeff();
  const double min_abs = lambda.cwiseAbs().minCoeff();
  fit.information_positive_definite = lambda.minCoeff() > 0.0;
  fit.condition_number = min_abs > 0.0 ? max_abs / min_abs : std::numeric_limits<double>::infinity();
  fit.covariance.reset();
  if (min_abs > max_abs * 1e-15) {
    Eigen::LDLT<Eigen::Matrix4d> ldlt(fit.observed_information);
    if (ldlt.info() == Eigen::Success) {
      const Eigen::Matrix4d cov = ldlt.solve(Eigen::Matrix4d::Identity());
      if (cov.allFinite()) fit.covariance = 0.5 * (cov + cov.transpose());
    }
  }
  fit.confidence_intervals = {};
  if (fit.covariance) {
    const std::array<double, 4> est{fit.estimates.alpha, fit.estimates.beta, fit.estimates.p,
                                    fit.estimates.q};
    const std::array<double, 4> var{(*fit.covariance)(0, 0), (*fit.covariance)(1, 1),
                                    (*fit.covariance)(2, 2), (*fit.covariance)(3, 3)};
    const auto ci = wald_intervals(est, var, fit.level);
    std::copy(ci.begin(), ci.end(), fit.confidence_intervals.begin());
  }
}

/// Intervals at another confidence level for an existing fit.
inline std::array<std::optional<Interval>, 4> confidence_intervals(const FitResult& fit,
                                                                   double level) {
  if (!fit.covariance) throw numeric_error("confidence_intervals: covariance unavailable");
  const std::array<double, 4> est{fit.estimates.alpha, fit.estimates.beta, fit.estimates.p,
                                  fit.estimates.q};
  const std::array<double, 4> var{(*fit.covariance)(0, 0), (*fit.covariance)(1, 1),
                                  (*fit.covariance)(2, 2), (*fit.covariance)(3, 3)};
  const auto ci = wald_intervals(est, var, level);
  std::array<std::optional<Interval>, 4> out;
  std::copy(ci.begin(), ci.end(), out.begin());
  return out;
}

/// Maximizes the log-likelihood from every multi-start point and keeps the
/// best converged optimum (ties broken by start index).
inline FitResult fit_mle(const Dataset& data, const FitConfig& cfg = {}) {
  data.validate();
  if (data.size() < 5) throw domain_error("fit_mle: need at least 5 observations");
  if (cfg.starts < 1) throw domain_error("fit_mle: need at least one start");

  const auto points = multistart_points(cfg.starts, cfg.start_log_lo, cfg.start_log_hi);
  std::vector<StartRecord> records(points.size());
  std::vector<std::vector<double>> trajectories(points.size());
  if (cfg.parallel) {
    std::vector<std::future<StartRecord>> jobs;
    jobs.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      jobs.push_back(std::async(std::launch::async, [&, i] {
        return detail::run_start(data, points[i], cfg, &trajectories[i]);
      }));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) records[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < points.size(); ++i) {
      records[i] = detail::run_start(data, points[i], cfg, &trajectories[i]);
    }
  }

  int best = -1;
  int converged = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].converged) continue;
    ++converged;
    if (best < 0 || records[i].log_likelihood > records[best].log_likelihood) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) {
    std::vector<std::string> diag;
    for (std::size_t i = 0; i < records.size(); ++i) {
      diag.push_back(detail::describe(records[i], static_cast<int>(i)));
    }
    throw convergence_error("fit_mle: no start converged", std::move(diag));
  }

  FitResult fit;
  fit.estimates = records[best].end;
  fit.log_likelihood = log_likelihood(data, fit.estimates);
  fit.score_at_optimum = score(data, fit.estimates);
  fit.observed_information = observed_information(data, fit.estimates);
  fit.level = cfg.level;
  fit.converged = true;
  fit.iterations = records[best].iterations;
  fit.multistart_best_of = static_cast<int>(records.size());
  fit.starts_converged = converged;
  fit.trajectory = std::move(trajectories[best]);
  fit.starts = std::move(records);
  attach_covariance(fit);
  return fit;
}

}  // namespace bfw
