// Monotone quasi-Newton maximizer with an optional exact-Hessian Newton step.
//
// Each iteration tries the Newton direction when the supplied Hessian is
// negative definite and otherwise falls back to the BFGS direction; both are
// safeguarded by a backtracking line search that only accepts strict
// increases of the objective, so the value trajectory is nondecreasing.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace bfw {

struct Objective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  /// Optional; enables Newton steps.
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  /// Convergence measure, e.g. the sup-norm of the gradient in natural units.
  std::function<double(const Eigen::VectorXd&)> stationarity;
  /// Optional feasibility predicate; infeasible trial points are rejected.
  std::function<bool(const Eigen::VectorXd&)> feasible;
};

struct OptimizerSettings {
  int max_iterations = 1000;
  double stationarity_tol = 1e-6;
  double rel_value_tol = 1e-12;  ///< must hold over two consecutive iterations
  double max_step = 2.0;         ///< sup-norm cap on a single step
};

struct OptimizeResult {
  Eigen::VectorXd argmax;
  double value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> trajectory;  ///< objective after every accepted step
  std::string message;
};

namespace detail {

inline bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace detail

inline OptimizeResult maximize(const Objective& obj, Eigen::VectorXd z,
                               const OptimizerSettings& settings = {}) {
  OptimizeResult res;
  const auto dim = z.size();
  auto ok = [&](const Eigen::VectorXd& v) { return !obj.feasible || obj.feasible(v); };

  if (!ok(z)) {
    res.argmax = z;
    res.message = "infeasible start";
    return res;
  }
  double f = obj.value(z);
  if (!std::isfinite(f)) {
    res.argmax = z;
    res.message = "objective not finite at start";
    return res;
  }
  Eigen::VectorXd g = obj.gradient(z);
  if (!detail::all_finite(g)) {
    res.argmax = z;
    res.value = f;
    res.message = "gradient not finite at start";
    return res;
  }
  res.trajectory.push_back(f);

  // Inverse-Hessian approximation of -f (positive definite).
  Eigen::MatrixXd inv_h = Eigen::MatrixXd::Identity(dim, dim);
  bool first_bfgs = true;
  int small_changes = 0;

  for (int iter = 1; iter <= settings.max_iterations; ++iter) {
    res.iterations = iter;

    // Candidate directions in order of preference.
    std::vector<Eigen::VectorXd> directions;
    if (obj.hessian) {
      const Eigen::MatrixXd h = obj.hessian(z);
      if (h.allFinite()) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(-h);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
            (ldlt.vectorD().array() > 0.0).all()) {
          Eigen::VectorXd d = ldlt.solve(g);
          if (detail::all_finite(d) && d.dot(g) > 0.0) directions.push_back(d);
        }
      }
    }
    {
      Eigen::VectorXd d = inv_h * g;
      if (first_bfgs) d /= std::max(1.0, g.lpNorm<Eigen::Infinity>());
      if (detail::all_finite(d) && d.dot(g) > 0.0) directions.push_back(d);
    }
    directions.push_back(g / std::max(1.0, g.lpNorm<Eigen::Infinity>()));

    bool accepted = false;
    Eigen::VectorXd z_new;
    double f_new = f;
    for (Eigen::VectorXd d : directions) {
      const double norm = d.lpNorm<Eigen::Infinity>();
      if (norm > settings.max_step) d *= settings.max_step / norm;
      double step = 1.0;
      for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
        Eigen::VectorXd trial = z + step * d;
        if (!ok(trial)) continue;
        const double ft = obj.value(trial);
        if (std::isfinite(ft) && ft > f) {
          z_new = std::move(trial);
          f_new = ft;
          accepted = true;
          break;
        }
      }
      if (accepted) break;
    }

    if (!accepted) {
      res.argmax = z;
      res.value = f;
      res.converged = obj.stationarity(z) <= settings.stationarity_tol;
      res.message = res.converged ? "converged (no further ascent possible)" : "line search failed";
      return res;
    }

    Eigen::VectorXd g_new = obj.gradient(z_new);
    if (!detail::all_finite(g_new)) {
      res.argmax = z;
      res.value = f;
      res.message = "gradient not finite";
      return res;
    }

    // BFGS update on -f: s = dz, y = -(g_new - g).
    const Eigen::VectorXd s = z_new - z;
    const Eigen::VectorXd y = g - g_new;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (first_bfgs) {
        inv_h *= sy / y.dot(y);
        first_bfgs = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(dim, dim);
      inv_h = (ident - rho * s * y.transpose()) * inv_h * (ident - rho * y * s.transpose()) +
              rho * s * s.transpose();
    }

    const double rel_change = std::fabs(f_new - f) / std::max(1.0, std::fabs(f_new));
    z = std::move(z_new);
    f = f_new;
    g = std::move(g_new);
    res.trajectory.push_back(f);

    small_changes = rel_change <= settings.rel_value_tol ? small_changes + 1 : 0;
    if (small_changes >= 2 && obj.stationarity(z) <= settings.stationarity_tol) {
      res.argmax = z;
      res.value = f;
      res.converged = true;
      res.message = "converged";
      return res;
    }
  }
  res.argmax = z;
  res.value = f;
  res.converged = false;
  res.message = "iteration limit reached";
  return res;
}

}  // namespace bfw
