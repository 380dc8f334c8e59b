// Globally adaptive Gauss-Kronrod (30/61) quadrature on finite intervals and on
// the half line (0, inf) through the substitution x = s / (1 - s).

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "bfw/detail/gauss_kronrod61.hpp"
#include "bfw/error.hpp"

namespace bfw {

struct QuadratureOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-10;
  int max_panels = 2000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  ///< estimated absolute error
  int panels = 0;
};

namespace detail {

struct Panel {
  double a, b;
  double value, error;
};

struct PanelByError {
  bool operator()(const Panel& l, const Panel& r) const { return l.error < r.error; }
};

// One 61-point Kronrod panel with the QUADPACK error heuristic.
template <class F>
Panel kronrod61_panel(F& f, double a, double b) {
  constexpr double epmach = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = kronrod61_weights[0] * fc;
  double resg = 0.0;
  double resabs = std::fabs(resk);
  std::array<double, 31> f1{}, f2{};
  for (int j = 1; j <= 30; ++j) {
    const double dx = half * kronrod61_nodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    resk += kronrod61_weights[j] * (f1[j] + f2[j]);
    resabs += kronrod61_weights[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
    if (j % 2 == 1) resg += gauss30_weights[(j - 1) / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * resk;
  double resasc = kronrod61_weights[0] * std::fabs(fc - mean);
  for (int j = 1; j <= 30; ++j) {
    resasc += kronrod61_weights[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));
  }
  const double scale = std::fabs(half);
  resabs *= scale;
  resasc *= scale;
  double err = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > uflow / (50.0 * epmach)) err = std::max(50.0 * epmach * resabs, err);

  const double value = resk * half;
  if (!std::isfinite(value) || !std::isfinite(err)) {
    throw numeric_error("quadrature: integrand produced a non-finite value");
  }
  return {a, b, value, err};
}

}  // namespace detail

/// Integrates f over [a, b]. Optional interior breakpoints seed the initial
/// partition. Throws accuracy_error when the panel budget runs out.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {},
                           std::span<const double> breakpoints = {}) {
  if (!(a < b)) {
    if (a == b) return {};
    throw domain_error("integrate: require a <= b");
  }
  std::vector<double> cuts{a};
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Panel, std::vector<detail::Panel>, detail::PanelByError> heap;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto panel = detail::kronrod61_panel(f, cuts[i], cuts[i + 1]);
    value += panel.value;
    error += panel.error;
    heap.push(panel);
  }

  int panels = static_cast<int>(heap.size());
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::fabs(value))) {
    if (panels >= opt.max_panels) {
      throw accuracy_error("quadrature: panel budget exhausted", value, error);
    }
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw accuracy_error("quadrature: panel cannot be subdivided further", value, error);
    }
    heap.pop();
    const auto left = detail::kronrod61_panel(f, worst.a, mid);
    const auto right = detail::kronrod61_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }

  // Re-sum to shed the drift of the running totals.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, panels};
}

/// Integrates f over (0, inf) via x = s / (1 - s), s in (0, 1). Breakpoints
/// are given on the x scale.
template <class F>
QuadratureResult integrate_half_line(F&& f, const QuadratureOptions& opt = {},
                                     std::span<const double> breakpoints = {}) {
  std::vector<double> s_cuts;
  s_cuts.reserve(breakpoints.size());
  for (double x : breakpoints) {
    if (x > 0.0 && std::isfinite(x)) s_cuts.push_back(x / (1.0 + x));
  }
  auto g = [&f](double s) {
    const double one_minus = 1.0 - s;
    const double x = s / one_minus;
    const double fx = f(x);
    if (fx == 0.0) return 0.0;
    return fx / (one_minus * one_minus);
  };
  return integrate(g, 0.0, 1.0, opt, s_cuts);
}

}  // namespace bfw
