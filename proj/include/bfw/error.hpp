// Exception types thrown by the bfw library.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bfw {

/// Base class of every exception thrown by this library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class domain_error : public error {
 public:
  using error::error;
};

/// A tail quantity underflowed or overflowed double range. `last_value` is the
/// saturated value the computation would have returned.
class saturation_error : public error {
 public:
  saturation_error(const std::string& what, double last_value)
      : error(what), last_value_(last_value) {}
  double last_value() const noexcept { return last_value_; }

 private:
  double last_value_;
};

/// Adaptive quadrature exhausted its panel budget before meeting the tolerance.
class accuracy_error : public error {
 public:
  accuracy_error(const std::string& what, double estimate, double error_bound)
      : error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// No optimizer start reached a stationary point.
class convergence_error : public error {
 public:
  convergence_error(const std::string& what, std::vector<std::string> diagnostics)
      : error(what), diagnostics_(std::move(diagnostics)) {}
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

/// A non-finite value appeared where a finite one is required.
class numeric_error : public error {
 public:
  using error::error;
};

/// An expansion was requested outside the range where it is numerically stable.
class stability_error : public error {
 public:
  using error::error;
};

/// The mode equation has no sign change on the search interval.
class no_interior_mode_error : public error {
 public:
  using error::error;
};

/// A term of the moment series is not finite.
class term_overflow_error : public error {
 public:
  term_overflow_error(const std::string& what, int n, int m, int l)
      : error(what), n_(n), m_(m), l_(l) {}
  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  int l() const noexcept { return l_; }

 private:
  int n_, m_, l_;
};

/// Malformed dataset input. Line and column are 1-based.
class parse_error : public error {
 public:
  parse_error(const std::string& what, std::size_t line, std::size_t column)
      : error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) +
              ")"),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

}  // namespace bfw
