// Reading failure-time data from text.

#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "bfw/datasets.hpp"
#include "bfw/error.hpp"
#include "bfw/inference.hpp"

namespace bfw {

/// Data file or stream could not be read at all.
class io_error : public error {
 public:
  using error::error;
};

/// Parses positive reals separated by whitespace and/or commas, any number per
/// line. Throws parse_error with the 1-based line and column of the first bad
/// token, or when the input holds no values.
inline Dataset parse_dataset(std::istream& in, std::string label) {
  Dataset d;
  d.label = std::move(label);
  std::string line;
  std::size_t line_no = 0;
  auto is_sep = [](char c) {
    return c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t i = 0;
    while (i < line.size()) {
      if (is_sep(line[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && !is_sep(line[j])) ++j;
      const std::string_view tok(line.data() + i, j - i);
      // from_chars rejects a leading '+'; accept it as the usual text convention.
      const std::string_view digits = tok.front() == '+' ? tok.substr(1) : tok;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
        throw parse_error("not a number: '" + std::string(tok) + "'", line_no, i + 1);
      }
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw parse_error("failure times must be positive and finite: '" + std::string(tok) + "'",
                          line_no, i + 1);
      }
      d.times.push_back(v);
      i = j;
    }
  }
  if (d.times.empty()) throw parse_error("dataset is empty", line_no == 0 ? 1 : line_no, 1);
  return d;
}

inline Dataset parse_dataset(std::string_view text, std::string label = "inline") {
  std::istringstream in{std::string(text)};
  return parse_dataset(in, std::move(label));
}

/// A built-in dataset name ("pumps", "pumps-hundreds") or a path to a text file.
inline Dataset ingest(const std::string& source) {
  if (is_builtin_dataset(source)) return builtin_dataset(source);
  std::ifstream in(source);
  if (!in) throw io_error("cannot open data file '" + source + "'");
  return parse_dataset(in, std::filesystem::path(source).filename().string());
}

}  // namespace bfw
