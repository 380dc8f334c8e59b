// Built-in datasets.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bfw/error.hpp"
#include "bfw/inference.hpp"

namespace bfw {

/// Times between failures of secondary reactor pumps, thousands of hours.
inline Dataset pumps() {
  return {{2.160, 0.746, 0.402, 0.954, 0.491, 6.560, 4.992, 0.347, 0.150, 0.358, 0.101, 1.359,
           3.465, 1.060, 0.614, 1.921, 4.082, 0.199, 0.605, 0.273, 0.070, 0.062, 5.320},
          "pumps"};
}

/// The same pump data in hundreds of hours. The published flexible Weibull and
/// Weibull fits of this dataset are stated on this scale.
inline Dataset pumps_hundreds() {
  return {{21.60, 7.46, 4.02, 9.54, 4.91, 65.60, 49.92, 3.47, 1.50, 3.58, 1.01, 13.59,
           34.65, 10.60, 6.14, 19.21, 40.82, 1.99, 6.05, 2.73, 0.70, 0.62, 53.20},
          "pumps-hundreds"};
}

inline const std::vector<std::string>& builtin_dataset_names() {
  static const std::vector<std::string> names{"pumps", "pumps-hundreds"};
  return names;
}

inline bool is_builtin_dataset(std::string_view name) {
  return name == "pumps" || name == "pumps-hundreds";
}

inline Dataset builtin_dataset(std::string_view name) {
  if (name == "pumps") return pumps();
  if (name == "pumps-hundreds") return pumps_hundreds();
  throw domain_error("unknown built-in dataset '" + std::string(name) + "'");
}

}  // namespace bfw
