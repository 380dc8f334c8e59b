// Umbrella header for the bfw library.

#pragma once

#include "bfw/bfw_core.hpp"
#include "bfw/datasets.hpp"
#include "bfw/error.hpp"
#include "bfw/flexible_weibull.hpp"
#include "bfw/inference.hpp"
#include "bfw/io.hpp"
#include "bfw/model_selection.hpp"
#include "bfw/moments.hpp"
#include "bfw/optimizer.hpp"
#include "bfw/order_stats.hpp"
#include "bfw/quadrature.hpp"
#include "bfw/special_fn.hpp"

namespace bfw {

inline constexpr const char* version = "0.1.0";

}  // namespace bfw
