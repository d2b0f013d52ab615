#pragma once

#include <span>

namespace gsi {

enum class Metric { MAE, NRMSE };

/// Mean absolute error over output dimensions.
double mae(std::span<const double> estimate, std::span<const double> truth);

/// RMSE divided by the population standard deviation of `truth`.
/// Throws DegenerateTruth when that deviation is zero.
double nrmse(std::span<const double> estimate, std::span<const double> truth);

}  // namespace gsi
