#pragma once

#include <span>

namespace nwidths {

/// Least-squares line y = slope * x + intercept; residual is the largest
/// absolute deviation of a sample from the line.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

/// Throws std::invalid_argument on fewer than two samples, mismatched
/// lengths, or constant x.
RateFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fit of log(y) against log(x). All samples must be positive.
RateFit fit_log_log(std::span<const double> x, std::span<const double> y);

}  // namespace nwidths
