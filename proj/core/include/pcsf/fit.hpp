#pragma once

#include <span>
#include <vector>

namespace pcsf {

/// Ordinary least-squares line y = intercept + slope x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double residual_sigma = 0.0;
  /// Indices (into the input) that survived outlier trimming.
  std::vector<size_t> used;
};

/// Least squares with iterative 3-sigma trimming; never trims below
/// min_points. Throws AnalysisError with fewer than two points.
LineFit fit_line(std::span<const double> x, std::span<const double> y, bool trim = true,
                 size_t min_points = 8);

}  // namespace pcsf
