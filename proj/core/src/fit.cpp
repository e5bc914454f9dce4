#include "pcsf/fit.hpp"

#include <cmath>
#include <numeric>

#include "pcsf/errors.hpp"

namespace pcsf {
namespace {

LineFit plain_fit(std::span<const double> x, std::span<const double> y,
                  const std::vector<size_t>& idx) {
  const double n = static_cast<double>(idx.size());
  double mx = 0.0, my = 0.0;
  for (size_t i : idx) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i : idx) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw AnalysisError("degenerate abscissae in line fit");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (size_t i : idx) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += r * r;
  }
  fit.residual_sigma = idx.size() > 2 ? std::sqrt(ss / (n - 2.0)) : 0.0;
  fit.slope_stderr = fit.residual_sigma / std::sqrt(sxx);
  fit.used = idx;
  return fit;
}

}  // namespace

LineFit fit_line(std::span<const double> x, std::span<const double> y, bool trim,
                 size_t min_points) {
  if (x.size() != y.size()) throw AnalysisError("line fit needs equally long series");
  if (x.size() < 2) throw AnalysisError("line fit needs at least two points");
  std::vector<size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  LineFit fit = plain_fit(x, y, idx);
  if (!trim) return fit;
  for (int pass = 0; pass < 5; ++pass) {
    if (fit.residual_sigma == 0.0) break;
    std::vector<size_t> kept;
    for (size_t i : fit.used) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      if (std::abs(r) <= 3.0 * fit.residual_sigma) kept.push_back(i);
    }
    if (kept.size() == fit.used.size() || kept.size() < std::max<size_t>(min_points, 3)) break;
    fit = plain_fit(x, y, kept);
  }
  return fit;
}

}  // namespace pcsf
