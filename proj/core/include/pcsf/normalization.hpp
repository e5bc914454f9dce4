#pragma once

#include <limits>
#include <span>
#include <vector>

#include "pcsf/blowup.hpp"
#include "pcsf/integrator.hpp"
#include "pcsf/spectral.hpp"

namespace pcsf {

/// tau = -(1/(p+1)) log(1 - t/T). Throws DomainError unless 0 <= t < T.
double tau_of_t(double t, double T, int p);

/// Same map written in terms of the gap g = T - t, which keeps full precision
/// close to blow-up.
double tau_of_gap(double gap, double T, int p);

/// Inverse of tau_of_t.
double t_of_tau(double tau, double T, int p);

/// ((p+1)/p)^{1/(p+1)} g^{1/(p+1)}, the factor taking k to the normalized u.
double rescale_factor(int p, double gap);

/// Normalized state at tau(t); throws DomainError if state.t() >= T.
SpectralState rescale_state(const SpectralState& state, double T);

/// As rescale_state with T - t supplied directly.
SpectralState rescale_by_gap(const SpectralState& state, double gap, double T);

/// Back to the physical frame: t from tau, coefficients divided by the factor.
SpectralState unrescale_state(const SpectralState& normalized, double T);

/// beta(p, lambda) = lambda^2 p - p - 1.
double stabilization_rate(int p, double lambda);

struct NormalizedSeries {
  std::vector<double> taus;
  /// max over the grid of |u - mean(u)|.
  std::vector<double> sup_dev;
  /// |mean(u) - 1|.
  std::vector<double> mean_dev;
  /// max over the grid of |u - 1|.
  std::vector<double> unit_dev;
  /// cl_dev[i] holds cl_deviation_bound(u, cl_levels[i]) per tau.
  std::vector<int> cl_levels;
  std::vector<std::vector<double>> cl_dev;

  size_t size() const { return taus.size(); }
};

/// Rescale every snapshot of a physical-time run. Distances to blow-up come
/// from the estimate's tail and the stored intervals.
NormalizedSeries normalized_series(const Trajectory& traj, const BlowupEstimate& est,
                                   const std::vector<int>& cl_levels = {});

/// Series of a run of the normalized flow (snapshot times are already tau).
NormalizedSeries normalized_series(const Trajectory& normalized_traj,
                                   const std::vector<int>& cl_levels = {});

struct ExpWindow {
  double lo = 2.0;
  double hi = std::numeric_limits<double>::infinity();
  /// The window ends before the first value at or below this level.
  double floor = 1e-12;
};

/// Slope of log(values) against tau (negative for decay).
/// Throws AnalysisError when fewer than 8 points remain in the window.
RateFit fit_exponential(std::span<const double> taus, std::span<const double> values,
                        const ExpWindow& window = {});

/// Rate fits with T shifted by -/+ the estimate's uncertainty.
struct RateSensitivity {
  RateFit nominal;
  RateFit low_T;
  RateFit high_T;
  double spread() const;
};

/// Fits the unit deviation of a physical-time run for T and T +- uncertainty.
RateSensitivity unit_rate_sensitivity(const Trajectory& traj, const BlowupEstimate& est,
                                      const ExpWindow& window = {});

}  // namespace pcsf
