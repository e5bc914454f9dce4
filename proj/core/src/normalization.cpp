#include "pcsf/normalization.hpp"

#include <algorithm>
#include <cmath>

#include "pcsf/errors.hpp"
#include "pcsf/fit.hpp"

namespace pcsf {

double tau_of_t(double t, double T, int p) {
  if (!(T > 0.0) || !(t >= 0.0) || !(t < T)) throw DomainError("tau needs 0 <= t < T");
  return -std::log1p(-t / T) / (p + 1);
}

double tau_of_gap(double gap, double T, int p) {
  if (!(gap > 0.0) || !(gap <= T)) throw DomainError("tau needs 0 < T - t <= T");
  return -std::log(gap / T) / (p + 1) + 0.0;
}

double t_of_tau(double tau, double T, int p) {
  return -T * std::expm1(-(p + 1) * tau);
}

double rescale_factor(int p, double gap) {
  return std::pow((p + 1.0) / p * gap, 1.0 / (p + 1));
}

SpectralState rescale_by_gap(const SpectralState& state, double gap, double T) {
  const int p = state.params().p();
  auto u = state.scaled(rescale_factor(p, gap));
  u.set_t(tau_of_gap(gap, T, p));
  return u;
}

SpectralState rescale_state(const SpectralState& state, double T) {
  if (!(state.t() < T)) throw DomainError("cannot rescale at or after the blow-up time");
  const int p = state.params().p();
  tau_of_t(state.t(), T, p);
  return rescale_by_gap(state, T - state.t(), T);
}

SpectralState unrescale_state(const SpectralState& normalized, double T) {
  const int p = normalized.params().p();
  const double tau = normalized.t();
  const double gap = T * std::exp(-(p + 1) * tau);
  auto k = normalized.scaled(1.0 / rescale_factor(p, gap));
  k.set_t(t_of_tau(tau, T, p));
  return k;
}

double stabilization_rate(int p, double lambda) {
  return lambda * lambda * p - p - 1.0;
}

namespace {

void push_sample(NormalizedSeries& s, const SpectralState& u) {
  const auto grid = synthesize(u, default_grid_size(u.n_max()));
  const double mean = u.mean();
  double sup = 0.0, unit = 0.0;
  for (double v : grid.values) {
    sup = std::max(sup, std::abs(v - mean));
    unit = std::max(unit, std::abs(v - 1.0));
  }
  s.taus.push_back(u.t());
  s.sup_dev.push_back(sup);
  s.unit_dev.push_back(unit);
  s.mean_dev.push_back(std::abs(mean - 1.0));
  for (size_t i = 0; i < s.cl_levels.size(); ++i) {
    s.cl_dev[i].push_back(cl_deviation_bound(u, s.cl_levels[i]));
  }
}

NormalizedSeries empty_series(const std::vector<int>& cl_levels) {
  NormalizedSeries s;
  s.cl_levels = cl_levels;
  s.cl_dev.resize(cl_levels.size());
  return s;
}

}  // namespace

NormalizedSeries normalized_series(const Trajectory& traj, const BlowupEstimate& est,
                                   const std::vector<int>& cl_levels) {
  if (traj.flow != Flow::unnormalized) return normalized_series(traj, cl_levels);
  auto s = empty_series(cl_levels);
  const auto gaps = time_to_blowup(traj, est);
  for (size_t i = 0; i < traj.snapshots.size(); ++i) {
    if (!(gaps[i] > 0.0) || gaps[i] > est.T) continue;
    push_sample(s, rescale_by_gap(traj.snapshots[i], gaps[i], est.T));
  }
  return s;
}

NormalizedSeries normalized_series(const Trajectory& normalized_traj,
                                   const std::vector<int>& cl_levels) {
  auto s = empty_series(cl_levels);
  for (const auto& u : normalized_traj.snapshots) push_sample(s, u);
  return s;
}

RateFit fit_exponential(std::span<const double> taus, std::span<const double> values,
                        const ExpWindow& window) {
  if (taus.size() != values.size()) throw AnalysisError("series lengths differ");
  if (!(window.lo < window.hi)) throw AnalysisError("bad fit window");
  std::vector<double> x, y;
  for (size_t i = 0; i < taus.size(); ++i) {
    if (taus[i] < window.lo) continue;
    if (taus[i] > window.hi) break;
    if (!(values[i] > window.floor) || !std::isfinite(values[i])) break;
    x.push_back(taus[i]);
    y.push_back(std::log(values[i]));
  }
  if (x.size() < 8) {
    throw AnalysisError("only " + std::to_string(x.size()) +
                        " points above the floor in the exponential fit window");
  }
  const auto fit = fit_line(x, y);
  RateFit r;
  r.exponent = fit.slope;
  r.std_error = fit.slope_stderr;
  r.intercept = fit.intercept;
  r.n_points = static_cast<int>(fit.used.size());
  r.window_lo = x.front();
  r.window_hi = x.back();
  return r;
}

double RateSensitivity::spread() const {
  return std::max(std::abs(low_T.exponent - nominal.exponent),
                  std::abs(high_T.exponent - nominal.exponent));
}

RateSensitivity unit_rate_sensitivity(const Trajectory& traj, const BlowupEstimate& est,
                                      const ExpWindow& window) {
  auto fit_for = [&](double shift) {
    BlowupEstimate e = est;
    e.T += shift;
    e.tail += shift;
    const auto s = normalized_series(traj, e);
    return fit_exponential(s.taus, s.unit_dev, window);
  };
  RateSensitivity r;
  r.nominal = fit_for(0.0);
  r.low_T = fit_for(-est.uncertainty);
  r.high_T = fit_for(est.uncertainty);
  return r;
}

}  // namespace pcsf
