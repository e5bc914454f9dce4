#pragma once

#include <optional>
#include <vector>

#include "pcsf/integrator.hpp"
#include "pcsf/spectral.hpp"

namespace pcsf {

/// Trapping constant c_{p,lambda}. For p = 1 this is the closed form
/// 64 lambda^2 / (lambda^2 - 3); for p >= 2 the same shape with the threshold
/// (p+2)/p is used and flagged heuristic (monitored, not proven).
struct TrapConstant {
  double value = 0.0;
  bool heuristic = false;
};

TrapConstant select_c(const FlowParams& params);

/// Mean-dominance test mean(psi) >= c ||psi||_2 plus grid positivity.
struct HypothesisReport {
  bool holds = false;
  double mean = 0.0;
  double seminorm2 = 0.0;
  double margin = 0.0;
  bool positive = false;
};

HypothesisReport check_hypothesis(const SpectralState& psi, double c);

/// k(0) - c max_{n != 0} n^2 max(|Re k(n)|, |Im k(n)|); >= 0 inside the trap.
double trap_margin(const SpectralState& state, double c);

/// Blow-up time of a trajectory. tail = T - t_last, kept separately so that
/// distances T - t never suffer cancellation against t.
struct BlowupEstimate {
  double T = 0.0;
  double tail = 0.0;
  double uncertainty = 0.0;
  size_t n_points = 0;
};

/// Relative-weighted linear extrapolation of (p/(p+1)) k(0)^{-(p+1)} against time over the last
/// decade of k(0). The uncertainty is the larger of the spread between the two
/// half-window fits and the relative band tail^{1 + 2/(p+1)} implied by the
/// two-sided blow-up envelope. Requires k(0) >= 1e3 at the last snapshot.
BlowupEstimate estimate_T(const Trajectory& traj);

/// Estimate from an externally known blow-up time (e.g. the exact value for
/// constant data).
BlowupEstimate blowup_from_known_T(const Trajectory& traj, double T);

/// T - t_i for every snapshot, rebuilt from the tail and the stored intervals.
std::vector<double> time_to_blowup(const Trajectory& traj, const BlowupEstimate& est);

/// Envelope k(0) must respect near blow-up, in normalized form:
///   (1 + g^{2/(p+1)})^{-1/(p+1)} <= c_p g^{1/(p+1)} k(0) <= (1 - g^{2/(p+1)})^{-1/(p+1)}
/// with c_p = ((p+1)/p)^{1/(p+1)} and g = T - t.
struct EnvelopeBand {
  double lower = 0.0;
  double upper = 0.0;
};
EnvelopeBand blowup_envelope(int p, double gap);

/// The same bounds expressed on k(0) itself.
double envelope_lower_k0(int p, double gap);
double envelope_upper_k0(int p, double gap);

struct EnvelopeReport {
  bool holds = false;
  size_t checked = 0;
  /// Smallest (u0 - lower) / (upper - lower) over checked snapshots, and largest.
  double min_position = 0.0;
  double max_position = 0.0;
};

/// Check every snapshot in the final decade of k(0).
EnvelopeReport check_envelopes(const Trajectory& traj, const BlowupEstimate& est);

/// alpha(lambda, n, p) = (lambda^2 n^2 - (p+2)/p) p/(p+1).
double decay_exponent(double lambda, int n, int p);

/// Exponent actually seen for mode n once forcing by powers of mode 1 is
/// included: min(alpha(n), n (alpha(1) + 1/(p+1)) - 1/(p+1)). Equal to alpha
/// for n = 1.
double forced_decay_exponent(double lambda, int n, int p);

struct RateFit {
  double exponent = 0.0;
  double std_error = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int n_points = 0;
  double intercept = 0.0;
};

struct PowerWindow {
  double lo = 1e-6;
  double hi = 1e-2;
};

/// Slope of log|k(n,t)| against log(T - t) over the window.
/// Throws AnalysisError when fewer than 8 usable points remain.
RateFit fit_power(const Trajectory& traj, const BlowupEstimate& est, int n,
                  const PowerWindow& window = {});

struct MarginSample {
  double t = 0.0;
  double margin = 0.0;
};

struct TrapCertificate {
  double c = 0.0;
  std::vector<MarginSample> margins;
  /// -d/dt log max_n n^2 |k(n)|, when enough points are above round-off.
  std::optional<double> gamma_fit;
  /// -d/dn log |k(n)| at the last snapshot.
  std::optional<double> mu_fit;

  bool holds() const;
  double min_margin() const;
};

TrapCertificate certify(const Trajectory& traj, double c);

}  // namespace pcsf
