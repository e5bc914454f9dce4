#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcsf/spectral.hpp"

namespace pcsf {

/// Step-size controller settings.
///
/// max_step and min_step are dimensionless: they bound h * k(0)^{p+1}, the
/// step measured in the natural time scale of the current amplitude (for the
/// normalized flow the amplitude is ~1 and they act as plain bounds on dtau).
struct StepControl {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  double safety = 0.8;
  double max_step = 0.05;
  double min_step = 1e-14;
  /// Blow-up amplitude threshold for k(0).
  double k0_stop = 1e6;

  /// Throws DomainError unless all fields are positive and rel_tol >= 1e-13.
  void validate() const;
};

/// Which evolution equation a state follows.
enum class Flow { unnormalized, normalized };

struct StepResult {
  SpectralState state;
  /// Embedded 5(4) error, scaled so that 1 means "exactly at tolerance".
  double error = 0.0;
};

/// One Dormand-Prince 5(4) step of size dt. Re-enforces a real k(0).
/// Throws IntegrationError if the derivative becomes non-finite.
StepResult step(const SpectralState& state, double dt, const StepControl& control,
                Flow flow = Flow::unnormalized);

enum class EventKind { blow_up_stop, positivity_loss, trap_violation, step_floor, horizon };

std::string to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(const std::string& name);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::blow_up_stop;
  std::string detail;
};

/// Time-ordered snapshots of one run.
///
/// intervals[i] is the time elapsed between snapshots i-1 and i, summed from
/// the individual step sizes (intervals[0] = 0). Distances to the blow-up time
/// are always rebuilt from these sums so that T - t keeps full relative
/// precision even when it is far below the resolution of t itself.
struct Trajectory {
  FlowParams params;
  Flow flow = Flow::unnormalized;
  std::vector<SpectralState> snapshots;
  std::vector<double> intervals;
  std::vector<Event> events;
  /// Quick blow-up time estimate t_last + (p/(p+1)) k(0)^{-(p+1)} and its tail.
  std::optional<double> T_est;
  std::optional<double> T_tail;

  bool has_event(EventKind kind) const;
  void append(SpectralState state, double interval);
};

struct IntegrateOptions {
  StepControl control;
  /// Snapshot density, log-spaced in k(0).
  int snapshots_per_decade = 40;
  /// Trap constant to monitor; a trap_violation event is recorded when the
  /// margin k(0) - c ||k||_2 turns negative after having been nonnegative.
  std::optional<double> trap_constant;
  /// Stop (landing exactly) at this time instead of at k0_stop.
  std::optional<double> t_end;
  long max_steps = 50'000'000;
};

/// Integrate the truncated system until k(0) >= k0_stop (or t_end, or a
/// failure). Besides the error controller, every step obeys the stiffness cap
/// dt <= safety / (lambda^2 n_max^2 k(0)^{p+1}).
Trajectory integrate(const SpectralState& init, const IntegrateOptions& options = {});

struct NormalizedOptions {
  StepControl control;
  /// Snapshot spacing in tau (ignored when output_taus is given).
  double snapshot_dtau = 0.05;
  /// Exact landing points; must be increasing and within (0, tau_horizon].
  std::vector<double> output_taus;
  /// Rescale the state after every step so that k(0) = 1.
  bool renormalize_mean = false;
  long max_steps = 50'000'000;
};

/// Integrate the normalized flow from tau = init.t() to tau_horizon.
Trajectory integrate_normalized(const SpectralState& init, double tau_horizon,
                                const NormalizedOptions& options = {});

/// Minimum of the state over a grid (positivity check).
double grid_minimum(const SpectralState& state, int grid_points);

}  // namespace pcsf
