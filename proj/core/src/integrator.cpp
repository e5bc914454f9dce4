#include "pcsf/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "pcsf/errors.hpp"
#include "pcsf/flow_rhs.hpp"

namespace pcsf {

void StepControl::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(rel_tol) || !positive(abs_tol) || !positive(safety) || !positive(max_step) ||
      !positive(min_step) || !positive(k0_stop)) {
    throw DomainError("step control fields must all be positive and finite");
  }
  if (safety > 1.0) throw DomainError("safety must lie in (0, 1]");
  if (rel_tol < 1e-13) throw DomainError("rel_tol below 1e-13 is under the round-off floor");
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::blow_up_stop: return "blow_up_stop";
    case EventKind::positivity_loss: return "positivity_loss";
    case EventKind::trap_violation: return "trap_violation";
    case EventKind::step_floor: return "step_floor";
    case EventKind::horizon: return "horizon";
  }
  return "unknown";
}

std::optional<EventKind> event_kind_from_string(const std::string& name) {
  for (auto k : {EventKind::blow_up_stop, EventKind::positivity_loss, EventKind::trap_violation,
                 EventKind::step_floor, EventKind::horizon}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool Trajectory::has_event(EventKind kind) const {
  return std::any_of(events.begin(), events.end(), [&](const Event& e) { return e.kind == kind; });
}

void Trajectory::append(SpectralState state, double interval) {
  snapshots.push_back(std::move(state));
  intervals.push_back(snapshots.size() == 1 ? 0.0 : interval);
}

double grid_minimum(const SpectralState& state, int grid_points) {
  const auto field = synthesize(state, grid_points);
  return *std::min_element(field.values.begin(), field.values.end());
}

namespace {

using Vec = std::vector<Complex>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Stepper {
 public:
  Stepper(const FlowParams& params, Flow flow, const StepControl& control)
      : params_(params), flow_(flow), control_(control) {}

  Vec derivative(const Vec& y) const {
    SpectralState s(params_, y);
    const auto d = flow_ == Flow::normalized ? normalized_rhs(s) : rhs_fast(s);
    Vec out(d.coeffs().begin(), d.coeffs().end());
    for (const auto& z : out) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw IntegrationError("non-finite derivative (k(0) = " + std::to_string(y[0].real()) +
                               ")");
      }
    }
    return out;
  }

  struct Attempt {
    Vec y;
    Vec k7;
    double error;
  };

  // One trial step from y with first stage k1.
  Attempt attempt(const Vec& y, const Vec& k1, double h) const {
    const size_t n = y.size();
    Vec tmp(n);
    auto stage = [&](std::initializer_list<std::pair<double, const Vec*>> terms) {
      for (size_t i = 0; i < n; ++i) {
        Complex acc{};
        for (const auto& [a, k] : terms) acc += a * (*k)[i];
        tmp[i] = y[i] + h * acc;
      }
      tmp[0] = Complex(tmp[0].real(), 0.0);
      return derivative(tmp);
    };
    const Vec k2 = stage({{a21, &k1}});
    const Vec k3 = stage({{a31, &k1}, {a32, &k2}});
    const Vec k4 = stage({{a41, &k1}, {a42, &k2}, {a43, &k3}});
    const Vec k5 = stage({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    const Vec k6 = stage({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    Vec ynew(n);
    for (size_t i = 0; i < n; ++i) {
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    ynew[0] = Complex(ynew[0].real(), 0.0);
    Vec k7 = derivative(ynew);
    double ymax = 0.0, errmax = 0.0;
    for (size_t i = 0; i < n; ++i) {
      ymax = std::max({ymax, std::abs(y[i]), std::abs(ynew[i])});
      const Complex e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      errmax = std::max(errmax, std::abs(e));
    }
    const double scale = control_.abs_tol + control_.rel_tol * ymax;
    return {std::move(ynew), std::move(k7), errmax / scale};
  }

 private:
  FlowParams params_;
  Flow flow_;
  StepControl control_;
};

// Compensated accumulator for time.
struct TimeSum {
  double hi = 0.0, lo = 0.0;
  void add(double x) {
    const double s = hi + x;
    const double bp = s - hi;
    const double err = (hi - (s - bp)) + (x - bp);
    hi = s;
    lo += err;
  }
  double value() const { return hi + lo; }
};

// PI controller (Hairer's dopri5 exponents).
struct Controller {
  double err_prev = 1e-4;
  double grow(double err, double safety_factor = 0.9) {
    constexpr double alpha = 0.17, beta = 0.04;
    double fac = safety_factor * std::pow(std::max(err, 1e-10), -alpha) *
                 std::pow(err_prev, beta);
    err_prev = std::max(err, 1e-4);
    return std::clamp(fac, 0.2, 5.0);
  }
  static double shrink(double err) {
    return std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
  }
};

double stiffness_cap(const FlowParams& params, const StepControl& control, double amplitude,
                     Flow flow) {
  const double l2n2 = params.lambda() * params.lambda() * params.n_max() * params.n_max();
  const double weight = flow == Flow::normalized ? params.p() : 1.0;
  return control.safety / (weight * l2n2 * std::pow(amplitude, params.p() + 1));
}

}  // namespace

StepResult step(const SpectralState& state, double dt, const StepControl& control, Flow flow) {
  if (!(dt > 0.0)) throw DomainError("step size must be positive");
  Stepper stepper(state.params(), flow, control);
  const Vec y(state.coeffs().begin(), state.coeffs().end());
  auto res = stepper.attempt(y, stepper.derivative(y), dt);
  return {SpectralState(state.params(), std::move(res.y), state.t() + dt), res.error};
}

Trajectory integrate(const SpectralState& init, const IntegrateOptions& options) {
  const auto& control = options.control;
  control.validate();
  if (options.snapshots_per_decade < 1) throw DomainError("snapshots_per_decade must be >= 1");
  const FlowParams& params = init.params();
  const int p = params.p();
  const int check_grid = dealias_grid_size(p, params.n_max());

  Trajectory traj{params, Flow::unnormalized, {}, {}, {}, std::nullopt, std::nullopt};
  traj.append(init, 0.0);

  const double min0 = grid_minimum(init, check_grid);
  if (!(min0 > 0.0)) {
    std::ostringstream msg;
    msg << "initial data not positive (min " << min0 << ")";
    traj.events.push_back({init.t(), EventKind::positivity_loss, msg.str()});
    return traj;
  }
  if (options.t_end && !(*options.t_end > init.t())) {
    throw DomainError("t_end must lie after the initial time");
  }

  Stepper stepper(params, Flow::unnormalized, control);
  Vec y(init.coeffs().begin(), init.coeffs().end());
  Vec k1 = stepper.derivative(y);
  TimeSum t;
  t.add(init.t());
  TimeSum interval;
  Controller controller;

  const double ratio = std::pow(10.0, 1.0 / options.snapshots_per_decade);
  double next_snapshot = y[0].real() * ratio;
  bool inside = !options.trap_constant ||
                init.mean() - *options.trap_constant * seminorm(init, 2.0) >= 0.0;
  double h = stiffness_cap(params, control, y[0].real(), Flow::unnormalized);
  bool last_recorded = true;

  auto record = [&](bool force) {
    const double k0 = y[0].real();
    if (!force && k0 < next_snapshot) return;
    SpectralState s(params, y, t.value());
    if (options.trap_constant) {
      const double margin = s.mean() - *options.trap_constant * seminorm(s, 2.0);
      if (inside && margin < 0.0) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "trap margin " << margin << " at k(0) = " << k0;
        traj.events.push_back({s.t(), EventKind::trap_violation, msg.str()});
      }
      inside = margin >= 0.0;
    }
    traj.append(std::move(s), interval.value());
    interval = TimeSum{};
    while (next_snapshot <= k0) next_snapshot *= ratio;
    last_recorded = true;
  };

  for (long steps = 0;; ++steps) {
    const double k0 = y[0].real();
    if (k0 >= control.k0_stop) {
      if (!last_recorded) record(true);
      std::ostringstream msg;
      msg.precision(6);
      msg << "k(0) = " << k0 << " reached the stop threshold";
      traj.events.push_back({t.value(), EventKind::blow_up_stop, msg.str()});
      break;
    }
    if (steps >= options.max_steps) {
      if (!last_recorded) record(true);
      traj.events.push_back({t.value(), EventKind::step_floor, "step budget exhausted"});
      break;
    }
    const double natural = std::pow(k0, p + 1);
    h = std::min({h, stiffness_cap(params, control, k0, Flow::unnormalized),
                  control.max_step / natural});
    bool landing = false;
    if (options.t_end) {
      const double remaining = *options.t_end - t.value();
      if (h >= remaining) {
        h = remaining;
        landing = true;
      }
    }
    if (!landing && h * natural < control.min_step) {
      if (!last_recorded) record(true);
      std::ostringstream msg;
      msg << "step " << h << " below the floor at k(0) = " << k0;
      traj.events.push_back({t.value(), EventKind::step_floor, msg.str()});
      break;
    }

    auto trial = stepper.attempt(y, k1, h);
    if (trial.error > 1.0) {
      h *= Controller::shrink(trial.error);
      continue;
    }

    const double grow = controller.grow(trial.error);
    y = std::move(trial.y);
    k1 = std::move(trial.k7);
    t.add(h);
    interval.add(h);
    last_recorded = false;

    const double gmin = grid_minimum(SpectralState(params, y), check_grid);
    if (!(gmin > 0.0)) {
      record(true);
      std::ostringstream msg;
      msg << "curvature minimum " << gmin << " on the grid";
      traj.events.push_back({t.value(), EventKind::positivity_loss, msg.str()});
      return traj;
    }
    if (landing) {
      record(true);
      traj.events.push_back({t.value(), EventKind::horizon, "reached t_end"});
      break;
    }
    record(false);
    h *= grow;
  }

  if (traj.has_event(EventKind::blow_up_stop)) {
    const auto& last = traj.snapshots.back();
    const double tail = p / (p + 1.0) * std::pow(last.mean(), -(p + 1));
    traj.T_tail = tail;
    traj.T_est = last.t() + tail;
  }
  return traj;
}

Trajectory integrate_normalized(const SpectralState& init, double tau_horizon,
                                const NormalizedOptions& options) {
  const auto& control = options.control;
  control.validate();
  if (!(tau_horizon > init.t())) throw DomainError("tau horizon must lie after the initial tau");
  const FlowParams& params = init.params();
  const int check_grid = dealias_grid_size(params.p(), params.n_max());

  std::vector<double> outputs = options.output_taus;
  if (outputs.empty()) {
    if (!(options.snapshot_dtau > 0.0)) throw DomainError("snapshot_dtau must be positive");
    for (long j = 1;; ++j) {
      const double tau = init.t() + j * options.snapshot_dtau;
      if (tau >= tau_horizon * (1.0 - 1e-14)) break;
      outputs.push_back(tau);
    }
    outputs.push_back(tau_horizon);
  } else {
    if (!std::is_sorted(outputs.begin(), outputs.end()) || outputs.front() <= init.t() ||
        outputs.back() > tau_horizon) {
      throw DomainError("output taus must be increasing and inside (tau0, horizon]");
    }
  }

  Trajectory traj{params, Flow::normalized, {}, {}, {}, std::nullopt, std::nullopt};
  traj.append(init, 0.0);
  if (!(grid_minimum(init, check_grid) > 0.0)) {
    traj.events.push_back({init.t(), EventKind::positivity_loss, "initial data not positive"});
    return traj;
  }

  Stepper stepper(params, Flow::normalized, control);
  Vec y(init.coeffs().begin(), init.coeffs().end());
  TimeSum tau;
  tau.add(init.t());
  TimeSum interval;
  Controller controller;
  double h = stiffness_cap(params, control, y[0].real(), Flow::normalized);
  size_t next = 0;

  try {
    Vec k1 = stepper.derivative(y);
    for (long steps = 0; next < outputs.size(); ++steps) {
      if (steps >= options.max_steps) {
        traj.events.push_back({tau.value(), EventKind::step_floor, "step budget exhausted"});
        break;
      }
      const double amp = std::max(y[0].real(), 1e-300);
      const double natural = std::pow(amp, params.p() + 1);
      h = std::min({h, stiffness_cap(params, control, amp, Flow::normalized),
                    control.max_step / natural});
      if (h * natural < control.min_step) {
        traj.events.push_back({tau.value(), EventKind::step_floor, "step below the floor"});
        break;
      }
      const double remaining = outputs[next] - tau.value();
      const bool landing = h >= remaining;
      const double h_try = landing ? remaining : h;
      auto trial = stepper.attempt(y, k1, h_try);
      if (trial.error > 1.0) {
        h = h_try * Controller::shrink(trial.error);
        continue;
      }
      const double grow = controller.grow(trial.error);
      y = std::move(trial.y);
      k1 = std::move(trial.k7);
      if (options.renormalize_mean) {
        const double inv = 1.0 / y[0].real();
        for (auto& z : y) z *= inv;
        k1 = stepper.derivative(y);
      }
      if (landing) {
        // Land exactly on the requested tau.
        tau = TimeSum{};
        tau.add(outputs[next]);
        interval.add(h_try);
        traj.append(SpectralState(params, y, outputs[next]), interval.value());
        interval = TimeSum{};
        ++next;
      } else {
        tau.add(h);
        interval.add(h);
      }
      if (!(grid_minimum(SpectralState(params, y), check_grid) > 0.0)) {
        if (!landing) traj.append(SpectralState(params, y, tau.value()), interval.value());
        traj.events.push_back({tau.value(), EventKind::positivity_loss, "u lost positivity"});
        return traj;
      }
      if (!landing) h *= grow;
    }
  } catch (const DomainError& e) {
    traj.events.push_back({tau.value(), EventKind::positivity_loss, e.what()});
    return traj;
  }
  if (next == outputs.size()) {
    traj.events.push_back({tau.value(), EventKind::horizon, "reached tau horizon"});
  }
  return traj;
}

}  // namespace pcsf
