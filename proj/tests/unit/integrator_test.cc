#include "pcsf/integrator.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pcsf/blowup.hpp"
#include "pcsf/errors.hpp"
#include "pcsf/fit.hpp"

namespace pcsf {
namespace {

SpectralState perturbed(const FlowParams& fp, double delta, int mode = 1) {
  auto s = SpectralState::constant(fp, 1.0);
  s.set_mode(mode, delta / 2.0);
  return s;
}

GTEST_TEST(StepControlTest, Validation) {
  StepControl c;
  EXPECT_NO_THROW(c.validate());
  c.rel_tol = 1e-14;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.safety = 1.5;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.min_step = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
}

GTEST_TEST(StepTest, ConstantDataSingleStep) {
  FlowParams fp(1, 2.0, 4);
  const auto r = step(SpectralState::constant(fp, 1.0), 1e-4, StepControl{});
  EXPECT_NEAR(r.state.mean(), testing::constant_solution(1.0, 1, 1e-4), 1e-12);
  EXPECT_DOUBLE_EQ(r.state.t(), 1e-4);
  for (int n = 1; n <= 4; ++n) EXPECT_EQ(r.state.mode(n), Complex(0.0));
}

GTEST_TEST(StepTest, ConvergenceOrder) {
  FlowParams fp(1, 2.0, 6);
  const auto s = perturbed(fp, 0.2);
  auto reference = [&](double h) {
    SpectralState x = s;
    const int sub = 64;
    for (int i = 0; i < sub; ++i) x = step(x, h / sub, StepControl{}).state;
    return x;
  };
  auto local_error = [&](double h) {
    const auto a = step(s, h, StepControl{}).state;
    const auto b = reference(h);
    double e = 0.0;
    for (int n = 0; n <= 6; ++n) e = std::max(e, std::abs(a.mode(n) - b.mode(n)));
    return e;
  };
  const double h = 4e-3;
  const double ratio = local_error(h) / local_error(h / 2);
  // Fifth-order pair: one-step error falls by 2^6, the embedded estimate by 2^5.
  EXPECT_GT(ratio, 40.0);
  EXPECT_LT(ratio, 90.0);
  const double est_ratio = step(s, h, StepControl{}).error / step(s, h / 2, StepControl{}).error;
  EXPECT_GT(est_ratio, 24.0);
  EXPECT_LT(est_ratio, 40.0);
}

GTEST_TEST(IntegrateTest, ConstantDataBlowUp) {
  for (int p : {1, 2}) {
    FlowParams fp(p, 2.0, 4);
    const auto traj = integrate(SpectralState::constant(fp, 1.0));
    const double T = testing::constant_blowup_time(1.0, p);
    ASSERT_TRUE(traj.has_event(EventKind::blow_up_stop));
    EXPECT_GE(traj.snapshots.back().mean(), 1e6);
    EXPECT_NEAR(traj.snapshots.back().t(), T, 1e-8);
    ASSERT_TRUE(traj.T_est.has_value());
    EXPECT_NEAR(*traj.T_est, T, 1e-12);
    for (int n = 1; n <= 4; ++n) EXPECT_EQ(traj.snapshots.back().mode(n), Complex(0.0));
  }
}

GTEST_TEST(IntegrateTest, SnapshotScheduleAndIntervals) {
  FlowParams fp(1, 2.0, 8);
  IntegrateOptions opts;
  opts.snapshots_per_decade = 20;
  const auto traj = integrate(perturbed(fp, 0.005), opts);
  ASSERT_EQ(traj.snapshots.size(), traj.intervals.size());
  EXPECT_EQ(traj.intervals[0], 0.0);
  // 6 decades at 20 per decade plus the initial state.
  EXPECT_NEAR(static_cast<double>(traj.snapshots.size()), 121.0, 2.0);
  for (size_t i = 1; i < traj.snapshots.size(); ++i) {
    EXPECT_GT(traj.snapshots[i].t(), traj.snapshots[i - 1].t());
    EXPECT_GE(traj.snapshots[i].mean(), traj.snapshots[i - 1].mean());
    EXPECT_NEAR(traj.intervals[i], traj.snapshots[i].t() - traj.snapshots[i - 1].t(), 1e-15);
  }
}

GTEST_TEST(IntegrateTest, LandsOnEndTime) {
  FlowParams fp(2, 2.0, 4);
  IntegrateOptions opts;
  opts.t_end = 0.6;
  const auto traj = integrate(SpectralState::constant(fp, 1.0), opts);
  EXPECT_TRUE(traj.has_event(EventKind::horizon));
  EXPECT_EQ(traj.snapshots.back().t(), 0.6);
  EXPECT_NEAR(traj.snapshots.back().mean() / testing::constant_solution(1.0, 2, 0.6), 1.0, 1e-10);
}

GTEST_TEST(IntegrateTest, GlobalAccuracyAgainstHalfTolerance) {
  FlowParams fp(1, 2.0, 8);
  const auto init = perturbed(fp, 0.005);
  const double rel_tol = 1e-10;
  // Times at which k(0) is about 10, 100, 1000 and 1e4.
  const double T = estimate_T(integrate(init)).T;
  for (double k0 : {1e1, 1e2, 1e3, 1e4}) {
    IntegrateOptions a, b;
    a.control.rel_tol = rel_tol;
    b.control.rel_tol = rel_tol / 2;
    a.t_end = b.t_end = T - 0.5 * std::pow(k0, -2.0);
    const auto sa = integrate(init, a).snapshots.back();
    const auto sb = integrate(init, b).snapshots.back();
    double err = 0.0;
    for (int n = 0; n <= 8; ++n) err = std::max(err, std::abs(sa.mode(n) - sb.mode(n)));
    EXPECT_LE(err / sb.mean(), 10 * rel_tol) << "k0 " << k0;
  }
}

GTEST_TEST(IntegrateTest, Deterministic) {
  FlowParams fp(2, 2.0, 8);
  const auto a = integrate(perturbed(fp, 0.005));
  const auto b = integrate(perturbed(fp, 0.005));
  ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
  for (size_t i = 0; i < a.snapshots.size(); ++i) {
    EXPECT_EQ(a.snapshots[i].t(), b.snapshots[i].t());
    for (int n = 0; n <= 8; ++n) EXPECT_EQ(a.snapshots[i].mode(n), b.snapshots[i].mode(n));
  }
}

GTEST_TEST(IntegrateTest, PositivityLossAtStart) {
  FlowParams fp(1, 2.0, 4);
  auto s = SpectralState::constant(fp, 0.1);
  s.set_mode(1, 0.2);
  const auto traj = integrate(s);
  EXPECT_TRUE(traj.has_event(EventKind::positivity_loss));
  EXPECT_EQ(traj.snapshots.size(), 1u);
}

GTEST_TEST(IntegrateTest, StepFloor) {
  FlowParams fp(1, 2.0, 8);
  IntegrateOptions opts;
  opts.control.min_step = 1.0;
  opts.control.max_step = 2.0;
  const auto traj = integrate(perturbed(fp, 0.005), opts);
  EXPECT_TRUE(traj.has_event(EventKind::step_floor));
  EXPECT_FALSE(traj.has_event(EventKind::blow_up_stop));
}

GTEST_TEST(IntegrateTest, NoTrapViolationForHypothesisPassingData) {
  FlowParams fp(1, 2.0, 12);
  IntegrateOptions opts;
  opts.trap_constant = 256.0;
  const auto traj = integrate(perturbed(fp, 0.005), opts);
  EXPECT_FALSE(traj.has_event(EventKind::trap_violation));
  EXPECT_TRUE(traj.has_event(EventKind::blow_up_stop));
}

GTEST_TEST(EventKindTest, NamesRoundTrip) {
  for (auto k : {EventKind::blow_up_stop, EventKind::positivity_loss, EventKind::trap_violation,
                 EventKind::step_floor, EventKind::horizon}) {
    EXPECT_EQ(event_kind_from_string(to_string(k)), k);
  }
  EXPECT_FALSE(event_kind_from_string("nope").has_value());
}

GTEST_TEST(IntegrateNormalizedTest, SteadyStateStays) {
  FlowParams fp(2, 2.0, 6);
  const auto traj = integrate_normalized(SpectralState::constant(fp, 1.0), 5.0);
  for (const auto& s : traj.snapshots) {
    EXPECT_NEAR(s.mean(), 1.0, 1e-13);
    EXPECT_LE(seminorm(s, 0.0), 1e-15);
  }
  EXPECT_TRUE(traj.has_event(EventKind::horizon));
}

GTEST_TEST(IntegrateNormalizedTest, LandsOnOutputTaus) {
  FlowParams fp(1, 2.0, 6);
  NormalizedOptions opts;
  opts.output_taus = {0.5, 1.25, 3.0};
  const auto traj = integrate_normalized(perturbed(fp, 0.005), 3.0, opts);
  ASSERT_GE(traj.snapshots.size(), 4u);
  EXPECT_EQ(traj.snapshots[1].t(), 0.5);
  EXPECT_EQ(traj.snapshots[2].t(), 1.25);
  EXPECT_EQ(traj.snapshots.back().t(), 3.0);
}

GTEST_TEST(IntegrateNormalizedTest, DeviationDecayRate) {
  // Mean renormalization removes the unstable mode 0; mode 1 then decays at
  // lambda^2 p - p - 1 = 2.
  FlowParams fp(1, 2.0, 8);
  NormalizedOptions opts;
  opts.renormalize_mean = true;
  const auto traj = integrate_normalized(perturbed(fp, 0.005), 6.0, opts);
  std::vector<double> x, y;
  for (const auto& s : traj.snapshots) {
    if (s.t() < 1.0) continue;
    x.push_back(s.t());
    y.push_back(std::log(std::abs(s.mode(1))));
  }
  EXPECT_NEAR(fit_line(x, y).slope, -2.0, 0.02);
}

GTEST_TEST(GridMinimumTest, Cosine) {
  FlowParams fp(1, 2.0, 4);
  auto s = SpectralState::constant(fp, 1.0);
  s.set_mode(1, 0.25);
  EXPECT_NEAR(grid_minimum(s, 16), 0.5, 1e-14);
}

}  // namespace
}  // namespace pcsf
