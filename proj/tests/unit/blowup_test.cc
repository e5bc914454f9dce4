#include "pcsf/blowup.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pcsf/errors.hpp"

namespace pcsf {
namespace {

SpectralState cosine_data(const FlowParams& fp, double delta) {
  auto s = SpectralState::constant(fp, 1.0);
  s.set_mode(1, delta / 2.0);
  return s;
}

// Direct evaluation of k(0) - c max n^2 max(|Re|, |Im|).
double margin_oracle(const SpectralState& s, double c) {
  double m = 0.0;
  for (int n = 1; n <= s.n_max(); ++n) {
    m = std::max(m, n * n * std::max(std::abs(s.mode(n).real()), std::abs(s.mode(n).imag())));
  }
  return s.mean() - c * m;
}

GTEST_TEST(SelectCTest, Examples) {
  const auto c1 = select_c(FlowParams(1, 2.0, 4));
  EXPECT_DOUBLE_EQ(c1.value, 256.0);
  EXPECT_FALSE(c1.heuristic);
  const auto c2 = select_c(FlowParams(2, 2.0, 4));
  EXPECT_DOUBLE_EQ(c2.value, 128.0);
  EXPECT_TRUE(c2.heuristic);
}

GTEST_TEST(SelectCTest, PoleAtThreshold) {
  double previous = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double c = select_c(FlowParams(1, std::sqrt(3.0) * (1 + eps), 4)).value;
    EXPECT_GT(c, previous);
    previous = c;
  }
  EXPECT_GT(previous, 1e5);
}

GTEST_TEST(CheckHypothesisTest, Examples) {
  FlowParams fp(1, 2.0, 8);
  const auto ok = check_hypothesis(cosine_data(fp, 0.005), 256.0);
  EXPECT_DOUBLE_EQ(ok.mean, 1.0);
  EXPECT_DOUBLE_EQ(ok.seminorm2, 0.0025);
  EXPECT_NEAR(ok.margin, 0.36, 1e-15);
  EXPECT_TRUE(ok.holds);
  EXPECT_TRUE(ok.positive);

  EXPECT_TRUE(check_hypothesis(SpectralState::constant(fp, 0.3), 1e12).holds);

  const auto bad = check_hypothesis(cosine_data(fp, 0.01), 256.0);
  EXPECT_NEAR(bad.margin, 1.0 - 1.28, 1e-15);
  EXPECT_FALSE(bad.holds);
}

GTEST_TEST(TrapMarginTest, Examples) {
  FlowParams fp(1, 2.0, 4);
  const double c = 256.0;
  EXPECT_DOUBLE_EQ(trap_margin(SpectralState::constant(fp, 2.5), c), 2.5);
  auto s = SpectralState::constant(fp, 1.0);
  s.set_mode(1, 1.0 / c);
  EXPECT_NEAR(trap_margin(s, c), 0.0, 1e-15);
  s.set_mode(1, 1.0 / (2.0 * c));
  EXPECT_NEAR(trap_margin(s, c), 0.5, 1e-15);
}

GTEST_TEST(TrapMarginTest, MatchesDefinitionAndIsHomogeneous) {
  for (int seed = 0; seed < 30; ++seed) {
    FlowParams fp(1 + seed % 3, 2.0, 2 + seed % 7);
    const auto s = testing::random_state(fp, 40.0, static_cast<unsigned>(seed));
    EXPECT_NEAR(trap_margin(s, 40.0), margin_oracle(s, 40.0), 1e-14);
    EXPECT_NEAR(trap_margin(s.scaled(3.0), 40.0), 3.0 * trap_margin(s, 40.0), 1e-13);
  }
}

GTEST_TEST(EstimateTTest, ConstantDataMatchesClosedForm) {
  for (int p : {1, 2, 3}) {
    for (double a : {0.5, 1.0, 2.0}) {
      const auto traj = integrate(SpectralState::constant(FlowParams(p, 2.0, 4), a));
      const auto est = estimate_T(traj);
      const double T = testing::constant_blowup_time(a, p);
      EXPECT_LE(std::abs(est.T - T), 1e-6 * T) << "p " << p << " a " << a;
      EXPECT_LE(est.uncertainty, 1e-6 * T);
      EXPECT_GT(est.tail, 0.0);
    }
  }
}

GTEST_TEST(EstimateTTest, RequiresLargeAmplitude) {
  IntegrateOptions opts;
  opts.control.k0_stop = 100.0;
  const auto traj = integrate(SpectralState::constant(FlowParams(1, 2.0, 4), 1.0), opts);
  EXPECT_THROW(estimate_T(traj), AnalysisError);
}

GTEST_TEST(TimeToBlowupTest, SuffixSums) {
  const auto traj = integrate(SpectralState::constant(FlowParams(1, 2.0, 4), 1.0));
  // Exact constant solution: T - t = (p/(p+1)) k0^{-(p+1)}.
  const auto want = [&](size_t i) { return 0.5 * std::pow(traj.snapshots[i].mean(), -2.0); };
  const auto gaps = time_to_blowup(traj, estimate_T(traj));
  for (size_t i = 0; i < gaps.size(); ++i) EXPECT_NEAR(gaps[i] / want(i), 1.0, 1e-8) << i;

  // With a known T the tail comes from the absolute time of the last snapshot,
  // so only gaps well above the resolution of t are meaningful.
  const auto known = time_to_blowup(traj, blowup_from_known_T(traj, 0.5));
  for (size_t i = 0; i < known.size() && traj.snapshots[i].mean() <= 10.0; ++i) {
    EXPECT_NEAR(known[i] / want(i), 1.0, 1e-9) << i;
  }
}

GTEST_TEST(DecayExponentTest, Examples) {
  EXPECT_DOUBLE_EQ(decay_exponent(2.0, 1, 1), 0.5);
  EXPECT_DOUBLE_EQ(decay_exponent(2.0, 2, 1), 6.5);
  EXPECT_NEAR(decay_exponent(2.0, 1, 2), 4.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(forced_decay_exponent(2.0, 1, 1), 0.5);
  EXPECT_DOUBLE_EQ(forced_decay_exponent(2.0, 2, 1), 1.5);
}

GTEST_TEST(EnvelopeTest, BandAroundOne) {
  for (int p : {1, 2, 3}) {
    for (double g : {1e-12, 1e-6, 1e-2, 0.5}) {
      const auto band = blowup_envelope(p, g);
      EXPECT_LT(band.lower, 1.0);
      EXPECT_GT(band.upper, 1.0);
      const double k0 = std::pow(p / ((p + 1.0) * g), 1.0 / (p + 1));
      EXPECT_LT(envelope_lower_k0(p, g), k0);
      EXPECT_GT(envelope_upper_k0(p, g), k0);
    }
  }
}

GTEST_TEST(EnvelopeTest, HoldsForConstantAndPerturbedRuns) {
  for (int p : {1, 2}) {
    FlowParams fp(p, 2.0, 10);
    for (double delta : {0.0, 0.005}) {
      const auto traj = integrate(cosine_data(fp, delta));
      const auto report = check_envelopes(traj, estimate_T(traj));
      EXPECT_TRUE(report.holds) << "p " << p << " delta " << delta;
      EXPECT_GE(report.checked, 39u);
    }
  }
}

GTEST_TEST(FitPowerTest, ModeOneExponentMatrix) {
  struct Case {
    int p;
    double lambda;
  };
  for (auto c : {Case{1, 2.0}, Case{1, 2.5}, Case{2, 1.6}, Case{2, 2.0}}) {
    FlowParams fp(c.p, c.lambda, 12);
    const auto traj = integrate(cosine_data(fp, 0.005));
    const auto fit = fit_power(traj, estimate_T(traj), 1);
    const double alpha = decay_exponent(c.lambda, 1, c.p);
    EXPECT_NEAR(fit.exponent, alpha, 0.1 * alpha) << "p " << c.p << " lambda " << c.lambda;
    EXPECT_GE(fit.n_points, 8);
    EXPECT_LT(fit.window_lo, fit.window_hi);
  }
}

GTEST_TEST(FitPowerTest, ExampleRun) {
  FlowParams fp(1, 2.0, 12);
  const auto traj = integrate(cosine_data(fp, 0.005));
  EXPECT_NEAR(fit_power(traj, estimate_T(traj), 1).exponent, 0.5, 0.05);
}

GTEST_TEST(FitPowerTest, RoundOffFloorIsReported) {
  const auto traj = integrate(SpectralState::constant(FlowParams(1, 2.0, 4), 1.0));
  try {
    fit_power(traj, estimate_T(traj), 1);
    FAIL() << "expected AnalysisError";
  } catch (const AnalysisError& e) {
    EXPECT_NE(std::string(e.what()).find("round-off floor"), std::string::npos);
  }
  EXPECT_THROW(fit_power(traj, estimate_T(traj), 9), AnalysisError);
}

GTEST_TEST(CertifyTest, ConstantRun) {
  const auto traj = integrate(SpectralState::constant(FlowParams(1, 2.0, 4), 1.0));
  const auto cert = certify(traj, 256.0);
  ASSERT_EQ(cert.margins.size(), traj.snapshots.size());
  for (size_t i = 0; i < cert.margins.size(); ++i) {
    EXPECT_EQ(cert.margins[i].margin, traj.snapshots[i].mean());
  }
  EXPECT_TRUE(cert.holds());
}

GTEST_TEST(CertifyTest, HypothesisPassingRunsStayTrapped) {
  for (int seed = 1; seed <= 4; ++seed) {
    FlowParams fp(1, 2.0, 8);
    const auto init = testing::random_state(fp, 256.0, static_cast<unsigned>(seed));
    ASSERT_TRUE(check_hypothesis(init, 256.0).holds);
    const auto cert = certify(integrate(init), 256.0);
    EXPECT_TRUE(cert.holds()) << "seed " << seed << " min margin " << cert.min_margin();
  }
}

GTEST_TEST(CertifyTest, ViolationReported) {
  FlowParams fp(1, 2.0, 4);
  Trajectory traj{fp, Flow::unnormalized, {}, {}, {}, {}, {}};
  traj.append(cosine_data(fp, 0.005), 0.0);
  traj.append(cosine_data(fp, 0.02), 0.1);
  const auto cert = certify(traj, 256.0);
  EXPECT_FALSE(cert.holds());
  EXPECT_NEAR(cert.min_margin(), 1.0 - 256.0 * 0.01, 1e-14);
}

GTEST_TEST(CertifyTest, DecayFitsReported) {
  FlowParams fp(1, 2.0, 12);
  const auto cert = certify(integrate(cosine_data(fp, 0.005)), 256.0);
  ASSERT_TRUE(cert.gamma_fit.has_value());
  EXPECT_GT(*cert.gamma_fit, 0.0);
}

}  // namespace
}  // namespace pcsf
