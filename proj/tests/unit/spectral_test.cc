#include "pcsf/spectral.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pcsf/errors.hpp"

namespace pcsf {
namespace {

using testing::kPi;

GTEST_TEST(FlowParamsTest, EnforcesThreshold) {
  EXPECT_NO_THROW(FlowParams(1, 2.0, 4));
  EXPECT_THROW(FlowParams(1, std::sqrt(3.0), 4), DomainError);
  EXPECT_THROW(FlowParams(2, 1.4, 4), DomainError);
  EXPECT_NO_THROW(FlowParams(2, 1.5, 4));
  EXPECT_THROW(FlowParams(0, 2.0, 4), DomainError);
  EXPECT_THROW(FlowParams(1, 2.0, 0), DomainError);
}

GTEST_TEST(FlowParamsTest, RationalTag) {
  const auto fp = FlowParams::rational(1, 7, 2, 8);
  ASSERT_TRUE(fp.ratio().has_value());
  EXPECT_EQ(fp.ratio()->num, 7);
  EXPECT_EQ(fp.ratio()->den, 2);
  EXPECT_DOUBLE_EQ(fp.lambda(), 3.5);
  EXPECT_THROW(FlowParams::rational(1, 4, 2, 8), DomainError);
  // 3/2 is below sqrt(3).
  EXPECT_THROW(FlowParams::rational(1, 3, 2, 8), DomainError);
}

GTEST_TEST(SpectralStateTest, HermitianStorage) {
  FlowParams fp(1, 2.0, 4);
  SpectralState s(fp, {Complex(1.0, 0.3), Complex(0.1, 0.2), 0.0, 0.0, 0.0});
  EXPECT_EQ(s.mode(0).imag(), 0.0);
  EXPECT_EQ(s.mode(-1), std::conj(s.mode(1)));
  EXPECT_THROW(SpectralState(fp, {Complex(1.0)}), InputError);
}

GTEST_TEST(SynthesizeTest, ConstantAndCosine) {
  FlowParams fp(1, 2.0, 4);
  const auto g = synthesize(SpectralState::constant(fp, 1.0), 16);
  for (double v : g.values) EXPECT_DOUBLE_EQ(v, 1.0);

  SpectralState s(fp);
  s.set_mode(1, 0.5);
  const auto c = synthesize(s, 16);
  for (int j = 0; j < c.size(); ++j) EXPECT_NEAR(c.values[j], std::cos(2.0 * c.theta(j)), 1e-15);
  EXPECT_THROW(synthesize(s, 8), TruncationError);
}

GTEST_TEST(AnalyzeGridTest, Orthogonality) {
  FlowParams fp(1, 2.0, 4);
  GridField f{fp, std::vector<double>(16)};
  for (int j = 0; j < 16; ++j) f.values[j] = std::cos(2.0 * 2.0 * f.theta(j));
  const auto s = analyze_grid(f);
  for (int n = 0; n <= 4; ++n) {
    EXPECT_NEAR(std::abs(s.mode(n) - Complex(n == 2 ? 0.5 : 0.0, 0.0)), 0.0, 1e-15) << n;
  }
  GridField bad{fp, std::vector<double>(16, 1.0)};
  bad.values[3] = NAN;
  EXPECT_THROW(analyze_grid(bad), InputError);
  GridField small{fp, std::vector<double>(8, 1.0)};
  EXPECT_THROW(analyze_grid(small), TruncationError);
}

GTEST_TEST(AnalyzeGridTest, RoundTripAllGridSizes) {
  for (int n_max : {1, 3, 8, 16}) {
    FlowParams fp(2, 1.7, n_max);
    const auto s = testing::random_state(fp, 10.0, 11u + static_cast<unsigned>(n_max));
    for (int m = 2 * n_max + 1; m <= 4 * n_max + 3; ++m) {
      const auto back = analyze_grid(synthesize(s, m));
      double err = 0.0;
      for (int n = 0; n <= n_max; ++n) err = std::max(err, std::abs(back.mode(n) - s.mode(n)));
      EXPECT_LE(err, 1e-12 * (1.0 + s.max_abs())) << "n_max " << n_max << " M " << m;
      EXPECT_EQ(back.mode(0).imag(), 0.0);
    }
  }
}

GTEST_TEST(SynthesizeTest, MatchesDirectSummation) {
  FlowParams fp(1, 2.5, 6);
  const auto s = testing::random_state(fp, 20.0, 5);
  const auto g = synthesize(s, 40);
  for (int j = 0; j < g.size(); ++j) {
    EXPECT_NEAR(g.values[j], testing::jet(s, g.theta(j)).k, 1e-14);
    EXPECT_NEAR(evaluate(s, g.theta(j)), g.values[j], 1e-14);
  }
}

GTEST_TEST(GridSizeTest, SmoothSizes) {
  EXPECT_EQ(smooth_size_at_least(1), 1);
  EXPECT_EQ(smooth_size_at_least(7), 8);
  EXPECT_EQ(smooth_size_at_least(11), 12);
  EXPECT_EQ(smooth_size_at_least(49), 50);
  EXPECT_EQ(smooth_size_at_least(97), 100);
  EXPECT_EQ(default_grid_size(16), 64);
  EXPECT_GE(default_grid_size(3), 2 * 3 + 1);
}

GTEST_TEST(SeminormTest, Examples) {
  FlowParams fp(1, 2.0, 4);
  EXPECT_EQ(seminorm(SpectralState::constant(fp, 3.0), 2.0), 0.0);
  SpectralState c(fp);
  c.set_mode(1, 0.5);
  EXPECT_DOUBLE_EQ(seminorm(c, 2.0), 0.5);
  SpectralState s(fp);
  s.set_mode(2, Complex(0.0, -0.5));
  EXPECT_DOUBLE_EQ(seminorm(s, 2.0), 2.0);
}

GTEST_TEST(SeminormTest, AbsolutelyHomogeneous) {
  FlowParams fp(2, 2.0, 6);
  const auto s = testing::random_state(fp, 50.0, 3);
  for (double a : {-2.5, 0.3, 4.0}) {
    for (double beta : {0.0, 1.0, 2.0, 3.5}) {
      EXPECT_NEAR(seminorm(s.scaled(a), beta), std::abs(a) * seminorm(s, beta), 1e-15 * seminorm(s, beta) * 4);
    }
  }
}

GTEST_TEST(ClDeviationTest, Examples) {
  FlowParams fp(1, 2.0, 4);
  for (int l : {0, 1, 3}) EXPECT_EQ(cl_deviation_bound(SpectralState::constant(fp, 2.0), l), 0.0);
  SpectralState s(fp);
  s.set_mode(1, 0.5);
  EXPECT_DOUBLE_EQ(cl_deviation_bound(s, 0), 1.0);
  EXPECT_NEAR(cl_deviation_sampled(s, 0, 64), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(cl_deviation_bound(s, 1), 2.0);
  EXPECT_NEAR(cl_deviation_sampled(s, 1, 64), 2.0, 1e-13);
}

GTEST_TEST(ClDeviationTest, BoundDominatesSampledNorm) {
  for (int seed = 0; seed < 20; ++seed) {
    FlowParams fp(1 + seed % 3, 2.0, 3 + seed % 6);
    const auto s = testing::random_state(fp, 5.0, static_cast<unsigned>(seed));
    for (int l = 0; l <= 3; ++l) {
      EXPECT_LE(cl_deviation_sampled(s, l, 256), cl_deviation_bound(s, l) + 1e-10);
    }
  }
}

GTEST_TEST(SynthesizeDerivativeTest, MatchesDirectDerivative) {
  FlowParams fp(1, 2.0, 5);
  const auto s = testing::random_state(fp, 10.0, 9);
  const auto d1 = synthesize_derivative(s, 1, 32);
  const auto d2 = synthesize_derivative(s, 2, 32);
  for (int j = 0; j < 32; ++j) {
    const auto v = testing::jet(s, d1.theta(j));
    EXPECT_NEAR(d1.values[j], v.dk, 1e-13);
    EXPECT_NEAR(d2.values[j], v.ddk, 1e-12);
  }
}

}  // namespace
}  // namespace pcsf
