#include "pcsf/geometry.hpp"

#include <cmath>
#include <numbers>
#include <regex>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pcsf/blowup.hpp"
#include "pcsf/errors.hpp"
#include "pcsf/normalization.hpp"

namespace pcsf {
namespace {

constexpr double kPi = std::numbers::pi;

// Discrete curvature of the polar curve r = 1 + delta cos(lambda theta) at
// polygon vertex i: turning angle over the mean of the adjacent edge lengths.
// Returns (normal angle, curvature) pairs over one period of nu.
std::vector<std::pair<double, double>> polygon_curvature(double lambda, double delta, int m,
                                                         int samples) {
  const double span = 2.0 * kPi * m;
  const auto point = [&](double th) {
    const double r = 1.0 + delta * std::cos(lambda * th);
    return std::array<double, 2>{r * std::cos(th), r * std::sin(th)};
  };
  std::vector<std::pair<double, double>> out;
  const double h = span / samples;
  double unwrap = 0.0, prev_nu = 0.0;
  for (int i = 0; i < samples; ++i) {
    const auto a = point((i - 1) * h), b = point(i * h), c = point((i + 1) * h);
    const double ux = b[0] - a[0], uy = b[1] - a[1], vx = c[0] - b[0], vy = c[1] - b[1];
    const double la = std::hypot(ux, uy), lb = std::hypot(vx, vy);
    const double turn = std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
    // Outward normal is the tangent rotated by -pi/2: angle of the tangent minus pi/2.
    double nu = std::atan2(c[1] - a[1], c[0] - a[0]) - kPi / 2.0;
    while (nu + unwrap < prev_nu - kPi) unwrap += 2.0 * kPi;
    nu += unwrap;
    prev_nu = nu;
    out.emplace_back(nu, turn / (0.5 * (la + lb)));
  }
  return out;
}

GTEST_TEST(MfoldTest, UnitCurvature) {
  const auto s = mfold_curvature(FlowParams::rational(1, 7, 2, 8));
  EXPECT_EQ(s.mean(), 1.0);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(s.mode(n), Complex(0.0));
}

GTEST_TEST(PerturbationTest, ZeroDeltaIsExactCircle) {
  const auto fp = FlowParams::rational(1, 7, 2, 8);
  const auto s = radial_perturbation_curvature({2, 7, 0.0}, fp);
  EXPECT_EQ(s.mean(), 1.0);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(s.mode(n), Complex(0.0));
}

GTEST_TEST(PerturbationTest, MatchesPolygonCurvature) {
  const double delta = 0.01;
  const auto fp = FlowParams::rational(1, 5, 2, 24);
  const auto s = radial_perturbation_curvature({2, 5, delta}, fp, 2048);
  const auto poly = polygon_curvature(2.5, delta, 2, 100000);
  double err = 0.0;
  for (size_t i = 0; i < poly.size(); i += 997) {
    err = std::max(err, std::abs(evaluate(s, poly[i].first) - poly[i].second));
  }
  EXPECT_LE(err, 1e-6);
}

GTEST_TEST(PerturbationTest, LeadingOrderCoefficient) {
  // kappa = 1 + delta (lambda^2 - 1) cos(lambda nu) + O(delta^2).
  for (auto [m, n] : {std::pair{1, 2}, std::pair{2, 5}, std::pair{2, 7}, std::pair{3, 7}}) {
    const double lambda = static_cast<double>(n) / m, delta = 1e-4;
    const auto s = radial_perturbation_curvature({m, n, delta}, FlowParams::rational(1, n, m, 8));
    EXPECT_NEAR(s.mode(1).real(), delta * (lambda * lambda - 1.0) / 2.0, 10 * delta * delta);
    EXPECT_NEAR(s.mode(1).imag(), 0.0, 1e-14);
  }
}

GTEST_TEST(PerturbationTest, ExampleSatisfiesHypothesis) {
  const auto fp = FlowParams::rational(1, 7, 2, 16);
  const auto s = radial_perturbation_curvature({2, 7, 0.002}, fp);
  const auto c = select_c(fp);
  EXPECT_NEAR(c.value, 64.0 * 12.25 / 9.25, 1e-12);
  EXPECT_TRUE(check_hypothesis(s, c.value).holds);
}

GTEST_TEST(PerturbationTest, NonConvexRejected) {
  const auto fp = FlowParams::rational(1, 7, 2, 16);
  try {
    radial_perturbation_curvature({2, 7, 0.2}, fp);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("delta too large"), std::string::npos);
    EXPECT_NE(what.find("theta"), std::string::npos);
  }
}

GTEST_TEST(PerturbationTest, ValidatesRatio) {
  EXPECT_THROW((PerturbationSpec{2, 4, 0.0}.validate()), DomainError);
  EXPECT_THROW(radial_perturbation_curvature({2, 7, 0.001}, FlowParams(1, 3.5, 8)), DomainError);
}

GTEST_TEST(ReconstructTest, Circles) {
  for (int m : {1, 2, 3}) {
    for (double a : {1.0, 2.0}) {
      const auto poly = reconstruct_curve(SpectralState::constant(FlowParams(1, 2.0, 4), a), m);
      EXPECT_EQ(poly.points.size(), static_cast<size_t>(1024 * m + 1));
      EXPECT_EQ(poly.winding, m);
      EXPECT_LE(poly.closure_residual, 1e-12);
      // Trapezoid points lie on a circle shrunk by ~h^2/12.
      const double h = 2.0 * kPi / 1024.0;
      EXPECT_NEAR(poly.diameter(), 2.0 / a, (2.0 / a) * h * h / 10.0);
      EXPECT_LE(hausdorff_to_circle(poly), 1e-12);
    }
  }
  EXPECT_THROW(reconstruct_curve(SpectralState::constant(FlowParams(1, 2.0, 4), 1.0), 1, 32),
               DomainError);
}

GTEST_TEST(ReconstructTest, PerturbedCurvesClose) {
  for (auto [m, n] : {std::pair{1, 3}, std::pair{2, 5}, std::pair{2, 7}, std::pair{3, 8}}) {
    const auto fp = FlowParams::rational(1, n, m, 24);
    const auto s = radial_perturbation_curvature({m, n, 0.002}, fp);
    const auto poly = reconstruct_curve(s, m);
    EXPECT_LE(poly.closure_residual, 1e-8 * poly.diameter()) << m << "/" << n;
  }
}

GTEST_TEST(ReconstructTest, ScalingEquivariance) {
  const auto fp = FlowParams::rational(1, 7, 2, 16);
  const auto s = radial_perturbation_curvature({2, 7, 0.002}, fp);
  const auto a = reconstruct_curve(s, 2), b = reconstruct_curve(s.scaled(4.0), 2);
  for (size_t i = 0; i < a.points.size(); i += 101) {
    EXPECT_NEAR(b.points[i][0], a.points[i][0] / 4.0, 1e-13);
    EXPECT_NEAR(b.points[i][1], a.points[i][1] / 4.0, 1e-13);
  }
  EXPECT_NEAR(hausdorff_to_circle(a), hausdorff_to_circle(b), 1e-13);
}

GTEST_TEST(HausdorffTest, EllipseOracle) {
  CurvePolyline poly;
  const int n = 4096;
  for (int i = 0; i <= n; ++i) {
    const double t = 2.0 * kPi * i / n;
    poly.nu.push_back(t);
    poly.points.push_back({std::cos(t), 1.1 * std::sin(t)});
  }
  double mean_r = 0.0, max_r = 0.0, min_r = 1e9;
  for (int i = 0; i < n; ++i) {
    const double r = std::hypot(poly.points[i][0], poly.points[i][1]);
    mean_r += r / n;
    max_r = std::max(max_r, r);
    min_r = std::min(min_r, r);
  }
  const double want = std::max(max_r - mean_r, mean_r - min_r) / mean_r;
  EXPECT_NEAR(hausdorff_to_circle(poly), want, 1e-12);
  EXPECT_NEAR(hausdorff_to_circle(poly), 0.0476, 0.001);
}

GTEST_TEST(HausdorffTest, DecreasesAlongNormalizedFlow) {
  const auto fp = FlowParams::rational(1, 7, 2, 16);
  const auto init = radial_perturbation_curvature({2, 7, 0.002}, fp);
  const auto traj = integrate(init);
  const auto est = estimate_T(traj);
  const auto gaps = time_to_blowup(traj, est);
  double previous = 1e300;
  for (size_t i = 0; i < traj.snapshots.size(); i += 4) {
    if (tau_of_gap(gaps[i], est.T, 1) < 1.0) continue;
    const double h = hausdorff_to_circle(reconstruct_curve(rescale_by_gap(traj.snapshots[i], gaps[i], est.T), 2));
    EXPECT_LE(h, previous + 1e-9) << i;
    previous = h;
  }
  EXPECT_LE(previous, 1e-10);
}

GTEST_TEST(RenderTest, SvgContract) {
  const auto fp = FlowParams(1, 2.0, 4);
  std::vector<RenderFrame> frames;
  for (double a : {1.0, 1.5, 2.0}) {
    frames.push_back({reconstruct_curve(SpectralState::constant(fp, a), 1, 512), "k0 = " + std::to_string(a)});
  }
  const auto svg = render_svg(frames);
  EXPECT_EQ(svg, render_svg(frames));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  const std::regex path_re("<path");
  EXPECT_EQ(std::distance(std::sregex_iterator(svg.begin(), svg.end(), path_re), std::sregex_iterator()), 3);
  const std::regex op_re("opacity=\"([0-9.]+)\"");
  std::vector<double> opacities;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), op_re); it != std::sregex_iterator(); ++it) {
    opacities.push_back(std::stod((*it)[1]));
  }
  ASSERT_EQ(opacities.size(), 3u);
  EXPECT_LT(opacities[0], opacities[1]);
  EXPECT_LT(opacities[1], opacities[2]);
  EXPECT_NE(svg.find("k0 = 1.5"), std::string::npos);
}

GTEST_TEST(RenderTest, CsvContract) {
  const auto poly = reconstruct_curve(SpectralState::constant(FlowParams(1, 2.0, 4), 1.0), 1, 256);
  const auto csv = render_csv(poly);
  EXPECT_EQ(csv.rfind("nu,x,y\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 258);
}

}  // namespace
}  // namespace pcsf
