#include "pcsf/geometry.hpp"

#include <math.h>

#include <algorithm>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pcsf/errors.hpp"

namespace pcsf {

namespace {

constexpr double kPi = std::numbers::pi;

struct Radius {
  double r, dr, ddr;
};

Radius radius_at(const PerturbationSpec& spec, double theta) {
  const double lambda = spec.lambda();
  Radius out{1.0, 0.0, 0.0};
  for (const auto& h : spec.harmonics) {
    const double w = h.j * lambda;
    const double arg = w * theta + h.phase;
    out.r += spec.delta * h.amplitude * std::cos(arg);
    out.dr -= spec.delta * h.amplitude * w * std::sin(arg);
    out.ddr -= spec.delta * h.amplitude * w * w * std::cos(arg);
  }
  return out;
}

double polar_curvature(const Radius& q) {
  const double s = q.r * q.r + q.dr * q.dr;
  return (s + q.dr * q.dr - q.r * q.ddr) / (s * std::sqrt(s));
}

double normal_angle(double theta, const Radius& q) { return theta - std::atan(q.dr / q.r); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void PerturbationSpec::validate() const {
  if (m < 1 || n < 1) throw DomainError("m and n must be positive");
  if (std::gcd(m, n) != 1) throw DomainError("m and n must be coprime");
  for (const auto& h : harmonics) {
    if (h.j < 1) throw DomainError("harmonic index must be positive");
  }
}

SpectralState mfold_curvature(const FlowParams& params) {
  return SpectralState::constant(params, 1.0);
}

SpectralState radial_perturbation_curvature(const PerturbationSpec& spec,
                                            const FlowParams& params, int samples) {
  spec.validate();
  const auto& ratio = params.ratio();
  if (!ratio || ratio->num != spec.n || ratio->den != spec.m) {
    throw DomainError("flow parameters do not carry lambda = n/m of the perturbation");
  }
  if (samples < 2 * params.n_max() + 1) throw TruncationError("too few curvature samples");
  if (spec.delta == 0.0) return mfold_curvature(params);

  const double period = 2.0 * kPi / spec.lambda();
  // Fine parameter grid over three periods so every target angle in [0, period)
  // is bracketed.
  const int fine = 8 * samples;
  std::vector<double> nus, thetas;
  nus.reserve(3 * fine + 1);
  thetas.reserve(3 * fine + 1);
  for (int i = -fine; i <= 2 * fine; ++i) {
    const double theta = period * i / fine;
    const auto q = radius_at(spec, theta);
    if (!(q.r > 0.0) || !(polar_curvature(q) > 0.0)) {
      throw DomainError("delta too large: curve not convex near theta = " + fmt(theta));
    }
    thetas.push_back(theta);
    nus.push_back(normal_angle(theta, q));
  }
  boost::math::interpolators::pchip<std::vector<double>> inverse(std::move(nus),
                                                                 std::move(thetas));

  std::vector<double> values(static_cast<size_t>(samples));
  for (int j = 0; j < samples; ++j) {
    const double target = period * j / samples;
    double theta = inverse(target);
    for (int it = 0; it < 20; ++it) {
      const auto q = radius_at(spec, theta);
      const double f = normal_angle(theta, q) - target;
      const double df = polar_curvature(q) * std::sqrt(q.r * q.r + q.dr * q.dr);
      const double step = f / df;
      theta -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(theta))) break;
    }
    values[static_cast<size_t>(j)] = polar_curvature(radius_at(spec, theta));
  }
  return analyze_grid(GridField{params, std::move(values)});
}

double CurvePolyline::diameter() const {
  double r = 0.0;
  for (const auto& p : points) r = std::max(r, std::hypot(p[0], p[1]));
  return 2.0 * r;
}

CurvePolyline reconstruct_curve(const SpectralState& k, int m, int samples) {
  if (m < 1) throw DomainError("winding must be positive");
  if (samples == 0) samples = 1024 * m;
  if (samples < 64) throw DomainError("reconstruction needs at least 64 samples");
  const double total = 2.0 * kPi * m;
  const double h = total / samples;

  std::vector<double> fx(static_cast<size_t>(samples) + 1), fy(fx.size());
  CurvePolyline poly;
  poly.winding = m;
  poly.nu.resize(fx.size());
  for (int j = 0; j <= samples; ++j) {
    const double nu = total * j / samples;
    const double kv = evaluate(k, nu);
    if (!(kv > 0.0)) throw DomainError("curvature not positive at nu = " + fmt(nu));
    poly.nu[static_cast<size_t>(j)] = nu;
    fx[static_cast<size_t>(j)] = -std::sin(nu) / kv;
    fy[static_cast<size_t>(j)] = std::cos(nu) / kv;
  }
  poly.points.resize(fx.size());
  double x = 0.0, y = 0.0;
  poly.points[0] = {0.0, 0.0};
  for (size_t j = 1; j < fx.size(); ++j) {
    x += 0.5 * h * (fx[j - 1] + fx[j]);
    y += 0.5 * h * (fy[j - 1] + fy[j]);
    poly.points[j] = {x, y};
  }
  poly.closure_residual = std::hypot(x, y);

  double cx = 0.0, cy = 0.0;
  for (int j = 0; j < samples; ++j) {
    cx += poly.points[static_cast<size_t>(j)][0];
    cy += poly.points[static_cast<size_t>(j)][1];
  }
  cx /= samples;
  cy /= samples;
  for (auto& p : poly.points) {
    p[0] -= cx;
    p[1] -= cy;
  }
  return poly;
}

double hausdorff_to_circle(const CurvePolyline& poly) {
  const size_t n = poly.points.size() > 1 ? poly.points.size() - 1 : poly.points.size();
  if (n == 0) throw DomainError("empty polyline");
  double mean_r = 0.0;
  for (size_t j = 0; j < n; ++j) mean_r += std::hypot(poly.points[j][0], poly.points[j][1]);
  mean_r /= static_cast<double>(n);
  if (!(mean_r > 0.0)) throw DomainError("degenerate polyline");
  double worst = 0.0;
  for (size_t j = 0; j < n; ++j) {
    worst = std::max(worst, std::abs(std::hypot(poly.points[j][0], poly.points[j][1]) - mean_r));
  }
  return worst / mean_r;
}

std::string render_svg(const std::vector<RenderFrame>& frames) {
  if (frames.empty()) throw DomainError("nothing to render");
  double extent = 0.0;
  for (const auto& f : frames) {
    for (const auto& p : f.curve.points) extent = std::max({extent, std::abs(p[0]), std::abs(p[1])});
  }
  if (!(extent > 0.0)) extent = 1.0;
  extent *= 1.1;
  const double stroke = extent / 250.0;
  const double font = extent / 14.0;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"640\" "
      << "viewBox=\"" << fmt(-extent) << ' ' << fmt(-extent) << ' ' << fmt(2 * extent) << ' '
      << fmt(2 * extent) << "\">\n"
      << "<rect x=\"" << fmt(-extent) << "\" y=\"" << fmt(-extent) << "\" width=\""
      << fmt(2 * extent) << "\" height=\"" << fmt(2 * extent) << "\" fill=\"white\"/>\n"
      << "<g transform=\"scale(1,-1)\" fill=\"none\" stroke=\"black\" stroke-width=\""
      << fmt(stroke) << "\">\n";
  const size_t count = frames.size();
  for (size_t i = 0; i < count; ++i) {
    const double opacity = 0.2 + 0.8 * static_cast<double>(i + 1) / static_cast<double>(count);
    const auto& pts = frames[i].curve.points;
    const size_t n = pts.size() > 1 ? pts.size() - 1 : pts.size();
    svg << "<path stroke-opacity=\"" << fmt(opacity) << "\" d=\"";
    for (size_t j = 0; j < n; ++j) {
      svg << (j == 0 ? "M" : " L") << fmt(pts[j][0]) << ' ' << fmt(pts[j][1]);
    }
    svg << " Z\"/>\n";
  }
  svg << "</g>\n<g font-family=\"monospace\" font-size=\"" << fmt(font) << "\">\n";
  for (size_t i = 0; i < count; ++i) {
    const double y = -extent + font * (1.2 + static_cast<double>(i));
    svg << "<text x=\"" << fmt(-extent + font * 0.5) << "\" y=\"" << fmt(y) << "\">"
        << frames[i].label << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::string render_csv(const CurvePolyline& poly) {
  std::ostringstream csv;
  csv << "nu,x,y\n";
  for (size_t j = 0; j < poly.points.size(); ++j) {
    csv << fmt(poly.nu[j]) << ',' << fmt(poly.points[j][0]) << ',' << fmt(poly.points[j][1])
        << '\n';
  }
  return csv.str();
}

}  // namespace pcsf
