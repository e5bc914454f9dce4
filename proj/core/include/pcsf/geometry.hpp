#pragma once

#include <array>
#include <string>
#include <vector>

#include "pcsf/spectral.hpp"

namespace pcsf {

struct Harmonic {
  int j = 1;
  double amplitude = 1.0;
  double phase = 0.0;
};

/// Radial perturbation r(theta) = 1 + delta phi(theta) of the m-fold circle,
/// phi(theta) = sum amplitude cos(j lambda theta + phase), lambda = n/m.
struct PerturbationSpec {
  int m = 1;
  int n = 2;
  double delta = 0.0;
  std::vector<Harmonic> harmonics{Harmonic{}};

  double lambda() const { return static_cast<double>(n) / m; }
  /// Throws DomainError on non-coprime or non-positive (m, n).
  void validate() const;
};

/// Curvature of the m-fold circle: k = 1 on the normal-angle domain.
SpectralState mfold_curvature(const FlowParams& params);

/// Curvature of the perturbed polar curve as a function of its normal angle,
/// sampled on `samples` points of one period and analyzed to params.n_max()
/// modes. params must carry the ratio n/m of the perturbation. Throws DomainError
/// ("delta too large") if the curve is not strictly convex.
SpectralState radial_perturbation_curvature(const PerturbationSpec& spec,
                                            const FlowParams& params, int samples = 1024);

struct CurvePolyline {
  /// Normal angle of every point; samples + 1 entries ending at 2 pi m.
  std::vector<double> nu;
  /// Points with the centroid of the first `samples` at the origin. The last
  /// point is the integrated endpoint, not a copy of the first.
  std::vector<std::array<double, 2>> points;
  double closure_residual = 0.0;
  int winding = 1;

  /// Largest distance between any point and the origin, doubled.
  double diameter() const;
};

/// Integrate ds/dnu = 1/k with tangent (-sin nu, cos nu) over [0, 2 pi m] by
/// the cumulative trapezoid rule. samples = 0 picks 1024 m. Throws DomainError
/// if k is not positive on the sampling grid.
CurvePolyline reconstruct_curve(const SpectralState& k, int m, int samples = 0);

/// max | |P| - R | / R over the (centred) points, R the mean radius.
double hausdorff_to_circle(const CurvePolyline& poly);

struct RenderFrame {
  CurvePolyline curve;
  std::string label;
};

/// SVG with one closed path per frame, opacity increasing along the list.
std::string render_svg(const std::vector<RenderFrame>& frames);

/// "nu,x,y" followed by samples + 1 rows.
std::string render_csv(const CurvePolyline& poly);

}  // namespace pcsf
