#pragma once

#include <functional>
#include <vector>

#include "pcsf/spectral.hpp"

namespace pcsf {

/// Time derivative of a state, stored with the same half-spectrum layout.
using SpectralRate = SpectralState;

/// Tuple weight H(p, q1, q2) = 1/p - (p-1) lambda^2 q1 q2 - lambda^2 q1^2.
double h_kernel(int p, double lambda, long q1, long q2);

/// Signature of a tuple weight; rhs_direct accepts a replacement for mutation tests.
using TupleKernel = std::function<double(int p, double lambda, long q1, long q2)>;

/// Largest truncation and exponent the brute-force tuple sum accepts.
inline constexpr int kDirectMaxModes = 12;
inline constexpr int kDirectMaxExponent = 3;

/// Brute-force Galerkin right-hand side: for each retained n, the sum over all
/// (q1..q_{p+2}) with |q_i| <= n_max and sum q_i = n of H(p,q1,q2) prod k(q_i).
/// Throws OversizeError beyond kDirectMaxModes / kDirectMaxExponent.
SpectralRate rhs_direct(const SpectralState& state);
SpectralRate rhs_direct(const SpectralState& state, const TupleKernel& kernel);

/// Same tuple sum with the guard lifted; only for benchmarking the cost law.
SpectralRate rhs_direct_unguarded(const SpectralState& state);

/// Pseudospectral evaluation of k^{p+1} k'' + (p-1) k^p k'^2 + k^{p+2}/p on a
/// grid of at least (p+3) n_max + 1 points, truncated to the retained band.
/// No aliasing reaches |n| <= n_max, so this equals rhs_direct up to round-off.
SpectralRate rhs_fast(const SpectralState& state);

/// The same Galerkin sum organised as direct (non-FFT) discrete convolutions,
/// O(p^2 n_max^2) work. Used as the direct kernel in performance comparisons.
SpectralRate rhs_convolution(const SpectralState& state);

/// Padded grid used by the pseudospectral evaluators.
int dealias_grid_size(int p, int n_max);

/// ((p+2)/p - lambda^2 n^2) k(0)^{p+1} for n != 0.
double linear_coefficient(const FlowParams& params, int n, double k0);

/// Sum over tuples with exactly one nonzero entry (all-zero tuple for n = 0),
/// enumerated position by position.
Complex single_tuple_sum(const SpectralState& state, int n);

/// Linear (diagonal) and interaction parts of the right-hand side.
struct RhsSplit {
  FlowParams params;
  /// Index n in 1..n_max; entry 0 unused.
  std::vector<double> linear_coeff;
  /// (1/p) k(0)^{p+2}.
  double zero_mode_linear = 0.0;
  /// Sum over tuples with at least two nonzero entries, n = 0..n_max.
  std::vector<Complex> nonlinear;
  /// Copy of the state coefficients the split was computed from.
  std::vector<Complex> state_coeffs;

  Complex linear_part(int n) const;
  SpectralRate reassemble() const;
};

RhsSplit rhs_split(const SpectralState& state);

/// Right-hand side of the normalized flow
///   u_tau = p u^{p+1} u'' + p(p-1) u^p u'^2 + u^{p+2} - u,
/// evaluated with the same dealiasing padding. Throws DomainError if u is not
/// strictly positive on the padded grid.
SpectralRate normalized_rhs(const SpectralState& state);

}  // namespace pcsf
