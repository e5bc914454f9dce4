#pragma once

#include <span>

#include "pcsf/spectral.hpp"

namespace pcsf::detail {

/// out[j] = sum_{n=-N..N} half[|n|]^(*) e^{2 pi i n j / M}, M = out.size(),
/// N = half.size() - 1. Requires M >= 2N + 1.
void fourier_to_grid(std::span<const Complex> half, std::span<double> out);

/// half[n] = (1/M) sum_j values[j] e^{-2 pi i n j / M} for 0 <= n < half.size().
void grid_to_fourier(std::span<const double> values, std::span<Complex> half);

}  // namespace pcsf::detail
