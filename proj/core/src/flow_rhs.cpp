#include "pcsf/flow_rhs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "pcsf/errors.hpp"

namespace pcsf {

double h_kernel(int p, double lambda, long q1, long q2) {
  const double l2 = lambda * lambda;
  const double a = static_cast<double>(q1);
  const double b = static_cast<double>(q2);
  return 1.0 / p - (p - 1) * l2 * a * b - l2 * a * a;
}

int dealias_grid_size(int p, int n_max) {
  return smooth_size_at_least((p + 3) * n_max + 1);
}

double linear_coefficient(const FlowParams& params, int n, double k0) {
  const int p = params.p();
  const double l2 = params.lambda() * params.lambda();
  return ((p + 2.0) / p - l2 * n * n) * std::pow(k0, p + 1);
}

namespace {

// Two-sided copy: full[q + N] = k(q) for |q| <= N.
std::vector<Complex> two_sided(const SpectralState& s) {
  const int N = s.n_max();
  std::vector<Complex> full(static_cast<size_t>(2 * N + 1));
  for (int q = -N; q <= N; ++q) full[static_cast<size_t>(q + N)] = s.mode(q);
  return full;
}

SpectralRate tuple_sum(const SpectralState& state, const TupleKernel& kernel) {
  const int N = state.n_max();
  const int p = state.params().p();
  const double lambda = state.params().lambda();
  const int free_slots = p + 1;  // q_{p+2} is fixed by the sum constraint
  const auto full = two_sided(state);
  auto k = [&](long q) { return full[static_cast<size_t>(q + N)]; };

  std::vector<Complex> out(static_cast<size_t>(N + 1));
  std::vector<long> q(static_cast<size_t>(free_slots), -N);
  for (int n = 0; n <= N; ++n) {
    Complex acc{};
    std::fill(q.begin(), q.end(), -N);
    while (true) {
      long partial = 0;
      for (long v : q) partial += v;
      const long last = n - partial;
      if (last >= -N && last <= N) {
        Complex prod = k(last);
        for (long v : q) prod *= k(v);
        acc += kernel(p, lambda, q[0], q[1]) * prod;
      }
      // odometer
      int slot = free_slots - 1;
      while (slot >= 0 && q[static_cast<size_t>(slot)] == N) {
        q[static_cast<size_t>(slot)] = -N;
        --slot;
      }
      if (slot < 0) break;
      ++q[static_cast<size_t>(slot)];
    }
    out[static_cast<size_t>(n)] = acc;
  }
  return SpectralRate(state.params(), std::move(out), state.t());
}

}  // namespace

SpectralRate rhs_direct(const SpectralState& state) {
  return rhs_direct(state, h_kernel);
}

SpectralRate rhs_direct(const SpectralState& state, const TupleKernel& kernel) {
  if (state.n_max() > kDirectMaxModes || state.params().p() > kDirectMaxExponent) {
    std::ostringstream msg;
    msg << "brute-force tuple sum limited to n_max <= " << kDirectMaxModes << " and p <= "
        << kDirectMaxExponent << " (got n_max = " << state.n_max()
        << ", p = " << state.params().p() << "); use rhs_fast";
    throw OversizeError(msg.str());
  }
  return tuple_sum(state, kernel);
}

SpectralRate rhs_direct_unguarded(const SpectralState& state) {
  return tuple_sum(state, h_kernel);
}

namespace {

struct PaddedFields {
  std::vector<double> k, dk, d2k;
};

PaddedFields padded_fields(const SpectralState& state, int m) {
  const int N = state.n_max();
  const double lambda = state.params().lambda();
  const auto c = state.coeffs();
  std::vector<Complex> d1(c.begin(), c.end()), d2(c.begin(), c.end());
  for (int n = 0; n <= N; ++n) {
    const double w = lambda * n;
    d1[static_cast<size_t>(n)] *= Complex(0.0, w);
    d2[static_cast<size_t>(n)] *= -w * w;
  }
  PaddedFields f{std::vector<double>(static_cast<size_t>(m)),
                 std::vector<double>(static_cast<size_t>(m)),
                 std::vector<double>(static_cast<size_t>(m))};
  detail::fourier_to_grid(c, f.k);
  detail::fourier_to_grid(d1, f.dk);
  detail::fourier_to_grid(d2, f.d2k);
  return f;
}

SpectralRate back_to_band(const SpectralState& state, const std::vector<double>& values) {
  std::vector<Complex> out(static_cast<size_t>(state.n_max() + 1));
  detail::grid_to_fourier(values, out);
  return SpectralRate(state.params(), std::move(out), state.t());
}

}  // namespace

SpectralRate rhs_fast(const SpectralState& state) {
  const int p = state.params().p();
  const int m = dealias_grid_size(p, state.n_max());
  auto f = padded_fields(state, m);
  std::vector<double> rhs(static_cast<size_t>(m));
  for (size_t j = 0; j < rhs.size(); ++j) {
    const double k = f.k[j];
    const double kp = std::pow(k, p);
    rhs[j] = kp * (k * f.d2k[j] + (p - 1) * f.dk[j] * f.dk[j]) + kp * k * k / p;
  }
  return back_to_band(state, rhs);
}

namespace {

// Two-sided sequence with modes -band..band.
struct Banded {
  int band = 0;
  std::vector<Complex> v;
  Complex at(int n) const {
    return std::abs(n) > band ? Complex{} : v[static_cast<size_t>(n + band)];
  }
};

Banded convolve(const Banded& a, const Banded& b, int keep) {
  const int band = std::min(a.band + b.band, keep);
  Banded out{band, std::vector<Complex>(static_cast<size_t>(2 * band + 1))};
  for (int n = -band; n <= band; ++n) {
    const int lo = std::max(-a.band, n - b.band);
    const int hi = std::min(a.band, n + b.band);
    Complex acc{};
    for (int q = lo; q <= hi; ++q) acc += a.v[static_cast<size_t>(q + a.band)] * b.at(n - q);
    out.v[static_cast<size_t>(n + band)] = acc;
  }
  return out;
}

}  // namespace

SpectralRate rhs_convolution(const SpectralState& state) {
  const int N = state.n_max();
  const int p = state.params().p();
  const double lambda = state.params().lambda();
  Banded k{N, two_sided(state)};
  Banded dk = k, d2k = k;
  for (int n = -N; n <= N; ++n) {
    const double w = lambda * n;
    dk.v[static_cast<size_t>(n + N)] *= Complex(0.0, w);
    d2k.v[static_cast<size_t>(n + N)] *= -w * w;
  }
  // k^p, keeping only what can still reach |n| <= N after the final product.
  Banded kp = k;
  for (int j = 1; j < p; ++j) kp = convolve(kp, k, 3 * N);
  // Q = k k'' + (p-1) k'^2 + k^2 / p, band 2N.
  const Banded kk2 = convolve(k, d2k, 2 * N);
  const Banded k1k1 = convolve(dk, dk, 2 * N);
  const Banded kk = convolve(k, k, 2 * N);
  Banded q{2 * N, std::vector<Complex>(static_cast<size_t>(4 * N + 1))};
  for (size_t i = 0; i < q.v.size(); ++i) {
    q.v[i] = kk2.v[i] + static_cast<double>(p - 1) * k1k1.v[i] + kk.v[i] / static_cast<double>(p);
  }
  const Banded out = convolve(kp, q, N);
  std::vector<Complex> half(static_cast<size_t>(N + 1));
  for (int n = 0; n <= N; ++n) half[static_cast<size_t>(n)] = out.at(n);
  return SpectralRate(state.params(), std::move(half), state.t());
}

Complex single_tuple_sum(const SpectralState& state, int n) {
  const int p = state.params().p();
  const double lambda = state.params().lambda();
  const Complex k0 = state.mode(0);
  if (n == 0) return h_kernel(p, lambda, 0, 0) * std::pow(k0, p + 2);
  Complex acc{};
  for (int pos = 0; pos < p + 2; ++pos) {
    const long q1 = pos == 0 ? n : 0;
    const long q2 = pos == 1 ? n : 0;
    acc += h_kernel(p, lambda, q1, q2) * state.mode(n) * std::pow(k0, p + 1);
  }
  return acc;
}

Complex RhsSplit::linear_part(int n) const {
  if (n == 0) return zero_mode_linear;
  return linear_coeff[static_cast<size_t>(n)] * state_coeffs[static_cast<size_t>(n)];
}

SpectralRate RhsSplit::reassemble() const {
  std::vector<Complex> out(nonlinear.size());
  for (size_t n = 0; n < out.size(); ++n) {
    out[n] = linear_part(static_cast<int>(n)) + nonlinear[n];
  }
  return SpectralRate(params, std::move(out));
}

RhsSplit rhs_split(const SpectralState& state) {
  const int N = state.n_max();
  const int p = state.params().p();
  const double k0 = state.mean();
  RhsSplit split{state.params(),
                 std::vector<double>(static_cast<size_t>(N + 1), 0.0),
                 std::pow(k0, p + 2) / p,
                 std::vector<Complex>(static_cast<size_t>(N + 1)),
                 std::vector<Complex>(state.coeffs().begin(), state.coeffs().end())};
  for (int n = 1; n <= N; ++n) {
    split.linear_coeff[static_cast<size_t>(n)] = linear_coefficient(state.params(), n, k0);
  }
  const auto full = rhs_fast(state);
  for (int n = 0; n <= N; ++n) {
    split.nonlinear[static_cast<size_t>(n)] = full.coeffs()[static_cast<size_t>(n)] -
                                              split.linear_part(n);
  }
  split.nonlinear[0] = Complex(split.nonlinear[0].real(), 0.0);
  return split;
}

SpectralRate normalized_rhs(const SpectralState& state) {
  const int p = state.params().p();
  const int m = dealias_grid_size(p, state.n_max());
  auto f = padded_fields(state, m);
  std::vector<double> rhs(static_cast<size_t>(m));
  for (size_t j = 0; j < rhs.size(); ++j) {
    const double u = f.k[j];
    if (!(u > 0.0)) {
      std::ostringstream msg;
      msg << "normalized curvature lost positivity (u = " << u << " at grid index " << j << ")";
      throw DomainError(msg.str());
    }
    const double up = std::pow(u, p);
    rhs[j] = p * up * (u * f.d2k[j] + (p - 1) * f.dk[j] * f.dk[j]) + up * u * u - u;
  }
  return back_to_band(state, rhs);
}

}  // namespace pcsf
