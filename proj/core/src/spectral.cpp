#include "pcsf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fft.hpp"
#include "pcsf/errors.hpp"

namespace pcsf {

// ---------------------------------------------------------------- FlowParams

double FlowParams::lambda_threshold(int p) {
  return std::sqrt((p + 2.0) / p);
}

FlowParams::FlowParams(int p, double lambda, int n_max) : p_(p), lambda_(lambda), n_max_(n_max) {
  if (p < 1) throw DomainError("p must be a positive integer, got " + std::to_string(p));
  if (n_max < 1) throw DomainError("n_max must be >= 1, got " + std::to_string(n_max));
  if (!std::isfinite(lambda) || !(lambda > lambda_threshold(p))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "lambda = " << lambda << " must exceed sqrt((p+2)/p) = " << lambda_threshold(p)
        << " for p = " << p;
    throw DomainError(msg.str());
  }
}

FlowParams FlowParams::rational(int p, int n, int m, int n_max) {
  if (n < 1 || m < 1) throw DomainError("rational lambda needs positive n and m");
  if (std::gcd(n, m) != 1) {
    throw DomainError("rational lambda " + std::to_string(n) + "/" + std::to_string(m) +
                      " is not in lowest terms");
  }
  FlowParams params(p, static_cast<double>(n) / m, n_max);
  params.ratio_ = Rational{n, m};
  return params;
}

FlowParams FlowParams::with_n_max(int n_max) const {
  FlowParams copy = *this;
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  copy.n_max_ = n_max;
  return copy;
}

bool operator==(const FlowParams& a, const FlowParams& b) {
  const bool same_ratio = a.ratio_.has_value() == b.ratio_.has_value() &&
                          (!a.ratio_ || (a.ratio_->num == b.ratio_->num &&
                                         a.ratio_->den == b.ratio_->den));
  return a.p_ == b.p_ && a.lambda_ == b.lambda_ && a.n_max_ == b.n_max_ && same_ratio;
}

// ------------------------------------------------------------- SpectralState

SpectralState::SpectralState(const FlowParams& params, double t)
    : params_(params), t_(t), coeffs_(static_cast<size_t>(params.n_max() + 1), Complex{}) {}

SpectralState::SpectralState(const FlowParams& params, std::vector<Complex> coeffs, double t)
    : params_(params), t_(t), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != static_cast<size_t>(params_.n_max() + 1)) {
    throw InputError("state needs n_max + 1 = " + std::to_string(params_.n_max() + 1) +
                     " coefficients, got " + std::to_string(coeffs_.size()));
  }
  coeffs_[0] = Complex(coeffs_[0].real(), 0.0);
}

SpectralState SpectralState::constant(const FlowParams& params, double a, double t) {
  SpectralState s(params, t);
  s.coeffs_[0] = a;
  return s;
}

Complex SpectralState::mode(int n) const {
  const int a = std::abs(n);
  if (a > n_max()) return Complex{};
  return n >= 0 ? coeffs_[static_cast<size_t>(a)] : std::conj(coeffs_[static_cast<size_t>(a)]);
}

void SpectralState::set_mode(int n, Complex value) {
  const int a = std::abs(n);
  if (a > n_max()) throw InputError("mode " + std::to_string(n) + " outside the retained band");
  Complex v = n >= 0 ? value : std::conj(value);
  if (a == 0) v = Complex(v.real(), 0.0);
  coeffs_[static_cast<size_t>(a)] = v;
}

SpectralState SpectralState::scaled(double a) const {
  SpectralState s = *this;
  for (auto& c : s.coeffs_) c *= a;
  return s;
}

double SpectralState::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

// ------------------------------------------------------------------- grids

double GridField::theta(int j) const {
  return j * (2.0 * std::numbers::pi / params.lambda()) / size();
}

int smooth_size_at_least(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int f : {2, 3, 5}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

int default_grid_size(int n_max) {
  return smooth_size_at_least(4 * n_max);
}

namespace {

void require_grid(int grid_points, int n_max) {
  if (grid_points < 2 * n_max + 1) {
    throw TruncationError("grid of " + std::to_string(grid_points) +
                          " points cannot hold modes |n| <= " + std::to_string(n_max) +
                          " (need at least " + std::to_string(2 * n_max + 1) + ")");
  }
}

}  // namespace

GridField synthesize(const SpectralState& state, int grid_points) {
  require_grid(grid_points, state.n_max());
  GridField field{state.params(), std::vector<double>(static_cast<size_t>(grid_points))};
  detail::fourier_to_grid(state.coeffs(), field.values);
  return field;
}

GridField synthesize_derivative(const SpectralState& state, int order, int grid_points,
                                bool drop_mean) {
  require_grid(grid_points, state.n_max());
  std::vector<Complex> d(state.coeffs().begin(), state.coeffs().end());
  const Complex i_lambda(0.0, state.params().lambda());
  for (int n = 0; n <= state.n_max(); ++n) {
    d[static_cast<size_t>(n)] *= std::pow(i_lambda * static_cast<double>(n), order);
  }
  if (drop_mean || order > 0) d[0] = Complex{};
  GridField field{state.params(), std::vector<double>(static_cast<size_t>(grid_points))};
  detail::fourier_to_grid(d, field.values);
  return field;
}

SpectralState analyze_grid(const GridField& field, double t) {
  require_grid(field.size(), field.params.n_max());
  for (int j = 0; j < field.size(); ++j) {
    if (!std::isfinite(field.values[static_cast<size_t>(j)])) {
      throw InputError("non-finite grid sample at index " + std::to_string(j));
    }
  }
  std::vector<Complex> coeffs(static_cast<size_t>(field.params.n_max() + 1));
  detail::grid_to_fourier(field.values, coeffs);
  return SpectralState(field.params, std::move(coeffs), t);
}

double seminorm(const SpectralState& state, double beta) {
  double result = 0.0;
  const auto c = state.coeffs();
  for (int n = 1; n <= state.n_max(); ++n) {
    const auto& z = c[static_cast<size_t>(n)];
    const double part = std::max(std::abs(z.real()), std::abs(z.imag()));
    if (part == 0.0) continue;
    result = std::max(result, std::pow(static_cast<double>(n), beta) * part);
  }
  return result;
}

double cl_deviation_bound(const SpectralState& state, int l) {
  if (l < 0) throw DomainError("derivative order must be nonnegative");
  double sum = 0.0;
  const auto c = state.coeffs();
  for (int n = 1; n <= state.n_max(); ++n) {
    sum += std::pow(state.params().lambda() * n, l) * std::abs(c[static_cast<size_t>(n)]);
  }
  return 2.0 * sum;
}

double cl_deviation_sampled(const SpectralState& state, int l, int grid_points) {
  if (l < 0) throw DomainError("derivative order must be nonnegative");
  double result = 0.0;
  for (int j = 0; j <= l; ++j) {
    const auto field = synthesize_derivative(state, j, grid_points, true);
    for (double v : field.values) result = std::max(result, std::abs(v));
  }
  return result;
}

double evaluate(const SpectralState& state, double theta) {
  const auto c = state.coeffs();
  double sum = 0.0;
  for (int n = state.n_max(); n >= 1; --n) {
    sum += (c[static_cast<size_t>(n)] *
            std::polar(1.0, state.params().lambda() * n * theta)).real();
  }
  return c[0].real() + 2.0 * sum;
}

}  // namespace pcsf
