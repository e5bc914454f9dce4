#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace pcsf {

using Complex = std::complex<double>;

/// Exact ratio n/m used when lambda describes a perturbed m-fold circle.
struct Rational {
  int num = 1;  // n
  int den = 1;  // m
};

/// The triple (p, lambda, truncation) that every computation is keyed on.
///
/// Construction enforces p >= 1, n_max >= 1 and the strict threshold
/// lambda > sqrt((p+2)/p). A rational tag, when present, is stored in lowest
/// terms and lambda is set to num/den.
class FlowParams {
 public:
  FlowParams(int p, double lambda, int n_max);

  /// lambda = n/m with n, m coprime positive integers.
  static FlowParams rational(int p, int n, int m, int n_max);

  int p() const { return p_; }
  double lambda() const { return lambda_; }
  int n_max() const { return n_max_; }
  const std::optional<Rational>& ratio() const { return ratio_; }

  /// sqrt((p+2)/p), the lower bound on lambda.
  static double lambda_threshold(int p);

  FlowParams with_n_max(int n_max) const;

  friend bool operator==(const FlowParams& a, const FlowParams& b);

 private:
  FlowParams() = default;
  int p_ = 1;
  double lambda_ = 2.0;
  int n_max_ = 1;
  std::optional<Rational> ratio_;
};

/// Half-spectrum k(n), 0 <= n <= n_max, of a real 2pi/lambda-periodic
/// function. Negative modes are implied by k(-n) = conj(k(n)); the stored
/// k(0) always has exactly zero imaginary part.
///
/// The same type carries time derivatives of a state (see flow_rhs.hpp).
class SpectralState {
 public:
  /// Zero state at time t.
  explicit SpectralState(const FlowParams& params, double t = 0.0);
  SpectralState(const FlowParams& params, std::vector<Complex> coeffs, double t = 0.0);

  /// Constant function a.
  static SpectralState constant(const FlowParams& params, double a, double t = 0.0);

  const FlowParams& params() const { return params_; }
  int n_max() const { return params_.n_max(); }
  double t() const { return t_; }
  void set_t(double t) { t_ = t; }

  /// k(0), the mean over one period.
  double mean() const { return coeffs_[0].real(); }

  /// Mode n for any |n| <= n_max, using conjugate symmetry for n < 0.
  Complex mode(int n) const;
  void set_mode(int n, Complex value);

  std::span<const Complex> coeffs() const { return coeffs_; }

  /// Same function multiplied by a real factor.
  SpectralState scaled(double a) const;

  /// max over stored modes of |k(n)|.
  double max_abs() const;

 private:
  FlowParams params_;
  double t_ = 0.0;
  std::vector<Complex> coeffs_;
};

/// Uniform samples of a real function on [0, 2pi/lambda).
struct GridField {
  FlowParams params;
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  /// Sample abscissa theta_j = j * (2pi/lambda) / M.
  double theta(int j) const;
};

/// Smallest 2^a 3^b 5^c integer >= n.
int smooth_size_at_least(int n);

/// Default grid: 4 * n_max rounded up to a smooth size.
int default_grid_size(int n_max);

/// values[j] = sum_{|n| <= n_max} k(n) e^{i lambda n theta_j}.
/// Throws TruncationError if grid_points < 2 n_max + 1.
GridField synthesize(const SpectralState& state, int grid_points);

/// Coefficients of the trigonometric interpolant truncated to |n| <= n_max.
/// Throws TruncationError for undersized grids, InputError on non-finite samples.
SpectralState analyze_grid(const GridField& field, double t = 0.0);

/// sup_{1 <= n <= n_max} n^beta max(|Re k(n)|, |Im k(n)|).
double seminorm(const SpectralState& state, double beta);

/// 2 sum_{n >= 1} (lambda n)^l |k(n)|, an upper bound for the C^l norm of
/// k - k(0) (lambda n > 1 for every retained mode).
double cl_deviation_bound(const SpectralState& state, int l);

/// Grid-sampled C^l norm of k - k(0): max over j <= l of max_theta |d^j/dtheta^j|.
double cl_deviation_sampled(const SpectralState& state, int l, int grid_points);

/// Sample of the j-th theta derivative of the state (mode 0 optionally removed).
GridField synthesize_derivative(const SpectralState& state, int order, int grid_points,
                                bool drop_mean = false);

/// Evaluate the series at an arbitrary angle.
double evaluate(const SpectralState& state, double theta);

}  // namespace pcsf
