#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <vector>

namespace pcsf::detail {
namespace {

// FFTW's planner is not thread-safe; execution with new arrays is.
class PlanCache {
 public:
  struct Plans {
    fftw_plan forward = nullptr;   // r2c
    fftw_plan backward = nullptr;  // c2r
  };

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  Plans get(int m) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(m);
    if (it != plans_.end()) return it->second;
    std::vector<double> real(static_cast<size_t>(m));
    std::vector<Complex> spec(static_cast<size_t>(m / 2 + 1));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p;
    p.forward = fftw_plan_dft_r2c_1d(m, real.data(), as_fftw(spec.data()), flags);
    p.backward = fftw_plan_dft_c2r_1d(m, as_fftw(spec.data()), real.data(), flags);
    plans_.emplace(m, p);
    return p;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  ~PlanCache() {
    for (auto& [m, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  static fftw_complex* as_fftw(Complex* z) { return reinterpret_cast<fftw_complex*>(z); }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<int, Plans> plans_;
};

}  // namespace

void fourier_to_grid(std::span<const Complex> half, std::span<double> out) {
  const int m = static_cast<int>(out.size());
  std::vector<Complex> spec(static_cast<size_t>(m / 2 + 1), Complex{});
  const size_t n = std::min(half.size(), spec.size());
  std::copy_n(half.begin(), n, spec.begin());
  spec[0] = Complex(spec[0].real(), 0.0);
  const auto plans = PlanCache::instance().get(m);
  fftw_execute_dft_c2r(plans.backward, PlanCache::as_fftw(spec.data()), out.data());
}

void grid_to_fourier(std::span<const double> values, std::span<Complex> half) {
  const int m = static_cast<int>(values.size());
  std::vector<double> in(values.begin(), values.end());
  std::vector<Complex> spec(static_cast<size_t>(m / 2 + 1));
  const auto plans = PlanCache::instance().get(m);
  fftw_execute_dft_r2c(plans.forward, in.data(), PlanCache::as_fftw(spec.data()));
  const double inv = 1.0 / m;
  for (size_t n = 0; n < half.size(); ++n) {
    half[n] = n < spec.size() ? spec[n] * inv : Complex{};
  }
  if (!half.empty()) half[0] = Complex(half[0].real(), 0.0);
}

}  // namespace pcsf::detail
