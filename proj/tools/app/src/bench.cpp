#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "pcsf/blowup.hpp"
#include "pcsf/fit.hpp"
#include "pcsf/flow_rhs.hpp"
#include "pcsf_app/commands.hpp"

namespace pcsf::app {

double time_per_eval(const std::function<void()>& fn, double min_seconds) {
  using clock = std::chrono::steady_clock;
  fn();
  long reps = 1;
  for (;;) {
    const auto t0 = clock::now();
    for (long i = 0; i < reps; ++i) fn();
    const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    if (elapsed >= min_seconds) return elapsed * 1e9 / static_cast<double>(reps);
    reps *= elapsed > 0.0 ? std::max(2L, static_cast<long>(1.5 * min_seconds / elapsed)) : 10;
  }
}

ScalingSeries measure_scaling(const std::string& kind, int p, const std::vector<int>& n_values,
                              double min_seconds, std::uint64_t seed) {
  ScalingSeries series{kind, p, {}, 0.0};
  for (int n : n_values) {
    FlowParams fp(p, 2.0, n);
    const auto s = random_trapped_state(fp, select_c(fp).value, seed + static_cast<unsigned>(n));
    std::function<void()> fn;
    if (kind == "fast") {
      fn = [&] { (void)rhs_fast(s); };
    } else if (kind == "convolution") {
      fn = [&] { (void)rhs_convolution(s); };
    } else if (kind == "direct") {
      fn = [&] { (void)rhs_direct_unguarded(s); };
    } else {
      throw std::invalid_argument("unknown kernel kind " + kind);
    }
    series.points.push_back({n, time_per_eval(fn, min_seconds)});
  }
  if (series.points.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& pt : series.points) {
      x.push_back(std::log(pt.n_max));
      y.push_back(std::log(pt.ns_per_eval));
    }
    series.exponent = fit_line(x, y, false).slope;
  }
  return series;
}

int cmd_bench(const BenchOptions& options, std::ostream& out) {
  std::vector<ScalingSeries> all;
  for (int p : {1, 2, 3}) {
    all.push_back(measure_scaling("fast", p, {4, 8, 16, 32, 64, 128, 256, 512}, options.min_seconds, options.seed));
    all.push_back(measure_scaling("convolution", p, {4, 8, 16, 32, 64, 128, 256}, options.min_seconds, options.seed));
  }
  all.push_back(measure_scaling("direct", 1, {4, 8, 16, 32, 64}, options.min_seconds, options.seed));
  all.push_back(measure_scaling("direct", 2, {4, 8, 16}, options.min_seconds, options.seed));
  all.push_back(measure_scaling("direct", 3, {2, 4, 8}, options.min_seconds, options.seed));

  out << "kind,p,n_max,ns_per_eval\n";
  for (const auto& s : all) {
    for (const auto& pt : s.points) {
      char row[96];
      std::snprintf(row, sizeof row, "%s,%d,%d,%.1f\n", s.kind.c_str(), s.p, pt.n_max, pt.ns_per_eval);
      out << row;
    }
  }
  out << "\nkind,p,scaling_exponent\n";
  for (const auto& s : all) {
    char row[64];
    std::snprintf(row, sizeof row, "%s,%d,%.3f\n", s.kind.c_str(), s.p, s.exponent);
    out << row;
  }
  return kExitOk;
}

}  // namespace pcsf::app
