#include "pcsf/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcsf/errors.hpp"
#include "pcsf/fit.hpp"
#include "pcsf/flow_rhs.hpp"

namespace pcsf {

TrapConstant select_c(const FlowParams& params) {
  const int p = params.p();
  const double l2 = params.lambda() * params.lambda();
  const double threshold = (p + 2.0) / p;
  if (!(l2 > threshold)) throw DomainError("lambda at or below sqrt((p+2)/p)");
  return {64.0 * l2 / (l2 - threshold), p != 1};
}

double trap_margin(const SpectralState& state, double c) {
  return state.mean() - c * seminorm(state, 2.0);
}

HypothesisReport check_hypothesis(const SpectralState& psi, double c) {
  HypothesisReport r;
  r.mean = psi.mean();
  r.seminorm2 = seminorm(psi, 2.0);
  r.margin = r.mean - c * r.seminorm2;
  r.positive = grid_minimum(psi, default_grid_size(psi.n_max())) > 0.0;
  r.holds = r.margin >= 0.0 && r.positive;
  return r;
}

namespace {

// Indices of the snapshots whose k(0) lies within a factor 10 of the last one.
std::vector<size_t> final_decade(const Trajectory& traj) {
  std::vector<size_t> idx;
  const double last = traj.snapshots.back().mean();
  for (size_t i = 0; i < traj.snapshots.size(); ++i) {
    if (traj.snapshots[i].mean() >= last / 10.0) idx.push_back(i);
  }
  return idx;
}

// Time remaining to the last snapshot, from the stored intervals.
std::vector<double> time_before_last(const Trajectory& traj) {
  const size_t n = traj.snapshots.size();
  std::vector<double> u(n, 0.0);
  for (size_t i = n - 1; i-- > 0;) u[i] = u[i + 1] + traj.intervals[i + 1];
  return u;
}

// Line fit with residuals measured relative to y; y spans (p+1) decades over
// the window, and an unweighted fit would extrapolate the tail with the
// absolute error of the largest values.
double tail_from_fit(const std::vector<double>& u, const std::vector<double>& y) {
  double sw = 0.0, su = 0.0, sy = 0.0, suu = 0.0, suy = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    const double w = 1.0 / (y[i] * y[i]);
    sw += w;
    su += w * u[i];
    sy += w * y[i];
    suu += w * u[i] * u[i];
    suy += w * u[i] * y[i];
  }
  const double um = su / sw, ym = sy / sw;
  const double sxx = suu / sw - um * um;
  if (!(sxx > 0.0)) throw AnalysisError("degenerate times in the final decade");
  const double slope = (suy / sw - um * ym) / sxx;
  if (!(slope > 0.0)) throw AnalysisError("k(0) is not blowing up over the final decade");
  return (ym - slope * um) / slope;
}

}  // namespace

BlowupEstimate estimate_T(const Trajectory& traj) {
  if (traj.flow != Flow::unnormalized) throw AnalysisError("blow-up time needs a physical-time run");
  if (traj.snapshots.empty()) throw AnalysisError("empty trajectory");
  const int p = traj.params.p();
  const auto& last = traj.snapshots.back();
  if (last.mean() < 1e3) {
    throw AnalysisError("trajectory stops at k(0) = " + std::to_string(last.mean()) +
                        "; blow-up time needs k(0) >= 1e3");
  }
  const auto idx = final_decade(traj);
  if (idx.size() < 3) throw AnalysisError("insufficient snapshots in the final decade");
  const auto before = time_before_last(traj);
  std::vector<double> u, y;
  for (size_t i : idx) {
    u.push_back(before[i]);
    y.push_back(p / (p + 1.0) * std::pow(traj.snapshots[i].mean(), -(p + 1)));
  }
  const double tail = tail_from_fit(u, y);

  double spread = 0.0;
  const size_t half = u.size() / 2;
  if (half >= 2 && u.size() - half >= 2) {
    const std::vector<double> u1(u.begin(), u.begin() + static_cast<long>(half));
    const std::vector<double> y1(y.begin(), y.begin() + static_cast<long>(half));
    const std::vector<double> u2(u.begin() + static_cast<long>(half), u.end());
    const std::vector<double> y2(y.begin() + static_cast<long>(half), y.end());
    spread = std::max(std::abs(tail_from_fit(u1, y1) - tail), std::abs(tail_from_fit(u2, y2) - tail));
  }
  const double band = tail * std::pow(tail, 2.0 / (p + 1));

  BlowupEstimate est;
  est.tail = tail;
  est.T = last.t() + tail;
  est.uncertainty = std::max(spread, band);
  est.n_points = idx.size();
  return est;
}

BlowupEstimate blowup_from_known_T(const Trajectory& traj, double T) {
  if (traj.snapshots.empty()) throw AnalysisError("empty trajectory");
  const double tail = T - traj.snapshots.back().t();
  if (!(tail > 0.0)) throw DomainError("blow-up time precedes the last snapshot");
  return {T, tail, 0.0, 0};
}

std::vector<double> time_to_blowup(const Trajectory& traj, const BlowupEstimate& est) {
  auto u = time_before_last(traj);
  for (auto& g : u) g += est.tail;
  return u;
}

EnvelopeBand blowup_envelope(int p, double gap) {
  const double w = std::pow(gap, 2.0 / (p + 1));
  EnvelopeBand band;
  band.lower = std::exp(-std::log1p(w) / (p + 1));
  band.upper = w < 1.0 ? std::exp(-std::log1p(-w) / (p + 1))
                       : std::numeric_limits<double>::infinity();
  return band;
}

namespace {
double normalizer(int p, double gap) {
  return std::pow((p + 1.0) / p, 1.0 / (p + 1)) * std::pow(gap, 1.0 / (p + 1));
}
}  // namespace

double envelope_lower_k0(int p, double gap) {
  return blowup_envelope(p, gap).lower / normalizer(p, gap);
}

double envelope_upper_k0(int p, double gap) {
  return blowup_envelope(p, gap).upper / normalizer(p, gap);
}

EnvelopeReport check_envelopes(const Trajectory& traj, const BlowupEstimate& est) {
  const int p = traj.params.p();
  const auto gaps = time_to_blowup(traj, est);
  EnvelopeReport report;
  report.holds = true;
  report.min_position = std::numeric_limits<double>::infinity();
  report.max_position = -std::numeric_limits<double>::infinity();
  for (size_t i : final_decade(traj)) {
    const double u0 = normalizer(p, gaps[i]) * traj.snapshots[i].mean();
    const auto band = blowup_envelope(p, gaps[i]);
    const double pos = (u0 - band.lower) / (band.upper - band.lower);
    report.min_position = std::min(report.min_position, pos);
    report.max_position = std::max(report.max_position, pos);
    if (u0 < band.lower || u0 > band.upper) report.holds = false;
    ++report.checked;
  }
  if (report.checked == 0) report.holds = false;
  return report;
}

double decay_exponent(double lambda, int n, int p) {
  return (lambda * lambda * n * n - (p + 2.0) / p) * p / (p + 1.0);
}

double forced_decay_exponent(double lambda, int n, int p) {
  const double shift = 1.0 / (p + 1);
  return std::min(decay_exponent(lambda, n, p), n * (decay_exponent(lambda, 1, p) + shift) - shift);
}

RateFit fit_power(const Trajectory& traj, const BlowupEstimate& est, int n,
                  const PowerWindow& window) {
  if (n < 1 || n > traj.params.n_max()) throw AnalysisError("mode outside the retained band");
  if (!(window.lo > 0.0 && window.lo < window.hi)) throw AnalysisError("bad fit window");
  const auto gaps = time_to_blowup(traj, est);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<double> x, y;
  size_t floored = 0;
  for (size_t i = 0; i < traj.snapshots.size(); ++i) {
    if (gaps[i] < window.lo || gaps[i] > window.hi) continue;
    const auto& s = traj.snapshots[i];
    const double a = std::abs(s.mode(n));
    if (!(a > 1e3 * eps * s.mean())) {
      ++floored;
      continue;
    }
    x.push_back(std::log(gaps[i]));
    y.push_back(std::log(a));
  }
  if (x.size() < 8) {
    std::string why = "only " + std::to_string(x.size()) + " usable points for mode " +
                      std::to_string(n) + " in the window";
    if (floored > 0) why += " (" + std::to_string(floored) + " at the round-off floor)";
    throw AnalysisError(why);
  }
  const auto fit = fit_line(x, y);
  RateFit r;
  r.exponent = fit.slope;
  r.std_error = fit.slope_stderr;
  r.intercept = fit.intercept;
  r.n_points = static_cast<int>(fit.used.size());
  r.window_lo = std::exp(*std::min_element(x.begin(), x.end()));
  r.window_hi = std::exp(*std::max_element(x.begin(), x.end()));
  return r;
}

bool TrapCertificate::holds() const {
  return !margins.empty() &&
         std::all_of(margins.begin(), margins.end(), [](const auto& m) { return m.margin >= 0.0; });
}

double TrapCertificate::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : margins) m = std::min(m, s.margin);
  return m;
}

TrapCertificate certify(const Trajectory& traj, double c) {
  if (traj.snapshots.empty()) throw AnalysisError("empty trajectory");
  TrapCertificate cert;
  cert.c = c;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<double> ts, logs;
  for (const auto& s : traj.snapshots) {
    cert.margins.push_back({s.t(), trap_margin(s, c)});
    const double weighted = seminorm(s, 2.0);
    if (weighted > 1e3 * eps * s.mean()) {
      ts.push_back(s.t());
      logs.push_back(std::log(weighted));
    }
  }
  if (ts.size() >= 8) {
    try {
      cert.gamma_fit = -fit_line(ts, logs).slope;
    } catch (const AnalysisError&) {
    }
  }
  const auto& last = traj.snapshots.back();
  std::vector<double> ns, logk;
  for (int n = 1; n <= last.n_max(); ++n) {
    const double a = std::abs(last.mode(n));
    if (a > 1e3 * eps * last.mean()) {
      ns.push_back(n);
      logk.push_back(std::log(a));
    }
  }
  if (ns.size() >= 3) cert.mu_fit = -fit_line(ns, logk, false).slope;
  return cert;
}

}  // namespace pcsf
