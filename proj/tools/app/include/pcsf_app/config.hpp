#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcsf/blowup.hpp"
#include "pcsf/geometry.hpp"
#include "pcsf/integrator.hpp"
#include "pcsf/normalization.hpp"

namespace pcsf::app {

/// Configuration problem; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// psi += cos_amp cos(mode lambda theta) + sin_amp sin(mode lambda theta).
struct InitHarmonic {
  int mode = 1;
  double cos_amp = 0.0;
  double sin_amp = 0.0;
};

struct InitSpec {
  double mean = 1.0;
  std::vector<InitHarmonic> harmonics;
  std::optional<PerturbationSpec> perturbation;
  int perturbation_samples = 1024;
};

struct ControlSpec {
  StepControl step;
  int snapshots_per_decade = 40;
  std::optional<double> t_end;
  long max_steps = 50'000'000;
};

struct AnalysisSpec {
  std::optional<double> c_override;
  PowerWindow power_window;
  ExpWindow exp_window;
  int rate_modes = 2;
  /// Relative tolerance on fitted exponents in analysis reports.
  double rate_tolerance = 0.1;
};

struct OutputSpec {
  std::string directory = "out";
  std::vector<std::string> formats{"jsonl", "csv"};
};

struct RunConfig {
  int p = 1;
  double lambda = 2.0;
  std::optional<Rational> ratio;
  int n_max = 16;
  InitSpec init;
  ControlSpec control;
  AnalysisSpec analysis;
  OutputSpec output;
  std::uint64_t seed = 20240601;

  FlowParams params() const;
  /// Initial curvature described by init.
  SpectralState initial_state() const;
  /// c_override when set, otherwise the default trap constant.
  TrapConstant trap_constant() const;
  bool wants(const std::string& format) const;
};

/// Parse and validate; throws ConfigError. Unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
/// Canonical form with every default made explicit.
nlohmann::json config_to_json(const RunConfig& config);

nlohmann::json params_to_json(const FlowParams& params);
FlowParams params_from_json(const nlohmann::json& doc);

}  // namespace pcsf::app
