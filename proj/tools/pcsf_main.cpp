#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pcsf/errors.hpp"
#include "pcsf_app/commands.hpp"

using namespace pcsf::app;

int main(int argc, char** argv) {
  CLI::App app{"Curvature-flow blow-up simulator and analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path, traj_path, out_dir, what = "rates";
  std::optional<std::uint64_t> seed;
  int frames = 6, samples = 0, states = 200;
  bool normalized = false, mutate = false, quick = false;

  auto* simulate = app.add_subcommand("simulate", "Integrate a configured run");
  simulate->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory (default: output.directory)");
  simulate->add_option("--seed", seed, "Override the configured seed");

  auto* analyze = app.add_subcommand("analyze", "Analyze a trajectory file");
  analyze->add_option("--traj", traj_path, "Trajectory (JSON-lines)")->required();
  analyze->add_option("--what", what, "rates, trap, blowup or normalized")
      ->check(CLI::IsMember({"rates", "trap", "blowup", "normalized"}));
  analyze->add_option("--out", out_dir, "Also write report_<what>.json here");

  auto* normalize = app.add_subcommand("normalize", "Same as analyze --what normalized");
  normalize->add_option("--traj", traj_path, "Trajectory (JSON-lines)")->required();
  normalize->add_option("--out", out_dir, "Also write report_normalized.json here");

  auto* render = app.add_subcommand("render", "Reconstruct curves and write SVG/CSV frames");
  render->add_option("--traj", traj_path, "Trajectory (JSON-lines)")->required();
  render->add_option("--frames", frames, "Number of frames")->check(CLI::PositiveNumber);
  render->add_flag("--normalized", normalized, "Frames of the rescaled curve, linear in tau");
  render->add_option("--samples", samples, "Points per frame (default 1024 m)");
  render->add_option("--out", out_dir, "Output directory")->required();

  auto* verify = app.add_subcommand("verify", "Run the built-in consistency suite");
  verify->add_option("--seed", seed, "Seed for random states");
  verify->add_option("--states", states, "Random states per (p, n_max) case")->check(CLI::PositiveNumber);
  verify->add_flag("--mutate-kernel", mutate, "Flip the sign of the tuple weight in the oracle");

  auto* bench = app.add_subcommand("bench", "Time right-hand-side kernels, CSV on stdout");
  bench->add_option("--seed", seed, "Seed for random states");
  bench->add_flag("--quick", quick, "Shorter timing windows");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      RunConfig config;
      try {
        config = load_config(config_path);
        if (seed) config.seed = *seed;
        (void)config.initial_state();
      } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
      } catch (const pcsf::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
      }
      return cmd_simulate(config, out_dir.empty() ? config.output.directory : out_dir, std::cout);
    }
    const std::optional<std::string> report_dir =
        out_dir.empty() ? std::nullopt : std::optional<std::string>(out_dir);
    if (*analyze) return cmd_analyze(traj_path, what, report_dir, std::cout, std::cerr);
    if (*normalize) return cmd_analyze(traj_path, "normalized", report_dir, std::cout, std::cerr);
    if (*render) {
      return cmd_render(traj_path, RenderOptions{frames, normalized, samples}, out_dir, std::cout, std::cerr);
    }
    if (*verify) {
      VerifyOptions opts;
      if (seed) opts.seed = *seed;
      opts.states_per_case = states;
      opts.mutate_kernel = mutate;
      opts.threads = thread_count_from_env();
      return cmd_verify(opts, std::cout);
    }
    if (*bench) {
      BenchOptions opts;
      if (seed) opts.seed = *seed;
      if (quick) opts.min_seconds = 0.005;
      return cmd_bench(opts, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
