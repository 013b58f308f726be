// Command-line front end: configuration loading, sweep subcommands, exports.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "fluxsim/run.hpp"
#include "fluxsim/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

int run_subcommand(const std::string& name, const std::string& config_path,
                   const fluxsim::RunOptions& opt) {
  const fluxsim::RunConfig cfg = fluxsim::load_config(config_path);
  const fluxsim::RunResult result = fluxsim::run(name, cfg, opt);
  for (const auto& a : result.artifacts) std::printf("wrote %s\n", a.c_str());
  if (result.failed_cells > 0) {
    std::fprintf(stderr, "%d cell(s) failed; see manifest.json\n",
                 result.failed_cells);
    return kExitPartial;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fluxsim: heavy-fluxonium / readout-resonator simulator"};
  app.set_version_flag("--version", fluxsim::version);
  app.require_subcommand(1);

  std::string config_path;
  fluxsim::RunOptions opt;
  int jobs = 0;
  bool no_cache = false;

  const char* names[] = {"reduce", "spectrum", "lines", "single-tone",
                         "analytics"};
  const char* descriptions[] = {
      "reduce the four-node circuit and derive energy scales",
      "fluxonium levels and labels versus flux (CSV)",
      "drive-accessible transition catalogs versus flux (CSV)",
      "steady-state transmission map (CSV, optional heatmap)",
      "closed-form report: dispersion, hybridization, Raman, scaling"};
  for (size_t i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(names[i], descriptions[i]);
    sub->add_option("--config", config_path, "run configuration (JSON)")
        ->required();
    sub->add_option("--out", opt.out_dir, "output directory override");
    sub->add_option("--jobs", jobs, "worker count override");
    sub->add_flag("--no-cache", no_cache, "disable the on-disk cell cache");
  }

  CLI11_PARSE(app, argc, argv);
  opt.jobs = jobs;
  opt.use_cache = !no_cache;

  try {
    return run_subcommand(app.get_subcommands().front()->get_name(),
                          config_path, opt);
  } catch (const fluxsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
