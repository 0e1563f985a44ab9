// simulate: run a steady-state, trajectory or sweep job described by a JSON
// config (or a built-in figure preset) and write the CSV table.

#include <iostream>

#include "CLI11.hpp"
#include "manylaser/config.hpp"
#include "manylaser/errors.hpp"
#include "manylaser/runner.hpp"

using namespace manylaser;

int main(int argc, char** argv) {
  CLI::App app{"Many-body laser steady states and trajectories"};
  std::string config_path, preset_name, out;
  int jobs = 0;
  std::uint64_t seed = 0;
  bool list = false, print_config = false, quiet = false;

  auto* cfg = app.add_option("--config", config_path, "JSON run configuration");
  auto* pre = app.add_option("--preset", preset_name, "built-in figure preset (see --list-presets)");
  cfg->excludes(pre);
  app.add_option("--out", out, "output CSV path (overrides the config)");
  app.add_option("--jobs", jobs, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
  auto* seed_opt = app.add_option("--seed", seed, "base seed for trajectory ensembles");
  app.add_flag("--list-presets", list, "list presets and exit");
  app.add_flag("--print-config", print_config, "print the expanded config and exit");
  app.add_flag("-q,--quiet", quiet, "no progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (list) {
    for (const auto& n : preset_names()) std::cout << n << "  " << preset_description(n) << '\n';
    return kExitOk;
  }

  try {
    if (config_path.empty() && preset_name.empty()) throw ConfigError("--config", "give --config <path> or --preset <name>");
    RunConfig config = config_path.empty() ? preset(preset_name) : load_config(config_path);
    if (!out.empty()) config.output_path = out;
    if (*seed_opt) config.ensemble.base_seed = seed;
    config.validate();
    if (print_config) {
      std::cout << dump_config(config) << '\n';
      return kExitOk;
    }
    RunOptions opt;
    opt.jobs = jobs;
    opt.log = quiet ? nullptr : &std::cerr;
    const RunResult result = run(config, opt);
    write_outputs(config, result);
    print_summary(std::cout, config, result);
    if (!result.failures.empty()) {
      std::cerr << "some grid points failed; see " << config.output_path << ".failures.json\n";
    }
    return result.exit_code();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
