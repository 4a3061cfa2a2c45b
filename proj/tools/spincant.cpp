// spincant command-line front end.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "spincant/app.hpp"
#include "spincant/errors.hpp"

namespace app = spincant::app;

int main(int argc, char** argv) {
  CLI::App cli{"Spin-cantilever density matrix: thresholds, evolution, snapshots, sweeps, verification"};
  cli.set_version_flag("--version", app::version());
  cli.require_subcommand(1);
  cli.fallthrough();  // global options may also follow the subcommand

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 0;
  bool quiet = false;
  cli.add_option("--config", config_path, "JSON configuration file")->envname("SPINCANT_CONFIG");
  cli.add_option("--out", out_dir, "output directory")->envname("SPINCANT_OUT");
  auto* seed_opt = cli.add_option("--seed", seed, "seed for the random verification suite")
                       ->envname("SPINCANT_SEED");
  cli.add_option("--threads", threads, "worker threads (0: OpenMP default)")
      ->envname("SPINCANT_THREADS")
      ->check(CLI::NonNegativeNumber);
  cli.add_flag("--quiet", quiet, "print nothing on success")->envname("SPINCANT_QUIET");

  auto* thresholds = cli.add_subcommand("thresholds", "temperature thresholds and regime warnings");
  auto* evolve = cli.add_subcommand("evolve", "peak geometry and coherence time series");
  auto* snapshot = cli.add_subcommand("snapshot", "sample all four density blocks on a grid");
  auto* verify = cli.add_subcommand("verify", "closed forms against the numerical oracles");
  auto* sweep = cli.add_subcommand("sweep", "thresholds over a Cartesian parameter grid");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (threads > 0) omp_set_num_threads(threads);
    app::RunConfig config;
    if (!config_path.empty())
      config = app::load_config(config_path);
    else
      config = app::parse_config(nlohmann::json::object());
    if (seed_opt->count() > 0) config.seed = seed;

    app::CommandResult result;
    if (thresholds->parsed()) result = app::cmd_thresholds(config, out_dir);
    if (evolve->parsed()) result = app::cmd_evolve(config, out_dir);
    if (snapshot->parsed()) result = app::cmd_snapshot(config, out_dir);
    if (verify->parsed()) result = app::cmd_verify(config, out_dir);
    if (sweep->parsed()) result = app::cmd_sweep(config, out_dir);

    if (result.exit_code != 0)
      std::cerr << result.summary;
    else if (!quiet)
      std::cout << result.summary;
    return result.exit_code;
  } catch (const spincant::DomainError& e) {
    std::cerr << "config error at " << (e.field().empty() ? "/" : e.field()) << ": "
              << std::string(e.what()).substr(e.field().size() + 2) << "\n";
    return 2;
  } catch (const spincant::ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
