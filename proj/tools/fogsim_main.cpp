// fogsim: run cloud-only vs fog comparisons from a scenario file.
//
//   fogsim run <scenario> [--out DIR] [--seed N] [--trace]
//   fogsim sweep <scenario> [--out DIR] [--seed N] [--trace] [--jobs N]
//
// Exit codes: 0 success, 1 validation/parse error, 2 I/O error.

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <optional>

#include "fogsim/error.hpp"
#include "fogsim/experiment.hpp"
#include "fogsim/scenario.hpp"

namespace {

int exit_code_for(fogsim::ErrorCode code) {
  return code == fogsim::ErrorCode::IoError ? 2 : 1;
}

void print_table(const fogsim::ExperimentResult& result) {
  std::cout << std::left << std::setw(8) << "users" << std::setw(14) << "cloud_ms" << std::setw(12) << "fog_ms"
            << std::setw(16) << "rt_improve_%" << std::setw(16) << "cloud_bytes" << std::setw(12) << "fog_bytes"
            << "traffic_cut_%\n";
  std::cout << std::fixed << std::setprecision(2);
  for (const auto& e : result.entries) {
    const auto& c = e.comparison;
    std::cout << std::setw(8) << e.users << std::setw(14) << c.mean_cloud / 1000.0 << std::setw(12)
              << c.mean_fog / 1000.0 << std::setw(16) << c.rt_improvement_pct << std::setw(16)
              << c.edge_cloud_bytes_cloud << std::setw(12) << c.edge_cloud_bytes_fog << c.traffic_reduction_pct
              << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator comparing cloud-only and fog execution of a location-aware game"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "fogsim-out";
  std::optional<std::uint64_t> seed;
  bool trace = false;
  unsigned jobs = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "Scenario file")->required();
    cmd->add_option("--out", out_dir, "Output directory for CSV reports");
    cmd->add_option("--seed", seed, "Override the scenario seed");
    cmd->add_flag("--trace", trace, "Also write per-run event traces");
  };
  auto* run = app.add_subcommand("run", "Compare cloud-only and fog at the scenario's user count");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "Compare cloud-only and fog across the scenario's user_counts");
  add_common(sweep);
  sweep->add_option("--jobs", jobs, "User counts simulated concurrently (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    auto config = fogsim::load_scenario(scenario_path);
    if (seed) config.seed = *seed;
    const std::vector<std::size_t> counts = run->parsed() ? std::vector<std::size_t>{config.users} : config.user_counts;
    const auto result =
        fogsim::run_experiment(config, counts, fogsim::ExperimentOptions{trace, run->parsed() ? 1u : jobs});
    const auto files = fogsim::write_reports(result, out_dir);
    print_table(result);
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
    return 0;
  } catch (const fogsim::Error& e) {
    std::cerr << "fogsim: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "fogsim: " << e.what() << '\n';
    return 1;
  }
}
