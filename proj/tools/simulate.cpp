// Scenario generator: writes AIS sentences, FMV frame records and ground truth.

#include <iostream>

#include "CLI11.hpp"
#include "cop/config.hpp"
#include "cop/error.hpp"
#include "cop/simulator.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Deterministic maritime scenario generator"};
  std::string scenario_path;
  std::string reference;
  std::string out_dir;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool list = false;
  app.add_option("--scenario", scenario_path, "Scenario file (JSON)");
  app.add_option("--reference", reference, "Bundled scenario name");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Override the scenario seed");
  app.add_option("--config", config_path, "Service config the expected events are computed for");
  app.add_flag("--list", list, "List bundled scenarios");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& name : cop::sim::reference_scenario_names()) std::cout << name << '\n';
    return 0;
  }
  if (scenario_path.empty() == reference.empty()) {
    std::cerr << "exactly one of --scenario or --reference is required\n";
    return 2;
  }
  if (out_dir.empty()) {
    std::cerr << "--out is required\n";
    return 2;
  }
  try {
    auto scenario = reference.empty() ? cop::sim::load_scenario(scenario_path)
                                      : cop::sim::reference_scenario(reference);
    if (seed) scenario.seed = *seed;
    const auto base = config_path.empty() ? cop::CopConfig{} : cop::load_config(config_path);
    const auto out = cop::sim::run_scenario(scenario, base);
    cop::sim::write_outputs(out, scenario, out_dir);
    std::cout << scenario.name << ": " << out.ais_lines.size() << " AIS sentences, " << out.fmv_lines.size()
              << " frames, " << out.expected_events.size() << " expected events -> " << out_dir << '\n';
  } catch (const cop::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
