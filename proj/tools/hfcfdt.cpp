// hfcfdt: calibrate plants, train the decision tree, run and compare parking
// controllers.
//
//   hfcfdt calibrate --plant-grid configs/plant_grid.toml --out corpus.csv
//   hfcfdt train --corpus corpus.csv --out tree.json
//   hfcfdt run --controller hfcfdt --scenario configs/stress.toml --tree tree.json --out log.csv
//   hfcfdt compare --scenario configs/stress.toml --tree tree.json --out-dir out/
//
// Exit codes: 0 success, 1 configuration/training error, 2 simulation
// contract violation.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hfcfdt/corpus_io.hpp"
#include "hfcfdt/errors.hpp"
#include "hfcfdt/format.hpp"
#include "hfcfdt/harness/config.hpp"
#include "hfcfdt/harness/report.hpp"
#include "hfcfdt/harness/scenario.hpp"
#include "hfcfdt/training.hpp"
#include "hfcfdt/tree_io.hpp"

namespace {

using namespace hfcfdt;

struct Options {
  std::optional<std::uint64_t> seed;
  std::string plant_grid, corpus, out, scenario, tree, controller, out_dir;
};

int do_calibrate(const Options& o) {
  auto setup = harness::load_grid_setup(o.plant_grid);
  const auto samples = training::calibrate_grid(setup.base, setup.calibration, setup.grid, o.seed.value_or(setup.seed));
  io::save_corpus(samples, o.out);
  std::cerr << "calibrated " << samples.size() << " plants -> " << o.out << '\n';
  return 0;
}

int do_train(const Options& o) {
  const auto samples = io::load_corpus(o.corpus);
  const auto tree = training::train(samples);
  io::save_tree(tree, o.out);
  std::cerr << "trained tree from " << samples.size() << " samples -> " << o.out << '\n';
  for (std::size_t i = 0; i < fdt::kLeaves; ++i) {
    std::cerr << "  " << fdt::leaf_id(i) << ": [" << format_double(tree.leaves[i].delta_motor) << ", "
              << format_double(tree.leaves[i].delta_servo) << "]\n";
  }
  return 0;
}

harness::RunSetup scenario_setup(const Options& o) {
  auto setup = harness::load_run_setup(o.scenario);
  if (o.seed) setup.scenario.seed = *o.seed;
  return setup;
}

int do_run(const Options& o) {
  const auto setup = scenario_setup(o);
  const auto controller = harness::parse_controller(o.controller);
  std::optional<fdt::FuzzyDecisionTree> tree;
  if (!o.tree.empty()) tree = io::load_tree(o.tree);
  const auto log = harness::run_scenario(controller, setup, tree ? &*tree : nullptr);
  harness::save_trajectory(log, o.out);
  const auto m = harness::compute_metrics(log, setup.scenario);
  std::cerr << harness::to_string(controller) << ": error " << format_double(m.final_position_error) << " m, heading "
            << format_double(m.final_heading_error) << " rad, collision " << (m.collision ? "yes" : "no") << '\n';
  return 0;
}

int do_compare(const Options& o) {
  const auto setup = scenario_setup(o);
  const auto tree = io::load_tree(o.tree);
  const auto cmp = harness::compare(setup, tree);
  harness::save_comparison(setup.scenario, cmp, o.out_dir);
  harness::write_metrics(std::cout, cmp);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical fuzzy parking controller with a supervisory fuzzy decision tree"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed, "RNG seed (overrides the config file)"); };

  auto* calibrate = app.add_subcommand("calibrate", "Run the calibration experiment over a plant grid");
  calibrate->add_option("--plant-grid", o.plant_grid, "Plant grid config (TOML)")->required();
  calibrate->add_option("--out", o.out, "Output corpus CSV")->required();
  add_seed(calibrate);

  auto* train = app.add_subcommand("train", "Train the decision tree from a calibration corpus");
  train->add_option("--corpus", o.corpus, "Calibration corpus CSV")->required();
  train->add_option("--out", o.out, "Output tree JSON")->required();
  add_seed(train);

  auto* run = app.add_subcommand("run", "Simulate one controller on a scenario");
  run->add_option("--controller", o.controller, "fbos, hfc or hfcfdt")
      ->required()
      ->check(CLI::IsMember({"fbos", "hfc", "hfcfdt"}));
  run->add_option("--scenario", o.scenario, "Scenario config (TOML)")->required();
  run->add_option("--tree", o.tree, "Tree JSON (required for hfcfdt)");
  run->add_option("--out", o.out, "Output trajectory CSV")->required();
  add_seed(run);

  auto* compare = app.add_subcommand("compare", "Run all three controllers and write logs, metrics and an overlay");
  compare->add_option("--scenario", o.scenario, "Scenario config (TOML)")->required();
  compare->add_option("--tree", o.tree, "Tree JSON")->required();
  compare->add_option("--out-dir", o.out_dir, "Output directory")->required();
  add_seed(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) o.seed = seed;
  }

  try {
    if (*calibrate) return do_calibrate(o);
    if (*train) return do_train(o);
    if (*run) return do_run(o);
    if (*compare) return do_compare(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
