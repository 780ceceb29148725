// Command-line harness: whisker <sweep|synth|train-eval|speed-sweep|grad-check>
//   [--config path.json] [--seed N] [--out dir]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "whisker/whisker.hpp"

namespace {

int code(whisker::ExitCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whisker terrain-classification experiments"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string data_dir;
  app.add_option("--config", config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed, overrides the config");
  app.add_option("--out", out_dir, "Output directory, overrides the config");

  auto* sweep = app.add_subcommand("sweep", "Modal sweep over (f_b, h_b); writes sweep.csv");
  auto* synth = app.add_subcommand("synth", "Synthesize per-terrain feature datasets");
  auto* train_eval = app.add_subcommand("train-eval", "Repeated train/evaluate on a synthesized dataset");
  train_eval->add_option("--data", data_dir, "Dataset directory written by synth (default: --out)");
  auto* speed_sweep = app.add_subcommand("speed-sweep", "Synthesize, train and evaluate at each speed");
  auto* grad_check = app.add_subcommand("grad-check", "Backprop vs. finite differences");
  std::size_t per_layer = 50;
  grad_check->add_option("--per-layer", per_layer, "Parameters compared per layer")->check(CLI::PositiveNumber);
  std::size_t windows_per_terrain = 2;
  grad_check->add_option("--windows", windows_per_terrain, "Feature windows per terrain in the batch")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(whisker::ExitCode::kConfig);
  }

  try {
    whisker::ExperimentConfig cfg =
        config_path.empty() ? whisker::ExperimentConfig{} : whisker::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!data_dir.empty()) cfg.dataset_dir = data_dir;

    nlohmann::json result;
    if (*sweep) {
      result = whisker::cmd_sweep(cfg);
      std::cout << result["cells_f_dom_within_one_bin"] << "/" << result["cells"]
                << " cells with f_dom within one bin of f_b; "
                << result["columns_f_dom_amplitude_invariant"] << "/" << result["f_b_columns"]
                << " f_b columns amplitude-invariant\n";
    } else if (*synth) {
      result = whisker::cmd_synth(cfg);
      std::cout << result["total_vectors"] << " feature vectors, " << result["degenerate_windows"]
                << " degenerate windows\n";
    } else if (*train_eval) {
      result = whisker::cmd_train_eval(cfg);
      std::ifstream table(std::filesystem::path(cfg.output_dir) / "train_eval.txt");
      std::cout << table.rdbuf();
    } else if (*speed_sweep) {
      result = whisker::cmd_speed_sweep(cfg);
      std::ifstream table(std::filesystem::path(cfg.output_dir) / "speed_sweep.txt");
      std::cout << table.rdbuf();
      std::cout << "dominant bins follow f = v / lambda: "
                << (result["dominant_bins_scale_with_speed"].get<bool>() ? "yes" : "no") << '\n';
    } else if (*grad_check) {
      result = whisker::cmd_grad_check(cfg, per_layer, windows_per_terrain);
      for (const auto& l : result["layers"]) {
        std::cout << "layer " << l["layer"] << ": " << l["sampled"] << " compared, "
                  << l["kink_skips"] << " kink skips, " << l["resolution_skips"]
                  << " below resolution, max relative error " << l["max_relative_error"] << '\n';
      }
      std::cout << "max relative error " << result["max_relative_error"] << '\n';
    }
    return code(whisker::ExitCode::kOk);
  } catch (const whisker::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return code(whisker::ExitCode::kConfig);
  } catch (const whisker::PhysicsError& e) {
    std::cerr << "physics error: " << e.what() << '\n';
    return code(whisker::ExitCode::kPhysics);
  } catch (const whisker::DivergenceError& e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return code(whisker::ExitCode::kDivergence);
  } catch (const whisker::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return code(whisker::ExitCode::kData);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return code(whisker::ExitCode::kUnexpected);
  }
}
