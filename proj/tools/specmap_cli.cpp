// specmap command-line front end: scenario generation, single runs, sweeps
// and offline recovery from exported files.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "specmap/error.hpp"
#include "specmap/harness.hpp"
#include "specmap/io.hpp"

namespace fs = std::filesystem;

namespace {

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("specmap");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("SPECMAP_LOG")) {
    const std::string level = env;
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("ignoring SPECMAP_LOG={} (expected error|info|debug)", level);
  }
}

int cmd_generate(const fs::path& config, const fs::path& out, std::optional<std::uint64_t> seed) {
  const auto cfg = specmap::load_config(config);
  const std::uint64_t s = seed.value_or(cfg.seeds.front());
  const auto sc = specmap::build_scenario(cfg, s);
  specmap::io::write_tensor_csv(out / "truth.csv", sc.truth);
  specmap::io::write_mask_csv(out / "roi_mask.csv", cfg.scenario.grid, sc.roi.mask);
  spdlog::info("wrote truth tensor and ROI mask ({} ROI voxels) to {}", sc.roi.n_roi, out.string());
  return 0;
}

int cmd_run(const fs::path& config, const std::string& strategy, const std::string& method,
            double r, std::optional<double> r0, std::optional<double> rp, std::uint64_t seed,
            std::optional<fs::path> out) {
  auto cfg = specmap::load_config(config);
  const auto s = specmap::parse_strategy(strategy);
  const auto m = specmap::parse_method(method);
  const double r0v = r0.value_or(cfg.r0_values.front());
  const double rpv = rp.value_or(cfg.rp_values.front());
  specmap::DeployConfig{s, r, r0v, rpv, cfg.start, seed}.validate(cfg.scenario.grid);
  const auto row = specmap::run_single(cfg, s, m, r, r0v, rpv, seed, out);
  std::cout << specmap::result_csv_header() << '\n' << specmap::result_csv_line(row) << '\n';
  return 0;
}

int cmd_sweep(const fs::path& config, std::optional<fs::path> out, unsigned jobs) {
  const auto cfg = specmap::load_config(config);
  const auto summary = specmap::run_sweep(cfg, out.value_or(cfg.output_dir), jobs);
  std::cout << summary.raw_csv.string() << '\n' << summary.aggregate_csv.string() << '\n';
  return summary.failures == 0 ? 0 : 3;
}

int cmd_recover(const fs::path& tensor_csv, const fs::path& mission_csv, const std::string& method,
                double cell_size, int k, std::optional<fs::path> out) {
  const auto full = specmap::io::read_tensor_csv(tensor_csv, std::nullopt, cell_size);
  const auto rows = specmap::io::read_mission_csv(mission_csv);
  if (rows.empty()) throw specmap::IoError("mission CSV has no visits");

  specmap::SpectrumTensor sampled = full;
  sampled.mask = specmap::Mask(full.grid.size(), 0);
  for (const auto& row : rows) {
    const auto i = full.grid.linear(row.voxel);
    if (!full.known(i)) throw specmap::IoError("mission visits a voxel missing from the tensor");
    (*sampled.mask)[i] = 1;
  }
  specmap::RecoveryOptions opts;
  opts.knn_k = k;
  const auto result = specmap::recover(sampled, specmap::parse_method(method), opts);
  if (out) {
    specmap::io::write_recovery(*out, result);
    spdlog::info("wrote {} recovery to {}", method, out->string());
  } else {
    specmap::io::write_tensor_csv(std::cout, result.tensor);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"3D spectrum mapping simulator"};
  app.require_subcommand(1);

  fs::path config;
  fs::path out_dir;
  std::optional<fs::path> out_opt;
  std::optional<std::uint64_t> seed_opt;

  auto* gen = app.add_subcommand("generate", "write the ground-truth tensor and ROI mask");
  gen->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_option("--seed", seed_opt, "experiment seed (default: first sweep seed)");

  std::string strategy, method;
  double r = 0.3;
  std::optional<double> r0, rp;
  std::uint64_t seed = 1;
  auto* run = app.add_subcommand("run", "run one mission + recovery and print its result row");
  run->add_option("--config", config)->required()->check(CLI::ExistingFile);
  run->add_option("--strategy", strategy, "Random | RoiDriven | RoiOnly")->required();
  run->add_option("--method", method, "TvXY | TvYZ | TvZX | Tv3D | Knn | Idw")->required();
  run->add_option("--r", r, "sampling ratio")->required();
  run->add_option("--r0", r0, "pre-sampling ratio");
  run->add_option("--rp", rp, "per-step ratio");
  run->add_option("--seed", seed)->required();
  run->add_option("--out", out_opt, "persist tensors and mission CSV here");

  unsigned jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "run every configured combination and aggregate");
  sweep->add_option("--config", config)->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out_opt, "output directory (default: config output_dir)");
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  fs::path tensor_csv, mission_csv;
  double cell_size = 10.0;
  int k = 5;
  auto* rec = app.add_subcommand("recover", "recover a map from a tensor CSV and a mission's samples");
  rec->add_option("--tensor", tensor_csv, "tensor CSV (x,y,z,value_dbm)")->required()->check(CLI::ExistingFile);
  rec->add_option("--mask-from", mission_csv, "mission CSV whose visits are the samples")
      ->required()
      ->check(CLI::ExistingFile);
  rec->add_option("--method", method)->required();
  rec->add_option("--cell-size", cell_size, "voxel edge in meters");
  rec->add_option("--k", k, "neighbors for Knn");
  rec->add_option("--out", out_opt, "recovered tensor CSV (sidecar JSON written alongside)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(config, out_dir, seed_opt);
    if (*run) return cmd_run(config, strategy, method, r, r0, rp, seed, out_opt);
    if (*sweep) return cmd_sweep(config, out_opt, jobs);
    if (*rec) return cmd_recover(tensor_csv, mission_csv, method, cell_size, k, out_opt);
  } catch (const specmap::ConfigError& e) {
    spdlog::error("[{}] {}", e.stage(), e.what());
    return 2;
  } catch (const specmap::Error& e) {
    spdlog::error("[{}] {}", e.stage(), e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("[internal] {}", e.what());
    return 1;
  }
  return 0;
}
