#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specmap/deploy.hpp"
#include "specmap/energy.hpp"
#include "specmap/estimate.hpp"
#include "specmap/metrics.hpp"
#include "specmap/recover.hpp"
#include "specmap/scene.hpp"

namespace specmap {

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

struct Scenario {
  GridSpec grid{10, 10, 10, 10.0};
  std::vector<Source> sources;
  PropagationParams prop;
  std::vector<Sphere> roi_spheres;
};

/// Everything a sweep needs. Serialized as one JSON document with a
/// `version` field; see configs/default.json.
struct ExperimentConfig {
  int version = 1;
  Scenario scenario;
  EnergyParams energy;
  IdwParams idw;
  std::vector<Strategy> strategies;
  VoxelIndex start{1, 1, 1};
  std::vector<Method> methods;
  RecoveryOptions recovery;
  ObjectiveParams objective;
  std::vector<double> r_values;
  std::vector<double> r0_values;
  std::vector<double> rp_values;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "results";

  /// The 100 m block case study: 10×10×10 voxels of 10 m, three 30 mW
  /// sources on the ground diagonal, 30 m ROI spheres around them.
  static ExperimentConfig case_study();

  void validate() const;
};

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

struct ResultRow {
  Strategy strategy = Strategy::Random;
  Method method = Method::Tv3D;
  double r = 0.0;
  double r0 = 0.0;
  double rp = 0.0;
  std::uint64_t seed = 0;
  double w_roi = 0.0;
  double energy_j = 0.0;
  double poi_sum = 0.0;
  double objective = 0.0;
  double wall_ms = 0.0;
  // Empty on success, otherwise "<stage>: <message>".
  std::string error;
};

/// Seed of the noise realization used for experiment seed `seed`.
std::uint64_t scenario_seed(const ExperimentConfig& cfg, std::uint64_t seed);
/// Seed of the deployment randomness used for experiment seed `seed`.
std::uint64_t deploy_seed(std::uint64_t seed);

struct ScenarioInstance {
  SpectrumTensor truth;
  RoiSet roi;
  std::vector<double> poi;
};

ScenarioInstance build_scenario(const ExperimentConfig& cfg, std::uint64_t seed);

/// Scenario → mission → recovery → scores. Throws specmap::Error naming the
/// failing stage. When `persist_dir` is set, the truth, ROI mask, mission and
/// recovered tensor are written there.
ResultRow run_single(const ExperimentConfig& cfg, Strategy strategy, Method method, double r,
                     double r0, double rp, std::uint64_t seed,
                     const std::optional<std::filesystem::path>& persist_dir = std::nullopt);

std::string result_csv_header();
std::string result_csv_line(const ResultRow& row);

struct SweepSummary {
  std::filesystem::path raw_csv;
  std::filesystem::path aggregate_csv;
  std::size_t rows = 0;
  std::size_t failures = 0;
};

/// Runs the Cartesian product strategies × methods × r × r0 × rp × seeds.
/// Rows are written in job order as they complete, so a partial file is
/// always a valid CSV. `jobs` bounds the worker pool.
SweepSummary run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                       unsigned jobs = 1);

/// Seed means (and sample standard deviations) per curve, computed from the
/// raw results CSV only.
void aggregate_results(std::istream& raw_csv, std::ostream& out);
void aggregate_results(const std::filesystem::path& raw_csv, const std::filesystem::path& out);

}  // namespace specmap
