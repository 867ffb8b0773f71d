#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "specmap/energy.hpp"
#include "specmap/estimate.hpp"
#include "specmap/scene.hpp"

namespace specmap {

enum class Strategy { Random, RoiDriven, RoiOnly };
enum class SelectionMode { RoiDriven, RoiOnly };

struct DeployConfig {
  Strategy strategy = Strategy::RoiDriven;
  double r = 0.3;
  double r0 = 0.05;
  double rp = 0.05;
  VoxelIndex start{1, 1, 1};
  std::uint64_t seed = 0;

  /// Number of adaptive batches, (r - r0) / rp.
  int steps() const;
  std::size_t sample_count(std::size_t n_voxels) const;
  std::size_t presample_count(std::size_t n_voxels) const;
  std::size_t batch_count(std::size_t n_voxels) const;
  void validate(const GridSpec& grid) const;
};

/// Round-half-up of ratio·n.
std::size_t ratio_count(double ratio, std::size_t n);

struct Visit {
  VoxelIndex voxel;
  double measured_dbm = 0.0;
  Leg leg;
};

struct MissionLog {
  std::vector<Visit> visits;
  double cumulative_energy_j = 0.0;
  // Index into `visits` where each batch starts; entry 0 is the presample
  // (or the whole random deployment).
  std::vector<std::size_t> step_boundaries;

  std::vector<VoxelIndex> voxels() const;
  /// Batch number of visit `i`, 0 for the presample.
  std::size_t step_of(std::size_t i) const;
  /// Sparse dBm tensor holding the measurements.
  SpectrumTensor sampled_tensor(const GridSpec& grid) const;
};

/// Observation points inside run_mission, used by tests to inspect the
/// estimate that a batch is planned against.
struct MissionHooks {
  std::function<void(std::size_t step, std::span<const double> frozen_estimate)> on_estimate;
  std::function<void(std::size_t step, const Visit& visit, std::span<const double> frozen_estimate)>
      on_select;
};

/// Visits `chosen` greedily, always flying to the cheapest remaining voxel.
/// Appends to `log` and returns the final UAV position.
VoxelIndex append_greedy_tour(std::vector<VoxelIndex> chosen, const VoxelIndex& start,
                              const SpectrumTensor& truth, const EnergyParams& params,
                              MissionLog& log);

MissionLog presample(const DeployConfig& cfg, const GridSpec& grid, const SpectrumTensor& truth,
                     const EnergyParams& params);

/// Next sampling point: argmax est_poi/E_ji (RoiDriven) or argmax est_poi
/// (RoiOnly). Ties go to the smallest linear index.
VoxelIndex select_next(const VoxelIndex& current, std::span<const double> est_poi,
                       std::span<const VoxelIndex> unsampled, const GridSpec& grid,
                       const EnergyParams& params, SelectionMode mode);

MissionLog run_mission(const DeployConfig& cfg, const GridSpec& grid, const SpectrumTensor& truth,
                       const RoiSet& roi, const PropagationParams& prop, const IdwParams& idw,
                       const EnergyParams& energy, const MissionHooks& hooks = {});

}  // namespace specmap
