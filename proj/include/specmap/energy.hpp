#pragma once

#include <span>
#include <vector>

#include "specmap/grid.hpp"

namespace specmap {

/// Per-meter flight rates and hover cost for a rotor UAV.
struct EnergyParams {
  double e_horizontal_j_per_m = 100.0;
  double e_up_j_per_m = 150.0;
  double e_down_j_per_m = 80.0;
  double hover_power_w = 200.0;
  double hover_time_s = 5.0;
  double speed_mps = 1.0;

  double hover_energy_j() const noexcept { return hover_power_w * hover_time_s; }
  void validate() const;
};

/// One flight from `from` to `to` followed by a hover to sample at `to`.
struct Leg {
  VoxelIndex from;
  VoxelIndex to;
  double distance_m = 0.0;
  double theta_rad = 0.0;
  double route_energy_j = 0.0;
  double hover_energy_j = 0.0;

  double total_j() const noexcept { return route_energy_j + hover_energy_j; }
};

/// Oblique flights blend the vertical and horizontal rates by the elevation
/// angle: route = (1 - cos θ)·E_vertical + cos θ·E_horizontal, with both
/// terms evaluated over the full 3D leg length.
Leg leg_energy(const VoxelIndex& from, const VoxelIndex& to, const GridSpec& grid,
               const EnergyParams& params);

struct TrajectoryEnergy {
  double total_j = 0.0;
  std::vector<Leg> legs;
};

TrajectoryEnergy trajectory_energy(std::span<const VoxelIndex> visits, const VoxelIndex& start,
                                   const GridSpec& grid, const EnergyParams& params);

}  // namespace specmap
