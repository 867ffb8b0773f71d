#pragma once

#include <span>
#include <vector>

#include "specmap/grid.hpp"
#include "specmap/scene.hpp"

namespace specmap {

struct IdwParams {
  double power = 2.0;
  // Substituted for a zero sample-to-target distance.
  double epsilon_m = 1e-9;

  void validate() const;
};

struct Sample {
  VoxelIndex voxel;
  double value = 0.0;
};

/// Normalized inverse-distance weights of every sample for one target, in the
/// order the samples were given.
std::vector<double> idw_weights(std::span<const Sample> samples, const VoxelIndex& target,
                                const GridSpec& grid, const IdwParams& params);

/// Global inverse-distance-weighted interpolation. Samples are accumulated in
/// linear-index order, so the result does not depend on the sample order.
std::vector<double> idw_estimate(std::span<const Sample> samples,
                                 std::span<const VoxelIndex> targets, const GridSpec& grid,
                                 const IdwParams& params);

/// Estimated POI on the whole grid. Sampled voxels keep the POI of their
/// measurement; the rest are interpolated.
std::vector<double> estimate_field(const SpectrumTensor& sampled, const PropagationParams& prop,
                                   const IdwParams& params);

}  // namespace specmap
