#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "specmap/grid.hpp"
#include "specmap/scene.hpp"

namespace specmap::test {

/// Distinct random voxels, in draw order.
inline std::vector<VoxelIndex> random_voxels(const GridSpec& g, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(g.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<VoxelIndex> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(g.voxel(idx[k]));
  return out;
}

/// Sparse dBm tensor with the given voxels known.
inline SpectrumTensor sparse_from(const SpectrumTensor& full_dbm, const std::vector<VoxelIndex>& known) {
  SpectrumTensor t = full_dbm;
  t.mask = Mask(t.grid.size(), 0);
  for (const auto& v : known) (*t.mask)[t.grid.linear(v)] = 1;
  return t;
}

/// Smooth synthetic dBm field used by the recovery tests.
inline SpectrumTensor smooth_field(const GridSpec& g) {
  SpectrumTensor t;
  t.grid = g;
  t.domain = Domain::Dbm;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto v = g.voxel(i);
    t.values.push_back(-20.0 - 1.5 * v.x + 0.7 * v.y * v.y / 4.0 - 2.0 * std::sqrt(double(v.z)));
  }
  return t;
}

}  // namespace specmap::test
