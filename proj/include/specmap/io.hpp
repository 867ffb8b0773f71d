#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specmap/deploy.hpp"
#include "specmap/recover.hpp"
#include "specmap/scene.hpp"

namespace specmap::io {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Tensor CSV: header `x,y,z,value_dbm`, 1-based indices, z slowest and x
// fastest. Sparse tensors emit only their known voxels.
void write_tensor_csv(std::ostream& out, const SpectrumTensor& tensor);
void write_tensor_csv(const std::filesystem::path& path, const SpectrumTensor& tensor);

/// Reads a tensor in dBm. Without `grid` the dimensions are the largest
/// indices seen and the cell size is `cell_size_m`. Missing voxels become
/// unknown entries of a sparse tensor.
SpectrumTensor read_tensor_csv(std::istream& in, std::optional<GridSpec> grid = std::nullopt,
                               double cell_size_m = 10.0);
SpectrumTensor read_tensor_csv(const std::filesystem::path& path,
                               std::optional<GridSpec> grid = std::nullopt,
                               double cell_size_m = 10.0);

/// ROI mask as `x,y,z,in_roi` rows over the whole grid.
void write_mask_csv(const std::filesystem::path& path, const GridSpec& grid, const Mask& mask);

// Mission CSV: `order,x,y,z,measured_dbm,leg_energy_j,cumulative_energy_j,step`.
struct MissionRow {
  std::size_t order = 0;
  VoxelIndex voxel;
  double measured_dbm = 0.0;
  double leg_energy_j = 0.0;
  double cumulative_energy_j = 0.0;
  std::size_t step = 0;
};

void write_mission_csv(std::ostream& out, const MissionLog& log);
void write_mission_csv(const std::filesystem::path& path, const MissionLog& log);
std::vector<MissionRow> read_mission_csv(std::istream& in);
std::vector<MissionRow> read_mission_csv(const std::filesystem::path& path);

/// Recovered tensor CSV plus a JSON sidecar `{method, iterations, objectives}`
/// written next to it with a `.json` extension.
void write_recovery(const std::filesystem::path& csv_path, const RecoveryResult& result);

}  // namespace specmap::io
