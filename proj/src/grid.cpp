#include "specmap/grid.hpp"

#include <cmath>

#include "specmap/error.hpp"

namespace specmap {

std::string to_string(const VoxelIndex& v) {
  return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + "," + std::to_string(v.z) + ")";
}

GridSpec::GridSpec(int n1, int n2, int n3, double cell_size_m, Vec3 origin_m)
    : n1_(n1), n2_(n2), n3_(n3), cell_size_m_(cell_size_m), origin_m_(origin_m) {
  if (n1 < 1 || n2 < 1 || n3 < 1) {
    throw ConfigError("grid dimensions must be positive, got " + std::to_string(n1) + "x" +
                      std::to_string(n2) + "x" + std::to_string(n3));
  }
  if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m)) {
    throw ConfigError("grid cell size must be positive");
  }
}

bool GridSpec::contains(const VoxelIndex& v) const noexcept {
  return v.x >= 1 && v.x <= n1_ && v.y >= 1 && v.y <= n2_ && v.z >= 1 && v.z <= n3_;
}

std::size_t GridSpec::linear(const VoxelIndex& v) const {
  if (!contains(v)) {
    throw BoundsError("voxel " + to_string(v) + " outside " + std::to_string(n1_) + "x" +
                      std::to_string(n2_) + "x" + std::to_string(n3_) + " grid");
  }
  return static_cast<std::size_t>(v.x - 1) +
         static_cast<std::size_t>(n1_) *
             (static_cast<std::size_t>(v.y - 1) +
              static_cast<std::size_t>(n2_) * static_cast<std::size_t>(v.z - 1));
}

VoxelIndex GridSpec::voxel(std::size_t linear_index) const {
  if (linear_index >= size()) {
    throw BoundsError("linear index " + std::to_string(linear_index) + " outside grid");
  }
  const auto a = static_cast<std::size_t>(n1_);
  const auto b = static_cast<std::size_t>(n2_);
  return VoxelIndex{static_cast<int>(linear_index % a) + 1,
                    static_cast<int>((linear_index / a) % b) + 1,
                    static_cast<int>(linear_index / (a * b)) + 1};
}

Vec3 GridSpec::center(const VoxelIndex& v) const {
  if (!contains(v)) {
    throw BoundsError("voxel " + to_string(v) + " outside grid");
  }
  return {origin_m_[0] + (v.x - 0.5) * cell_size_m_, origin_m_[1] + (v.y - 0.5) * cell_size_m_,
          origin_m_[2] + (v.z - 0.5) * cell_size_m_};
}

double GridSpec::distance(const VoxelIndex& a, const VoxelIndex& b) const {
  return specmap::distance(center(a), center(b));
}

std::vector<VoxelIndex> GridSpec::all_voxels() const {
  std::vector<VoxelIndex> out;
  out.reserve(size());
  for (int z = 1; z <= n3_; ++z)
    for (int y = 1; y <= n2_; ++y)
      for (int x = 1; x <= n1_; ++x) out.push_back({x, y, z});
  return out;
}

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

double distance(const Vec3& a, const Vec3& b) {
  return norm(Vec3{a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

}  // namespace specmap
