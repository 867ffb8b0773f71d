#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace specmap {

using Vec3 = std::array<double, 3>;

/// Per-voxel boolean flags stored as bytes so they can be viewed through spans.
using Mask = std::vector<std::uint8_t>;

/// 1-based voxel coordinate.
struct VoxelIndex {
  int x = 1;
  int y = 1;
  int z = 1;

  auto operator<=>(const VoxelIndex&) const = default;
};

std::string to_string(const VoxelIndex& v);

/// Voxelization of an axis-aligned block. Linear indices are row-major with
/// x fastest and z slowest, matching the tensor CSV row order.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(int n1, int n2, int n3, double cell_size_m, Vec3 origin_m = {0.0, 0.0, 0.0});

  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  int n3() const noexcept { return n3_; }
  double cell_size_m() const noexcept { return cell_size_m_; }
  const Vec3& origin_m() const noexcept { return origin_m_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n1_) * static_cast<std::size_t>(n2_) *
           static_cast<std::size_t>(n3_);
  }

  bool contains(const VoxelIndex& v) const noexcept;

  /// Throws BoundsError for indices outside the grid.
  std::size_t linear(const VoxelIndex& v) const;
  VoxelIndex voxel(std::size_t linear_index) const;

  Vec3 center(const VoxelIndex& v) const;
  double distance(const VoxelIndex& a, const VoxelIndex& b) const;

  std::vector<VoxelIndex> all_voxels() const;

  bool operator==(const GridSpec&) const = default;

 private:
  int n1_ = 1;
  int n2_ = 1;
  int n3_ = 1;
  double cell_size_m_ = 1.0;
  Vec3 origin_m_{0.0, 0.0, 0.0};
};

double norm(const Vec3& v);
double distance(const Vec3& a, const Vec3& b);

}  // namespace specmap
