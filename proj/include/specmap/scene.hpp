#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "specmap/grid.hpp"

namespace specmap {

struct Source {
  Vec3 position_m{0.0, 0.0, 0.0};
  double power_mw = 30.0;
};

/// Log-distance path loss plus an additive Gaussian noise realization.
struct PropagationParams {
  double path_loss_exponent = 2.0;
  double reference_distance_m = 1.0;
  double noise_density_dbm_per_hz = -174.0;
  double bandwidth_hz = 200e3;
  // Gaussian sigma as a fraction of the noise-floor power.
  double noise_sigma_scale = 1.0;
  std::uint64_t seed = 0;

  double noise_floor_mw() const;
  void validate() const;
};

enum class Domain { LinearMw, Dbm };

/// Per-voxel power values over a grid. A present mask marks a sparse
/// (sampled) tensor whose values are meaningful only where the mask is set.
struct SpectrumTensor {
  GridSpec grid;
  std::vector<double> values;
  Domain domain = Domain::LinearMw;
  std::optional<Mask> mask;

  bool complete() const noexcept { return !mask.has_value(); }
  bool known(std::size_t linear_index) const noexcept {
    return !mask || (*mask)[linear_index] != 0;
  }
  std::size_t known_count() const noexcept;
  double at(const VoxelIndex& v) const { return values[grid.linear(v)]; }

  /// Copy converted to the requested domain; the mask is preserved.
  SpectrumTensor in_domain(Domain target) const;
};

struct Sphere {
  Vec3 center_m{0.0, 0.0, 0.0};
  double radius_m = 1.0;
};

struct RoiSet {
  std::vector<Sphere> spheres;
  Mask mask;
  std::size_t n_roi = 0;
};

double mw_to_dbm(double mw);
double dbm_to_mw(double dbm);

/// Received power (mW) from one source at a point, without noise.
double received_power_mw(const Source& source, const Vec3& point, const PropagationParams& prop);

SpectrumTensor build_truth(const GridSpec& grid, std::span<const Source> sources,
                           const PropagationParams& prop);

RoiSet build_roi_mask(const GridSpec& grid, std::span<const Sphere> spheres);

/// dB excess of a received power over the noise floor, clamped at zero.
double poi_from_dbm(double dbm, const PropagationParams& prop);

std::vector<double> poi_truth(const SpectrumTensor& truth, const PropagationParams& prop);

/// Reading taken by the hovering UAV, in dBm. Noise is already part of the truth.
double measure(const SpectrumTensor& truth, const VoxelIndex& v);

}  // namespace specmap
