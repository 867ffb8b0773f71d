#include "specmap/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "specmap/error.hpp"

namespace specmap {

double PropagationParams::noise_floor_mw() const {
  return dbm_to_mw(noise_density_dbm_per_hz + 10.0 * std::log10(bandwidth_hz));
}

void PropagationParams::validate() const {
  if (!(path_loss_exponent >= 1.0)) throw ConfigError("path loss exponent must be >= 1");
  if (!(reference_distance_m > 0.0)) throw ConfigError("reference distance must be positive");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth must be positive");
  if (!(noise_sigma_scale >= 0.0)) throw ConfigError("noise sigma scale must be nonnegative");
  if (!std::isfinite(noise_density_dbm_per_hz) || !(noise_floor_mw() > 0.0)) {
    throw ConfigError("noise floor must be a positive finite power");
  }
}

std::size_t SpectrumTensor::known_count() const noexcept {
  if (!mask) return values.size();
  return static_cast<std::size_t>(std::count_if(mask->begin(), mask->end(),
                                                [](std::uint8_t m) { return m != 0; }));
}

SpectrumTensor SpectrumTensor::in_domain(Domain target) const {
  SpectrumTensor out = *this;
  if (target == domain) return out;
  out.domain = target;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!known(i)) continue;
    out.values[i] = target == Domain::Dbm ? mw_to_dbm(values[i]) : dbm_to_mw(values[i]);
  }
  return out;
}

double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double received_power_mw(const Source& source, const Vec3& point, const PropagationParams& prop) {
  const double d0 = prop.reference_distance_m;
  const double d = std::max(distance(point, source.position_m), d0);
  return source.power_mw * std::pow(d0 / d, prop.path_loss_exponent);
}

SpectrumTensor build_truth(const GridSpec& grid, std::span<const Source> sources,
                           const PropagationParams& prop) {
  prop.validate();
  if (sources.empty()) throw ConfigError("at least one source is required");
  for (const auto& s : sources) {
    if (!(s.power_mw > 0.0)) throw ConfigError("source power must be positive");
  }

  const double floor_mw = prop.noise_floor_mw();
  const double sigma = prop.noise_sigma_scale * floor_mw;
  std::mt19937_64 rng(prop.seed);
  std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);

  SpectrumTensor out;
  out.grid = grid;
  out.domain = Domain::LinearMw;
  out.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 c = grid.center(grid.voxel(i));
    double p = floor_mw;
    for (const auto& s : sources) p += received_power_mw(s, c, prop);
    if (sigma > 0.0) p += noise(rng);
    out.values[i] = std::max(p, floor_mw / 2.0);
  }
  return out;
}

RoiSet build_roi_mask(const GridSpec& grid, std::span<const Sphere> spheres) {
  for (const auto& s : spheres) {
    if (!(s.radius_m > 0.0)) throw ConfigError("ROI radius must be positive");
  }
  RoiSet roi;
  roi.spheres.assign(spheres.begin(), spheres.end());
  roi.mask.assign(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 c = grid.center(grid.voxel(i));
    for (const auto& s : spheres) {
      if (distance(c, s.center_m) <= s.radius_m) {
        roi.mask[i] = 1;
        ++roi.n_roi;
        break;
      }
    }
  }
  return roi;
}

double poi_from_dbm(double dbm, const PropagationParams& prop) {
  return std::max(0.0, dbm - mw_to_dbm(prop.noise_floor_mw()));
}

std::vector<double> poi_truth(const SpectrumTensor& truth, const PropagationParams& prop) {
  if (!truth.complete()) throw ConfigError("POI ground truth needs a complete tensor");
  std::vector<double> poi(truth.values.size());
  for (std::size_t i = 0; i < poi.size(); ++i) {
    const double dbm =
        truth.domain == Domain::LinearMw ? mw_to_dbm(truth.values[i]) : truth.values[i];
    poi[i] = poi_from_dbm(dbm, prop);
  }
  return poi;
}

double measure(const SpectrumTensor& truth, const VoxelIndex& v) {
  const double value = truth.values[truth.grid.linear(v)];
  return truth.domain == Domain::LinearMw ? mw_to_dbm(value) : value;
}

}  // namespace specmap
