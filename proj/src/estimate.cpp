#include "specmap/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "specmap/error.hpp"

namespace specmap {

void IdwParams::validate() const {
  if (!(power > 0.0)) throw ConfigError("IDW power must be positive");
  if (!(epsilon_m > 0.0)) throw ConfigError("IDW epsilon must be positive");
}

namespace {

double inverse_distance(const Vec3& a, const Vec3& b, const IdwParams& params) {
  double d = distance(a, b);
  if (d <= 0.0) d = params.epsilon_m;
  return params.power == 2.0 ? 1.0 / (d * d) : std::pow(d, -params.power);
}

}  // namespace

std::vector<double> idw_weights(std::span<const Sample> samples, const VoxelIndex& target,
                                const GridSpec& grid, const IdwParams& params) {
  params.validate();
  if (samples.empty()) throw EstimationError("IDW needs at least one sample");
  const Vec3 t = grid.center(target);
  std::vector<double> w(samples.size());
  double total = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    w[j] = inverse_distance(t, grid.center(samples[j].voxel), params);
    total += w[j];
  }
  for (auto& x : w) x /= total;
  return w;
}

std::vector<double> idw_estimate(std::span<const Sample> samples,
                                 std::span<const VoxelIndex> targets, const GridSpec& grid,
                                 const IdwParams& params) {
  params.validate();
  if (samples.empty()) throw EstimationError("IDW needs at least one sample");

  struct Point {
    std::size_t linear;
    Vec3 center;
    double value;
  };
  std::vector<Point> points;
  points.reserve(samples.size());
  for (const auto& s : samples) points.push_back({grid.linear(s.voxel), grid.center(s.voxel), s.value});
  std::sort(points.begin(), points.end(),
            [](const Point& a, const Point& b) { return a.linear < b.linear; });

  std::vector<double> out;
  out.reserve(targets.size());
  for (const auto& target : targets) {
    const Vec3 t = grid.center(target);
    double num = 0.0;
    double den = 0.0;
    for (const auto& p : points) {
      const double w = inverse_distance(t, p.center, params);
      num += w * p.value;
      den += w;
    }
    out.push_back(num / den);
  }
  return out;
}

std::vector<double> estimate_field(const SpectrumTensor& sampled, const PropagationParams& prop,
                                   const IdwParams& params) {
  const GridSpec& grid = sampled.grid;
  std::vector<Sample> samples;
  std::vector<VoxelIndex> targets;
  std::vector<double> field(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const VoxelIndex v = grid.voxel(i);
    if (sampled.known(i)) {
      const double dbm =
          sampled.domain == Domain::Dbm ? sampled.values[i] : mw_to_dbm(sampled.values[i]);
      field[i] = poi_from_dbm(dbm, prop);
      samples.push_back({v, field[i]});
    } else {
      targets.push_back(v);
    }
  }
  if (samples.empty()) throw EstimationError("sampled tensor has no measured voxels");
  if (targets.empty()) return field;

  const auto est = idw_estimate(samples, targets, grid, params);
  for (std::size_t k = 0; k < targets.size(); ++k) field[grid.linear(targets[k])] = est[k];
  return field;
}

}  // namespace specmap
