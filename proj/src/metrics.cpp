#include "specmap/metrics.hpp"

#include <cmath>

#include "specmap/error.hpp"

namespace specmap {

void ObjectiveParams::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ConfigError("objective weights must be positive");
}

double w_roi(const SpectrumTensor& recovered, const SpectrumTensor& truth, const RoiSet& roi) {
  if (!recovered.complete() || !truth.complete()) {
    throw MetricError("W_ROI needs complete tensors");
  }
  if (!(recovered.grid == truth.grid) || roi.mask.size() != truth.grid.size()) {
    throw MetricError("W_ROI inputs are on different grids");
  }
  if (roi.n_roi == 0) throw MetricError("ROI set contains no voxels");

  const auto to_mw = [](const SpectrumTensor& t, std::size_t i) {
    return t.domain == Domain::LinearMw ? t.values[i] : dbm_to_mw(t.values[i]);
  };
  double acc = 0.0;
  for (std::size_t i = 0; i < roi.mask.size(); ++i) {
    if (!roi.mask[i]) continue;
    const double ref = to_mw(truth, i);
    if (!(ref > 0.0)) throw MetricError("truth power must be positive on ROI voxels");
    const double rel = std::abs(to_mw(recovered, i) - ref) / ref;
    acc += rel * rel;
  }
  return acc / static_cast<double>(roi.n_roi);
}

double objective(double w, double energy_j, const ObjectiveParams& p, double energy_norm_j) {
  p.validate();
  if (!(energy_norm_j > 0.0)) throw MetricError("energy normalizer must be positive");
  return std::exp(p.alpha * w) * std::exp(p.beta * energy_j / energy_norm_j);
}

double poi_sum(const MissionLog& mission, const GridSpec& grid, std::span<const double> poi_truth) {
  double total = 0.0;
  for (const auto& v : mission.visits) total += poi_truth[grid.linear(v.voxel)];
  return total;
}

}  // namespace specmap
