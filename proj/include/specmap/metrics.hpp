#pragma once

#include <span>

#include "specmap/deploy.hpp"
#include "specmap/scene.hpp"

namespace specmap {

enum class Correction { Exp };

/// Weights of the composite objective; both correction functions are e^x.
struct ObjectiveParams {
  double alpha = 1.0;
  double beta = 1.0;
  Correction correction = Correction::Exp;

  void validate() const;
};

struct ScoreCard {
  double w_roi = 0.0;
  double energy_j = 0.0;
  double objective = 1.0;
  double r = 0.0;
  double poi_sum = 0.0;
};

/// Relative mean-square error over ROI voxels, evaluated in linear mW.
double w_roi(const SpectrumTensor& recovered, const SpectrumTensor& truth, const RoiSet& roi);

/// exp(α·w) · exp(β·energy_j / energy_norm_j). The normalizer keeps the
/// energy term O(1); it defaults to hover energy × sample count.
double objective(double w, double energy_j, const ObjectiveParams& p, double energy_norm_j);

double poi_sum(const MissionLog& mission, const GridSpec& grid, std::span<const double> poi_truth);

}  // namespace specmap
