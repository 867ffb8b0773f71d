#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "specmap/estimate.hpp"
#include "specmap/scene.hpp"

namespace specmap {

/// Knobs of the smoothed-TV gradient-descent inpainter.
struct TvParams {
  double epsilon = 1e-3;
  // Upper bound on the descent step; backtracking halves it when a step
  // would increase the objective.
  double step_size = 0.2;
  int max_iters = 2000;
  double tol = 1e-6;

  void validate() const;
};

enum class Method { TvXY, TvYZ, TvZX, Tv3D, Knn, Idw };
enum class SliceAxis { XY, YZ, ZX };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Row-major M×K image with a known-pixel mask.
struct Slice {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  Mask known;
};

struct SliceResult {
  std::vector<double> values;
  int iterations = 0;
  // Objective before the first update followed by one entry per accepted step.
  std::vector<double> objective_history;
};

/// J(U) = Σ sqrt((D_x U)² + (D_y U)² + ε²) with forward differences and
/// replicate boundary (the difference leaving the image is zero).
double tv_objective(std::span<const double> values, std::size_t rows, std::size_t cols,
                    double epsilon);

/// Minimizes J over the unknown pixels with known pixels held fixed.
SliceResult tv_inpaint_slice(const Slice& slice, const TvParams& params);

struct RecoveryResult {
  SpectrumTensor tensor;  // complete, dBm
  Method method = Method::Tv3D;
  std::vector<int> iterations_per_slice;
  std::vector<double> final_objectives;
  std::vector<std::vector<double>> objective_histories;
};

struct RecoveryOptions {
  TvParams tv;
  int knn_k = 5;
  // Used for the IDW method and to pre-fill slices that carry no samples.
  IdwParams idw;
};

/// Number of slices and the voxel behind pixel (row, col) of slice `k` (0-based).
std::size_t slice_count(const GridSpec& grid, SliceAxis axis);
VoxelIndex slice_voxel(SliceAxis axis, std::size_t k, std::size_t row, std::size_t col);

RecoveryResult tv_smr(const SpectrumTensor& sampled, SliceAxis axis, const RecoveryOptions& opts);
RecoveryResult tv_smr(const SpectrumTensor& sampled, SliceAxis axis, const TvParams& params);

/// Elementwise mean of the XY, YZ and ZX recoveries with samples re-imposed.
RecoveryResult tv3d_smr(const SpectrumTensor& sampled, const RecoveryOptions& opts);
RecoveryResult tv3d_smr(const SpectrumTensor& sampled, const TvParams& params);

RecoveryResult knn_recover(const SpectrumTensor& sampled, int k = 5);
RecoveryResult idw_recover(const SpectrumTensor& sampled, const IdwParams& params = {});

RecoveryResult recover(const SpectrumTensor& sampled, Method method, const RecoveryOptions& opts);

}  // namespace specmap
