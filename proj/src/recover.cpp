#include "specmap/recover.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specmap/error.hpp"

namespace specmap {

void TvParams::validate() const {
  if (!(epsilon > 0.0) || !(step_size > 0.0) || max_iters < 1 || !(tol > 0.0)) {
    throw ConfigError("TV parameters must all be positive");
  }
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::TvXY: return "TvXY";
    case Method::TvYZ: return "TvYZ";
    case Method::TvZX: return "TvZX";
    case Method::Tv3D: return "Tv3D";
    case Method::Knn: return "Knn";
    case Method::Idw: return "Idw";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::TvXY, Method::TvYZ, Method::TvZX, Method::Tv3D, Method::Knn, Method::Idw}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown recovery method '" + std::string(name) + "'");
}

double tv_objective(std::span<const double> u, std::size_t rows, std::size_t cols,
                    double epsilon) {
  const double eps2 = epsilon * epsilon;
  double j = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t p = r * cols + c;
      const double dx = r + 1 < rows ? u[p + cols] - u[p] : 0.0;
      const double dy = c + 1 < cols ? u[p + 1] - u[p] : 0.0;
      j += std::sqrt(dx * dx + dy * dy + eps2);
    }
  }
  return j;
}

namespace {

void tv_gradient(std::span<const double> u, std::size_t rows, std::size_t cols, double epsilon,
                 std::vector<double>& grad) {
  const double eps2 = epsilon * epsilon;
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t p = r * cols + c;
      const double dx = r + 1 < rows ? u[p + cols] - u[p] : 0.0;
      const double dy = c + 1 < cols ? u[p + 1] - u[p] : 0.0;
      const double n = std::sqrt(dx * dx + dy * dy + eps2);
      grad[p] -= (dx + dy) / n;
      if (r + 1 < rows) grad[p + cols] += dx / n;
      if (c + 1 < cols) grad[p + 1] += dy / n;
    }
  }
}

}  // namespace

SliceResult tv_inpaint_slice(const Slice& slice, const TvParams& params) {
  params.validate();
  const std::size_t n = slice.rows * slice.cols;
  if (slice.values.size() != n || slice.known.size() != n) {
    throw RecoveryError("slice buffers do not match its shape");
  }

  SliceResult out;
  out.values = slice.values;
  double lo = 0.0, hi = 0.0, sum = 0.0;
  std::size_t known = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (!slice.known[p]) continue;
    const double v = slice.values[p];
    lo = known == 0 ? v : std::min(lo, v);
    hi = known == 0 ? v : std::max(hi, v);
    sum += v;
    ++known;
  }
  if (known == 0) throw RecoveryError("slice has no known pixels");

  if (known == n) {
    out.objective_history.push_back(tv_objective(out.values, slice.rows, slice.cols, params.epsilon));
    return out;
  }

  // The solver sees values relative to the smallest sample, snapped to a
  // 2^-30 grid. Adding a constant to the data then leaves its input, and so
  // every backtracking decision, unchanged; without this, last-bit noise
  // steers long non-converged runs apart.
  constexpr double kQuantum = 0x1p30;
  std::vector<double> u(n);
  double ksum = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    u[p] = std::round((slice.values[p] - lo) * kQuantum) / kQuantum;
    if (slice.known[p]) ksum += u[p];
  }
  const double top = std::round((hi - lo) * kQuantum) / kQuantum;
  const double mean = ksum / static_cast<double>(known);
  std::vector<std::size_t> unknown;
  for (std::size_t p = 0; p < n; ++p) {
    if (!slice.known[p]) {
      u[p] = mean;
      unknown.push_back(p);
    }
  }

  // Clipping to the data range never increases the objective (it shrinks
  // every difference), so the box projection keeps monotone descent.
  std::vector<double> grad(n), trial = u;
  double j = tv_objective(u, slice.rows, slice.cols, params.epsilon);
  out.objective_history.push_back(j);
  double step = params.step_size;
  const double min_step = params.step_size * 1e-12;

  while (out.iterations < params.max_iters) {
    tv_gradient(u, slice.rows, slice.cols, params.epsilon, grad);
    bool accepted = false;
    double j_new = j;
    while (step >= min_step) {
      for (std::size_t p : unknown) trial[p] = std::clamp(u[p] - step * grad[p], 0.0, top);
      j_new = tv_objective(trial, slice.rows, slice.cols, params.epsilon);
      if (j_new <= j) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    for (std::size_t p : unknown) u[p] = trial[p];
    ++out.iterations;
    out.objective_history.push_back(j_new);
    const double rel = (j - j_new) / std::max(j, 1e-300);
    j = j_new;
    if (rel < params.tol) break;
    step = std::min(2.0 * step, params.step_size);
  }
  for (std::size_t p : unknown) out.values[p] = std::clamp(lo + u[p], lo, hi);
  return out;
}

std::size_t slice_count(const GridSpec& grid, SliceAxis axis) {
  switch (axis) {
    case SliceAxis::XY: return static_cast<std::size_t>(grid.n3());
    case SliceAxis::YZ: return static_cast<std::size_t>(grid.n1());
    case SliceAxis::ZX: return static_cast<std::size_t>(grid.n2());
  }
  return 0;
}

namespace {

std::pair<std::size_t, std::size_t> slice_shape(const GridSpec& grid, SliceAxis axis) {
  const auto n1 = static_cast<std::size_t>(grid.n1());
  const auto n2 = static_cast<std::size_t>(grid.n2());
  const auto n3 = static_cast<std::size_t>(grid.n3());
  switch (axis) {
    case SliceAxis::XY: return {n1, n2};
    case SliceAxis::YZ: return {n2, n3};
    case SliceAxis::ZX: return {n3, n1};
  }
  return {0, 0};
}

Method axis_method(SliceAxis axis) {
  switch (axis) {
    case SliceAxis::XY: return Method::TvXY;
    case SliceAxis::YZ: return Method::TvYZ;
    case SliceAxis::ZX: return Method::TvZX;
  }
  return Method::TvXY;
}

SpectrumTensor require_sparse_dbm(const SpectrumTensor& sampled) {
  SpectrumTensor t = sampled.in_domain(Domain::Dbm);
  if (!t.mask) t.mask = Mask(t.grid.size(), 1);
  if (t.values.size() != t.grid.size() || t.mask->size() != t.grid.size()) {
    throw RecoveryError("sampled tensor does not match its grid");
  }
  if (t.known_count() == 0) throw RecoveryError("sampled tensor has no measurements");
  return t;
}

std::vector<Sample> collect_samples(const SpectrumTensor& t) {
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    if (t.known(i)) samples.push_back({t.grid.voxel(i), t.values[i]});
  }
  return samples;
}

RecoveryResult make_result(const SpectrumTensor& sampled, Method method) {
  RecoveryResult res;
  res.method = method;
  res.tensor.grid = sampled.grid;
  res.tensor.domain = Domain::Dbm;
  res.tensor.values = sampled.values;
  return res;
}

}  // namespace

VoxelIndex slice_voxel(SliceAxis axis, std::size_t k, std::size_t row, std::size_t col) {
  const int a = static_cast<int>(k) + 1;
  const int r = static_cast<int>(row) + 1;
  const int c = static_cast<int>(col) + 1;
  switch (axis) {
    case SliceAxis::XY: return {r, c, a};
    case SliceAxis::YZ: return {a, r, c};
    case SliceAxis::ZX: return {c, a, r};
  }
  return {};
}

RecoveryResult tv_smr(const SpectrumTensor& sampled, SliceAxis axis, const RecoveryOptions& opts) {
  opts.tv.validate();
  const SpectrumTensor t = require_sparse_dbm(sampled);
  const GridSpec& grid = t.grid;
  RecoveryResult res = make_result(t, axis_method(axis));
  const auto [rows, cols] = slice_shape(grid, axis);

  std::vector<double> prefill;  // global IDW estimate, built on first empty slice
  for (std::size_t k = 0; k < slice_count(grid, axis); ++k) {
    Slice s{rows, cols, std::vector<double>(rows * cols), Mask(rows * cols, 0)};
    std::vector<std::size_t> linear(rows * cols);
    std::size_t known = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t li = grid.linear(slice_voxel(axis, k, r, c));
        const std::size_t p = r * cols + c;
        linear[p] = li;
        s.values[p] = t.values[li];
        s.known[p] = t.known(li) ? 1 : 0;
        known += s.known[p];
      }
    }
    if (known == 0) {
      if (prefill.empty()) {
        const auto samples = collect_samples(t);
        prefill = idw_estimate(samples, grid.all_voxels(), grid, opts.idw);
      }
      for (std::size_t p = 0; p < s.values.size(); ++p) {
        s.values[p] = prefill[linear[p]];
        s.known[p] = 1;
      }
    }
    SliceResult sr = tv_inpaint_slice(s, opts.tv);
    for (std::size_t p = 0; p < sr.values.size(); ++p) res.tensor.values[linear[p]] = sr.values[p];
    res.iterations_per_slice.push_back(sr.iterations);
    res.final_objectives.push_back(sr.objective_history.back());
    res.objective_histories.push_back(std::move(sr.objective_history));
  }
  return res;
}

RecoveryResult tv_smr(const SpectrumTensor& sampled, SliceAxis axis, const TvParams& params) {
  RecoveryOptions opts;
  opts.tv = params;
  return tv_smr(sampled, axis, opts);
}

RecoveryResult tv3d_smr(const SpectrumTensor& sampled, const RecoveryOptions& opts) {
  const SpectrumTensor t = require_sparse_dbm(sampled);
  RecoveryResult res = make_result(t, Method::Tv3D);
  std::fill(res.tensor.values.begin(), res.tensor.values.end(), 0.0);
  for (SliceAxis axis : {SliceAxis::XY, SliceAxis::YZ, SliceAxis::ZX}) {
    RecoveryResult part = tv_smr(t, axis, opts);
    for (std::size_t i = 0; i < res.tensor.values.size(); ++i) {
      res.tensor.values[i] += part.tensor.values[i];
    }
    auto append = [](auto& dst, auto& src) {
      dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
    };
    append(res.iterations_per_slice, part.iterations_per_slice);
    append(res.final_objectives, part.final_objectives);
    append(res.objective_histories, part.objective_histories);
  }
  for (std::size_t i = 0; i < res.tensor.values.size(); ++i) {
    res.tensor.values[i] = t.known(i) ? t.values[i] : res.tensor.values[i] / 3.0;
  }
  return res;
}

RecoveryResult tv3d_smr(const SpectrumTensor& sampled, const TvParams& params) {
  RecoveryOptions opts;
  opts.tv = params;
  return tv3d_smr(sampled, opts);
}

RecoveryResult knn_recover(const SpectrumTensor& sampled, int k) {
  if (k < 1) throw ConfigError("KNN k must be positive");
  const SpectrumTensor t = require_sparse_dbm(sampled);
  const GridSpec& grid = t.grid;
  RecoveryResult res = make_result(t, Method::Knn);

  struct Known {
    std::size_t linear;
    VoxelIndex v;
    double value;
  };
  std::vector<Known> known;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (t.known(i)) known.push_back({i, grid.voxel(i), t.values[i]});
  }
  const std::size_t take = std::min(known.size(), static_cast<std::size_t>(k));

  // Cells are cubic, so squared index offsets order neighbors exactly.
  std::vector<std::pair<long, std::size_t>> order(known.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (t.known(i)) continue;
    const VoxelIndex q = grid.voxel(i);
    for (std::size_t j = 0; j < known.size(); ++j) {
      const long dx = known[j].v.x - q.x, dy = known[j].v.y - q.y, dz = known[j].v.z - q.z;
      order[j] = {dx * dx + dy * dy + dz * dz, j};
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end());
    double sum = 0.0;
    for (std::size_t m = 0; m < take; ++m) sum += known[order[m].second].value;
    res.tensor.values[i] = sum / static_cast<double>(take);
  }
  return res;
}

RecoveryResult idw_recover(const SpectrumTensor& sampled, const IdwParams& params) {
  const SpectrumTensor t = require_sparse_dbm(sampled);
  const GridSpec& grid = t.grid;
  RecoveryResult res = make_result(t, Method::Idw);
  std::vector<VoxelIndex> targets;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!t.known(i)) targets.push_back(grid.voxel(i));
  }
  if (targets.empty()) return res;
  const auto est = idw_estimate(collect_samples(t), targets, grid, params);
  for (std::size_t m = 0; m < targets.size(); ++m) res.tensor.values[grid.linear(targets[m])] = est[m];
  return res;
}

RecoveryResult recover(const SpectrumTensor& sampled, Method method, const RecoveryOptions& opts) {
  switch (method) {
    case Method::TvXY: return tv_smr(sampled, SliceAxis::XY, opts);
    case Method::TvYZ: return tv_smr(sampled, SliceAxis::YZ, opts);
    case Method::TvZX: return tv_smr(sampled, SliceAxis::ZX, opts);
    case Method::Tv3D: return tv3d_smr(sampled, opts);
    case Method::Knn: return knn_recover(sampled, opts.knn_k);
    case Method::Idw: return idw_recover(sampled, opts.idw);
  }
  throw ConfigError("unsupported recovery method");
}

}  // namespace specmap
