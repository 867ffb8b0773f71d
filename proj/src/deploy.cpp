#include "specmap/deploy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "specmap/error.hpp"

namespace specmap {

std::size_t ratio_count(double ratio, std::size_t n) {
  // The slack absorbs binary representation error, e.g. 0.15 * 1000.
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 0.5 + 1e-9));
}

int DeployConfig::steps() const {
  if (strategy == Strategy::Random) return 0;
  return static_cast<int>(std::lround((r - r0) / rp));
}

std::size_t DeployConfig::sample_count(std::size_t n_voxels) const {
  return ratio_count(r, n_voxels);
}

std::size_t DeployConfig::presample_count(std::size_t n_voxels) const {
  return ratio_count(r0, n_voxels);
}

std::size_t DeployConfig::batch_count(std::size_t n_voxels) const {
  return ratio_count(rp, n_voxels);
}

void DeployConfig::validate(const GridSpec& grid) const {
  if (!(r > 0.0 && r <= 1.0)) throw ConfigError("sampling ratio r must lie in (0, 1]");
  if (!grid.contains(start)) throw ConfigError("start voxel " + to_string(start) + " outside grid");
  if (sample_count(grid.size()) < 1) throw ConfigError("r * N rounds to zero samples");
  if (strategy == Strategy::Random) return;

  if (!(r0 > 0.0 && r0 <= r + 1e-12)) throw ConfigError("pre-sampling ratio r0 must lie in (0, r]");
  if (presample_count(grid.size()) < 1) throw ConfigError("r0 * N rounds to zero samples");
  if (r - r0 > 1e-12) {
    if (!(rp > 0.0 && rp <= r - r0 + 1e-12)) throw ConfigError("step ratio rp must lie in (0, r - r0]");
    const double steps_exact = (r - r0) / rp;
    if (std::abs(steps_exact - std::round(steps_exact)) > 1e-9) {
      throw ConfigError("(r - r0) / rp must be an integer number of steps");
    }
    if (batch_count(grid.size()) < 1) throw ConfigError("rp * N rounds to zero samples");
  } else if (!(rp > 0.0)) {
    throw ConfigError("step ratio rp must be positive");
  }
}

std::vector<VoxelIndex> MissionLog::voxels() const {
  std::vector<VoxelIndex> out;
  out.reserve(visits.size());
  for (const auto& v : visits) out.push_back(v.voxel);
  return out;
}

std::size_t MissionLog::step_of(std::size_t i) const {
  const auto it = std::upper_bound(step_boundaries.begin(), step_boundaries.end(), i);
  return it == step_boundaries.begin() ? 0 : static_cast<std::size_t>(it - step_boundaries.begin()) - 1;
}

SpectrumTensor MissionLog::sampled_tensor(const GridSpec& grid) const {
  SpectrumTensor t;
  t.grid = grid;
  t.domain = Domain::Dbm;
  t.values.assign(grid.size(), 0.0);
  t.mask = Mask(grid.size(), 0);
  for (const auto& v : visits) {
    const auto i = grid.linear(v.voxel);
    t.values[i] = v.measured_dbm;
    (*t.mask)[i] = 1;
  }
  return t;
}

namespace {

std::vector<VoxelIndex> random_subset(const GridSpec& grid, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<VoxelIndex> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(grid.voxel(order[k]));
  return out;
}

void record(MissionLog& log, const Leg& leg, double measured_dbm) {
  log.visits.push_back({leg.to, measured_dbm, leg});
  log.cumulative_energy_j += leg.total_j();
}

}  // namespace

VoxelIndex append_greedy_tour(std::vector<VoxelIndex> chosen, const VoxelIndex& start,
                              const SpectrumTensor& truth, const EnergyParams& params,
                              MissionLog& log) {
  const GridSpec& grid = truth.grid;
  std::sort(chosen.begin(), chosen.end(), [&](const VoxelIndex& a, const VoxelIndex& b) {
    return grid.linear(a) < grid.linear(b);
  });
  VoxelIndex current = start;
  while (!chosen.empty()) {
    // Sorted by linear index, so strict < keeps the lowest index on ties.
    std::size_t best = 0;
    Leg best_leg = leg_energy(current, chosen[0], grid, params);
    for (std::size_t k = 1; k < chosen.size(); ++k) {
      Leg leg = leg_energy(current, chosen[k], grid, params);
      if (leg.total_j() < best_leg.total_j()) {
        best = k;
        best_leg = leg;
      }
    }
    record(log, best_leg, measure(truth, best_leg.to));
    current = best_leg.to;
    chosen.erase(chosen.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return current;
}

MissionLog presample(const DeployConfig& cfg, const GridSpec& grid, const SpectrumTensor& truth,
                     const EnergyParams& params) {
  params.validate();
  const std::size_t count = cfg.presample_count(grid.size());
  if (count < 1) throw ConfigError("r0 * N rounds to zero pre-samples");
  if (!grid.contains(cfg.start)) throw ConfigError("start voxel outside grid");
  MissionLog log;
  log.step_boundaries.push_back(0);
  append_greedy_tour(random_subset(grid, count, cfg.seed), cfg.start, truth, params, log);
  return log;
}

VoxelIndex select_next(const VoxelIndex& current, std::span<const double> est_poi,
                       std::span<const VoxelIndex> unsampled, const GridSpec& grid,
                       const EnergyParams& params, SelectionMode mode) {
  if (unsampled.empty()) throw PlannerError("no unsampled voxels left to select");
  if (est_poi.size() != grid.size()) throw PlannerError("estimate does not cover the grid");

  std::size_t best_linear = 0;
  double best_score = -1.0;
  bool have = false;
  for (const auto& v : unsampled) {
    const std::size_t li = grid.linear(v);
    double score = est_poi[li];
    if (mode == SelectionMode::RoiDriven) score /= leg_energy(current, v, grid, params).total_j();
    if (!have || score > best_score || (score == best_score && li < best_linear)) {
      best_score = score;
      best_linear = li;
      have = true;
    }
  }
  return grid.voxel(best_linear);
}

MissionLog run_mission(const DeployConfig& cfg, const GridSpec& grid, const SpectrumTensor& truth,
                       [[maybe_unused]] const RoiSet& roi, const PropagationParams& prop,
                       const IdwParams& idw, const EnergyParams& energy,
                       const MissionHooks& hooks) {
  cfg.validate(grid);
  energy.validate();
  if (!(truth.grid == grid) || !truth.complete()) {
    throw PlannerError("ground truth must be a complete tensor on the mission grid");
  }
  const std::size_t total = cfg.sample_count(grid.size());

  if (cfg.strategy == Strategy::Random) {
    MissionLog log;
    log.step_boundaries.push_back(0);
    append_greedy_tour(random_subset(grid, total, cfg.seed), cfg.start, truth, energy, log);
    return log;
  }

  MissionLog log = presample(cfg, grid, truth, energy);
  VoxelIndex current = log.visits.empty() ? cfg.start : log.visits.back().voxel;
  const auto mode =
      cfg.strategy == Strategy::RoiOnly ? SelectionMode::RoiOnly : SelectionMode::RoiDriven;
  const int steps = cfg.steps();
  const std::size_t batch = cfg.batch_count(grid.size());

  Mask sampled(grid.size(), 0);
  for (const auto& v : log.visits) sampled[grid.linear(v.voxel)] = 1;

  for (int k = 1; k <= steps && log.visits.size() < total; ++k) {
    // The last batch absorbs any rounding mismatch between r·N and r0·N + steps·rp·N.
    const std::size_t want =
        k == steps ? total - log.visits.size() : std::min(batch, total - log.visits.size());
    const std::vector<double> frozen = estimate_field(log.sampled_tensor(grid), prop, idw);
    if (hooks.on_estimate) hooks.on_estimate(static_cast<std::size_t>(k), frozen);

    std::vector<VoxelIndex> unsampled;
    unsampled.reserve(grid.size() - log.visits.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!sampled[i]) unsampled.push_back(grid.voxel(i));
    }

    log.step_boundaries.push_back(log.visits.size());
    for (std::size_t b = 0; b < want; ++b) {
      const VoxelIndex next = select_next(current, frozen, unsampled, grid, energy, mode);
      record(log, leg_energy(current, next, grid, energy), measure(truth, next));
      sampled[grid.linear(next)] = 1;
      unsampled.erase(std::find(unsampled.begin(), unsampled.end(), next));
      current = next;
      if (hooks.on_select) hooks.on_select(static_cast<std::size_t>(k), log.visits.back(), frozen);
    }
  }
  return log;
}

}  // namespace specmap
