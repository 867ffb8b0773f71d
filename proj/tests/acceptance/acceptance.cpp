// Acceptance suite: one PASS/FAIL line per criterion on the 10x10x10 case study.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "specmap/harness.hpp"

using namespace specmap;
namespace fs = std::filesystem;

namespace {

constexpr int kSeeds = 20;

using Key = std::tuple<Strategy, Method, double, double, double>;

struct Runs {
  ExperimentConfig cfg = ExperimentConfig::case_study();
  std::map<Key, std::vector<ResultRow>> rows;

  void add(Strategy s, Method m, double r, double r0 = 0.05, double rp = 0.05) {
    rows.try_emplace(Key{s, m, r, r0, rp});
  }

  void run(unsigned jobs) {
    std::vector<std::pair<Key, std::uint64_t>> plan;
    for (auto& [k, v] : rows) {
      v.resize(kSeeds);
      for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) plan.push_back({k, seed});
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    auto worker = [&] {
      for (std::size_t i = next++; i < plan.size(); i = next++) {
        const auto& [k, seed] = plan[i];
        const auto& [s, m, r, r0, rp] = k;
        ResultRow row = run_single(cfg, s, m, r, r0, rp, seed);
        std::lock_guard lock(mu);
        rows[k][seed - 1] = row;
      }
    };
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
  }

  double mean_w(Strategy s, Method m, double r, double r0 = 0.05, double rp = 0.05) const {
    double acc = 0.0;
    for (const auto& row : rows.at(Key{s, m, r, r0, rp})) acc += row.w_roi;
    return acc / kSeeds;
  }
  double mean_e(Strategy s, Method m, double r, double r0 = 0.05, double rp = 0.05) const {
    double acc = 0.0;
    for (const auto& row : rows.at(Key{s, m, r, r0, rp})) acc += row.energy_j;
    return acc / kSeeds;
  }
};

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d  %-34s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Criterion 7 checks, each self-contained. Returns the first broken invariant.
std::string invariant_failures() {
  std::mt19937_64 rng(2024);
  std::vector<std::string> bad;
  auto expect = [&](bool ok, const char* what) {
    if (!ok && std::find(bad.begin(), bad.end(), what) == bad.end()) bad.push_back(what);
  };
  const GridSpec g(7, 6, 5, 10.0);
  auto random_sparse = [&](std::size_t count) {
    SpectrumTensor t{g, std::vector<double>(g.size()), Domain::Dbm, Mask(g.size(), 0)};
    std::uniform_real_distribution<double> u(-90.0, -30.0);
    for (auto& v : t.values) v = u(rng);
    std::vector<std::size_t> idx(g.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < count; ++k) (*t.mask)[idx[k]] = 1;
    return t;
  };

  // IDW weights sum to one and estimates stay in the sample range.
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = random_sparse(15);
    std::vector<Sample> s;
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!t.known(i)) continue;
      s.push_back({g.voxel(i), t.values[i]});
      lo = std::min(lo, t.values[i]);
      hi = std::max(hi, t.values[i]);
    }
    for (const auto& v : g.all_voxels()) {
      const auto w = idw_weights(s, v, g, {});
      double sum = 0.0;
      for (double x : w) sum += x;
      expect(std::abs(sum - 1.0) <= 1e-9, "idw normalization");
    }
    for (double e : idw_estimate(s, g.all_voxels(), g, {})) {
      expect(e >= lo - 1e-12 && e <= hi + 1e-12, "idw convexity");
    }
  }

  const std::vector<Method> methods{Method::TvXY, Method::TvYZ, Method::TvZX, Method::Tv3D, Method::Knn, Method::Idw};
  for (int trial = 0; trial < 3; ++trial) {
    const auto t = random_sparse(40);
    auto shifted = t;
    for (auto& v : shifted.values) v += 12.5;
    for (Method m : methods) {
      const auto a = recover(t, m, {});
      const auto b = recover(shifted, m, {});
      for (const auto& h : a.objective_histories)
        for (std::size_t i = 1; i < h.size(); ++i) expect(h[i] <= h[i - 1], "tv monotone descent");
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (t.known(i)) expect(a.tensor.values[i] == t.values[i], "data fidelity");
        expect(std::abs(b.tensor.values[i] - a.tensor.values[i] - 12.5) <= 1e-6, "shift equivariance");
      }
    }

    // T'(a,b,c) = T(b,c,a): YZ slicing of T' is XY slicing of T.
    const GridSpec gp(g.n3(), g.n1(), g.n2(), g.cell_size_m());
    SpectrumTensor tp{gp, std::vector<double>(gp.size()), Domain::Dbm, Mask(gp.size(), 0)};
    for (std::size_t i = 0; i < gp.size(); ++i) {
      const auto v = gp.voxel(i);
      const std::size_t src = g.linear({v.y, v.z, v.x});
      tp.values[i] = t.values[src];
      (*tp.mask)[i] = (*t.mask)[src];
    }
    const auto xy = tv_smr(t, SliceAxis::XY, TvParams{});
    const auto yz = tv_smr(tp, SliceAxis::YZ, TvParams{});
    for (std::size_t i = 0; i < gp.size(); ++i) {
      const auto v = gp.voxel(i);
      const double ref = xy.tensor.values[g.linear({v.y, v.z, v.x})];
      expect(std::abs(yz.tensor.values[i] - ref) <= 1e-9 * std::max(1.0, std::abs(ref)), "axis permutation");
    }
  }

  // Leg energy at θ = 0 and θ = π/2.
  const EnergyParams ep;
  const Leg flat = leg_energy({1, 1, 1}, {5, 3, 1}, g, ep);
  expect(flat.theta_rad == 0.0 && std::abs(flat.route_energy_j - 100.0 * flat.distance_m) < 1e-9, "leg theta=0");
  const Leg up = leg_energy({2, 2, 1}, {2, 2, 5}, g, ep);
  const Leg down = leg_energy({2, 2, 5}, {2, 2, 1}, g, ep);
  expect(std::abs(up.theta_rad - std::numbers::pi / 2) < 1e-12 && std::abs(up.route_energy_j - 6000.0) < 1e-9 &&
             std::abs(down.route_energy_j - 3200.0) < 1e-9,
         "leg theta=pi/2");

  // select_next against exhaustive scoring.
  std::uniform_real_distribution<double> pv(0.0, 120.0);
  std::uniform_int_distribution<int> nc(1, 50);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> poi(g.size());
    for (auto& v : poi) v = pv(rng);
    std::vector<std::size_t> idx(g.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    const VoxelIndex cur = g.voxel(idx[0]);
    std::vector<VoxelIndex> cand;
    for (int k = 1; k <= nc(rng); ++k) cand.push_back(g.voxel(idx[k]));
    for (auto mode : {SelectionMode::RoiDriven, SelectionMode::RoiOnly}) {
      double best = -INFINITY;
      std::size_t arg = 0;
      for (const auto& c : cand) {
        const std::size_t li = g.linear(c);
        const double sc = mode == SelectionMode::RoiDriven ? poi[li] / leg_energy(cur, c, g, ep).total_j() : poi[li];
        if (sc > best || (sc == best && li < arg)) best = sc, arg = li;
      }
      expect(g.linear(select_next(cur, poi, cand, g, ep, mode)) == arg, "select_next oracle");
    }
  }

  // W_ROI is unchanged when both tensors are scaled.
  for (int trial = 0; trial < 20; ++trial) {
    SpectrumTensor a{g, std::vector<double>(g.size()), Domain::LinearMw, std::nullopt}, b = a;
    std::uniform_real_distribution<double> u(0.01, 5.0);
    for (std::size_t i = 0; i < g.size(); ++i) a.values[i] = u(rng), b.values[i] = u(rng);
    RoiSet roi;
    roi.mask = Mask(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); i += 4) roi.mask[i] = 1, ++roi.n_roi;
    const double k = u(rng);
    auto as = a, bs = b;
    for (auto& v : as.values) v *= k;
    for (auto& v : bs.values) v *= k;
    const double w0 = w_roi(a, b, roi), w1 = w_roi(as, bs, roi);
    expect(std::abs(w0 - w1) <= 1e-12 * std::max(1.0, w0), "w_roi scale invariance");
  }

  // Sampling everything reproduces the truth.
  const auto cfg = ExperimentConfig::case_study();
  for (Method m : methods) {
    expect(run_single(cfg, Strategy::Random, m, 1.0, 0.05, 0.05, 1).w_roi < 1e-20, "full sampling");
  }

  std::string out;
  for (const auto& b : bad) out += (out.empty() ? "" : ", ") + b;
  return out;
}

std::string strip_wall(const fs::path& csv) {
  std::ifstream in(csv, std::ios::binary);
  std::string out, line;
  while (std::getline(in, line)) {
    // wall_ms is the second-to-last column.
    const auto last = line.rfind(',');
    const auto prev = line.rfind(',', last - 1);
    out += line.substr(0, prev) + line.substr(last) + '\n';
  }
  return out;
}

}  // namespace

int main() {
  const unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::printf("acceptance: %d seeds, %u workers\n", kSeeds, jobs);

  Runs runs;
  const std::vector<Method> c1_methods{Method::Tv3D, Method::TvXY, Method::TvYZ, Method::TvZX, Method::Knn};
  for (double r : {0.2, 0.3, 0.4})
    for (Method m : c1_methods) runs.add(Strategy::Random, m, r);
  for (double r0 : {0.05, 0.10, 0.20}) runs.add(Strategy::RoiDriven, Method::Tv3D, 0.35, r0, 0.05);
  runs.add(Strategy::RoiOnly, Method::Tv3D, 0.3);
  runs.add(Strategy::RoiDriven, Method::Tv3D, 0.3);
  for (double r : {0.1, 0.5}) runs.add(Strategy::Random, Method::Tv3D, r);
  runs.run(jobs);

  {
    bool ok = true;
    std::string d;
    for (double r : {0.2, 0.3, 0.4}) {
      const double knn = runs.mean_w(Strategy::Random, Method::Knn, r);
      const double t3 = runs.mean_w(Strategy::Random, Method::Tv3D, r);
      const double xy = runs.mean_w(Strategy::Random, Method::TvXY, r);
      ok = ok && t3 < knn && xy < knn;
      d += fmt("r=%.1f Tv3D=%.4g TvXY=%.4g Knn=%.4g; ", r, t3, xy, knn);
    }
    report(1, "TV beats KNN (Random)", ok, d);
  }
  {
    bool ok = true;
    std::string d;
    for (double r : {0.2, 0.3, 0.4}) {
      const double yz = runs.mean_w(Strategy::Random, Method::TvYZ, r);
      const double zx = runs.mean_w(Strategy::Random, Method::TvZX, r);
      const double xy = runs.mean_w(Strategy::Random, Method::TvXY, r);
      const double rel = std::abs(yz - zx) / std::min(yz, zx);
      ok = ok && rel <= 0.15 && yz > xy && zx > xy;
      d += fmt("r=%.1f YZ=%.4g ZX=%.4g (%.1f%%) XY=%.4g; ", r, yz, zx, 100.0 * rel, xy);
    }
    report(2, "YZ ~ ZX, both worse than XY", ok, d);
  }
  {
    const double a = runs.mean_w(Strategy::RoiDriven, Method::Tv3D, 0.35, 0.05, 0.05);
    const double b = runs.mean_w(Strategy::RoiDriven, Method::Tv3D, 0.35, 0.10, 0.05);
    const double c = runs.mean_w(Strategy::RoiDriven, Method::Tv3D, 0.35, 0.20, 0.05);
    int violations = 0;
    bool small = true;
    for (auto [lo, hi] : {std::pair{a, b}, std::pair{b, c}}) {
      if (hi < lo) {
        ++violations;
        small = small && (lo - hi) / lo <= 0.05;
      }
    }
    report(3, "error grows with pre-sampling", violations <= 1 && small,
           fmt("r0=0.05: %.4g  r0=0.10: %.4g  r0=0.20: %.4g", a, b, c));
  }
  {
    const double only = runs.mean_e(Strategy::RoiOnly, Method::Tv3D, 0.3);
    const double driven = runs.mean_e(Strategy::RoiDriven, Method::Tv3D, 0.3);
    report(4, "ROI-only spends the most energy", only > driven,
           fmt("RoiOnly=%.6g J  RoiDriven=%.6g J", only, driven));
  }
  {
    const double driven = runs.mean_w(Strategy::RoiDriven, Method::Tv3D, 0.3);
    const double rnd = runs.mean_w(Strategy::Random, Method::Tv3D, 0.3);
    report(5, "ROI-driven beats random on ROI", driven < rnd, fmt("RoiDriven=%.4g  Random=%.4g", driven, rnd));
  }
  {
    const double w1 = runs.mean_w(Strategy::Random, Method::Tv3D, 0.1);
    const double w3 = runs.mean_w(Strategy::Random, Method::Tv3D, 0.3);
    const double w5 = runs.mean_w(Strategy::Random, Method::Tv3D, 0.5);
    report(6, "more samples, less error", w5 < w3 && w3 < w1, fmt("r=0.1: %.4g  r=0.3: %.4g  r=0.5: %.4g", w1, w3, w5));
  }
  {
    const std::string broken = invariant_failures();
    report(7, "invariants", broken.empty(), broken.empty() ? "all hold" : "broken: " + broken);
  }
  {
    const auto cfg = load_config(fs::path(SPECMAP_CONFIG_DIR) / "default.json");
    const fs::path base = fs::temp_directory_path() / "specmap_acceptance";
    fs::remove_all(base);
    const auto s1 = run_sweep(cfg, base / "a", jobs);
    const auto s2 = run_sweep(cfg, base / "b", std::max(1u, jobs / 2));
    const bool same = strip_wall(s1.raw_csv) == strip_wall(s2.raw_csv);
    report(8, "deterministic sweep", same && s1.failures == 0,
           fmt("%zu rows, %zu failures, %s", s1.rows, s1.failures, same ? "identical" : "differ"));
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
