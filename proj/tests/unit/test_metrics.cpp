#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "specmap/error.hpp"
#include "specmap/io.hpp"
#include "specmap/metrics.hpp"

using namespace specmap;

namespace {

RoiSet roi_of(const GridSpec& g, std::initializer_list<std::size_t> idx) {
  RoiSet r;
  r.mask = Mask(g.size(), 0);
  for (auto i : idx) r.mask[i] = 1;
  r.n_roi = idx.size();
  return r;
}

}  // namespace

TEST_CASE("W_ROI examples") {
  const GridSpec g(4, 1, 1, 1.0);
  const SpectrumTensor truth{g, {1.0, 2.0, 4.0, 8.0}, Domain::LinearMw, std::nullopt};
  const RoiSet roi = roi_of(g, {1, 2});
  CHECK(w_roi(truth, truth, roi) == 0.0);

  // Relative errors 0.5 and 0 on the ROI, the rest is ignored.
  SpectrumTensor rec{g, {9.0, 3.0, 4.0, 0.5}, Domain::LinearMw, std::nullopt};
  CHECK(w_roi(rec, truth, roi) == doctest::Approx(0.125));

  // A dBm tensor is compared in linear power.
  SpectrumTensor rec_dbm = rec.in_domain(Domain::Dbm);
  CHECK(w_roi(rec_dbm, truth, roi) == doctest::Approx(0.125).epsilon(1e-12));

  CHECK_THROWS_AS(w_roi(rec, truth, roi_of(g, {})), MetricError);
  rec.mask = Mask{1, 0, 1, 1};
  CHECK_THROWS_AS(w_roi(rec, truth, roi), MetricError);
}

TEST_CASE("W_ROI is invariant to a common scale") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  const GridSpec g(5, 5, 1, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    SpectrumTensor a{g, std::vector<double>(25), Domain::LinearMw, std::nullopt}, b = a;
    for (std::size_t i = 0; i < 25; ++i) a.values[i] = u(rng), b.values[i] = u(rng);
    RoiSet roi;
    roi.mask = Mask(25, 0);
    for (std::size_t i = 0; i < 25; i += 3) roi.mask[i] = 1, ++roi.n_roi;
    const double k = u(rng);
    auto as = a, bs = b;
    for (auto& v : as.values) v *= k;
    for (auto& v : bs.values) v *= k;
    CHECK(w_roi(as, bs, roi) == doctest::Approx(w_roi(a, b, roi)).epsilon(1e-12));
    CHECK(w_roi(a, b, roi) >= 0.0);
  }
}

TEST_CASE("composite objective examples") {
  CHECK(objective(0.0, 0.0, {}, 1.0) == 1.0);
  CHECK(objective(0.1, 2.0, {}, 1.0) == doctest::Approx(8.16616991256765));
  const ObjectiveParams twice{2.0, 1.0};
  CHECK(objective(0.3, 0.0, twice, 1.0) == doctest::Approx(std::pow(objective(0.3, 0.0, {}, 1.0), 2)));
  CHECK_THROWS_AS(objective(0.1, 1.0, {}, 0.0), MetricError);
  CHECK_THROWS_AS(objective(0.1, 1.0, ObjectiveParams{0.0, 1.0}, 1.0), ConfigError);
}

TEST_CASE("objective is strictly increasing and preserves the W_ROI ranking") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> w(0.0, 3.0), e(0.0, 5e5);
  for (int trial = 0; trial < 200; ++trial) {
    const double w1 = w(rng), w2 = w(rng), en = e(rng);
    const double norm = 3e5;
    if (w1 < w2) CHECK(objective(w1, en, {}, norm) < objective(w2, en, {}, norm));
    const double e1 = e(rng);
    if (en < e1) CHECK(objective(w1, en, {}, norm) < objective(w1, e1, {}, norm));
  }
  // Ranking by the objective equals ranking by α·w + β·E/E_norm.
  std::uniform_real_distribution<double> ab(0.1, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const ObjectiveParams p{ab(rng), ab(rng)};
    const double norm = 2e5;
    const double w1 = w(rng), w2 = w(rng), e1 = e(rng), e2 = e(rng);
    const double lin1 = p.alpha * w1 + p.beta * e1 / norm, lin2 = p.alpha * w2 + p.beta * e2 / norm;
    if (std::abs(lin1 - lin2) < 1e-9) continue;
    CHECK((objective(w1, e1, p, norm) < objective(w2, e2, p, norm)) == (lin1 < lin2));
  }
}

TEST_CASE("POI sum over a mission") {
  const GridSpec g(3, 1, 1, 1.0);
  const std::vector<double> poi{1.0, 2.0, 4.0};
  MissionLog log;
  CHECK(poi_sum(log, g, poi) == 0.0);
  log.visits.push_back({{1, 1, 1}, 0.0, {}});
  log.visits.push_back({{3, 1, 1}, 0.0, {}});
  log.visits.push_back({{2, 1, 1}, 0.0, {}});
  CHECK(poi_sum(log, g, poi) == 7.0);

  // Re-summing from the exported mission CSV gives the same number.
  std::stringstream ss;
  io::write_mission_csv(ss, log);
  double again = 0.0;
  for (const auto& row : io::read_mission_csv(ss)) again += poi[g.linear(row.voxel)];
  CHECK(again == 7.0);
}
