#include "specmap/harness.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "specmap/error.hpp"
#include "specmap/io.hpp"

namespace specmap {

using nlohmann::json;

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Random: return "Random";
    case Strategy::RoiDriven: return "RoiDriven";
    case Strategy::RoiOnly: return "RoiOnly";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::Random, Strategy::RoiDriven, Strategy::RoiOnly}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown deployment strategy '" + std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::case_study() {
  ExperimentConfig cfg;
  cfg.scenario.grid = GridSpec(10, 10, 10, 10.0);
  cfg.scenario.sources = {{{0.0, 0.0, 0.0}, 30.0}, {{50.0, 50.0, 0.0}, 30.0}, {{100.0, 100.0, 0.0}, 30.0}};
  for (const auto& s : cfg.scenario.sources) cfg.scenario.roi_spheres.push_back({s.position_m, 30.0});
  cfg.strategies = {Strategy::Random, Strategy::RoiDriven, Strategy::RoiOnly};
  cfg.methods = {Method::Tv3D, Method::TvXY, Method::TvYZ, Method::TvZX, Method::Knn};
  cfg.r_values = {0.1, 0.2, 0.3, 0.4, 0.5};
  cfg.r0_values = {0.05};
  cfg.rp_values = {0.05};
  for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
  return cfg;
}

void ExperimentConfig::validate() const {
  if (version != 1) throw ConfigError("unsupported config version " + std::to_string(version));
  if (scenario.sources.empty()) throw ConfigError("scenario needs at least one source");
  for (const auto& s : scenario.sources) {
    if (!(s.power_mw > 0.0)) throw ConfigError("source power must be positive");
  }
  for (const auto& s : scenario.roi_spheres) {
    if (!(s.radius_m > 0.0)) throw ConfigError("ROI radius must be positive");
  }
  scenario.prop.validate();
  energy.validate();
  idw.validate();
  objective.validate();
  recovery.tv.validate();
  recovery.idw.validate();
  if (recovery.knn_k < 1) throw ConfigError("knn_k must be positive");
  if (strategies.empty()) throw ConfigError("no deployment strategies configured");
  if (methods.empty()) throw ConfigError("no recovery methods configured");
  if (r_values.empty() || r0_values.empty() || rp_values.empty() || seeds.empty()) {
    throw ConfigError("sweep axes r, r0, rp and seeds must all be nonempty");
  }
  if (!scenario.grid.contains(start)) throw ConfigError("start voxel outside grid");
  for (Strategy s : strategies) {
    for (double r : r_values)
      for (double r0 : r0_values)
        for (double rp : rp_values) {
          DeployConfig d{s, r, r0, rp, start, 0};
          try {
            d.validate(scenario.grid);
          } catch (const ConfigError& e) {
            throw ConfigError(std::string(to_string(s)) + " r=" + io::format_double(r) +
                              " r0=" + io::format_double(r0) + " rp=" + io::format_double(rp) +
                              ": " + e.what());
          }
        }
  }
}

namespace {

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

ExperimentConfig from_json(const json& j) {
  ExperimentConfig cfg = ExperimentConfig::case_study();
  cfg.version = j.at("version").get<int>();

  if (j.contains("scenario")) {
    const json& s = j.at("scenario");
    if (s.contains("grid")) {
      const json& g = s.at("grid");
      const auto dims = g.at("dims").get<std::vector<int>>();
      if (dims.size() != 3) throw ConfigError("grid.dims must have 3 entries");
      cfg.scenario.grid = GridSpec(dims[0], dims[1], dims[2], g.at("cell_size_m").get<double>(),
                                   g.contains("origin_m") ? vec3(g.at("origin_m")) : Vec3{0, 0, 0});
    }
    if (s.contains("sources")) {
      cfg.scenario.sources.clear();
      for (const auto& src : s.at("sources")) {
        cfg.scenario.sources.push_back({vec3(src.at("position_m")), src.value("power_mw", 30.0)});
      }
    }
    if (s.contains("propagation")) {
      const json& p = s.at("propagation");
      auto& prop = cfg.scenario.prop;
      prop.path_loss_exponent = p.value("path_loss_exponent", prop.path_loss_exponent);
      prop.reference_distance_m = p.value("reference_distance_m", prop.reference_distance_m);
      prop.noise_density_dbm_per_hz = p.value("noise_density_dbm_per_hz", prop.noise_density_dbm_per_hz);
      prop.bandwidth_hz = p.value("bandwidth_hz", prop.bandwidth_hz);
      prop.noise_sigma_scale = p.value("noise_sigma_scale", prop.noise_sigma_scale);
      prop.seed = p.value("seed", prop.seed);
    }
    cfg.scenario.roi_spheres.clear();
    const json roi = s.value("roi", json{{"radius_m", 30.0}});
    if (roi.contains("spheres")) {
      for (const auto& sp : roi.at("spheres")) {
        cfg.scenario.roi_spheres.push_back({vec3(sp.at("center_m")), sp.at("radius_m").get<double>()});
      }
    } else {
      const double radius = roi.value("radius_m", 30.0);
      for (const auto& src : cfg.scenario.sources) cfg.scenario.roi_spheres.push_back({src.position_m, radius});
    }
  }

  if (j.contains("energy")) {
    const json& e = j.at("energy");
    auto& en = cfg.energy;
    en.e_horizontal_j_per_m = e.value("e_horizontal_j_per_m", en.e_horizontal_j_per_m);
    en.e_up_j_per_m = e.value("e_up_j_per_m", en.e_up_j_per_m);
    en.e_down_j_per_m = e.value("e_down_j_per_m", en.e_down_j_per_m);
    en.hover_power_w = e.value("hover_power_w", en.hover_power_w);
    en.hover_time_s = e.value("hover_time_s", en.hover_time_s);
    en.speed_mps = e.value("speed_mps", en.speed_mps);
  }
  if (j.contains("estimate")) {
    const json& e = j.at("estimate");
    cfg.idw.power = e.value("power", cfg.idw.power);
    cfg.idw.epsilon_m = e.value("epsilon_m", cfg.idw.epsilon_m);
  }
  if (j.contains("deploy")) {
    const json& d = j.at("deploy");
    if (d.contains("strategies")) {
      cfg.strategies.clear();
      for (const auto& s : d.at("strategies")) cfg.strategies.push_back(parse_strategy(s.get<std::string>()));
    }
    if (d.contains("start")) {
      const auto st = d.at("start").get<std::vector<int>>();
      if (st.size() != 3) throw ConfigError("deploy.start must have 3 entries");
      cfg.start = {st[0], st[1], st[2]};
    }
  }
  if (j.contains("recovery")) {
    const json& r = j.at("recovery");
    if (r.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : r.at("methods")) cfg.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (r.contains("tv")) {
      const json& t = r.at("tv");
      auto& tv = cfg.recovery.tv;
      tv.epsilon = t.value("epsilon", tv.epsilon);
      tv.step_size = t.value("step_size", tv.step_size);
      tv.max_iters = t.value("max_iters", tv.max_iters);
      tv.tol = t.value("tol", tv.tol);
    }
    cfg.recovery.knn_k = r.value("knn_k", cfg.recovery.knn_k);
  }
  cfg.recovery.idw = cfg.idw;
  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    cfg.objective.alpha = m.value("alpha", cfg.objective.alpha);
    cfg.objective.beta = m.value("beta", cfg.objective.beta);
    const auto corr = m.value("correction", std::string("exp"));
    if (corr != "exp" && corr != "Exp") throw ConfigError("only the exponential correction is supported");
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    cfg.r_values = s.at("r").get<std::vector<double>>();
    cfg.r0_values = s.at("r0").get<std::vector<double>>();
    cfg.rp_values = s.at("rp").get<std::vector<double>>();
    cfg.seeds = s.at("seeds").get<std::vector<std::uint64_t>>();
  }
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  ExperimentConfig cfg;
  try {
    cfg = from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  const auto& g = cfg.scenario.grid;
  const auto& p = cfg.scenario.prop;
  json sources = json::array();
  for (const auto& s : cfg.scenario.sources) {
    sources.push_back({{"position_m", vec3_json(s.position_m)}, {"power_mw", s.power_mw}});
  }
  json spheres = json::array();
  for (const auto& s : cfg.scenario.roi_spheres) {
    spheres.push_back({{"center_m", vec3_json(s.center_m)}, {"radius_m", s.radius_m}});
  }
  json strategies = json::array();
  for (auto s : cfg.strategies) strategies.push_back(std::string(to_string(s)));
  json methods = json::array();
  for (auto m : cfg.methods) methods.push_back(std::string(to_string(m)));

  json j{
      {"version", cfg.version},
      {"scenario",
       {{"grid", {{"dims", {g.n1(), g.n2(), g.n3()}}, {"cell_size_m", g.cell_size_m()}, {"origin_m", vec3_json(g.origin_m())}}},
        {"sources", sources},
        {"propagation",
         {{"path_loss_exponent", p.path_loss_exponent},
          {"reference_distance_m", p.reference_distance_m},
          {"noise_density_dbm_per_hz", p.noise_density_dbm_per_hz},
          {"bandwidth_hz", p.bandwidth_hz},
          {"noise_sigma_scale", p.noise_sigma_scale},
          {"seed", p.seed}}},
        {"roi", {{"spheres", spheres}}}}},
      {"energy",
       {{"e_horizontal_j_per_m", cfg.energy.e_horizontal_j_per_m},
        {"e_up_j_per_m", cfg.energy.e_up_j_per_m},
        {"e_down_j_per_m", cfg.energy.e_down_j_per_m},
        {"hover_power_w", cfg.energy.hover_power_w},
        {"hover_time_s", cfg.energy.hover_time_s},
        {"speed_mps", cfg.energy.speed_mps}}},
      {"estimate", {{"power", cfg.idw.power}, {"epsilon_m", cfg.idw.epsilon_m}}},
      {"deploy", {{"strategies", strategies}, {"start", {cfg.start.x, cfg.start.y, cfg.start.z}}}},
      {"recovery",
       {{"methods", methods},
        {"tv",
         {{"epsilon", cfg.recovery.tv.epsilon},
          {"step_size", cfg.recovery.tv.step_size},
          {"max_iters", cfg.recovery.tv.max_iters},
          {"tol", cfg.recovery.tv.tol}}},
        {"knn_k", cfg.recovery.knn_k}}},
      {"metrics", {{"alpha", cfg.objective.alpha}, {"beta", cfg.objective.beta}, {"correction", "exp"}}},
      {"sweep", {{"r", cfg.r_values}, {"r0", cfg.r0_values}, {"rp", cfg.rp_values}, {"seeds", cfg.seeds}}},
      {"output_dir", cfg.output_dir.string()}};
  return j.dump(2);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(stage, e.what());
  }
}

}  // namespace

std::uint64_t scenario_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  return splitmix64(cfg.scenario.prop.seed ^ splitmix64(seed));
}

std::uint64_t deploy_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x5eedULL); }

ScenarioInstance build_scenario(const ExperimentConfig& cfg, std::uint64_t seed) {
  return staged("scene", [&] {
    PropagationParams prop = cfg.scenario.prop;
    prop.seed = scenario_seed(cfg, seed);
    ScenarioInstance inst;
    inst.truth = build_truth(cfg.scenario.grid, cfg.scenario.sources, prop);
    inst.roi = build_roi_mask(cfg.scenario.grid, cfg.scenario.roi_spheres);
    inst.poi = poi_truth(inst.truth, prop);
    return inst;
  });
}

ResultRow run_single(const ExperimentConfig& cfg, Strategy strategy, Method method, double r,
                     double r0, double rp, std::uint64_t seed,
                     const std::optional<std::filesystem::path>& persist_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultRow row{strategy, method, r, r0, rp, seed, 0.0, 0.0, 0.0, 0.0, 0.0, {}};
  const GridSpec& grid = cfg.scenario.grid;

  const ScenarioInstance sc = build_scenario(cfg, seed);
  const DeployConfig dc{strategy, r, r0, rp, cfg.start, deploy_seed(seed)};
  const MissionLog mission = staged("deploy", [&] {
    return run_mission(dc, grid, sc.truth, sc.roi, cfg.scenario.prop, cfg.idw, cfg.energy);
  });
  const RecoveryResult rec =
      staged("recover", [&] { return recover(mission.sampled_tensor(grid), method, cfg.recovery); });

  staged("metrics", [&] {
    row.w_roi = w_roi(rec.tensor, sc.truth, sc.roi);
    row.energy_j = mission.cumulative_energy_j;
    row.poi_sum = poi_sum(mission, grid, sc.poi);
    const double norm = cfg.energy.hover_energy_j() * static_cast<double>(mission.visits.size());
    row.objective = objective(row.w_roi, row.energy_j, cfg.objective, norm);
  });

  if (persist_dir) {
    staged("io", [&] {
      io::write_tensor_csv(*persist_dir / "truth.csv", sc.truth);
      io::write_mask_csv(*persist_dir / "roi_mask.csv", grid, sc.roi.mask);
      io::write_mission_csv(*persist_dir / "mission.csv", mission);
      io::write_recovery(*persist_dir / "recovered.csv", rec);
    });
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

std::string result_csv_header() {
  return "strategy,method,r,r0,rp,seed,w_roi,energy_j,poi_sum,objective,wall_ms,error";
}

std::string result_csv_line(const ResultRow& row) {
  std::ostringstream os;
  std::string err = row.error;
  for (char& c : err) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", row.wall_ms);
  os << to_string(row.strategy) << ',' << to_string(row.method) << ',' << io::format_double(row.r)
     << ',' << io::format_double(row.r0) << ',' << io::format_double(row.rp) << ',' << row.seed
     << ',' << io::format_double(row.w_roi) << ',' << io::format_double(row.energy_j) << ','
     << io::format_double(row.poi_sum) << ',' << io::format_double(row.objective) << ',' << wall
     << ',' << err;
  return os.str();
}

SweepSummary run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                       unsigned jobs) {
  cfg.validate();
  struct Job {
    Strategy strategy;
    Method method;
    double r, r0, rp;
    std::uint64_t seed;
  };
  std::vector<Job> plan;
  for (auto s : cfg.strategies)
    for (auto m : cfg.methods)
      for (double r : cfg.r_values)
        for (double r0 : cfg.r0_values)
          for (double rp : cfg.rp_values)
            for (auto seed : cfg.seeds) plan.push_back({s, m, r, r0, rp, seed});

  std::filesystem::create_directories(out_dir);
  SweepSummary summary;
  summary.raw_csv = out_dir / "results.csv";
  summary.aggregate_csv = out_dir / "aggregate.csv";
  std::ofstream raw(summary.raw_csv, std::ios::binary);
  if (!raw) throw IoError("cannot open " + summary.raw_csv.string());
  raw << result_csv_header() << '\n' << std::flush;

  std::vector<std::optional<ResultRow>> done(plan.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) {
      const Job& job = plan[i];
      ResultRow row;
      try {
        row = run_single(cfg, job.strategy, job.method, job.r, job.r0, job.rp, job.seed);
      } catch (const Error& e) {
        row = ResultRow{job.strategy, job.method, job.r, job.r0, job.rp, job.seed, 0.0, 0.0, 0.0, 0.0, 0.0, {}};
        row.error = e.stage() + ": " + e.what();
      } catch (const std::exception& e) {
        row = ResultRow{job.strategy, job.method, job.r, job.r0, job.rp, job.seed, 0.0, 0.0, 0.0, 0.0, 0.0, {}};
        row.error = std::string("internal: ") + e.what();
      }
      {
        std::lock_guard lock(mu);
        done[i] = std::move(row);
      }
      cv.notify_one();
    }
  };

  const unsigned n_workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(plan.size())));
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);

  // Single writer: emits rows strictly in job order.
  for (std::size_t i = 0; i < plan.size(); ++i) {
    ResultRow row;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return done[i].has_value(); });
      row = std::move(*done[i]);
      done[i].reset();
    }
    if (!row.error.empty()) {
      ++summary.failures;
      spdlog::error("row {} ({} {} r={} seed={}) failed: {}", i, to_string(row.strategy),
                    to_string(row.method), row.r, row.seed, row.error);
    } else {
      spdlog::debug("row {}/{} {} {} r={} seed={} w_roi={}", i + 1, plan.size(),
                    to_string(row.strategy), to_string(row.method), row.r, row.seed, row.w_roi);
    }
    raw << result_csv_line(row) << '\n' << std::flush;
    ++summary.rows;
  }
  pool.clear();
  raw.close();

  aggregate_results(summary.raw_csv, summary.aggregate_csv);
  spdlog::info("sweep wrote {} rows ({} failed) to {}", summary.rows, summary.failures,
               summary.raw_csv.string());
  return summary;
}

void aggregate_results(std::istream& raw_csv, std::ostream& out) {
  std::string line;
  if (!std::getline(raw_csv, line) || line != result_csv_header()) {
    throw IoError("raw results CSV has an unexpected header");
  }
  struct Acc {
    std::size_t n = 0;
    std::vector<double> w, e, poi, obj;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> groups;
  while (std::getline(raw_csv, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 12) throw IoError("raw results row has " + std::to_string(f.size()) + " fields");
    if (!f[11].empty()) continue;
    const std::string key = f[0] + ',' + f[1] + ',' + f[2] + ',' + f[3] + ',' + f[4];
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    Acc& a = it->second;
    ++a.n;
    a.w.push_back(std::stod(f[6]));
    a.e.push_back(std::stod(f[7]));
    a.poi.push_back(std::stod(f[8]));
    a.obj.push_back(std::stod(f[9]));
  }
  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const auto stddev = [&](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };
  out << "strategy,method,r,r0,rp,n,mean_w_roi,std_w_roi,mean_energy_j,std_energy_j,"
         "mean_poi_sum,mean_objective\n";
  for (const auto& key : order) {
    const Acc& a = groups.at(key);
    out << key << ',' << a.n << ',' << io::format_double(mean(a.w)) << ','
        << io::format_double(stddev(a.w)) << ',' << io::format_double(mean(a.e)) << ','
        << io::format_double(stddev(a.e)) << ',' << io::format_double(mean(a.poi)) << ','
        << io::format_double(mean(a.obj)) << '\n';
  }
}

void aggregate_results(const std::filesystem::path& raw_csv, const std::filesystem::path& out) {
  std::ifstream in(raw_csv, std::ios::binary);
  if (!in) throw IoError("cannot open " + raw_csv.string());
  std::ofstream os(out, std::ios::binary);
  if (!os) throw IoError("cannot open " + out.string());
  aggregate_results(in, os);
}

}  // namespace specmap
