#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "specmap/error.hpp"
#include "specmap/harness.hpp"
#include "specmap/io.hpp"

namespace py = pybind11;
using namespace specmap;

namespace {

// Grid-shaped arrays are exposed as (n1, n2, n3) numpy arrays indexed
// [x-1, y-1, z-1]; the library's x-fastest layout is Fortran order.
py::array_t<double> to_numpy(const GridSpec& g, const std::vector<double>& v) {
  py::array_t<double, py::array::f_style> out({g.n1(), g.n2(), g.n3()});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<bool> mask_to_numpy(const GridSpec& g, const Mask& m) {
  py::array_t<bool, py::array::f_style> out({g.n1(), g.n2(), g.n3()});
  std::transform(m.begin(), m.end(), out.mutable_data(), [](std::uint8_t b) { return b != 0; });
  return out;
}

std::vector<double> from_numpy(const GridSpec& g, py::array_t<double, py::array::f_style | py::array::forcecast> a) {
  if (a.ndim() != 3 || a.shape(0) != g.n1() || a.shape(1) != g.n2() || a.shape(2) != g.n3()) {
    throw ConfigError("array shape does not match the grid");
  }
  return {a.data(), a.data() + a.size()};
}

Mask mask_from_numpy(const GridSpec& g, py::array_t<bool, py::array::f_style | py::array::forcecast> a) {
  if (a.ndim() != 3 || a.shape(0) != g.n1() || a.shape(1) != g.n2() || a.shape(2) != g.n3()) {
    throw ConfigError("mask shape does not match the grid");
  }
  Mask m(a.size());
  std::transform(a.data(), a.data() + a.size(), m.begin(), [](bool b) { return b ? 1 : 0; });
  return m;
}

}  // namespace

PYBIND11_MODULE(specmap, m) {
  m.doc() = "3D spectrum mapping: scenario synthesis, ROI-driven UAV sampling, TV map recovery";

  py::register_exception<Error>(m, "SpecmapError", PyExc_RuntimeError);

  py::class_<VoxelIndex>(m, "VoxelIndex")
      .def(py::init<int, int, int>(), py::arg("x"), py::arg("y"), py::arg("z"))
      .def_readwrite("x", &VoxelIndex::x)
      .def_readwrite("y", &VoxelIndex::y)
      .def_readwrite("z", &VoxelIndex::z)
      .def(py::self == py::self)
      .def("__repr__", [](const VoxelIndex& v) { return "VoxelIndex" + to_string(v); });

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<int, int, int, double, Vec3>(), py::arg("n1"), py::arg("n2"), py::arg("n3"),
           py::arg("cell_size_m"), py::arg("origin_m") = Vec3{0, 0, 0})
      .def_property_readonly("shape", [](const GridSpec& g) { return py::make_tuple(g.n1(), g.n2(), g.n3()); })
      .def_property_readonly("cell_size_m", &GridSpec::cell_size_m)
      .def_property_readonly("size", &GridSpec::size)
      .def("center", &GridSpec::center)
      .def("linear", &GridSpec::linear)
      .def("voxel", &GridSpec::voxel);

  py::class_<Source>(m, "Source")
      .def(py::init([](Vec3 p, double mw) { return Source{p, mw}; }), py::arg("position_m"), py::arg("power_mw") = 30.0)
      .def_readwrite("position_m", &Source::position_m)
      .def_readwrite("power_mw", &Source::power_mw);

  py::class_<PropagationParams>(m, "PropagationParams")
      .def(py::init<>())
      .def_readwrite("path_loss_exponent", &PropagationParams::path_loss_exponent)
      .def_readwrite("reference_distance_m", &PropagationParams::reference_distance_m)
      .def_readwrite("noise_density_dbm_per_hz", &PropagationParams::noise_density_dbm_per_hz)
      .def_readwrite("bandwidth_hz", &PropagationParams::bandwidth_hz)
      .def_readwrite("noise_sigma_scale", &PropagationParams::noise_sigma_scale)
      .def_readwrite("seed", &PropagationParams::seed)
      .def("noise_floor_mw", &PropagationParams::noise_floor_mw);

  py::enum_<Domain>(m, "Domain").value("LinearMw", Domain::LinearMw).value("Dbm", Domain::Dbm);

  py::class_<SpectrumTensor>(m, "SpectrumTensor")
      .def(py::init([](const GridSpec& g, py::array_t<double, py::array::f_style | py::array::forcecast> values,
                       Domain domain, std::optional<py::array_t<bool, py::array::f_style | py::array::forcecast>> mask) {
             SpectrumTensor t{g, from_numpy(g, values), domain, std::nullopt};
             if (mask) t.mask = mask_from_numpy(g, *mask);
             return t;
           }),
           py::arg("grid"), py::arg("values"), py::arg("domain") = Domain::Dbm, py::arg("mask") = py::none())
      .def_readonly("grid", &SpectrumTensor::grid)
      .def_readonly("domain", &SpectrumTensor::domain)
      .def_property_readonly("values", [](const SpectrumTensor& t) { return to_numpy(t.grid, t.values); })
      .def_property_readonly("mask", [](const SpectrumTensor& t) -> py::object {
        if (!t.mask) return py::none();
        return mask_to_numpy(t.grid, *t.mask);
      })
      .def("complete", &SpectrumTensor::complete)
      .def("in_domain", &SpectrumTensor::in_domain);

  py::class_<Sphere>(m, "Sphere")
      .def(py::init([](Vec3 c, double r) { return Sphere{c, r}; }), py::arg("center_m"), py::arg("radius_m"));

  py::class_<RoiSet>(m, "RoiSet")
      .def_readonly("n_roi", &RoiSet::n_roi)
      .def_readonly("spheres", &RoiSet::spheres);

  m.def("mw_to_dbm", &mw_to_dbm);
  m.def("dbm_to_mw", &dbm_to_mw);
  m.def("build_truth", [](const GridSpec& g, const std::vector<Source>& s, const PropagationParams& p) {
    return build_truth(g, s, p);
  });
  m.def("build_roi_mask", [](const GridSpec& g, const std::vector<Sphere>& s) { return build_roi_mask(g, s); });
  m.def("roi_mask_array", [](const GridSpec& g, const RoiSet& roi) { return mask_to_numpy(g, roi.mask); });
  m.def("poi_truth", [](const SpectrumTensor& t, const PropagationParams& p) {
    return to_numpy(t.grid, poi_truth(t, p));
  });
  m.def("measure", &measure);

  py::class_<IdwParams>(m, "IdwParams")
      .def(py::init<>())
      .def_readwrite("power", &IdwParams::power)
      .def_readwrite("epsilon_m", &IdwParams::epsilon_m);
  m.def("idw_estimate",
        [](const std::vector<std::pair<VoxelIndex, double>>& samples, const std::vector<VoxelIndex>& targets,
           const GridSpec& g, const IdwParams& p) {
          std::vector<Sample> s;
          for (const auto& [v, x] : samples) s.push_back({v, x});
          return idw_estimate(s, targets, g, p);
        },
        py::arg("samples"), py::arg("targets"), py::arg("grid"), py::arg("params") = IdwParams{});
  m.def("estimate_field", [](const SpectrumTensor& t, const PropagationParams& p, const IdwParams& i) {
    return to_numpy(t.grid, estimate_field(t, p, i));
  });

  py::class_<EnergyParams>(m, "EnergyParams")
      .def(py::init<>())
      .def_readwrite("e_horizontal_j_per_m", &EnergyParams::e_horizontal_j_per_m)
      .def_readwrite("e_up_j_per_m", &EnergyParams::e_up_j_per_m)
      .def_readwrite("e_down_j_per_m", &EnergyParams::e_down_j_per_m)
      .def_readwrite("hover_power_w", &EnergyParams::hover_power_w)
      .def_readwrite("hover_time_s", &EnergyParams::hover_time_s)
      .def_readwrite("speed_mps", &EnergyParams::speed_mps);

  py::class_<Leg>(m, "Leg")
      .def_readonly("distance_m", &Leg::distance_m)
      .def_readonly("theta_rad", &Leg::theta_rad)
      .def_readonly("route_energy_j", &Leg::route_energy_j)
      .def_readonly("hover_energy_j", &Leg::hover_energy_j)
      .def_property_readonly("total_j", &Leg::total_j);
  m.def("leg_energy", &leg_energy, py::arg("src"), py::arg("dst"), py::arg("grid"), py::arg("params") = EnergyParams{});
  m.def("trajectory_energy", [](const std::vector<VoxelIndex>& visits, const VoxelIndex& start, const GridSpec& g,
                                const EnergyParams& p) { return trajectory_energy(visits, start, g, p).total_j; });

  py::enum_<Strategy>(m, "Strategy")
      .value("Random", Strategy::Random)
      .value("RoiDriven", Strategy::RoiDriven)
      .value("RoiOnly", Strategy::RoiOnly);

  py::class_<DeployConfig>(m, "DeployConfig")
      .def(py::init([](Strategy s, double r, double r0, double rp, VoxelIndex start, std::uint64_t seed) {
             return DeployConfig{s, r, r0, rp, start, seed};
           }),
           py::arg("strategy"), py::arg("r"), py::arg("r0") = 0.05, py::arg("rp") = 0.05,
           py::arg("start") = VoxelIndex{1, 1, 1}, py::arg("seed") = 0)
      .def("steps", &DeployConfig::steps);

  py::class_<MissionLog>(m, "MissionLog")
      .def_property_readonly("voxels", &MissionLog::voxels)
      .def_property_readonly("measured_dbm", [](const MissionLog& l) {
        std::vector<double> v;
        for (const auto& x : l.visits) v.push_back(x.measured_dbm);
        return v;
      })
      .def_readonly("cumulative_energy_j", &MissionLog::cumulative_energy_j)
      .def_readonly("step_boundaries", &MissionLog::step_boundaries)
      .def("sampled_tensor", &MissionLog::sampled_tensor)
      .def("__len__", [](const MissionLog& l) { return l.visits.size(); });
  m.def("run_mission",
        [](const DeployConfig& c, const SpectrumTensor& truth, const RoiSet& roi, const PropagationParams& p,
           const IdwParams& i, const EnergyParams& e) { return run_mission(c, truth.grid, truth, roi, p, i, e); },
        py::arg("cfg"), py::arg("truth"), py::arg("roi"), py::arg("prop") = PropagationParams{},
        py::arg("idw") = IdwParams{}, py::arg("energy") = EnergyParams{});

  py::class_<TvParams>(m, "TvParams")
      .def(py::init<>())
      .def_readwrite("epsilon", &TvParams::epsilon)
      .def_readwrite("step_size", &TvParams::step_size)
      .def_readwrite("max_iters", &TvParams::max_iters)
      .def_readwrite("tol", &TvParams::tol);

  py::enum_<Method>(m, "Method")
      .value("TvXY", Method::TvXY)
      .value("TvYZ", Method::TvYZ)
      .value("TvZX", Method::TvZX)
      .value("Tv3D", Method::Tv3D)
      .value("Knn", Method::Knn)
      .value("Idw", Method::Idw);

  py::class_<RecoveryResult>(m, "RecoveryResult")
      .def_readonly("tensor", &RecoveryResult::tensor)
      .def_readonly("method", &RecoveryResult::method)
      .def_readonly("iterations_per_slice", &RecoveryResult::iterations_per_slice)
      .def_readonly("final_objectives", &RecoveryResult::final_objectives);
  m.def("recover",
        [](const SpectrumTensor& sampled, Method method, const TvParams& tv, int k) {
          RecoveryOptions opts;
          opts.tv = tv;
          opts.knn_k = k;
          return recover(sampled, method, opts);
        },
        py::arg("sampled"), py::arg("method"), py::arg("tv") = TvParams{}, py::arg("k") = 5);

  m.def("w_roi", &w_roi, py::arg("recovered"), py::arg("truth"), py::arg("roi"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static("case_study", &ExperimentConfig::case_study)
      .def_static("from_json", &parse_config)
      .def_static("load", &load_config)
      .def("to_json", &config_to_json);

  py::class_<ResultRow>(m, "ResultRow")
      .def_readonly("strategy", &ResultRow::strategy)
      .def_readonly("method", &ResultRow::method)
      .def_readonly("r", &ResultRow::r)
      .def_readonly("seed", &ResultRow::seed)
      .def_readonly("w_roi", &ResultRow::w_roi)
      .def_readonly("energy_j", &ResultRow::energy_j)
      .def_readonly("poi_sum", &ResultRow::poi_sum)
      .def_readonly("objective", &ResultRow::objective)
      .def_readonly("wall_ms", &ResultRow::wall_ms);
  m.def("run_single",
        [](const ExperimentConfig& cfg, Strategy s, Method method, double r, double r0, double rp,
           std::uint64_t seed) { return run_single(cfg, s, method, r, r0, rp, seed); },
        py::arg("cfg"), py::arg("strategy"), py::arg("method"), py::arg("r"), py::arg("r0") = 0.05,
        py::arg("rp") = 0.05, py::arg("seed") = 1);
  m.def("run_sweep",
        [](const ExperimentConfig& cfg, const std::filesystem::path& out, unsigned jobs) {
          const auto s = run_sweep(cfg, out, jobs);
          return py::make_tuple(s.raw_csv, s.aggregate_csv, s.rows, s.failures);
        },
        py::arg("cfg"), py::arg("out_dir"), py::arg("jobs") = 1);
}
