#include "specmap/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "specmap/error.hpp"

namespace specmap::io {

namespace {

constexpr std::string_view kTensorHeader = "x,y,z,value_dbm";
constexpr std::string_view kMissionHeader =
    "order,x,y,z,measured_dbm,leg_energy_j,cumulative_energy_j,step";

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <typename T>
T parse(std::string_view field, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw IoError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
  }
  return value;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw IoError("cannot format number");
  return std::string(buf, ptr);
}

void write_tensor_csv(std::ostream& out, const SpectrumTensor& tensor) {
  out << kTensorHeader << '\n';
  const GridSpec& g = tensor.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!tensor.known(i)) continue;
    const VoxelIndex v = g.voxel(i);
    const double dbm =
        tensor.domain == Domain::Dbm ? tensor.values[i] : mw_to_dbm(tensor.values[i]);
    out << v.x << ',' << v.y << ',' << v.z << ',' << format_double(dbm) << '\n';
  }
}

void write_tensor_csv(const std::filesystem::path& path, const SpectrumTensor& tensor) {
  auto out = open_out(path);
  write_tensor_csv(out, tensor);
}

SpectrumTensor read_tensor_csv(std::istream& in, std::optional<GridSpec> grid,
                               double cell_size_m) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kTensorHeader) {
    throw IoError("tensor CSV must start with header '" + std::string(kTensorHeader) + "'");
  }
  struct Row {
    VoxelIndex v;
    double value;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  VoxelIndex extent{0, 0, 0};
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = strip_cr(line);
    if (text.empty()) continue;
    const auto f = split(text);
    if (f.size() != 4) throw IoError("line " + std::to_string(line_no) + ": expected 4 fields");
    Row r{{parse<int>(f[0], line_no), parse<int>(f[1], line_no), parse<int>(f[2], line_no)},
          parse<double>(f[3], line_no)};
    extent = {std::max(extent.x, r.v.x), std::max(extent.y, r.v.y), std::max(extent.z, r.v.z)};
    rows.push_back(r);
  }
  if (rows.empty()) throw IoError("tensor CSV has no rows");

  SpectrumTensor t;
  t.grid = grid ? *grid : GridSpec(extent.x, extent.y, extent.z, cell_size_m);
  t.domain = Domain::Dbm;
  t.values.assign(t.grid.size(), 0.0);
  Mask mask(t.grid.size(), 0);
  for (const auto& r : rows) {
    if (!t.grid.contains(r.v)) throw IoError("voxel " + to_string(r.v) + " outside grid");
    const auto i = t.grid.linear(r.v);
    t.values[i] = r.value;
    mask[i] = 1;
  }
  if (std::find(mask.begin(), mask.end(), 0) != mask.end()) t.mask = std::move(mask);
  return t;
}

SpectrumTensor read_tensor_csv(const std::filesystem::path& path, std::optional<GridSpec> grid,
                               double cell_size_m) {
  auto in = open_in(path);
  return read_tensor_csv(in, grid, cell_size_m);
}

void write_mask_csv(const std::filesystem::path& path, const GridSpec& grid, const Mask& mask) {
  auto out = open_out(path);
  out << "x,y,z,in_roi\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const VoxelIndex v = grid.voxel(i);
    out << v.x << ',' << v.y << ',' << v.z << ',' << (mask[i] ? 1 : 0) << '\n';
  }
}

void write_mission_csv(std::ostream& out, const MissionLog& log) {
  out << kMissionHeader << '\n';
  double cumulative = 0.0;
  for (std::size_t i = 0; i < log.visits.size(); ++i) {
    const Visit& v = log.visits[i];
    cumulative += v.leg.total_j();
    out << i + 1 << ',' << v.voxel.x << ',' << v.voxel.y << ',' << v.voxel.z << ','
        << format_double(v.measured_dbm) << ',' << format_double(v.leg.total_j()) << ','
        << format_double(cumulative) << ',' << log.step_of(i) << '\n';
  }
}

void write_mission_csv(const std::filesystem::path& path, const MissionLog& log) {
  auto out = open_out(path);
  write_mission_csv(out, log);
}

std::vector<MissionRow> read_mission_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kMissionHeader) {
    throw IoError("mission CSV must start with header '" + std::string(kMissionHeader) + "'");
  }
  std::vector<MissionRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = strip_cr(line);
    if (text.empty()) continue;
    const auto f = split(text);
    if (f.size() != 8) throw IoError("line " + std::to_string(line_no) + ": expected 8 fields");
    MissionRow r;
    r.order = parse<std::size_t>(f[0], line_no);
    r.voxel = {parse<int>(f[1], line_no), parse<int>(f[2], line_no), parse<int>(f[3], line_no)};
    r.measured_dbm = parse<double>(f[4], line_no);
    r.leg_energy_j = parse<double>(f[5], line_no);
    r.cumulative_energy_j = parse<double>(f[6], line_no);
    r.step = parse<std::size_t>(f[7], line_no);
    rows.push_back(r);
  }
  return rows;
}

std::vector<MissionRow> read_mission_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_mission_csv(in);
}

void write_recovery(const std::filesystem::path& csv_path, const RecoveryResult& result) {
  write_tensor_csv(csv_path, result.tensor);
  nlohmann::json sidecar{{"method", std::string(to_string(result.method))},
                         {"iterations", result.iterations_per_slice},
                         {"objectives", result.final_objectives}};
  auto out = open_out(std::filesystem::path(csv_path).replace_extension(".json"));
  out << sidecar.dump(2) << '\n';
}

}  // namespace specmap::io
