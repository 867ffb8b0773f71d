#include "specmap/energy.hpp"

#include <cmath>

#include "specmap/error.hpp"

namespace specmap {

void EnergyParams::validate() const {
  if (!(e_horizontal_j_per_m > 0.0) || !(e_up_j_per_m > 0.0) || !(e_down_j_per_m > 0.0) ||
      !(hover_power_w > 0.0) || !(hover_time_s > 0.0) || !(speed_mps > 0.0)) {
    throw ConfigError("energy parameters must all be positive");
  }
}

Leg leg_energy(const VoxelIndex& from, const VoxelIndex& to, const GridSpec& grid,
               const EnergyParams& params) {
  const Vec3 a = grid.center(from);
  const Vec3 b = grid.center(to);
  const double dx = b[0] - a[0];
  const double dy = b[1] - a[1];
  const double dz = b[2] - a[2];
  const double horizontal = std::hypot(dx, dy);

  Leg leg;
  leg.from = from;
  leg.to = to;
  leg.distance_m = std::sqrt(dx * dx + dy * dy + dz * dz);
  leg.theta_rad = std::atan2(std::abs(dz), horizontal);
  leg.hover_energy_j = params.hover_energy_j();
  if (leg.distance_m > 0.0) {
    // cos θ taken from the geometry so the θ = 0 and θ = π/2 limits are exact.
    const double cos_theta = horizontal / leg.distance_m;
    const double e_horizontal = params.e_horizontal_j_per_m * leg.distance_m;
    const double e_vertical =
        (dz >= 0.0 ? params.e_up_j_per_m : params.e_down_j_per_m) * leg.distance_m;
    leg.route_energy_j = (1.0 - cos_theta) * e_vertical + cos_theta * e_horizontal;
  }
  return leg;
}

TrajectoryEnergy trajectory_energy(std::span<const VoxelIndex> visits, const VoxelIndex& start,
                                   const GridSpec& grid, const EnergyParams& params) {
  TrajectoryEnergy out;
  out.legs.reserve(visits.size());
  VoxelIndex current = start;
  for (const auto& v : visits) {
    out.legs.push_back(leg_energy(current, v, grid, params));
    out.total_j += out.legs.back().total_j();
    current = v;
  }
  return out;
}

}  // namespace specmap
