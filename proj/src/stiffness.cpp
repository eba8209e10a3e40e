#include "tribus/stiffness.hpp"

#include <algorithm>

#include "tribus/errors.hpp"

namespace tribus {

void validate(const LinkProfile& profile, const std::string& path) {
  if (profile.name.empty()) throw ValidationError(path + ".name", "empty name");
  if (profile.walls < 1) throw ValidationError(path + ".walls", "must be >= 1");
  if (!(profile.infill > 0.0 && profile.infill <= 1.0)) throw ValidationError(path + ".infill", "must be in (0, 1]");
  if (!(profile.mass > 0.0)) throw ValidationError(path + ".mass", "must be > 0");
  if (!(profile.test_length > 0.0)) throw ValidationError(path + ".test_length", "must be > 0");
  if (!(profile.test_load_mass > 0.0)) throw ValidationError(path + ".test_load_mass", "must be > 0");
  if (!(profile.measured_deflection > 0.0))
    throw ValidationError(path + ".measured_deflection", "must be > 0");
  if (!(profile.yield_force_std >= 0.0)) throw ValidationError(path + ".yield_force_std", "must be >= 0");
}

double stiffness_from_deflection(const LinkProfile& profile) {
  if (!(profile.measured_deflection > 0.0)) throw DomainError("deflection must be > 0 for '" + profile.name + "'");
  return profile.test_load_mass * kStandardGravity / profile.measured_deflection;
}

double elastic_energy(double k, double delta) {
  if (!(k >= 0.0)) throw DomainError("stiffness must be >= 0");
  return 0.5 * k * delta * delta;
}

double payload_bound(double reach, double stall_torque) {
  if (!(reach > 0.0)) throw DomainError("reach must be > 0");
  return stall_torque / reach;
}

std::vector<StiffnessRow> stiffness_report(std::span<const LinkProfile> profiles, double stall_torque) {
  std::vector<StiffnessRow> rows;
  for (const auto& p : profiles) {
    StiffnessRow row;
    row.name = p.name;
    row.stiffness = stiffness_from_deflection(p);
    row.stiffness_per_mass = row.stiffness / p.mass;
    row.energy = elastic_energy(row.stiffness, p.measured_deflection);
    row.payload_bound = payload_bound(p.test_length, stall_torque);
    row.yield_force_mean = p.yield_force_mean;
    row.yield_force_std = p.yield_force_std;
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const StiffnessRow& a, const StiffnessRow& b) { return a.stiffness_per_mass > b.stiffness_per_mass; });
  return rows;
}

nlohmann::json to_json(const std::vector<StiffnessRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"name", r.name},
                   {"stiffness_n_per_m", r.stiffness},
                   {"stiffness_per_mass", r.stiffness_per_mass},
                   {"energy_j", r.energy},
                   {"payload_bound_n", r.payload_bound},
                   {"yield_force_mean_n", r.yield_force_mean},
                   {"yield_force_std_n", r.yield_force_std}});
  }
  return out;
}

}  // namespace tribus
