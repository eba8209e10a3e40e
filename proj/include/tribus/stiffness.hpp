#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tribus {

inline constexpr double kStandardGravity = 9.80665;

/// Cantilever test of one print profile.
struct LinkProfile {
  std::string name;
  int walls = 2;
  double infill = 0.15;
  double mass = 0.0;                 // kg
  double test_length = 0.186;        // m
  double test_load_mass = 0.1;       // kg
  double measured_deflection = 0.0;  // m
  double yield_force_mean = 0.0;     // N, measured; never computed
  double yield_force_std = 0.0;
};

void validate(const LinkProfile& profile, const std::string& path);

/// k = m g / delta, N/m.
double stiffness_from_deflection(const LinkProfile& profile);

/// U = k delta^2 / 2, joules.
double elastic_energy(double k, double delta);

/// Rigid-link tip force at which the shoulder reaches `stall_torque`, newtons.
double payload_bound(double reach, double stall_torque);

struct StiffnessRow {
  std::string name;
  double stiffness = 0.0;           // N/m
  double stiffness_per_mass = 0.0;  // N/m/kg
  double energy = 0.0;              // J at measured deflection
  double payload_bound = 0.0;       // N at test_length
  double yield_force_mean = 0.0;
  double yield_force_std = 0.0;
};

/// Rows sorted by stiffness-to-mass, best first.
std::vector<StiffnessRow> stiffness_report(std::span<const LinkProfile> profiles, double stall_torque);

nlohmann::json to_json(const std::vector<StiffnessRow>& rows);

}  // namespace tribus
