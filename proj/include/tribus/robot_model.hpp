#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tribus/geometry.hpp"

namespace tribus {

inline constexpr int kTorqueRegisterMax = 1000;

/// Torque register value paired with the output torque it produces.
struct TorqueAnchor {
  double register_value;
  double torque_nm;
};

/// Serial-bus servo. Currents in amperes, torque in N*m per register unit.
struct ActuatorSpec {
  std::string id;
  double stall_current = 2.7;
  double no_load_current = 0.18;
  /// Current added per 1000 torque-register units.
  double current_slope = 2.52;
  int torque_register_max = kTorqueRegisterMax;
  double torque_per_register = 0.0;
  double supply_voltage = 12.0;
};

/// Least-squares slope through the origin for register -> torque anchors.
double fit_torque_per_register(std::span<const TorqueAnchor> anchors);

/// Converts a torque register value (0..1000) to N*m.
double register_to_torque(const ActuatorSpec& spec, double tau);

void validate(const ActuatorSpec& spec, const std::string& path);

/// One output of the power station.
struct PduPort {
  std::string id;
  double rated_current = 0.0;
  double rated_power = 0.0;
  double nominal_voltage = 12.0;
  double trip_delay = 0.05;
  double internal_resistance = 0.02;
  /// Firmware current budget allotted to this port, below its hardware rating.
  std::optional<double> fuse_limit;

  /// Current at which the PDU protection trips: min(rated current, rated power / V).
  double hardware_limit() const;
  /// Current the firmware fuses are designed against.
  double budget_limit() const;
};

void validate(const PduPort& port, const std::string& path);

struct BusConfig {
  std::string id;
  std::string port_id;
  std::vector<std::string> actuator_ids;
  /// Worst-case number of concurrently loaded actuators (N_a).
  int active_count = 1;
  /// Configured torque register ceiling for the bus.
  int torque_cap = kTorqueRegisterMax;
  /// Acceleration register (alpha) used to index the inrush table.
  int accel_setting = 0;
};

struct ComputeLoad {
  std::string name;
  double steady_current = 0.0;
  std::string port_id;
};

struct PowerTopology {
  std::vector<PduPort> ports;
  std::vector<BusConfig> buses;
  std::vector<ComputeLoad> compute_loads;
  double battery_wh = 288.0;
  double pdu_watts = 300.0;

  const PduPort& port(const std::string& id) const;
  const BusConfig& bus(const std::string& id) const;
  bool has_port(const std::string& id) const;
  bool has_bus(const std::string& id) const;
};

/// Checks every cross-reference and invariant. Throws ValidationError naming
/// the field. `actuator_ids`, when non-empty, is the set of declared actuators.
void validate(const PowerTopology& topology, std::span<const ActuatorSpec> actuators = {});

/// Revolute joint: rotate about `axis` after applying the fixed `origin`.
struct Joint {
  std::string name;
  Vec3 axis = Vec3::UnitZ();
  Transform origin = Transform::Identity();
  double limit_lo = -M_PI;
  double limit_hi = M_PI;
  double vel_limit = 1.0;
  /// Joints with `ik = false` (e.g. the gripper) are frozen by default in IK.
  bool ik = true;
};

struct KinematicChain {
  std::string name;
  std::vector<Joint> joints;
  Transform end_effector_offset = Transform::Identity();
  /// Rest posture; defaults to zeros clamped into the limits.
  std::vector<double> home;

  std::size_t dof() const { return joints.size(); }
  std::vector<double> home_posture() const;
};

void validate(const KinematicChain& chain, const std::string& path);

}  // namespace tribus
