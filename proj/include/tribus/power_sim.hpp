#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tribus/robot_model.hpp"
#include "tribus/soe_fuse.hpp"

namespace tribus {

/// Constant load held on one bus over [t_start, t_end).
struct LoadCommand {
  double t_start = 0.0;
  double t_end = 0.0;
  std::string bus_id;
  int n_active = 1;
  double tau = 0.0;
  int alpha = 0;
};

/// Total compute draw over [t_start, t_end), overriding the steady loads.
struct ComputeWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  double watts = 0.0;
};

/// Operator power-cycle of a tripped port.
struct PowerCycle {
  double t = 0.0;
  std::string port_id;
};

struct Scenario {
  double duration = 0.0;
  double dt = 1e-3;
  std::vector<LoadCommand> commands;
  std::vector<ComputeWindow> compute_profile;
  std::vector<PowerCycle> power_cycles;
  /// Compute ports below this voltage count as browned out.
  double brownout_voltage = 9.0;
};

void validate(const Scenario& scenario, const PowerTopology& topology, const LoadModel& model);

/// Shifts every command window by a uniform offset in [-max_shift, max_shift],
/// keeping windows inside [0, duration] and non-overlapping per bus.
Scenario jitter_scenario(const Scenario& scenario, std::uint64_t seed, double max_shift = 0.1);

struct SimOptions {
  /// Clamp every command's tau to the synthesized fuse cap of its bus.
  bool apply_fuses = false;
  int margin_registers = 0;
  /// Residual voltage reported on a tripped port.
  double residual_voltage = 0.3;
};

enum class EventKind { Trip, Brownout, Recovery };

std::string to_string(EventKind kind);

struct SimEvent {
  double t = 0.0;
  EventKind kind = EventKind::Trip;
  std::string port_id;

  bool operator==(const SimEvent&) const = default;
};

/// Step-major samples: value for (step, port) lives at step * ports + port.
struct SimTrace {
  std::vector<std::string> port_ids;
  std::vector<double> t;
  std::vector<double> current;
  std::vector<double> voltage;
  /// Cumulative energy drawn from the PDU, watt-hours.
  std::vector<double> energy_wh;
  std::vector<SimEvent> events;

  std::size_t steps() const { return t.size(); }
  std::size_t ports() const { return port_ids.size(); }
  double current_at(std::size_t step, std::size_t port) const { return current[step * ports() + port]; }
  double voltage_at(std::size_t step, std::size_t port) const { return voltage[step * ports() + port]; }
  std::size_t port_index(const std::string& id) const;
  std::size_t count(EventKind kind) const;
};

SimTrace simulate(const PowerTopology& topology, const LoadModel& model, const Scenario& scenario,
                  const SimOptions& options = {});

struct PortBudget {
  std::string port_id;
  double limit = 0.0;
  double peak_current = 0.0;
  double peak_power = 0.0;
  bool carries_actuators = false;
  bool violation = false;
};

struct BudgetReport {
  std::vector<PortBudget> ports;
  /// Hardware capacity of every port feeding actuators, watts.
  double actuator_capacity_w = 0.0;
  /// Fuse-capped worst case actuator draw, watts.
  double actuator_worst_case_w = 0.0;
  double compute_w = 0.0;
  double pdu_watts = 0.0;
  /// PDU rating left for compute once actuator ports are at capacity.
  double compute_headroom_w = 0.0;
  /// What is left after compute as well.
  double spare_w = 0.0;
  bool violation = false;
  std::vector<std::string> messages;
};

/// Static worst-case check with every bus at its fuse cap.
BudgetReport check_budget(const PowerTopology& topology, const LoadModel& model,
                          const std::vector<FuseSetting>& fuses);

Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& scenario);

/// Columns `t,port_id,current_a,voltage_v,energy_wh`, one row per port per step.
void write_trace_csv(std::ostream& out, const SimTrace& trace);
nlohmann::json events_to_json(const SimTrace& trace);
nlohmann::json to_json(const BudgetReport& report);

}  // namespace tribus
