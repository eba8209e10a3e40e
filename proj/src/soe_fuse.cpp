#include "tribus/soe_fuse.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <set>

#include "tribus/errors.hpp"

namespace tribus {

bool LoadModel::has_alpha(int alpha) const {
  if (inrush_table.count(alpha)) return true;
  if (!interpolate || inrush_table.empty()) return false;
  return alpha >= inrush_table.begin()->first && alpha <= inrush_table.rbegin()->first;
}

double LoadModel::inrush(int alpha) const {
  if (const auto it = inrush_table.find(alpha); it != inrush_table.end()) return it->second;
  if (!has_alpha(alpha)) throw DomainError("no inrush calibration for alpha=" + std::to_string(alpha));
  const auto hi = inrush_table.upper_bound(alpha);
  const auto lo = std::prev(hi);
  const double w = static_cast<double>(alpha - lo->first) / static_cast<double>(hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

namespace {

void check_tau(double tau) {
  if (!(tau >= 0.0 && tau <= kTorqueRegisterMax))
    throw DomainError("torque register " + std::to_string(tau) + " outside [0, 1000]");
}

void check_active(int n_active) {
  if (n_active < 1) throw DomainError("n_active must be >= 1, got " + std::to_string(n_active));
}

}  // namespace

double bus_load(const LoadModel& model, int n_active, double tau, int alpha) {
  check_active(n_active);
  check_tau(tau);
  const double per_actuator = model.current_slope * tau / 1000.0 + model.no_load_current + model.inrush(alpha);
  return n_active * per_actuator;
}

int max_torque(const LoadModel& model, double port_limit, int n_active, int alpha) {
  check_active(n_active);
  const double static_floor = model.no_load_current + model.inrush(alpha);
  const double per_actuator = port_limit / n_active;
  // Relative slack so that an exactly-at-boundary limit maps to 0, not infeasible.
  if (per_actuator < static_floor - 1e-12 * std::max(1.0, static_floor)) {
    const double min_load = n_active * static_floor;
    throw InfeasibleError("port limit " + std::to_string(port_limit) + " A is below the zero-torque load " +
                              std::to_string(min_load) + " A of " + std::to_string(n_active) + " actuators",
                          min_load);
  }
  const double exact = (per_actuator - static_floor) / model.current_slope * 1000.0;
  int cap = static_cast<int>(std::floor(std::min(exact, static_cast<double>(kTorqueRegisterMax)) + 1e-9));
  cap = std::clamp(cap, 0, kTorqueRegisterMax);
  // Floor guard: the returned value must never overdraw the port.
  while (cap > 0 && bus_load(model, n_active, cap, alpha) > port_limit) --cap;
  return cap;
}

std::map<int, double> calibrate_inrush(double no_load_current, double current_slope,
                                       std::span<const CalibrationRow> rows) {
  std::map<int, double> table;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string path = "calibration[" + std::to_string(i) + "]";
    if (row.n_active < 1) throw ValidationError(path + ".n_active", "must be >= 1");
    if (!(row.tau >= 0.0 && row.tau <= kTorqueRegisterMax)) throw ValidationError(path + ".tau", "must be in [0, 1000]");
    if (table.count(row.alpha)) throw ValidationError(path + ".alpha", "duplicate alpha " + std::to_string(row.alpha));
    const double d = row.observed_load / row.n_active - current_slope * row.tau / 1000.0 - no_load_current;
    if (d < -1e-12)
      throw ValidationError(path + ".observed_load",
                            "inconsistent row: solved D(" + std::to_string(row.alpha) + ") = " + std::to_string(d) + " A < 0");
    table[row.alpha] = std::max(d, 0.0);
  }
  return table;
}

std::vector<FuseSetting> synthesize_fuses(const PowerTopology& topology, const LoadModel& model,
                                          int margin_registers) {
  std::map<std::string, double> compute_on_port;
  for (const auto& load : topology.compute_loads) compute_on_port[load.port_id] += load.steady_current;
  std::map<std::string, int> active_on_port;
  for (const auto& bus : topology.buses) active_on_port[bus.port_id] += bus.active_count;

  std::vector<FuseSetting> fuses;
  fuses.reserve(topology.buses.size());
  for (const auto& bus : topology.buses) {
    const PduPort& port = topology.port(bus.port_id);
    const double available = port.budget_limit() - compute_on_port[bus.port_id];
    const double share = static_cast<double>(bus.active_count) / active_on_port[bus.port_id];
    FuseSetting fuse;
    fuse.bus_id = bus.id;
    fuse.port_limit = available * share;
    try {
      fuse.torque_cap = std::max(0, max_torque(model, fuse.port_limit, bus.active_count, bus.accel_setting) - margin_registers);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("bus '" + bus.id + "': " + e.what(), e.min_achievable_load());
    }
    fuse.operating_torque = std::min(bus.torque_cap, fuse.torque_cap);
    fuse.predicted_load = bus_load(model, bus.active_count, fuse.operating_torque, bus.accel_setting);
    fuse.load_at_cap = bus_load(model, bus.active_count, fuse.torque_cap, bus.accel_setting);
    fuse.headroom = fuse.port_limit - fuse.predicted_load;
    fuses.push_back(std::move(fuse));
  }
  return fuses;
}

}  // namespace tribus
