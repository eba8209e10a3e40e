#include "tribus/robot_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tribus/errors.hpp"

namespace tribus {

double fit_torque_per_register(std::span<const TorqueAnchor> anchors) {
  if (anchors.empty()) throw DomainError("torque fit needs at least one anchor");
  double xy = 0.0;
  double xx = 0.0;
  for (const auto& a : anchors) {
    xy += a.register_value * a.torque_nm;
    xx += a.register_value * a.register_value;
  }
  if (xx <= 0.0) throw DomainError("torque anchors must have a nonzero register value");
  return xy / xx;
}

double register_to_torque(const ActuatorSpec& spec, double tau) {
  if (!(tau >= 0.0 && tau <= spec.torque_register_max))
    throw DomainError("torque register " + std::to_string(tau) + " outside [0, " +
                      std::to_string(spec.torque_register_max) + "]");
  return tau * spec.torque_per_register;
}

void validate(const ActuatorSpec& spec, const std::string& path) {
  if (spec.id.empty()) throw ValidationError(path + ".id", "empty actuator id");
  if (!(spec.no_load_current > 0.0)) throw ValidationError(path + ".no_load_current", "must be > 0");
  if (!(spec.stall_current > spec.no_load_current))
    throw ValidationError(path + ".stall_current", "must exceed no_load_current");
  if (!(spec.current_slope > 0.0)) throw ValidationError(path + ".current_slope", "must be > 0");
  if (spec.torque_register_max != kTorqueRegisterMax)
    throw ValidationError(path + ".torque_register_max", "must be 1000");
  if (!(spec.torque_per_register > 0.0)) throw ValidationError(path + ".torque_per_register", "must be > 0");
  if (!(spec.supply_voltage > 0.0)) throw ValidationError(path + ".supply_voltage", "must be > 0");
  const double endpoint = spec.no_load_current + spec.current_slope;
  if (std::abs(endpoint - spec.stall_current) > 0.02 * spec.stall_current)
    throw ValidationError(path + ".current_slope", "no_load_current + current_slope must match stall_current within 2%");
}

double PduPort::hardware_limit() const { return std::min(rated_current, rated_power / nominal_voltage); }

double PduPort::budget_limit() const {
  return fuse_limit ? std::min(hardware_limit(), *fuse_limit) : hardware_limit();
}

void validate(const PduPort& port, const std::string& path) {
  if (port.id.empty()) throw ValidationError(path + ".id", "empty port id");
  if (!(port.rated_current > 0.0)) throw ValidationError(path + ".rated_current", "must be > 0");
  if (!(port.rated_power > 0.0)) throw ValidationError(path + ".rated_power", "must be > 0");
  if (!(port.nominal_voltage > 0.0)) throw ValidationError(path + ".nominal_voltage", "must be > 0");
  if (!(port.trip_delay >= 0.0)) throw ValidationError(path + ".trip_delay", "must be >= 0");
  if (!(port.internal_resistance >= 0.0)) throw ValidationError(path + ".internal_resistance", "must be >= 0");
  if (port.fuse_limit && !(*port.fuse_limit > 0.0)) throw ValidationError(path + ".fuse_limit", "must be > 0");
}

namespace {

template <class T>
const T& find_by_id(const std::vector<T>& items, const std::string& id, const char* what) {
  const auto it = std::find_if(items.begin(), items.end(), [&](const T& item) { return item.id == id; });
  if (it == items.end()) throw NotFoundError(std::string("unknown ") + what + " '" + id + "'");
  return *it;
}

}  // namespace

const PduPort& PowerTopology::port(const std::string& id) const { return find_by_id(ports, id, "port"); }
const BusConfig& PowerTopology::bus(const std::string& id) const { return find_by_id(buses, id, "bus"); }

bool PowerTopology::has_port(const std::string& id) const {
  return std::any_of(ports.begin(), ports.end(), [&](const PduPort& p) { return p.id == id; });
}

bool PowerTopology::has_bus(const std::string& id) const {
  return std::any_of(buses.begin(), buses.end(), [&](const BusConfig& b) { return b.id == id; });
}

void validate(const PowerTopology& topology, std::span<const ActuatorSpec> actuators) {
  std::set<std::string> port_ids;
  for (std::size_t i = 0; i < topology.ports.size(); ++i) {
    const std::string path = "ports[" + std::to_string(i) + "]";
    validate(topology.ports[i], path);
    if (!port_ids.insert(topology.ports[i].id).second) throw ValidationError(path + ".id", "duplicate port id '" + topology.ports[i].id + "'");
  }

  std::set<std::string> declared;
  for (const auto& a : actuators) declared.insert(a.id);

  std::set<std::string> bus_ids;
  std::set<std::string> assigned;
  for (std::size_t i = 0; i < topology.buses.size(); ++i) {
    const auto& bus = topology.buses[i];
    const std::string path = "buses[" + std::to_string(i) + "]";
    if (bus.id.empty()) throw ValidationError(path + ".id", "empty bus id");
    if (!bus_ids.insert(bus.id).second) throw ValidationError(path + ".id", "duplicate bus id '" + bus.id + "'");
    if (!port_ids.count(bus.port_id)) throw ValidationError(path + ".port_id", "unknown port '" + bus.port_id + "'");
    for (std::size_t j = 0; j < bus.actuator_ids.size(); ++j) {
      const auto& id = bus.actuator_ids[j];
      const std::string apath = path + ".actuator_ids[" + std::to_string(j) + "]";
      if (!actuators.empty() && !declared.count(id)) throw ValidationError(apath, "unknown actuator '" + id + "'");
      if (!assigned.insert(id).second) throw ValidationError(apath, "actuator '" + id + "' appears on two buses");
    }
    if (bus.active_count < 1 || bus.active_count > static_cast<int>(bus.actuator_ids.size()))
      throw ValidationError(path + ".active_count", "must be in [1, " + std::to_string(bus.actuator_ids.size()) + "]");
    if (bus.torque_cap < 0 || bus.torque_cap > kTorqueRegisterMax)
      throw ValidationError(path + ".torque_cap", "must be in [0, 1000], got " + std::to_string(bus.torque_cap));
    if (bus.accel_setting < 0) throw ValidationError(path + ".accel_setting", "must be >= 0");
  }

  for (std::size_t i = 0; i < topology.compute_loads.size(); ++i) {
    const auto& load = topology.compute_loads[i];
    const std::string path = "compute_loads[" + std::to_string(i) + "]";
    if (!port_ids.count(load.port_id)) throw ValidationError(path + ".port_id", "unknown port '" + load.port_id + "'");
    if (!(load.steady_current >= 0.0)) throw ValidationError(path + ".steady_current", "must be >= 0");
  }

  if (!(topology.battery_wh > 0.0)) throw ValidationError("battery_wh", "must be > 0");
  if (!(topology.pdu_watts > 0.0)) throw ValidationError("pdu_watts", "must be > 0");
}

std::vector<double> KinematicChain::home_posture() const {
  if (!home.empty()) return home;
  std::vector<double> q(joints.size());
  for (std::size_t i = 0; i < joints.size(); ++i) q[i] = std::clamp(0.0, joints[i].limit_lo, joints[i].limit_hi);
  return q;
}

void validate(const KinematicChain& chain, const std::string& path) {
  if (chain.joints.empty()) throw ValidationError(path + ".joints", "chain needs at least one joint");
  for (std::size_t i = 0; i < chain.joints.size(); ++i) {
    const auto& j = chain.joints[i];
    const std::string jpath = path + ".joints[" + std::to_string(i) + "]";
    if (!(j.limit_lo < j.limit_hi)) throw ValidationError(jpath + ".limit_lo", "limit_lo must be < limit_hi");
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) throw ValidationError(jpath + ".axis", "axis must have unit norm");
    if (!(j.vel_limit > 0.0)) throw ValidationError(jpath + ".vel_limit", "must be > 0");
    if (!is_proper_rotation(j.origin.linear())) throw ValidationError(jpath + ".origin", "rotation is not proper");
  }
  if (!chain.home.empty()) {
    if (chain.home.size() != chain.joints.size())
      throw ValidationError(path + ".home", "length must match the joint count");
    for (std::size_t i = 0; i < chain.home.size(); ++i) {
      if (chain.home[i] < chain.joints[i].limit_lo || chain.home[i] > chain.joints[i].limit_hi)
        throw ValidationError(path + ".home[" + std::to_string(i) + "]", "outside joint limits");
    }
  }
}

}  // namespace tribus
