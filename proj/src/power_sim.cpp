#include "tribus/power_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>

#include "json_reader.hpp"
#include "tribus/config.hpp"
#include "tribus/errors.hpp"

namespace tribus {

using detail::JsonObject;

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Trip: return "trip";
    case EventKind::Brownout: return "brownout";
    case EventKind::Recovery: return "recovery";
  }
  return "unknown";
}

std::size_t SimTrace::port_index(const std::string& id) const {
  const auto it = std::find(port_ids.begin(), port_ids.end(), id);
  if (it == port_ids.end()) throw NotFoundError("trace has no port '" + id + "'");
  return static_cast<std::size_t>(it - port_ids.begin());
}

std::size_t SimTrace::count(EventKind kind) const {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [&](const SimEvent& e) { return e.kind == kind; }));
}

void validate(const Scenario& scenario, const PowerTopology& topology, const LoadModel& model) {
  if (!(scenario.dt > 0.0)) throw ValidationError("dt", "must be > 0");
  if (!(scenario.duration >= scenario.dt)) throw ValidationError("duration", "must be >= dt");
  const auto in_range = [&](double t) { return t >= 0.0 && t <= scenario.duration; };

  std::map<std::string, std::vector<std::pair<double, double>>> windows;
  for (std::size_t i = 0; i < scenario.commands.size(); ++i) {
    const auto& c = scenario.commands[i];
    const std::string path = "commands[" + std::to_string(i) + "]";
    if (!topology.has_bus(c.bus_id)) throw ValidationError(path + ".bus_id", "unknown bus '" + c.bus_id + "'");
    const auto& bus = topology.bus(c.bus_id);
    if (!in_range(c.t_start) || !in_range(c.t_end) || !(c.t_start < c.t_end))
      throw ValidationError(path + ".t_start", "window must satisfy 0 <= t_start < t_end <= duration");
    if (c.n_active < 1 || c.n_active > static_cast<int>(bus.actuator_ids.size()))
      throw ValidationError(path + ".n_active", "must be in [1, " + std::to_string(bus.actuator_ids.size()) + "]");
    if (!(c.tau >= 0.0 && c.tau <= kTorqueRegisterMax)) throw ValidationError(path + ".tau", "must be in [0, 1000]");
    if (!model.has_alpha(c.alpha)) throw ValidationError(path + ".alpha", "no inrush calibration for alpha=" + std::to_string(c.alpha));
    windows[c.bus_id].emplace_back(c.t_start, c.t_end);
  }
  for (auto& [bus_id, list] : windows) {
    std::sort(list.begin(), list.end());
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i].first < list[i - 1].second)
        throw ValidationError("commands", "overlapping commands on bus '" + bus_id + "'");
    }
  }
  for (std::size_t i = 0; i < scenario.compute_profile.size(); ++i) {
    const auto& w = scenario.compute_profile[i];
    const std::string path = "compute_profile[" + std::to_string(i) + "]";
    if (!in_range(w.t_start) || !in_range(w.t_end) || !(w.t_start < w.t_end))
      throw ValidationError(path + ".t_start", "window must satisfy 0 <= t_start < t_end <= duration");
    if (!(w.watts >= 0.0)) throw ValidationError(path + ".watts", "must be >= 0");
    if (topology.compute_loads.empty() && w.watts > 0.0)
      throw ValidationError(path + ".watts", "topology has no compute load to carry it");
  }
  for (std::size_t i = 0; i < scenario.power_cycles.size(); ++i) {
    const auto& pc = scenario.power_cycles[i];
    const std::string path = "power_cycles[" + std::to_string(i) + "]";
    if (!topology.has_port(pc.port_id)) throw ValidationError(path + ".port_id", "unknown port '" + pc.port_id + "'");
    if (!in_range(pc.t)) throw ValidationError(path + ".t", "must lie within [0, duration]");
  }
}

namespace {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Scenario jitter_scenario(const Scenario& scenario, std::uint64_t seed, double max_shift) {
  Scenario out = scenario;
  std::mt19937_64 rng(seed);
  for (auto& c : out.commands) {
    const double shift = (2.0 * unit_uniform(rng) - 1.0) * max_shift;
    const double length = c.t_end - c.t_start;
    double start = std::clamp(c.t_start + shift, 0.0, std::max(0.0, scenario.duration - length));
    c.t_start = start;
    c.t_end = std::min(start + length, scenario.duration);
  }
  // Shifts may push neighbouring windows on one bus into each other; trim the later one.
  std::map<std::string, std::vector<LoadCommand*>> by_bus;
  for (auto& c : out.commands) by_bus[c.bus_id].push_back(&c);
  for (auto& [bus, list] : by_bus) {
    std::stable_sort(list.begin(), list.end(), [](const LoadCommand* a, const LoadCommand* b) { return a->t_start < b->t_start; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i]->t_start < list[i - 1]->t_end) list[i]->t_start = list[i - 1]->t_end;
    }
  }
  std::erase_if(out.commands, [](const LoadCommand& c) { return !(c.t_start < c.t_end); });
  return out;
}

SimTrace simulate(const PowerTopology& topology, const LoadModel& model, const Scenario& scenario,
                  const SimOptions& options) {
  validate(scenario, topology, model);

  const std::size_t n_ports = topology.ports.size();
  std::map<std::string, std::size_t> port_of_bus;
  std::map<std::string, std::size_t> port_index;
  for (std::size_t p = 0; p < n_ports; ++p) port_index[topology.ports[p].id] = p;
  for (const auto& bus : topology.buses) port_of_bus[bus.id] = port_index.at(bus.port_id);

  std::map<std::string, int> fuse_cap;
  if (options.apply_fuses) {
    for (const auto& fuse : synthesize_fuses(topology, model, options.margin_registers)) fuse_cap[fuse.bus_id] = fuse.torque_cap;
  }

  // Load of each command is constant over its window; resolve it once.
  struct ActiveLoad {
    double t_start, t_end, current;
    std::size_t port;
  };
  std::vector<ActiveLoad> loads;
  for (const auto& c : scenario.commands) {
    double tau = c.tau;
    if (options.apply_fuses) tau = std::min(tau, static_cast<double>(fuse_cap.at(c.bus_id)));
    loads.push_back({c.t_start, c.t_end, bus_load(model, c.n_active, tau, c.alpha), port_of_bus.at(c.bus_id)});
  }

  double steady_compute_total = 0.0;
  std::vector<double> steady_compute(n_ports, 0.0);
  std::vector<bool> has_compute(n_ports, false);
  for (const auto& load : topology.compute_loads) {
    const std::size_t p = port_index.at(load.port_id);
    steady_compute[p] += load.steady_current;
    steady_compute_total += load.steady_current;
    has_compute[p] = true;
  }
  // Share of a compute window's watts delivered through each port.
  std::vector<double> compute_share(n_ports, 0.0);
  const std::size_t compute_count = topology.compute_loads.size();
  for (const auto& load : topology.compute_loads) {
    const std::size_t p = port_index.at(load.port_id);
    compute_share[p] += steady_compute_total > 0.0 ? load.steady_current / steady_compute_total : 1.0 / compute_count;
  }

  const auto steps = static_cast<std::size_t>(std::llround(scenario.duration / scenario.dt)) + 1;
  SimTrace trace;
  for (const auto& port : topology.ports) trace.port_ids.push_back(port.id);
  trace.t.resize(steps);
  trace.current.resize(steps * n_ports);
  trace.voltage.resize(steps * n_ports);
  trace.energy_wh.resize(steps);

  std::vector<bool> tripped(n_ports, false);
  std::vector<bool> browned_out(n_ports, false);
  // Steps the port has been continuously above its limit, minus one.
  std::vector<long long> over_steps(n_ports, -1);
  std::vector<double> current(n_ports);

  auto cycles = scenario.power_cycles;
  std::stable_sort(cycles.begin(), cycles.end(), [](const PowerCycle& a, const PowerCycle& b) { return a.t < b.t; });
  std::size_t next_cycle = 0;

  double energy = 0.0;
  double prev_power = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * scenario.dt;
    trace.t[k] = t;

    while (next_cycle < cycles.size() && cycles[next_cycle].t <= t + 1e-12) {
      const std::size_t p = port_index.at(cycles[next_cycle].port_id);
      if (tripped[p]) {
        tripped[p] = false;
        browned_out[p] = false;
        over_steps[p] = -1;
        trace.events.push_back({t, EventKind::Recovery, topology.ports[p].id});
      }
      ++next_cycle;
    }

    std::fill(current.begin(), current.end(), 0.0);
    for (const auto& load : loads) {
      if (t >= load.t_start && t < load.t_end) current[load.port] += load.current;
    }
    const ComputeWindow* window = nullptr;
    for (const auto& w : scenario.compute_profile) {
      if (t >= w.t_start && t < w.t_end) window = &w;
    }
    for (std::size_t p = 0; p < n_ports; ++p) {
      if (window) {
        current[p] += window->watts * compute_share[p] / topology.ports[p].nominal_voltage;
      } else {
        current[p] += steady_compute[p];
      }
    }

    double power = 0.0;
    for (std::size_t p = 0; p < n_ports; ++p) {
      const PduPort& port = topology.ports[p];
      double i = current[p];
      double v = 0.0;
      if (!tripped[p]) {
        const bool over = i > port.hardware_limit();
        if (over) {
          ++over_steps[p];
          if (static_cast<double>(over_steps[p]) * scenario.dt >= port.trip_delay - 1e-9) {
            tripped[p] = true;
            trace.events.push_back({t, EventKind::Trip, port.id});
          }
        } else {
          over_steps[p] = -1;
        }
      }
      if (tripped[p]) {
        i = 0.0;
        v = options.residual_voltage;
      } else {
        v = port.nominal_voltage - port.internal_resistance * i;
      }
      if (has_compute[p]) {
        const bool low = v < scenario.brownout_voltage;
        if (low && !browned_out[p]) trace.events.push_back({t, EventKind::Brownout, port.id});
        browned_out[p] = low;
      }
      trace.current[k * n_ports + p] = i;
      trace.voltage[k * n_ports + p] = v;
      power += v * i;
    }

    if (k > 0) energy += 0.5 * (prev_power + power) * scenario.dt / 3600.0;
    trace.energy_wh[k] = energy;
    prev_power = power;
  }
  return trace;
}

BudgetReport check_budget(const PowerTopology& topology, const LoadModel& model,
                          const std::vector<FuseSetting>& fuses) {
  std::map<std::string, int> cap_of_bus;
  for (const auto& f : fuses) cap_of_bus[f.bus_id] = f.torque_cap;

  BudgetReport report;
  report.pdu_watts = topology.pdu_watts;
  for (const auto& port : topology.ports) {
    PortBudget pb;
    pb.port_id = port.id;
    pb.limit = port.budget_limit();
    double compute_current = 0.0;
    for (const auto& load : topology.compute_loads) {
      if (load.port_id == port.id) compute_current += load.steady_current;
    }
    double actuator_current = 0.0;
    for (const auto& bus : topology.buses) {
      if (bus.port_id != port.id) continue;
      pb.carries_actuators = true;
      const auto it = cap_of_bus.find(bus.id);
      const int tau = it != cap_of_bus.end() ? it->second : bus.torque_cap;
      actuator_current += bus_load(model, bus.active_count, tau, bus.accel_setting);
    }
    pb.peak_current = actuator_current + compute_current;
    pb.peak_power = pb.peak_current * port.nominal_voltage;
    report.compute_w += compute_current * port.nominal_voltage;
    report.actuator_worst_case_w += actuator_current * port.nominal_voltage;
    if (pb.carries_actuators) report.actuator_capacity_w += port.hardware_limit() * port.nominal_voltage;
    if (pb.peak_current > pb.limit + 1e-9) {
      pb.violation = true;
      report.messages.push_back("port '" + port.id + "' worst case " + std::to_string(pb.peak_current) +
                                " A exceeds its " + std::to_string(pb.limit) + " A budget");
    }
    report.violation = report.violation || pb.violation;
    report.ports.push_back(pb);
  }
  report.compute_headroom_w = report.pdu_watts - report.actuator_capacity_w;
  report.spare_w = report.compute_headroom_w - report.compute_w;
  if (report.spare_w < 0.0) {
    report.violation = true;
    report.messages.push_back("compute draw " + std::to_string(report.compute_w) + " W exceeds the " +
                              std::to_string(report.compute_headroom_w) + " W left by actuator ports");
  }
  return report;
}

Scenario scenario_from_json(const nlohmann::json& doc) {
  JsonObject root(doc, "", true);
  Scenario s;
  s.duration = root.required<double>("duration");
  s.dt = root.optional<double>("dt", s.dt);
  s.brownout_voltage = root.optional<double>("brownout_voltage", s.brownout_voltage);
  if (root.has("commands")) {
    const auto& list = detail::require_array(root.raw("commands"), "commands");
    for (std::size_t i = 0; i < list.size(); ++i) {
      JsonObject item(list[i], detail::index_path("commands", i), true);
      LoadCommand c;
      c.t_start = item.required<double>("t_start");
      c.t_end = item.required<double>("t_end");
      c.bus_id = item.required<std::string>("bus_id");
      c.n_active = item.required<int>("n_active");
      c.tau = item.required<double>("tau");
      c.alpha = item.required<int>("alpha");
      item.finish();
      s.commands.push_back(std::move(c));
    }
  }
  if (root.has("compute_profile")) {
    const auto& list = detail::require_array(root.raw("compute_profile"), "compute_profile");
    for (std::size_t i = 0; i < list.size(); ++i) {
      JsonObject item(list[i], detail::index_path("compute_profile", i), true);
      s.compute_profile.push_back({item.required<double>("t_start"), item.required<double>("t_end"), item.required<double>("watts")});
      item.finish();
    }
  }
  if (root.has("power_cycles")) {
    const auto& list = detail::require_array(root.raw("power_cycles"), "power_cycles");
    for (std::size_t i = 0; i < list.size(); ++i) {
      JsonObject item(list[i], detail::index_path("power_cycles", i), true);
      s.power_cycles.push_back({item.required<double>("t"), item.required<std::string>("port_id")});
      item.finish();
    }
  }
  root.finish();
  return s;
}

Scenario load_scenario(const std::string& path) {
  return scenario_from_json(parse_json_text(read_text_file(path), path));
}

nlohmann::json to_json(const Scenario& s) {
  nlohmann::json doc;
  doc["duration"] = s.duration;
  doc["dt"] = s.dt;
  doc["brownout_voltage"] = s.brownout_voltage;
  doc["commands"] = nlohmann::json::array();
  for (const auto& c : s.commands) {
    doc["commands"].push_back({{"t_start", c.t_start}, {"t_end", c.t_end}, {"bus_id", c.bus_id},
                               {"n_active", c.n_active}, {"tau", c.tau}, {"alpha", c.alpha}});
  }
  doc["compute_profile"] = nlohmann::json::array();
  for (const auto& w : s.compute_profile)
    doc["compute_profile"].push_back({{"t_start", w.t_start}, {"t_end", w.t_end}, {"watts", w.watts}});
  doc["power_cycles"] = nlohmann::json::array();
  for (const auto& pc : s.power_cycles) doc["power_cycles"].push_back({{"t", pc.t}, {"port_id", pc.port_id}});
  return doc;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << "t,port_id,current_a,voltage_v,energy_wh\n";
  char buf[160];
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    for (std::size_t p = 0; p < trace.ports(); ++p) {
      std::snprintf(buf, sizeof buf, "%.6f,%s,%.9g,%.9g,%.12g\n", trace.t[k], trace.port_ids[p].c_str(),
                    trace.current_at(k, p), trace.voltage_at(k, p), trace.energy_wh[k]);
      out << buf;
    }
  }
}

nlohmann::json events_to_json(const SimTrace& trace) {
  nlohmann::json doc;
  doc["events"] = nlohmann::json::array();
  for (const auto& e : trace.events) doc["events"].push_back({{"t", e.t}, {"kind", to_string(e.kind)}, {"port_id", e.port_id}});
  doc["trip_count"] = trace.count(EventKind::Trip);
  doc["brownout_count"] = trace.count(EventKind::Brownout);
  doc["energy_wh"] = trace.energy_wh.empty() ? 0.0 : trace.energy_wh.back();
  return doc;
}

nlohmann::json to_json(const BudgetReport& report) {
  nlohmann::json doc;
  doc["ports"] = nlohmann::json::array();
  for (const auto& p : report.ports) {
    doc["ports"].push_back({{"port_id", p.port_id}, {"limit_a", p.limit}, {"peak_current_a", p.peak_current},
                            {"peak_power_w", p.peak_power}, {"carries_actuators", p.carries_actuators},
                            {"violation", p.violation}});
  }
  doc["actuator_capacity_w"] = report.actuator_capacity_w;
  doc["actuator_worst_case_w"] = report.actuator_worst_case_w;
  doc["compute_w"] = report.compute_w;
  doc["pdu_watts"] = report.pdu_watts;
  doc["compute_headroom_w"] = report.compute_headroom_w;
  doc["spare_w"] = report.spare_w;
  doc["violation"] = report.violation;
  doc["messages"] = report.messages;
  return doc;
}

}  // namespace tribus
