#include "tribus/config.hpp"

#include <Eigen/Geometry>
#include <fstream>
#include <set>
#include <sstream>

#include "json_reader.hpp"
#include "tribus/errors.hpp"

namespace tribus {

using detail::index_path;
using detail::JsonObject;
using detail::require_array;
using detail::vec_to_json;
using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

IkTask IkSettings::make_task(const Transform& target) const {
  IkTask task;
  task.target = target;
  task.frame_weight = frame_weight;
  task.posture_weight = posture_weight;
  task.posture_gain = posture_gain;
  task.dt = dt;
  task.max_steps = max_steps;
  task.tol_pos = tol_pos;
  task.tol_rot = tol_rot;
  task.max_linear_speed = max_linear_speed;
  task.max_angular_speed = max_angular_speed;
  return task;
}

const KinematicChain& Config::chain(const std::string& name) const {
  const auto it = chains.find(name);
  if (it == chains.end()) throw NotFoundError("unknown chain '" + name + "'");
  return it->second;
}

CameraMount Config::camera_mount() const {
  if (!camera) throw NotFoundError("config has no camera section");
  CameraMount mount;
  mount.neck_chain = chain(camera->neck_chain);
  mount.head_pan = camera->head_pan;
  mount.head_tilt = camera->head_tilt;
  mount.optical_alignment = camera->optical_alignment;
  mount.calibration_offset = camera->calibration_offset;
  return mount;
}

double Config::stall_torque() const {
  if (actuators.empty()) throw NotFoundError("config declares no actuators");
  return register_to_torque(actuators.front(), actuators.front().torque_register_max);
}

namespace {

Mat3 quaternion_rotation(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 4) throw ParseError(where + ": expected [qw, qx, qy, qz]");
  double c[4];
  for (int i = 0; i < 4; ++i) c[i] = JsonObject::convert<double>(value[i], index_path(where, i));
  Eigen::Quaterniond q(c[0], c[1], c[2], c[3]);
  if (q.norm() < 1e-12) throw ValidationError(where, "zero quaternion");
  return q.normalized().toRotationMatrix();
}

json rotation_to_json(const Mat3& r) {
  const Eigen::Quaterniond q(r);
  return json::array({q.w(), q.x(), q.y(), q.z()});
}

Transform transform_from_json(const json& value, const std::string& where, bool strict) {
  JsonObject obj(value, where, strict);
  const Vec3 t = obj.vec3_or("translation", Vec3::Zero());
  const Mat3 r = obj.has("rotation") ? quaternion_rotation(obj.raw("rotation"), obj.path("rotation")) : Mat3::Identity();
  obj.finish();
  return make_transform(r, t);
}

json transform_to_json(const Transform& tf) {
  return {{"translation", vec_to_json(tf.translation())}, {"rotation", rotation_to_json(tf.linear())}};
}

Mat3 matrix_from_json(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 3) throw ParseError(where + ": expected 3 rows of 3 numbers");
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = JsonObject::to_vec3(value[r], index_path(where, r)).transpose();
  return m;
}

json matrix_to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(vec_to_json(m.row(r).transpose()));
  return rows;
}

std::vector<std::string> string_list(const json& value, const std::string& where) {
  require_array(value, where);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(JsonObject::convert<std::string>(value[i], index_path(where, i)));
  return out;
}

void parse_actuators(const json& list, bool strict, std::vector<ActuatorSpec>& out) {
  require_array(list, "actuators");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = index_path("actuators", i);
    JsonObject item(list[i], path, strict);
    ActuatorSpec spec;
    spec.stall_current = item.optional<double>("stall_current", spec.stall_current);
    spec.no_load_current = item.optional<double>("no_load_current", spec.no_load_current);
    spec.current_slope = item.optional<double>("current_slope", spec.current_slope);
    spec.torque_register_max = item.optional<int>("torque_register_max", spec.torque_register_max);
    spec.supply_voltage = item.optional<double>("supply_voltage", spec.supply_voltage);
    if (item.has("torque_per_register")) {
      spec.torque_per_register = item.required<double>("torque_per_register");
    } else {
      const json& raw = require_array(item.raw("torque_anchors"), item.path("torque_anchors"));
      std::vector<TorqueAnchor> anchors;
      for (std::size_t k = 0; k < raw.size(); ++k) {
        const std::string where = index_path(item.path("torque_anchors"), k);
        if (!raw[k].is_array() || raw[k].size() != 2) throw ParseError(where + ": expected [register, torque_nm]");
        anchors.push_back({JsonObject::convert<double>(raw[k][0], where), JsonObject::convert<double>(raw[k][1], where)});
      }
      try {
        spec.torque_per_register = fit_torque_per_register(anchors);
      } catch (const DomainError& e) {
        throw ValidationError(item.path("torque_anchors"), e.what());
      }
    }

    // `ids` declares several identical servos in one entry.
    std::vector<std::string> ids;
    if (item.has("ids")) {
      ids = string_list(item.raw("ids"), item.path("ids"));
      if (item.has("id")) throw ValidationError(item.path("id"), "give either id or ids, not both");
    } else {
      ids.push_back(item.required<std::string>("id"));
    }
    item.finish();
    for (const auto& id : ids) {
      spec.id = id;
      validate(spec, path);
      out.push_back(spec);
    }
  }
}

void parse_ports(const json& list, bool strict, std::vector<PduPort>& out) {
  require_array(list, "ports");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = index_path("ports", i);
    JsonObject item(list[i], path, strict);
    PduPort port;
    port.id = item.required<std::string>("id");
    port.rated_current = item.required<double>("rated_current");
    port.rated_power = item.required<double>("rated_power");
    port.nominal_voltage = item.optional<double>("nominal_voltage", port.nominal_voltage);
    port.trip_delay = item.optional<double>("trip_delay", port.trip_delay);
    port.internal_resistance = item.optional<double>("internal_resistance", port.internal_resistance);
    if (item.has("fuse_limit")) port.fuse_limit = item.required<double>("fuse_limit");
    item.finish();
    out.push_back(port);
  }
}

void parse_buses(const json& list, bool strict, std::vector<BusConfig>& out) {
  require_array(list, "buses");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = index_path("buses", i);
    JsonObject item(list[i], path, strict);
    BusConfig bus;
    bus.id = item.required<std::string>("id");
    bus.port_id = item.required<std::string>("port_id");
    bus.actuator_ids = string_list(item.raw("actuator_ids"), item.path("actuator_ids"));
    bus.active_count = item.required<int>("active_count");
    bus.torque_cap = item.optional<int>("torque_cap", bus.torque_cap);
    bus.accel_setting = item.optional<int>("accel_setting", bus.accel_setting);
    item.finish();
    out.push_back(bus);
  }
}

void parse_compute(const json& list, bool strict, std::vector<ComputeLoad>& out) {
  require_array(list, "compute_loads");
  for (std::size_t i = 0; i < list.size(); ++i) {
    JsonObject item(list[i], index_path("compute_loads", i), strict);
    ComputeLoad load;
    load.name = item.required<std::string>("name");
    load.steady_current = item.required<double>("steady_current");
    load.port_id = item.required<std::string>("port_id");
    item.finish();
    if (!(load.steady_current >= 0.0)) throw ValidationError(item.path("steady_current"), "must be >= 0");
    out.push_back(load);
  }
}

KinematicChain parse_chain(const std::string& name, const json& value, const std::string& path, bool strict) {
  JsonObject obj(value, path, strict);
  KinematicChain chain;
  chain.name = name;
  const json& joints = require_array(obj.raw("joints"), obj.path("joints"));
  for (std::size_t i = 0; i < joints.size(); ++i) {
    JsonObject item(joints[i], index_path(obj.path("joints"), i), strict);
    Joint j;
    j.name = item.optional<std::string>("name", "joint" + std::to_string(i));
    j.axis = item.vec3("axis");
    if (item.has("origin")) j.origin = transform_from_json(item.raw("origin"), item.path("origin"), strict);
    j.limit_lo = item.required<double>("limit_lo");
    j.limit_hi = item.required<double>("limit_hi");
    j.vel_limit = item.required<double>("vel_limit");
    j.ik = item.optional<bool>("ik", true);
    item.finish();
    chain.joints.push_back(j);
  }
  if (obj.has("end_effector_offset"))
    chain.end_effector_offset = transform_from_json(obj.raw("end_effector_offset"), obj.path("end_effector_offset"), strict);
  if (obj.has("home")) {
    const json& home = require_array(obj.raw("home"), obj.path("home"));
    for (std::size_t i = 0; i < home.size(); ++i)
      chain.home.push_back(JsonObject::convert<double>(home[i], index_path(obj.path("home"), i)));
  }
  obj.finish();
  validate(chain, path);
  return chain;
}

CameraConfig parse_camera(const json& value, bool strict) {
  JsonObject obj(value, "camera", strict);
  CameraConfig cam;
  cam.width = obj.optional<int>("width", cam.width);
  cam.height = obj.optional<int>("height", cam.height);
  cam.intrinsics.fx = obj.required<double>("fx");
  cam.intrinsics.fy = obj.required<double>("fy");
  cam.intrinsics.cx = obj.required<double>("cx");
  cam.intrinsics.cy = obj.required<double>("cy");
  cam.neck_chain = obj.required<std::string>("neck_chain");
  cam.head_pan = obj.optional<double>("head_pan", 0.0);
  cam.head_tilt = obj.optional<double>("head_tilt", 0.0);
  if (obj.has("optical_alignment"))
    cam.optical_alignment = matrix_from_json(obj.raw("optical_alignment"), obj.path("optical_alignment"));
  cam.calibration_offset = obj.vec3_or("calibration_offset", Vec3::Zero());
  obj.finish();
  if (cam.width < 1 || cam.height < 1) throw ValidationError("camera.width", "image size must be positive");
  if (!(cam.intrinsics.fx > 0.0 && cam.intrinsics.fy > 0.0)) throw ValidationError("camera.fx", "focal lengths must be > 0");
  if (!is_proper_rotation(cam.optical_alignment, 1e-6))
    throw ValidationError("camera.optical_alignment", "must be a proper rotation");
  return cam;
}

std::vector<HsvRange> parse_hsv(const json& list, bool strict) {
  require_array(list, "hsv_labels");
  std::vector<HsvRange> out;
  std::set<std::string> labels;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = index_path("hsv_labels", i);
    JsonObject item(list[i], path, strict);
    HsvRange r;
    r.label = item.required<std::string>("label");
    r.h_lo = item.required<double>("h_lo");
    r.h_hi = item.required<double>("h_hi");
    r.s_lo = item.optional<double>("s_lo", r.s_lo);
    r.s_hi = item.optional<double>("s_hi", r.s_hi);
    r.v_lo = item.optional<double>("v_lo", r.v_lo);
    r.v_hi = item.optional<double>("v_hi", r.v_hi);
    r.min_area = item.optional<int>("min_area", r.min_area);
    item.finish();
    validate(r, path);
    if (!labels.insert(r.label).second) throw ValidationError(path + ".label", "duplicate label '" + r.label + "'");
    out.push_back(r);
  }
  return out;
}

LoadModelSection parse_load_model(const json& value, bool strict) {
  JsonObject obj(value, "load_model", strict);
  LoadModelSection sec;
  sec.model.no_load_current = obj.optional<double>("no_load_current", sec.model.no_load_current);
  sec.model.current_slope = obj.optional<double>("current_slope", sec.model.current_slope);
  sec.model.interpolate = obj.optional<bool>("interpolate", false);
  sec.margin_registers = obj.optional<int>("margin_registers", 0);
  if (obj.has("inrush_table")) {
    const json& table = obj.raw("inrush_table");
    if (!table.is_object()) throw ParseError("load_model.inrush_table: expected an object of alpha -> amperes");
    for (const auto& item : table.items()) {
      const std::string where = obj.path("inrush_table") + "." + item.key();
      int alpha = 0;
      try {
        std::size_t used = 0;
        alpha = std::stoi(item.key(), &used);
        if (used != item.key().size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError(where + ": alpha key must be an integer");
      }
      const double d = JsonObject::convert<double>(item.value(), where);
      if (!(d >= 0.0)) throw ValidationError(where, "D(alpha) must be >= 0");
      sec.explicit_table[alpha] = d;
    }
  }
  if (obj.has("calibration")) {
    const json& rows = require_array(obj.raw("calibration"), obj.path("calibration"));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      JsonObject row(rows[i], index_path("load_model.calibration", i), strict);
      CalibrationRow c;
      c.n_active = row.required<int>("n_active");
      c.tau = row.required<double>("tau");
      c.alpha = row.required<int>("alpha");
      c.observed_load = row.required<double>("observed_load");
      row.finish();
      sec.calibration.push_back(c);
    }
  }
  obj.finish();
  if (!(sec.model.no_load_current > 0.0)) throw ValidationError("load_model.no_load_current", "must be > 0");
  if (!(sec.model.current_slope > 0.0)) throw ValidationError("load_model.current_slope", "must be > 0");
  if (sec.margin_registers < 0) throw ValidationError("load_model.margin_registers", "must be >= 0");

  sec.model.inrush_table = sec.explicit_table;
  const auto solved = calibrate_inrush(sec.model.no_load_current, sec.model.current_slope, sec.calibration);
  for (const auto& [alpha, d] : solved) {
    if (sec.explicit_table.count(alpha))
      throw ValidationError("load_model.calibration", "alpha " + std::to_string(alpha) + " also given in inrush_table");
    sec.model.inrush_table[alpha] = d;
  }
  return sec;
}

LinkProfile parse_link_profile(const json& value, const std::string& path, bool strict) {
  JsonObject obj(value, path, strict);
  LinkProfile p;
  p.name = obj.required<std::string>("name");
  p.walls = obj.required<int>("walls");
  p.infill = obj.required<double>("infill");
  p.mass = obj.required<double>("mass");
  p.test_length = obj.optional<double>("test_length", p.test_length);
  p.test_load_mass = obj.optional<double>("test_load_mass", p.test_load_mass);
  p.measured_deflection = obj.required<double>("measured_deflection");
  p.yield_force_mean = obj.optional<double>("yield_force_mean", 0.0);
  p.yield_force_std = obj.optional<double>("yield_force_std", 0.0);
  obj.finish();
  validate(p, path);
  return p;
}

IkSettings parse_ik(const json& value, bool strict) {
  JsonObject obj(value, "ik", strict);
  IkSettings s;
  s.arm_chain = obj.required<std::string>("arm_chain");
  s.frame_weight.position = obj.vec3_or("position_weight", s.frame_weight.position);
  s.frame_weight.orientation = obj.vec3_or("orientation_weight", s.frame_weight.orientation);
  s.posture_weight = obj.optional<double>("posture_weight", s.posture_weight);
  s.posture_gain = obj.optional<double>("posture_gain", s.posture_gain);
  s.dt = obj.optional<double>("dt", s.dt);
  s.max_steps = obj.optional<int>("max_steps", s.max_steps);
  s.tol_pos = obj.optional<double>("tol_pos", s.tol_pos);
  s.tol_rot = obj.optional<double>("tol_rot", s.tol_rot);
  s.max_linear_speed = obj.optional<double>("max_linear_speed", s.max_linear_speed);
  s.max_angular_speed = obj.optional<double>("max_angular_speed", s.max_angular_speed);
  if (obj.has("grasp_orientation"))
    s.grasp_orientation = quaternion_rotation(obj.raw("grasp_orientation"), obj.path("grasp_orientation"));
  if (obj.has("gripper")) {
    JsonObject g(obj.raw("gripper"), "ik.gripper", strict);
    s.gripper.open = g.optional<double>("open", s.gripper.open);
    s.gripper.closed = g.optional<double>("closed", s.gripper.closed);
    s.gripper.step = g.optional<double>("step", s.gripper.step);
    s.gripper.dwell = g.optional<double>("dwell", s.gripper.dwell);
    g.finish();
    if (!(s.gripper.step > 0.0)) throw ValidationError("ik.gripper.step", "must be > 0");
    if (!(s.gripper.dwell >= 0.0)) throw ValidationError("ik.gripper.dwell", "must be >= 0");
  }
  obj.finish();
  if (!(s.dt > 0.0)) throw ValidationError("ik.dt", "must be > 0");
  if (s.max_steps < 0) throw ValidationError("ik.max_steps", "must be >= 0");
  if ((s.frame_weight.position.array() < 0.0).any()) throw ValidationError("ik.position_weight", "must be >= 0");
  if ((s.frame_weight.orientation.array() < 0.0).any()) throw ValidationError("ik.orientation_weight", "must be >= 0");
  if (!(s.posture_weight >= 0.0)) throw ValidationError("ik.posture_weight", "must be >= 0");
  if (!(s.tol_pos > 0.0)) throw ValidationError("ik.tol_pos", "must be > 0");
  if (!(s.tol_rot > 0.0)) throw ValidationError("ik.tol_rot", "must be > 0");
  return s;
}

}  // namespace

Config config_from_json(const json& doc, const LoadOptions& options) {
  const bool strict = !options.lenient;
  JsonObject root(doc, "", strict);
  Config cfg;
  parse_actuators(root.raw("actuators"), strict, cfg.actuators);
  parse_ports(root.raw("ports"), strict, cfg.topology.ports);
  parse_buses(root.raw("buses"), strict, cfg.topology.buses);
  if (root.has("compute_loads")) parse_compute(root.raw("compute_loads"), strict, cfg.topology.compute_loads);
  cfg.topology.battery_wh = root.optional<double>("battery_wh", cfg.topology.battery_wh);
  cfg.topology.pdu_watts = root.optional<double>("pdu_watts", cfg.topology.pdu_watts);

  if (root.has("chains")) {
    const json& chains = root.raw("chains");
    if (!chains.is_object()) throw ParseError("chains: expected an object of name -> chain");
    for (const auto& item : chains.items())
      cfg.chains.emplace(item.key(), parse_chain(item.key(), item.value(), "chains." + item.key(), strict));
  }
  if (root.has("camera")) cfg.camera = parse_camera(root.raw("camera"), strict);
  if (root.has("hsv_labels")) cfg.hsv_labels = parse_hsv(root.raw("hsv_labels"), strict);
  if (root.has("load_model")) cfg.load_model = parse_load_model(root.raw("load_model"), strict);
  if (root.has("link_profiles")) {
    const json& list = require_array(root.raw("link_profiles"), "link_profiles");
    for (std::size_t i = 0; i < list.size(); ++i)
      cfg.link_profiles.push_back(parse_link_profile(list[i], index_path("link_profiles", i), strict));
  }
  if (root.has("ik")) cfg.ik = parse_ik(root.raw("ik"), strict);
  root.finish();

  // Cross-module checks.
  validate(cfg.topology, cfg.actuators);
  if (cfg.camera && !cfg.chains.count(cfg.camera->neck_chain))
    throw ValidationError("camera.neck_chain", "unknown chain '" + cfg.camera->neck_chain + "'");
  if (cfg.camera) validate(cfg.camera_mount(), "camera");
  if (!cfg.ik.arm_chain.empty() && !cfg.chains.count(cfg.ik.arm_chain))
    throw ValidationError("ik.arm_chain", "unknown chain '" + cfg.ik.arm_chain + "'");
  if (!cfg.load_model.model.inrush_table.empty()) {
    for (std::size_t i = 0; i < cfg.topology.buses.size(); ++i) {
      const auto& bus = cfg.topology.buses[i];
      if (!cfg.load_model.model.has_alpha(bus.accel_setting))
        throw ValidationError(index_path("buses", i) + ".accel_setting",
                              "no D(alpha) calibration for alpha=" + std::to_string(bus.accel_setting));
    }
  }
  return cfg;
}

Config load_config(const std::string& path, const LoadOptions& options) {
  return config_from_json(parse_json_text(read_text_file(path), path), options);
}

PowerTopology load_topology(const std::string& path, const LoadOptions& options) {
  return load_config(path, options).topology;
}

json to_json(const Config& cfg) {
  json doc;
  json actuators = json::array();
  for (const auto& a : cfg.actuators) {
    actuators.push_back({{"id", a.id},
                         {"stall_current", a.stall_current},
                         {"no_load_current", a.no_load_current},
                         {"current_slope", a.current_slope},
                         {"torque_register_max", a.torque_register_max},
                         {"torque_per_register", a.torque_per_register},
                         {"supply_voltage", a.supply_voltage}});
  }
  doc["actuators"] = actuators;

  json ports = json::array();
  for (const auto& p : cfg.topology.ports) {
    json j = {{"id", p.id},
              {"rated_current", p.rated_current},
              {"rated_power", p.rated_power},
              {"nominal_voltage", p.nominal_voltage},
              {"trip_delay", p.trip_delay},
              {"internal_resistance", p.internal_resistance}};
    if (p.fuse_limit) j["fuse_limit"] = *p.fuse_limit;
    ports.push_back(j);
  }
  doc["ports"] = ports;

  json buses = json::array();
  for (const auto& b : cfg.topology.buses) {
    buses.push_back({{"id", b.id},
                     {"port_id", b.port_id},
                     {"actuator_ids", b.actuator_ids},
                     {"active_count", b.active_count},
                     {"torque_cap", b.torque_cap},
                     {"accel_setting", b.accel_setting}});
  }
  doc["buses"] = buses;

  json compute = json::array();
  for (const auto& c : cfg.topology.compute_loads)
    compute.push_back({{"name", c.name}, {"steady_current", c.steady_current}, {"port_id", c.port_id}});
  doc["compute_loads"] = compute;
  doc["battery_wh"] = cfg.topology.battery_wh;
  doc["pdu_watts"] = cfg.topology.pdu_watts;

  json chains = json::object();
  for (const auto& [name, chain] : cfg.chains) {
    json joints = json::array();
    for (const auto& j : chain.joints) {
      joints.push_back({{"name", j.name},
                        {"axis", vec_to_json(j.axis)},
                        {"origin", transform_to_json(j.origin)},
                        {"limit_lo", j.limit_lo},
                        {"limit_hi", j.limit_hi},
                        {"vel_limit", j.vel_limit},
                        {"ik", j.ik}});
    }
    json c = {{"joints", joints}, {"end_effector_offset", transform_to_json(chain.end_effector_offset)}};
    if (!chain.home.empty()) c["home"] = chain.home;
    chains[name] = c;
  }
  doc["chains"] = chains;

  if (cfg.camera) {
    const auto& c = *cfg.camera;
    doc["camera"] = {{"width", c.width},
                     {"height", c.height},
                     {"fx", c.intrinsics.fx},
                     {"fy", c.intrinsics.fy},
                     {"cx", c.intrinsics.cx},
                     {"cy", c.intrinsics.cy},
                     {"neck_chain", c.neck_chain},
                     {"head_pan", c.head_pan},
                     {"head_tilt", c.head_tilt},
                     {"optical_alignment", matrix_to_json(c.optical_alignment)},
                     {"calibration_offset", vec_to_json(c.calibration_offset)}};
  }

  json labels = json::array();
  for (const auto& r : cfg.hsv_labels) {
    labels.push_back({{"label", r.label},
                      {"h_lo", r.h_lo},
                      {"h_hi", r.h_hi},
                      {"s_lo", r.s_lo},
                      {"s_hi", r.s_hi},
                      {"v_lo", r.v_lo},
                      {"v_hi", r.v_hi},
                      {"min_area", r.min_area}});
  }
  doc["hsv_labels"] = labels;

  const auto& lm = cfg.load_model;
  json table = json::object();
  for (const auto& [alpha, d] : lm.explicit_table) table[std::to_string(alpha)] = d;
  json rows = json::array();
  for (const auto& r : lm.calibration)
    rows.push_back({{"n_active", r.n_active}, {"tau", r.tau}, {"alpha", r.alpha}, {"observed_load", r.observed_load}});
  doc["load_model"] = {{"no_load_current", lm.model.no_load_current},
                       {"current_slope", lm.model.current_slope},
                       {"interpolate", lm.model.interpolate},
                       {"margin_registers", lm.margin_registers},
                       {"inrush_table", table},
                       {"calibration", rows}};

  json profiles = json::array();
  for (const auto& p : cfg.link_profiles) {
    profiles.push_back({{"name", p.name},
                        {"walls", p.walls},
                        {"infill", p.infill},
                        {"mass", p.mass},
                        {"test_length", p.test_length},
                        {"test_load_mass", p.test_load_mass},
                        {"measured_deflection", p.measured_deflection},
                        {"yield_force_mean", p.yield_force_mean},
                        {"yield_force_std", p.yield_force_std}});
  }
  doc["link_profiles"] = profiles;

  if (!cfg.ik.arm_chain.empty()) {
    const auto& s = cfg.ik;
    doc["ik"] = {{"arm_chain", s.arm_chain},
                 {"position_weight", vec_to_json(s.frame_weight.position)},
                 {"orientation_weight", vec_to_json(s.frame_weight.orientation)},
                 {"posture_weight", s.posture_weight},
                 {"posture_gain", s.posture_gain},
                 {"dt", s.dt},
                 {"max_steps", s.max_steps},
                 {"tol_pos", s.tol_pos},
                 {"tol_rot", s.tol_rot},
                 {"max_linear_speed", s.max_linear_speed},
                 {"max_angular_speed", s.max_angular_speed},
                 {"grasp_orientation", rotation_to_json(s.grasp_orientation)},
                 {"gripper",
                  {{"open", s.gripper.open}, {"closed", s.gripper.closed}, {"step", s.gripper.step}, {"dwell", s.gripper.dwell}}}};
  }
  return doc;
}

}  // namespace tribus
