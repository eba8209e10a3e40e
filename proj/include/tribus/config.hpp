#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tribus/ik.hpp"
#include "tribus/perception.hpp"
#include "tribus/robot_model.hpp"
#include "tribus/soe_fuse.hpp"
#include "tribus/stiffness.hpp"

namespace tribus {

struct CameraConfig {
  int width = 640;
  int height = 480;
  Intrinsics intrinsics;
  std::string neck_chain;
  double head_pan = 0.0;
  double head_tilt = 0.0;
  Mat3 optical_alignment = CameraMount::default_optical_alignment();
  Vec3 calibration_offset = Vec3::Zero();
};

/// Current model section: explicit D(alpha) entries plus calibration rows
/// solved at load time. `model` holds the merged result.
struct LoadModelSection {
  std::map<int, double> explicit_table;
  std::vector<CalibrationRow> calibration;
  int margin_registers = 0;
  LoadModel model;
};

struct GripperSettings {
  double open = 0.8;
  double closed = 0.2;
  double step = 0.1;
  double dwell = 0.05;
};

/// Defaults used to build IkTasks from the config.
struct IkSettings {
  std::string arm_chain;
  FrameWeights frame_weight;
  double posture_weight = 1e-2;
  double posture_gain = 0.1;
  double dt = 0.01;
  int max_steps = 200;
  double tol_pos = 1e-3;
  double tol_rot = 1e-2;
  double max_linear_speed = 0.2;
  double max_angular_speed = 1.0;
  Mat3 grasp_orientation = Mat3::Identity();
  GripperSettings gripper;

  IkTask make_task(const Transform& target) const;
};

/// One scenario file: power, kinematics and perception calibration.
struct Config {
  std::vector<ActuatorSpec> actuators;
  PowerTopology topology;
  std::map<std::string, KinematicChain> chains;
  std::optional<CameraConfig> camera;
  std::vector<HsvRange> hsv_labels;
  LoadModelSection load_model;
  std::vector<LinkProfile> link_profiles;
  IkSettings ik;

  const KinematicChain& chain(const std::string& name) const;
  /// Requires a camera section with a resolvable neck chain.
  CameraMount camera_mount() const;
  /// Stall torque of the first actuator (register 1000), N*m.
  double stall_torque() const;
};

struct LoadOptions {
  /// Ignore unknown keys instead of rejecting them.
  bool lenient = false;
};

/// Parses and fully validates. Throws ParseError for malformed documents and
/// ValidationError (naming the field) for invariant violations.
Config config_from_json(const nlohmann::json& doc, const LoadOptions& options = {});
Config load_config(const std::string& path, const LoadOptions& options = {});
PowerTopology load_topology(const std::string& path, const LoadOptions& options = {});

nlohmann::json to_json(const Config& config);

/// Reads a whole file, throwing ParseError if it cannot be opened.
std::string read_text_file(const std::string& path);
/// Parses JSON text, throwing ParseError with the source name on failure.
nlohmann::json parse_json_text(const std::string& text, const std::string& source);

}  // namespace tribus
