#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "tribus/compute_budget.hpp"
#include "tribus/config.hpp"
#include "tribus/errors.hpp"
#include "tribus/ik.hpp"
#include "tribus/image_io.hpp"
#include "tribus/kinematics.hpp"
#include "tribus/perception.hpp"
#include "tribus/power_sim.hpp"
#include "tribus/soe_fuse.hpp"
#include "tribus/stiffness.hpp"
#include "tribus/synthetic_scene.hpp"

#ifndef TRIBUS_VERSION
#define TRIBUS_VERSION "0.0.0"
#endif

namespace tribus::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string hash_inputs(const std::vector<std::string>& paths) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    // Unreadable inputs still contribute their name, so a failed run hashes deterministically.
    const std::string content = in ? std::string(std::istreambuf_iterator<char>(in), {}) : "missing:" + path;
    EVP_DigestUpdate(ctx, content.data(), content.size());
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool lenient = false;
  bool quiet = false;
};

/// What the manifest records about one invocation.
struct Run {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

/// Stage name prefixed onto errors raised inside a pipeline step.
template <class Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError("", name + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(name + ": " + e.what());
  } catch (const Error& e) {
    throw Error(name + ": " + e.what());
  }
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_json(const std::string& path, const json& doc, Run& run) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
  run.outputs.push_back(path);
}

std::string output_path(const Globals& g, const std::string& given, const std::string& fallback) {
  return given.empty() ? (fs::path(g.out_dir) / fallback).string() : given;
}

Config require_config(const Globals& g, Run& run) {
  if (g.config.empty()) throw ParseError("--config is required");
  run.inputs.push_back(g.config);
  return load_config(g.config, LoadOptions{g.lenient});
}

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

json fuses_to_json(const std::vector<FuseSetting>& fuses) {
  json out = json::array();
  for (const auto& f : fuses) {
    out.push_back({{"bus_id", f.bus_id},
                   {"torque_cap", f.torque_cap},
                   {"operating_torque", f.operating_torque},
                   {"predicted_load_a", f.predicted_load},
                   {"load_at_cap_a", f.load_at_cap},
                   {"port_limit_a", f.port_limit},
                   {"headroom_a", f.headroom}});
  }
  return out;
}

json detection_to_json(const Detection& d) {
  return {{"label", d.label},
          {"pixel_centroid", {d.pixel_centroid.x(), d.pixel_centroid.y()}},
          {"area_px", d.area},
          {"point_camera", {d.point_camera.x(), d.point_camera.y(), d.point_camera.z()}},
          {"point_base", {d.point_base.x(), d.point_base.y(), d.point_base.z()}}};
}

void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<std::vector<double>>& samples, Run& run) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << 't';
  const std::size_t n = samples.empty() ? 0 : samples.front().size();
  for (std::size_t i = 0; i < n; ++i) out << ",q" << i;
  out << '\n';
  for (std::size_t k = 0; k < samples.size(); ++k) {
    out << fmt("%.6f", times[k]);
    for (double q : samples[k]) out << ',' << fmt("%.9f", q);
    out << '\n';
  }
  run.outputs.push_back(path);
}

void write_trace(const std::string& path, const SimTrace& trace, Run& run) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_trace_csv(out, trace);
  run.outputs.push_back(path);
}

/// Joint names/indices of `chain`, or whole chain names. Other chains are never
/// moved by a solve, so naming one only checks that it exists.
JointSet parse_freeze(const Config& cfg, const KinematicChain& chain, const std::vector<std::string>& names) {
  JointSet frozen;
  for (const auto& name : names) {
    if (name == chain.name) {
      for (std::size_t i = 0; i < chain.dof(); ++i) frozen.insert(i);
      continue;
    }
    if (cfg.chains.count(name)) continue;
    bool found = false;
    for (std::size_t i = 0; i < chain.dof(); ++i) {
      if (chain.joints[i].name == name || std::to_string(i) == name) {
        frozen.insert(i);
        found = true;
      }
    }
    if (!found) throw ValidationError("--freeze", "'" + name + "' is neither a chain nor a joint of '" + chain.name + "'");
  }
  return frozen;
}

// ---- commands ----

int cmd_validate(const Globals& g, Run& run, std::ostream& out) {
  const Config cfg = require_config(g, run);
  const auto fuses = synthesize_fuses(cfg.topology, cfg.load_model.model, cfg.load_model.margin_registers);
  if (!g.quiet) {
    out << "ok: " << cfg.actuators.size() << " actuators, " << cfg.topology.ports.size() << " ports, "
        << cfg.topology.buses.size() << " buses, " << cfg.chains.size() << " chains\n";
    for (const auto& f : fuses) out << "  " << f.bus_id << ": cap " << f.torque_cap << '\n';
  }
  return kOk;
}

int cmd_fuse(const Globals& g, std::optional<int> margin, const std::string& out_path, Run& run, std::ostream& out) {
  const Config cfg = require_config(g, run);
  const int m = margin.value_or(cfg.load_model.margin_registers);
  if (m < 0) throw ValidationError("--margin", "must be >= 0");
  const auto fuses = synthesize_fuses(cfg.topology, cfg.load_model.model, m);
  const BudgetReport budget = check_budget(cfg.topology, cfg.load_model.model, fuses);
  json table = json::object();
  for (const auto& [alpha, d] : cfg.load_model.model.inrush_table) table[std::to_string(alpha)] = d;
  const json doc = {{"margin_registers", m}, {"fuses", fuses_to_json(fuses)}, {"inrush_table", table},
                    {"budget", to_json(budget)}};
  write_json(output_path(g, out_path, "fuses.json"), doc, run);
  if (!g.quiet) {
    for (const auto& f : fuses)
      out << f.bus_id << ": cap " << f.torque_cap << " (limit " << fmt("%.3f", f.port_limit) << " A, load at cap "
          << fmt("%.3f", f.load_at_cap) << " A)\n";
    out << "compute headroom " << fmt("%.1f", budget.compute_headroom_w) << " W\n";
  }
  return budget.violation ? kRuntime : kOk;
}

struct SimulateArgs {
  std::string scenario;
  bool apply_fuses = false;
  std::string trace;
  std::string events;
};

int cmd_simulate(const Globals& g, bool seed_given, const SimulateArgs& a, Run& run, std::ostream& out) {
  const Config cfg = require_config(g, run);
  if (a.scenario.empty()) throw ParseError("--scenario is required");
  run.inputs.push_back(a.scenario);
  Scenario scenario = load_scenario(a.scenario);
  if (seed_given) scenario = jitter_scenario(scenario, g.seed);
  SimOptions opts;
  opts.apply_fuses = a.apply_fuses;
  opts.margin_registers = cfg.load_model.margin_registers;
  const SimTrace trace = simulate(cfg.topology, cfg.load_model.model, scenario, opts);
  write_trace(output_path(g, a.trace, "trace.csv"), trace, run);
  write_json(output_path(g, a.events, "events.json"), events_to_json(trace), run);
  if (!g.quiet) {
    out << trace.steps() << " steps, " << trace.count(EventKind::Trip) << " trips, "
        << trace.count(EventKind::Brownout) << " brownouts, " << fmt("%.4f", trace.energy_wh.back()) << " Wh\n";
  }
  return kOk;
}

struct IkArgs {
  std::string chain;
  std::string target;
  std::vector<std::string> freeze;
  std::string out;
};

int cmd_ik(const Globals& g, const IkArgs& a, Run& run, std::ostream& out) {
  const Config cfg = require_config(g, run);
  const std::string chain_name = a.chain.empty() ? cfg.ik.arm_chain : a.chain;
  if (chain_name.empty()) throw ValidationError("--chain", "no chain given and config has no ik.arm_chain");
  const KinematicChain& chain = cfg.chain(chain_name);
  if (a.target.empty()) throw ParseError("--target is required");
  IkTask task = cfg.ik.make_task(parse_pose(a.target));
  task.frozen_joints = parse_freeze(cfg, chain, a.freeze);
  const std::vector<double> q0 = chain.home_posture();
  task.posture_ref = q0;
  const Trajectory traj = solve_trajectory(chain, q0, task);
  std::vector<double> times;
  for (std::size_t k = 0; k < traj.samples.size(); ++k) times.push_back(k * traj.dt);
  write_trajectory_csv(output_path(g, a.out, "trajectory.csv"), times, traj.samples, run);
  if (!g.quiet) {
    out << to_string(traj.termination) << " after " << traj.steps() << " steps, position error "
        << fmt("%.6f", traj.position_error) << " m\n";
  }
  if (traj.termination != Termination::Reached) {
    throw DomainError("ik: " + to_string(traj.termination) + " with position error " +
                      fmt("%.4f", traj.position_error) + " m");
  }
  return kOk;
}

struct PerceiveArgs {
  std::string frame;
  std::string depth;
  std::string scene;
  std::string label = "red";
  std::string out;
};

int cmd_perceive(const Globals& g, const PerceiveArgs& a, Run& run, std::ostream& out) {
  const Config cfg = require_config(g, run);
  if (!cfg.camera) throw ValidationError("camera", "perceive needs a camera section");
  CameraMount mount = cfg.camera_mount();
  RgbdFrame frame;
  if (!a.scene.empty()) {
    run.inputs.push_back(a.scene);
    const Scene scene = load_scene(a.scene);
    mount = mount_for_scene(mount, scene);
    frame = render_scene(scene, mount, cfg.camera->intrinsics, cfg.camera->width, cfg.camera->height);
  } else {
    if (a.frame.empty() || a.depth.empty()) throw ParseError("perceive needs --scene or both --frame and --depth");
    run.inputs.push_back(a.frame);
    run.inputs.push_back(a.depth);
    frame = load_rgbd_png(a.frame, a.depth, cfg.camera->intrinsics);
  }
  const Detection det = detect_and_locate(frame, cfg.hsv_labels, mount, a.label);
  write_json(output_path(g, a.out, "detection.json"), detection_to_json(det), run);
  if (!g.quiet) {
    out << det.label << ": " << det.area << " px at base (" << fmt("%.4f", det.point_base.x()) << ", "
        << fmt("%.4f", det.point_base.y()) << ", " << fmt("%.4f", det.point_base.z()) << ")\n";
  }
  return kOk;
}

struct BudgetArgs {
  std::string profiles;
  std::vector<double> rates;
  double sigmas = 0.0;
  std::string out;
};

int cmd_budget(const Globals& g, const BudgetArgs& a, Run& run, std::ostream& out) {
  if (a.profiles.empty()) throw ParseError("--profiles is required");
  run.inputs.push_back(a.profiles);
  const auto profiles = profiles_from_json(parse_json_text(read_text_file(a.profiles), a.profiles));
  // No single action rate is known, so report a spread.
  const std::vector<double> rates = a.rates.empty() ? std::vector<double>{10.0, 30.0, 50.0, 100.0} : a.rates;
  for (double r : rates) {
    if (!(r > 0.0)) throw ValidationError("--action-rate", "must be > 0");
  }
  if (!(a.sigmas >= 0.0)) throw ValidationError("--sigmas", "must be >= 0");
  json reports = json::array();
  for (const auto& p : profiles) {
    const LatencyBudget b = budget_report(p, rates, a.sigmas);
    reports.push_back(to_json(b));
    if (!g.quiet) {
      out << p.model_name << ": f_replan " << fmt("%.1f", round_half_up(b.f_replan_max, 1)) << " Hz, max action rate "
          << fmt("%.1f", b.max_sustainable_action_rate) << " Hz\n";
    }
  }
  write_json(output_path(g, a.out, "budget.json"), {{"jitter_sigmas", a.sigmas}, {"profiles", reports}}, run);
  return kOk;
}

int cmd_stiffness(const Globals& g, const std::string& out_path, Run& run, std::ostream& out) {
  const Config cfg = require_config(g, run);
  if (cfg.link_profiles.empty()) throw ValidationError("link_profiles", "config has no link profiles");
  const auto rows = stiffness_report(cfg.link_profiles, cfg.stall_torque());
  write_json(output_path(g, out_path, "stiffness.json"), {{"stall_torque_nm", cfg.stall_torque()}, {"profiles", to_json(rows)}},
             run);
  if (!g.quiet) {
    for (const auto& r : rows)
      out << r.name << ": k " << fmt("%.1f", r.stiffness) << " N/m, k/m " << fmt("%.1f", r.stiffness_per_mass) << '\n';
  }
  return kOk;
}

struct ScenarioArgs {
  std::string scene;
  std::string label = "red";
  bool no_fuses = false;
};

/// Conservative torque envelope: every bus holds its configured cap for the whole motion.
Scenario envelope_scenario(const PowerTopology& topology, double motion_start, double motion_end, double tail) {
  Scenario s;
  s.dt = 1e-3;
  s.duration = motion_end + tail;
  for (const auto& bus : topology.buses) {
    s.commands.push_back({motion_start, motion_end, bus.id, bus.active_count, static_cast<double>(bus.torque_cap),
                          bus.accel_setting});
  }
  return s;
}

int cmd_scenario(const Globals& g, bool seed_given, const ScenarioArgs& a, Run& run, std::ostream& out) {
  const Config cfg = require_config(g, run);
  if (a.scene.empty()) throw ParseError("--scene is required");
  run.inputs.push_back(a.scene);

  const Detection det = stage("perceive", [&] {
    if (!cfg.camera) throw ValidationError("camera", "scenario needs a camera section");
    const Scene scene = load_scene(a.scene);
    const CameraMount mount = mount_for_scene(cfg.camera_mount(), scene);
    const RgbdFrame frame = render_scene(scene, mount, cfg.camera->intrinsics, cfg.camera->width, cfg.camera->height);
    return detect_and_locate(frame, cfg.hsv_labels, mount, a.label);
  });
  write_json((fs::path(g.out_dir) / "detection.json").string(), detection_to_json(det), run);

  const KinematicChain& chain = stage("ik", [&]() -> const KinematicChain& {
    if (cfg.ik.arm_chain.empty()) throw ValidationError("ik.arm_chain", "scenario needs an arm chain");
    return cfg.chain(cfg.ik.arm_chain);
  });
  const std::vector<double> q0 = chain.home_posture();
  const Trajectory traj = stage("ik", [&] {
    IkTask task = cfg.ik.make_task(make_transform(cfg.ik.grasp_orientation, det.point_base));
    task.posture_ref = q0;
    return solve_trajectory(chain, q0, task);
  });

  // Trajectory rows, then the stepped gripper closure on the first non-IK joint.
  std::vector<double> times;
  std::vector<std::vector<double>> samples = traj.samples;
  for (std::size_t k = 0; k < samples.size(); ++k) times.push_back(k * traj.dt);
  double motion_end = traj.steps() * traj.dt;
  if (traj.termination == Termination::Reached) {
    for (std::size_t j = 0; j < chain.dof(); ++j) {
      if (chain.joints[j].ik) continue;
      const auto& gs = cfg.ik.gripper;
      const auto cmds = gripper_close(gs.open, gs.closed, gs.step, gs.dwell);
      const double t0 = motion_end;
      for (const auto& c : cmds) {
        std::vector<double> q = samples.back();
        q[j] = std::clamp(c.position, chain.joints[j].limit_lo, chain.joints[j].limit_hi);
        samples.push_back(q);
        times.push_back(t0 + traj.dt + c.t);
      }
      motion_end = times.back();
      break;
    }
  }
  write_trajectory_csv((fs::path(g.out_dir) / "trajectory.csv").string(), times, samples, run);
  if (traj.termination != Termination::Reached) {
    throw DomainError("ik: " + to_string(traj.termination) + " with position error " +
                      fmt("%.4f", traj.position_error) + " m");
  }

  const double motion_start = 0.5;
  Scenario power = envelope_scenario(cfg.topology, motion_start, motion_start + motion_end, 1.0);
  if (seed_given) power = jitter_scenario(power, g.seed);
  write_json((fs::path(g.out_dir) / "commands.json").string(), to_json(power), run);
  SimOptions opts;
  opts.apply_fuses = !a.no_fuses;
  opts.margin_registers = cfg.load_model.margin_registers;
  const SimTrace trace = stage("simulate", [&] { return simulate(cfg.topology, cfg.load_model.model, power, opts); });
  write_trace((fs::path(g.out_dir) / "trace.csv").string(), trace, run);
  write_json((fs::path(g.out_dir) / "events.json").string(), events_to_json(trace), run);

  const std::size_t trips = trace.count(EventKind::Trip);
  if (!g.quiet) {
    out << "detected " << det.label << " at (" << fmt("%.4f", det.point_base.x()) << ", "
        << fmt("%.4f", det.point_base.y()) << ", " << fmt("%.4f", det.point_base.z()) << "); ik "
        << to_string(traj.termination) << " in " << traj.steps() << " steps, error " << fmt("%.6f", traj.position_error)
        << " m; " << trips << " trips\n";
  }
  if (trips > 0) throw Error("simulate: " + std::to_string(trips) + " trip event(s) on the power bus");
  return kOk;
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const Globals& g, const Run& run, int code, std::ostream& err) {
  const json doc = {{"command", run.command},
                    {"config_hash", hash_inputs(run.inputs)},
                    {"inputs", run.inputs},
                    {"seed", g.seed},
                    {"tool_version", TRIBUS_VERSION},
                    {"outputs", run.outputs},
                    {"exit_code", code},
                    {"timestamp", timestamp_utc()}};
  try {
    fs::create_directories(g.out_dir);
    std::ofstream out(fs::path(g.out_dir) / "manifest.json", std::ios::binary);
    out << doc.dump(2) << '\n';
  } catch (const std::exception& e) {
    err << "warning: could not write manifest: " << e.what() << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tri-bus mobile manipulator models: power budgeting, IK, perception, compute budgets"};
  app.set_version_flag("--version", TRIBUS_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "Config JSON");
  auto* seed_opt = app.add_option("--seed", g.seed, "Seed for command phase jitter");
  app.add_option("--out-dir", g.out_dir, "Directory for outputs and the run manifest");
  app.add_flag("--lenient", g.lenient, "Ignore unknown config keys");
  app.add_flag("--quiet", g.quiet, "Suppress the summary on stdout");

  auto* validate_cmd = app.add_subcommand("validate", "Check a config against every invariant");

  std::optional<int> margin;
  std::string fuse_out;
  auto* fuse_cmd = app.add_subcommand("fuse", "Synthesize torque-register fuse caps");
  fuse_cmd->add_option("--margin", margin, "Registers subtracted from every cap");
  fuse_cmd->add_option("--out", fuse_out, "Output JSON");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the fixed-step power simulation");
  sim_cmd->add_option("--scenario", sim.scenario, "Scenario JSON");
  sim_cmd->add_flag("--apply-fuses", sim.apply_fuses, "Clamp commands to synthesized caps");
  sim_cmd->add_option("--trace", sim.trace, "Trace CSV");
  sim_cmd->add_option("--events", sim.events, "Events JSON");

  IkArgs ik;
  auto* ik_cmd = app.add_subcommand("ik", "Solve a differential IK trajectory to a target pose");
  ik_cmd->add_option("--chain", ik.chain, "Chain name (default: ik.arm_chain)");
  ik_cmd->add_option("--target", ik.target, "Target pose x,y,z,qw,qx,qy,qz");
  ik_cmd->add_option("--freeze", ik.freeze, "Chain, joint name or joint index to hold fixed")->allow_extra_args(false);
  ik_cmd->add_option("--out", ik.out, "Trajectory CSV");

  PerceiveArgs per;
  auto* per_cmd = app.add_subcommand("perceive", "Locate a colored target in an RGB-D frame");
  per_cmd->add_option("--frame", per.frame, "8-bit color PNG");
  per_cmd->add_option("--depth", per.depth, "16-bit depth PNG in millimeters");
  per_cmd->add_option("--scene", per.scene, "Synthetic scene JSON");
  per_cmd->add_option("--label", per.label, "HSV label to detect");
  per_cmd->add_option("--out", per.out, "Detection JSON");

  BudgetArgs bud;
  auto* bud_cmd = app.add_subcommand("budget", "Replanning frequency and action-rate feasibility");
  bud_cmd->add_option("--profiles", bud.profiles, "Latency profiles JSON");
  bud_cmd->add_option("--action-rate", bud.rates, "Candidate action rate in Hz (repeatable)")->allow_extra_args(false);
  bud_cmd->add_option("--sigmas", bud.sigmas, "Latency jitter multiplier k");
  bud_cmd->add_option("--out", bud.out, "Output JSON");

  std::string stiff_out;
  auto* stiff_cmd = app.add_subcommand("stiffness", "Link stiffness, elastic energy and payload bound");
  stiff_cmd->add_option("--out", stiff_out, "Output JSON");

  ScenarioArgs sc;
  auto* sc_cmd = app.add_subcommand("scenario", "Perception, IK and power simulation end to end");
  sc_cmd->add_option("--scene", sc.scene, "Synthetic scene JSON");
  sc_cmd->add_option("--label", sc.label, "HSV label of the target");
  sc_cmd->add_flag("--no-fuses", sc.no_fuses, "Do not clamp torque to the synthesized caps");

  std::vector<const char*> argv{"tribus"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParse;
  }

  Run run;
  run.command = app.get_subcommands().front()->get_name();
  const bool seed_given = seed_opt->count() > 0;
  int code = kOk;
  try {
    if (validate_cmd->parsed()) code = cmd_validate(g, run, out);
    else if (fuse_cmd->parsed()) code = cmd_fuse(g, margin, fuse_out, run, out);
    else if (sim_cmd->parsed()) code = cmd_simulate(g, seed_given, sim, run, out);
    else if (ik_cmd->parsed()) code = cmd_ik(g, ik, run, out);
    else if (per_cmd->parsed()) code = cmd_perceive(g, per, run, out);
    else if (bud_cmd->parsed()) code = cmd_budget(g, bud, run, out);
    else if (stiff_cmd->parsed()) code = cmd_stiffness(g, stiff_out, run, out);
    else if (sc_cmd->parsed()) code = cmd_scenario(g, seed_given, sc, run, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    code = kParse;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    code = kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    code = kRuntime;
  }
  write_manifest(g, run, code, err);
  return code;
}

}  // namespace tribus::cli
