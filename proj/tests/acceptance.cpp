// Acceptance checks. One PASS/FAIL line per criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"
#include "tribus/box_qp.hpp"
#include "tribus/compute_budget.hpp"
#include "tribus/errors.hpp"
#include "tribus/ik.hpp"
#include "tribus/perception.hpp"
#include "tribus/power_sim.hpp"
#include "tribus/stiffness.hpp"
#include "tribus/synthetic_scene.hpp"

using namespace tribus;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and limits.
constexpr double kLoadTol = 0.005;          // A
constexpr double kVoltageBand = 0.1;        // V around nominal
constexpr double kPostTripVoltage = 1.0;    // V
constexpr double kEnergyTarget = 14.4;      // Wh
constexpr double kEnergyRelTol = 0.02;
constexpr double kJacobianTol = 1e-6;
constexpr double kIkPosTol = 1e-3;          // m
constexpr double kIkHorizon = 2.0;         // s
constexpr double kIkTravelFraction = 0.8;
constexpr double kQpTol = 1e-8;
constexpr double kLocalizationTol = 2e-3;   // m
constexpr double kMaxRange = 1.0;           // m
constexpr double kRoundTripTol = 0.5;       // px
constexpr double kStiffnessTarget = 490.3;  // N/m
constexpr double kStiffnessTol = 1.0;
constexpr double kEnergyAt2mm = 9.81e-4;    // J
constexpr double kEnergyAt2mmTol = 1e-6;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

Outcome bus_caps() {
  const Config& cfg = testing::reference_config();
  const LoadModel& m = cfg.load_model.model;
  Outcome o;
  const double a = bus_load(m, 5, 650, 20);
  const double b = bus_load(m, 3, 450, 40);
  o.pass = std::abs(a - 9.84) <= kLoadTol && std::abs(b - 4.90) <= kLoadTol;
  const auto fuses = synthesize_fuses(cfg.topology, m);
  const int cap_a = fuses[0].torque_cap;
  const int cap_b = fuses[1].torque_cap;
  o.pass = o.pass && cap_a >= 650 && cap_b >= 450;
  const double limit_a = cfg.topology.port(cfg.topology.bus("bus_a").port_id).budget_limit();
  const double limit_b = cfg.topology.port(cfg.topology.bus("bus_b").port_id).budget_limit();
  o.pass = o.pass && a <= limit_a && b <= limit_b;
  o.detail = "I_A=" + fmt("%.4f", a) + " I_B=" + fmt("%.4f", b) + " caps " + std::to_string(cap_a) + "/" +
             std::to_string(cap_b) + " limits " + fmt("%.2f", limit_a) + "/" + fmt("%.2f", limit_b);
  return o;
}

Outcome replan_rates() {
  const auto profiles = profiles_from_json(
      parse_json_text(read_text_file(testing::source_path("data/profiles/policies.json")), "policies.json"));
  const double expected[] = {27.8, 1.8, 1.4};
  Outcome o;
  for (std::size_t i = 0; i < profiles.size() && i < 3; ++i) {
    const double f = round_half_up(replan_frequency(profiles[i]), 1);
    o.pass = o.pass && std::abs(f - expected[i]) < 1e-9;
    o.detail += profiles[i].model_name + "=" + fmt("%.1f", f) + "(want " + fmt("%.1f", expected[i]) + ") ";
  }
  o.pass = o.pass && profiles.size() == 3;
  return o;
}

Outcome stress() {
  const Config& cfg = testing::reference_config();
  std::mt19937_64 rng(20240601);
  constexpr int kScenarios = 100;
  int trips = 0;
  double worst = 0.0;
  for (int i = 0; i < kScenarios; ++i) {
    const Scenario s = testing::fuse_respecting_scenario(cfg, rng, 60.0, 1e-3);
    const SimTrace tr = simulate(cfg.topology, cfg.load_model.model, s);
    trips += static_cast<int>(tr.count(EventKind::Trip));
    for (std::size_t k = 0; k < tr.voltage.size(); ++k) {
      const double nominal = cfg.topology.ports[k % tr.ports()].nominal_voltage;
      worst = std::max(worst, std::abs(tr.voltage[k] - nominal));
    }
  }
  const Config& shared = testing::shared_bus_config();
  const Scenario base = load_scenario(testing::source_path("data/scenarios/shared_bus.json"));
  int seeds_tripped = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SimTrace tr = simulate(shared.topology, shared.load_model.model, jitter_scenario(base, seed));
    const auto it = std::find_if(tr.events.begin(), tr.events.end(), [](const SimEvent& e) { return e.kind == EventKind::Trip; });
    if (it == tr.events.end()) continue;
    const std::size_t p = tr.port_index(it->port_id);
    bool low = true;
    for (std::size_t k = 0; k < tr.steps(); ++k) {
      if (tr.t[k] >= it->t) low = low && tr.voltage_at(k, p) < kPostTripVoltage;
    }
    if (low) ++seeds_tripped;
  }
  Outcome o;
  o.pass = trips == 0 && worst <= kVoltageBand + 1e-12 && seeds_tripped == 5;
  o.detail = std::to_string(kScenarios) + " scenarios, " + std::to_string(trips) + " trips, max |dV| " +
             fmt("%.4f", worst) + " V; shared bus tripped in " + std::to_string(seeds_tripped) + "/5 seeds";
  return o;
}

Outcome energy() {
  const Config& cfg = testing::reference_config();
  const SimTrace tr = simulate(cfg.topology, cfg.load_model.model,
                               load_scenario(testing::source_path("data/scenarios/full_load_30min.json")), {true});
  const double wh = tr.energy_wh.back();
  Outcome o;
  o.pass = std::abs(wh - kEnergyTarget) <= kEnergyRelTol * kEnergyTarget;
  o.detail = fmt("%.4f", wh) + " Wh (" + fmt("%.2f", 100.0 * wh / cfg.topology.battery_wh) + "% of battery)";
  return o;
}

Outcome ik_suite() {
  const Config& cfg = testing::reference_config();
  const KinematicChain& arm = cfg.chain("arm");
  std::mt19937_64 rng(515);
  Outcome o;

  double jac_err = 0.0;
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> q;
    for (const auto& j : arm.joints) q.push_back(testing::uniform(rng, j.limit_lo + 2 * h, j.limit_hi - 2 * h));
    const Jacobian jac = jacobian(arm, q);
    const Transform base = fk(arm, q);
    for (std::size_t i = 0; i < arm.dof(); ++i) {
      auto qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      const Transform tp = fk(arm, qp), tm = fk(arm, qm);
      Eigen::Matrix<double, 6, 1> col;
      col << (tp.translation() - tm.translation()) / (2 * h),
          (rotation_log(tp.linear() * base.linear().transpose()) - rotation_log(tm.linear() * base.linear().transpose())) / (2 * h);
      jac_err = std::max(jac_err, (jac.col(static_cast<Eigen::Index>(i)) - col).cwiseAbs().maxCoeff());
    }
  }

  // Targets are forward images of random postures near home. The twist clamp caps
  // travel at max_linear_speed * 2 s, so targets beyond most of that are resampled.
  int reached = 0, violations = 0;
  double worst = 0.0;
  const auto home = arm.home_posture();
  const Vec3 start = fk(arm, home).translation();
  const double travel = kIkTravelFraction * cfg.ik.max_linear_speed * kIkHorizon;
  for (int trial = 0; trial < 50; ++trial) {
    Transform target = Transform::Identity();
    do {
      std::vector<double> q = home;
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (!arm.joints[i].ik) continue;
        q[i] = std::clamp(q[i] + testing::uniform(rng, -0.6, 0.6), arm.joints[i].limit_lo, arm.joints[i].limit_hi);
      }
      target.translation() = fk(arm, q).translation();
    } while ((target.translation() - start).norm() > travel);
    IkTask task = cfg.ik.make_task(target);
    task.dt = 0.01;
    task.max_steps = static_cast<int>(std::lround(kIkHorizon / task.dt));  // 2 s at 100 Hz
    task.posture_ref = home;
    const Trajectory traj = solve_trajectory(arm, home, task);
    if (traj.termination == Termination::Reached && traj.position_error < kIkPosTol) ++reached;
    worst = std::max(worst, traj.position_error);
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
      for (std::size_t i = 0; i < arm.dof(); ++i) {
        const auto& j = arm.joints[i];
        const double v = traj.samples[k][i];
        if (v < j.limit_lo || v > j.limit_hi) ++violations;
        if (k > 0 && std::abs(v - traj.samples[k - 1][i]) > j.vel_limit * task.dt + 1e-12) ++violations;
      }
    }
  }

  // Box QP against enumeration of every bound assignment on 3 variables.
  double qp_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Matrix3d a;
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = testing::uniform(rng, -1, 1);
    const Eigen::MatrixXd H = a * a.transpose() + 0.05 * Eigen::Matrix3d::Identity();
    Eigen::VectorXd g(3), lo(3), hi(3);
    for (int i = 0; i < 3; ++i) {
      g[i] = testing::uniform(rng, -2, 2);
      lo[i] = -testing::uniform(rng, 0, 1);
      hi[i] = testing::uniform(rng, 0, 1);
    }
    const Eigen::VectorXd x = solve_box_qp(H, g, lo, hi).x;
    double best_f = INFINITY;
    Eigen::VectorXd best;
    for (int c = 0; c < 27; ++c) {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
      std::vector<int> free;
      for (int i = 0, code = c; i < 3; ++i, code /= 3) {
        if (code % 3 == 0) y[i] = lo[i];
        else if (code % 3 == 1) y[i] = hi[i];
        else free.push_back(i);
      }
      if (!free.empty()) {
        const auto m = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXd A(m, m);
        Eigen::VectorXd rhs(m);
        for (Eigen::Index r = 0; r < m; ++r) {
          rhs[r] = g[free[r]] - H.row(free[r]).dot(y);
          for (Eigen::Index s = 0; s < m; ++s) A(r, s) = H(free[r], free[s]);
        }
        const Eigen::VectorXd z = A.ldlt().solve(rhs);
        for (Eigen::Index r = 0; r < m; ++r) y[free[r]] = z[r];
      }
      if (((y - lo).array() < -1e-12).any() || ((y - hi).array() > 1e-12).any()) continue;
      const double f = 0.5 * y.dot(H * y) - g.dot(y);
      if (f < best_f) {
        best_f = f;
        best = y;
      }
    }
    qp_err = std::max(qp_err, (x - best).cwiseAbs().maxCoeff());
  }

  o.pass = jac_err < kJacobianTol && reached == 50 && violations == 0 && qp_err < kQpTol;
  o.detail = "jacobian err " + fmt("%.2e", jac_err) + ", reached " + std::to_string(reached) + "/50 (worst " +
             fmt("%.2e", worst) + " m), " + std::to_string(violations) + " bound violations, qp err " + fmt("%.2e", qp_err);
  return o;
}

Outcome perception_suite() {
  const Config& cfg = testing::reference_config();
  const CameraConfig& cam = *cfg.camera;
  std::mt19937_64 rng(66);
  double worst = 0.0;
  int located = 0;
  for (int i = 0; i < 20; ++i) {
    CameraMount mount = cfg.camera_mount();
    mount.head_pan = testing::uniform(rng, -0.3, 0.3);
    mount.head_tilt = testing::uniform(rng, 0.6, 1.0);
    // Place the target on the optical axis side of the image, within range.
    const Transform pose = mount.camera_pose();
    const double range = testing::uniform(rng, 0.3, kMaxRange);
    const Vec3 in_cam(testing::uniform(rng, -0.1, 0.1) * range, testing::uniform(rng, -0.1, 0.1) * range, range);
    Scene scene;
    SceneObject target;
    target.shape = Shape::Disk;
    target.radius = testing::uniform(rng, 0.015, 0.03);
    target.center = pose * in_cam + mount.calibration_offset;
    target.color = {230, 20, 20};
    SceneObject distractor = target;
    distractor.color = {20, 40, 220};
    distractor.center += pose.linear() * Vec3(0.12 * range, 0.0, 0.05);
    scene.objects = {target, distractor};
    const RgbdFrame frame = render_scene(scene, mount, cam.intrinsics, cam.width, cam.height);
    try {
      const Detection d = detect_and_locate(frame, cfg.hsv_labels, mount, "red");
      worst = std::max(worst, (d.point_base - target.center).norm());
      ++located;
    } catch (const Error&) {
      worst = INFINITY;
    }
  }
  double round_trip = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 px(testing::uniform(rng, 0, cam.width), testing::uniform(rng, 0, cam.height));
    const double depth = testing::uniform(rng, 0.05, kMaxRange);
    round_trip = std::max(round_trip, (project(cam.intrinsics, deproject(cam.intrinsics, px, depth)) - px).norm());
  }
  Outcome o;
  o.pass = located == 20 && worst < kLocalizationTol && round_trip < kRoundTripTol;
  o.detail = std::to_string(located) + "/20 located, worst error " + fmt("%.3e", worst) + " m, round trip " +
             fmt("%.2e", round_trip) + " px";
  return o;
}

Outcome stiffness() {
  const Config& cfg = testing::reference_config();
  const auto rows = stiffness_report(cfg.link_profiles, cfg.stall_torque());
  Outcome o;
  int shell = -1, infill = -1;
  double k_shell = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].name == "High-Shell") {
      shell = static_cast<int>(i);
      k_shell = rows[i].stiffness;
    }
    if (rows[i].name == "High-Infill") infill = static_cast<int>(i);
  }
  const double u = elastic_energy(k_shell, 0.002);
  o.pass = shell >= 0 && infill >= 0 && shell < infill && std::abs(k_shell - kStiffnessTarget) <= kStiffnessTol &&
           std::abs(u - kEnergyAt2mm) <= kEnergyAt2mmTol;
  o.detail = "k=" + fmt("%.2f", k_shell) + " N/m, U(2 mm)=" + fmt("%.4e", u) + " J, rank shell " +
             std::to_string(shell + 1) + " infill " + std::to_string(infill + 1);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const std::string config = testing::source_path("configs/tribus.json");
  const std::string scene = testing::source_path("data/scenes/red_cube_030.json");
  std::vector<fs::path> dirs = {testing::scratch_dir("acc_det_a"), testing::scratch_dir("acc_det_b")};
  Outcome o;
  for (const auto& d : dirs) {
    std::ostringstream out, err;
    const int code = cli::run({"--config", config, "--seed", "11", "--out-dir", d.string(), "--quiet", "scenario",
                               "--scene", scene},
                              out, err);
    if (code != 0) {
      o.pass = false;
      o.detail = "scenario exited " + std::to_string(code) + ": " + err.str();
      return o;
    }
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    const auto name = entry.path().filename();
    if (name == "manifest.json") continue;  // carries a timestamp
    ++files;
    if (slurp(entry.path()) != slurp(dirs[1] / name)) {
      o.pass = false;
      o.detail += name.string() + " differs; ";
    }
  }
  o.pass = o.pass && files >= 5;
  o.detail += std::to_string(files) + " output files compared";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds, 0 = none
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "bus load and torque caps", 1.0, bus_caps},
      {2, "replanning frequencies", 1.0, replan_rates},
      {3, "fused stress and shared-bus trip", 30.0, stress},
      {4, "30 min full-load energy", 5.0, energy},
      {5, "ik suite", 60.0, ik_suite},
      {6, "perception suite", 10.0, perception_suite},
      {7, "link stiffness", 1.0, stiffness},
      {8, "scenario determinism", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.time_limit <= 0.0 || secs < c.time_limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("AC%d %s  %s: %s [%.2f s%s]\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                in_time ? "" : ", over time limit");
  }
  std::fflush(stdout);
  return failures;
}
