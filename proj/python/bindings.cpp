#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "tribus/compute_budget.hpp"
#include "tribus/config.hpp"
#include "tribus/errors.hpp"
#include "tribus/ik.hpp"
#include "tribus/kinematics.hpp"
#include "tribus/power_sim.hpp"
#include "tribus/soe_fuse.hpp"
#include "tribus/stiffness.hpp"
#include "tribus/synthetic_scene.hpp"

namespace py = pybind11;
using namespace tribus;

namespace {

py::dict fuse_dict(const FuseSetting& f) {
  py::dict d;
  d["bus_id"] = f.bus_id;
  d["torque_cap"] = f.torque_cap;
  d["operating_torque"] = f.operating_torque;
  d["predicted_load"] = f.predicted_load;
  d["load_at_cap"] = f.load_at_cap;
  d["port_limit"] = f.port_limit;
  d["headroom"] = f.headroom;
  return d;
}

py::dict trace_dict(const SimTrace& trace) {
  const auto steps = static_cast<Eigen::Index>(trace.steps());
  const auto ports = static_cast<Eigen::Index>(trace.ports());
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  py::dict d;
  d["t"] = Eigen::Map<const Eigen::VectorXd>(trace.t.data(), steps).eval();
  d["port_ids"] = trace.port_ids;
  d["current"] = Eigen::Map<const RowMajor>(trace.current.data(), steps, ports).eval();
  d["voltage"] = Eigen::Map<const RowMajor>(trace.voltage.data(), steps, ports).eval();
  d["energy_wh"] = Eigen::Map<const Eigen::VectorXd>(trace.energy_wh.data(), steps).eval();
  py::list events;
  for (const auto& e : trace.events) events.append(py::make_tuple(e.t, to_string(e.kind), e.port_id));
  d["events"] = events;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Power budgeting, differential IK, perception and compute-budget models";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
  py::register_exception<NotFoundError>(m, "NotFoundError", PyExc_LookupError);

  py::class_<LoadModel>(m, "LoadModel")
      .def(py::init([](std::map<int, double> table, double no_load, double slope, bool interpolate) {
             LoadModel lm;
             lm.inrush_table = std::move(table);
             lm.no_load_current = no_load;
             lm.current_slope = slope;
             lm.interpolate = interpolate;
             return lm;
           }),
           py::arg("inrush_table"), py::arg("no_load_current") = 0.18, py::arg("current_slope") = 2.52,
           py::arg("interpolate") = false)
      .def_readwrite("no_load_current", &LoadModel::no_load_current)
      .def_readwrite("current_slope", &LoadModel::current_slope)
      .def_readwrite("inrush_table", &LoadModel::inrush_table)
      .def("inrush", &LoadModel::inrush);

  m.def("bus_load", &bus_load, py::arg("model"), py::arg("n_active"), py::arg("tau"), py::arg("alpha"));
  m.def("max_torque", &max_torque, py::arg("model"), py::arg("port_limit"), py::arg("n_active"), py::arg("alpha"));
  m.def(
      "calibrate_inrush",
      [](const std::vector<std::tuple<int, double, int, double>>& rows, double no_load, double slope) {
        std::vector<CalibrationRow> cal;
        for (const auto& [n, tau, alpha, load] : rows) cal.push_back({n, tau, alpha, load});
        return calibrate_inrush(no_load, slope, cal);
      },
      py::arg("rows"), py::arg("no_load_current") = 0.18, py::arg("current_slope") = 2.52,
      "rows: (n_active, tau, alpha, observed_load) tuples -> {alpha: D}");

  py::class_<KinematicChain>(m, "KinematicChain")
      .def_readonly("name", &KinematicChain::name)
      .def_property_readonly("dof", &KinematicChain::dof)
      .def("home_posture", &KinematicChain::home_posture)
      .def("joint_names", [](const KinematicChain& c) {
        std::vector<std::string> names;
        for (const auto& j : c.joints) names.push_back(j.name);
        return names;
      });

  m.def("fk", [](const KinematicChain& c, const std::vector<double>& q) { return fk(c, q).matrix(); });
  m.def("jacobian", [](const KinematicChain& c, const std::vector<double>& q) { return Eigen::MatrixXd(jacobian(c, q)); });

  py::class_<Config>(m, "Config")
      .def_static(
          "load", [](const std::string& path, bool lenient) { return load_config(path, LoadOptions{lenient}); },
          py::arg("path"), py::arg("lenient") = false)
      .def_static(
          "from_json",
          [](const std::string& text, bool lenient) {
            return config_from_json(parse_json_text(text, "<string>"), LoadOptions{lenient});
          },
          py::arg("text"), py::arg("lenient") = false)
      .def("chain", &Config::chain, py::return_value_policy::copy)
      .def_property_readonly("chain_names",
                             [](const Config& c) {
                               std::vector<std::string> names;
                               for (const auto& kv : c.chains) names.push_back(kv.first);
                               return names;
                             })
      .def_property_readonly("load_model", [](const Config& c) { return c.load_model.model; })
      .def_property_readonly("stall_torque", &Config::stall_torque)
      .def(
          "fuses",
          [](const Config& c, std::optional<int> margin) {
            py::list out;
            for (const auto& f : synthesize_fuses(c.topology, c.load_model.model, margin.value_or(c.load_model.margin_registers)))
              out.append(fuse_dict(f));
            return out;
          },
          py::arg("margin") = py::none())
      .def("to_json", [](const Config& c) { return to_json(c).dump(); });

  m.def(
      "simulate",
      [](const Config& c, const std::string& scenario_path, bool apply_fuses, std::optional<std::uint64_t> seed) {
        Scenario s = load_scenario(scenario_path);
        if (seed) s = jitter_scenario(s, *seed);
        SimOptions opts;
        opts.apply_fuses = apply_fuses;
        opts.margin_registers = c.load_model.margin_registers;
        return trace_dict(simulate(c.topology, c.load_model.model, s, opts));
      },
      py::arg("config"), py::arg("scenario"), py::arg("apply_fuses") = false, py::arg("seed") = py::none());

  m.def(
      "solve_ik",
      [](const Config& c, const std::string& chain_name, const Eigen::Vector3d& target) {
        const KinematicChain& chain = c.chain(chain_name);
        IkTask task = c.ik.make_task(make_transform(c.ik.grasp_orientation, target));
        const auto q0 = chain.home_posture();
        task.posture_ref = q0;
        const Trajectory traj = solve_trajectory(chain, q0, task);
        py::dict d;
        d["samples"] = traj.samples;
        d["termination"] = to_string(traj.termination);
        d["position_error"] = traj.position_error;
        d["dt"] = traj.dt;
        return d;
      },
      py::arg("config"), py::arg("chain"), py::arg("target"));

  m.def(
      "detect",
      [](const Config& c, const std::string& scene_path, const std::string& label) {
        if (!c.camera) throw ValidationError("camera", "config has no camera section");
        const Scene scene = load_scene(scene_path);
        const CameraMount mount = mount_for_scene(c.camera_mount(), scene);
        const RgbdFrame frame = render_scene(scene, mount, c.camera->intrinsics, c.camera->width, c.camera->height);
        const Detection det = detect_and_locate(frame, c.hsv_labels, mount, label);
        py::dict d;
        d["label"] = det.label;
        d["area"] = det.area;
        d["point_base"] = Eigen::Vector3d(det.point_base);
        d["point_camera"] = Eigen::Vector3d(det.point_camera);
        return d;
      },
      py::arg("config"), py::arg("scene"), py::arg("label") = "red");

  m.def("replan_frequency", [](double mean_latency) {
    LatencyProfile p;
    p.mean_latency = mean_latency;
    return replan_frequency(p);
  });
  m.def(
      "schedule_feasibility",
      [](int prefix, double mean, double std_dev, double rate, double sigmas) {
        LatencyProfile p;
        p.prefix = p.horizon = prefix;
        p.mean_latency = mean;
        p.std_latency = std_dev;
        const ScheduleCheck c = schedule_feasibility(p, rate, sigmas);
        return py::make_tuple(c.feasible, c.slack);
      },
      py::arg("prefix"), py::arg("mean_latency"), py::arg("std_latency"), py::arg("action_rate"),
      py::arg("jitter_sigmas") = 0.0);
  m.def("round_half_up", &round_half_up, py::arg("value"), py::arg("decimals") = 1);

  m.def(
      "stiffness_from_deflection",
      [](double load_mass, double deflection) {
        LinkProfile p;
        p.test_load_mass = load_mass;
        p.measured_deflection = deflection;
        return stiffness_from_deflection(p);
      },
      py::arg("load_mass"), py::arg("deflection"));
  m.def("elastic_energy", &elastic_energy, py::arg("k"), py::arg("delta"));
  m.def("payload_bound", &payload_bound, py::arg("reach"), py::arg("stall_torque"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");

  m.attr("__version__") = TRIBUS_VERSION;
}
