#include "tribus/ik.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "tribus/box_qp.hpp"
#include "tribus/errors.hpp"

namespace tribus {

std::string to_string(Termination termination) {
  switch (termination) {
    case Termination::Reached: return "reached";
    case Termination::MaxSteps: return "max_steps";
    case Termination::Stalled: return "stalled";
  }
  return "unknown";
}

JointSet effective_frozen(const KinematicChain& chain, const IkTask& task) {
  JointSet frozen = task.frozen_joints;
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    if (!chain.joints[i].ik) frozen.insert(i);
  }
  return frozen;
}

void validate(const IkTask& task, const KinematicChain& chain) {
  if (!(task.dt > 0.0)) throw DomainError("ik task: dt must be > 0");
  if ((task.frame_weight.position.array() < 0.0).any() || (task.frame_weight.orientation.array() < 0.0).any())
    throw DomainError("ik task: frame weights must be >= 0");
  if (!(task.posture_weight >= 0.0)) throw DomainError("ik task: posture weight must be >= 0");
  if (!(task.posture_gain >= 0.0)) throw DomainError("ik task: posture gain must be >= 0");
  if (task.max_steps < 0) throw DomainError("ik task: max_steps must be >= 0");
  if (!task.posture_ref.empty()) check_joint_state(chain, task.posture_ref);
  for (std::size_t j : task.frozen_joints) {
    if (j >= chain.dof()) throw DomainError("ik task: frozen joint index " + std::to_string(j) + " out of range");
  }
  if (effective_frozen(chain, task).size() >= chain.dof()) throw DomainError("ik task: every joint is frozen");
}

Eigen::Matrix<double, 6, 1> frame_error(const Transform& current, const Transform& target) {
  Eigen::Matrix<double, 6, 1> e;
  e.head<3>() = target.translation() - current.translation();
  e.tail<3>() = rotation_log(target.linear() * current.linear().transpose());
  return e;
}

namespace {

Vec3 clamp_norm(const Vec3& v, double max_norm) {
  const double n = v.norm();
  return n > max_norm ? Vec3(v * (max_norm / n)) : v;
}

}  // namespace

IkProblem build_ik_problem(const KinematicChain& chain, std::span<const double> q, const IkTask& task) {
  validate(task, chain);
  check_joint_state(chain, q);
  const auto n = static_cast<Eigen::Index>(chain.dof());
  const JointSet frozen = effective_frozen(chain, task);

  IkProblem pb;
  const Eigen::Matrix<double, 6, 1> err = frame_error(fk(chain, q), task.target);
  pb.twist.head<3>() = clamp_norm(err.head<3>(), task.max_linear_speed * task.dt);
  pb.twist.tail<3>() = clamp_norm(err.tail<3>(), task.max_angular_speed * task.dt);
  pb.weights << task.frame_weight.position, task.frame_weight.orientation;
  pb.jacobian = jacobian(chain, q, frozen);

  const Eigen::MatrixXd weighted = pb.weights.asDiagonal() * pb.jacobian;

  // Posture pull, restricted to the null space of the weighted frame task.
  Eigen::VectorXd pull = Eigen::VectorXd::Zero(n);
  if (!task.posture_ref.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!frozen.count(static_cast<std::size_t>(i))) pull[i] = task.posture_gain * (task.posture_ref[i] - q[i]);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(weighted, Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  const Eigen::Index rank = svd.rank();
  const Eigen::MatrixXd row_basis = svd.matrixV().leftCols(rank);
  pb.posture_step = pull - row_basis * (row_basis.transpose() * pull);

  const double lambda = task.posture_weight;
  pb.hessian = weighted.transpose() * weighted + lambda * Eigen::MatrixXd::Identity(n, n);
  pb.gradient = weighted.transpose() * (pb.weights.asDiagonal() * pb.twist) + lambda * pb.posture_step;

  pb.lower.resize(n);
  pb.upper.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& j = chain.joints[static_cast<std::size_t>(i)];
    if (frozen.count(static_cast<std::size_t>(i))) {
      pb.lower[i] = pb.upper[i] = 0.0;
      continue;
    }
    const double v = j.vel_limit * task.dt;
    pb.lower[i] = std::min(0.0, std::max(j.limit_lo - q[i], -v));
    pb.upper[i] = std::max(0.0, std::min(j.limit_hi - q[i], v));
  }
  return pb;
}

double ik_objective(const IkProblem& problem, const Eigen::VectorXd& dq, double lambda) {
  const Eigen::Matrix<double, 6, 1> task = problem.weights.asDiagonal() * (problem.jacobian * dq - problem.twist);
  return task.squaredNorm() + lambda * (dq - problem.posture_step).squaredNorm();
}

IkStepResult ik_step(const KinematicChain& chain, std::span<const double> q, const IkTask& task) {
  const IkProblem pb = build_ik_problem(chain, q, task);
  const BoxQpResult qp = solve_box_qp(pb.hessian, pb.gradient, pb.lower, pb.upper);
  IkStepResult out;
  out.dq = qp.x.cwiseMax(pb.lower).cwiseMin(pb.upper);
  out.kkt_residual = qp.kkt_residual;
  return out;
}

namespace {

struct TaskError {
  double position;
  double rotation;
  double weighted;
  double commanded;  // weighted norm of the clamped twist
};

TaskError task_error(const KinematicChain& chain, std::span<const double> q, const IkTask& task) {
  const auto e = frame_error(fk(chain, q), task.target);
  Eigen::Matrix<double, 6, 1> w;
  w << task.frame_weight.position, task.frame_weight.orientation;
  Eigen::Matrix<double, 6, 1> v;
  v << clamp_norm(e.head<3>(), task.max_linear_speed * task.dt), clamp_norm(e.tail<3>(), task.max_angular_speed * task.dt);
  return {e.head<3>().norm(), e.tail<3>().norm(), w.cwiseProduct(e).norm(), w.cwiseProduct(v).norm()};
}

bool reached(const TaskError& e, const IkTask& task) {
  const bool check_pos = task.frame_weight.position.maxCoeff() > 0.0;
  const bool check_rot = task.frame_weight.orientation.maxCoeff() > 0.0;
  return (!check_pos || e.position < task.tol_pos) && (!check_rot || e.rotation < task.tol_rot);
}

}  // namespace

Trajectory solve_trajectory(const KinematicChain& chain, std::span<const double> q0, const IkTask& task) {
  check_joint_state(chain, q0);
  IkTask local = task;
  if (local.posture_ref.empty()) local.posture_ref.assign(q0.begin(), q0.end());
  validate(local, chain);

  Trajectory traj;
  traj.dt = local.dt;
  std::vector<double> q(q0.begin(), q0.end());
  traj.samples.push_back(q);
  std::vector<double> history;
  std::vector<double> commanded;
  for (int step = 0;; ++step) {
    const TaskError e = task_error(chain, q, local);
    traj.position_error = e.position;
    traj.rotation_error = e.rotation;
    history.push_back(e.weighted);
    commanded.push_back(e.commanded);
    if (reached(e, local)) {
      traj.termination = Termination::Reached;
      break;
    }
    if (step >= local.max_steps) {
      traj.termination = Termination::MaxSteps;
      break;
    }
    // Little task progress for what was asked; joints may still drift in the null space.
    if (history.size() > kStallWindow) {
      const std::size_t first = history.size() - 1 - kStallWindow;
      double asked = 0.0;
      for (std::size_t k = first; k + 1 < commanded.size(); ++k) asked += commanded[k];
      if (history[first] - e.weighted < kStallEfficiency * asked) {
        traj.termination = Termination::Stalled;
        break;
      }
    }
    const IkStepResult s = ik_step(chain, q, local);
    if (s.dq.norm() < 1e-9) {
      traj.termination = Termination::Stalled;
      break;
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto& j = chain.joints[i];
      q[i] = std::clamp(q[i] + s.dq[static_cast<Eigen::Index>(i)], j.limit_lo, j.limit_hi);
    }
    traj.samples.push_back(q);
  }
  return traj;
}

std::vector<GripperCommand> gripper_close(double start, double end, double step, double dwell) {
  if (!(step > 0.0)) throw DomainError("gripper step must be > 0");
  if (!(dwell >= 0.0)) throw DomainError("gripper dwell must be >= 0");
  std::vector<GripperCommand> out;
  const double span = std::abs(end - start);
  if (span == 0.0) {
    out.push_back({0.0, start});
    return out;
  }
  const double dir = end > start ? 1.0 : -1.0;
  const auto intervals = static_cast<int>(std::ceil(span / step - 1e-9));
  for (int k = 0; k <= intervals; ++k) {
    const double pos = k == intervals ? end : start + dir * step * k;
    out.push_back({k * dwell, pos});
  }
  return out;
}

}  // namespace tribus
