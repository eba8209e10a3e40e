#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tribus/kinematics.hpp"

namespace tribus {

struct FrameWeights {
  Vec3 position = Vec3::Ones();
  Vec3 orientation = Vec3::Ones();
};

struct IkTask {
  Transform target = Transform::Identity();
  FrameWeights frame_weight;
  /// Posture reference; empty means "hold the start posture".
  std::vector<double> posture_ref;
  /// Regularization weight lambda on (dq - dq_posture).
  double posture_weight = 1e-2;
  /// Fraction of the posture error requested per step (projected onto the
  /// frame task's null space).
  double posture_gain = 0.1;
  JointSet frozen_joints;
  double dt = 0.01;
  int max_steps = 200;
  double tol_pos = 1e-3;
  double tol_rot = 1e-2;
  /// Per-step twist clamp, as speeds (m/s, rad/s).
  double max_linear_speed = 0.2;
  double max_angular_speed = 1.0;
};

void validate(const IkTask& task, const KinematicChain& chain);

/// Joints frozen for this task: the task's set plus joints marked `ik = false`.
JointSet effective_frozen(const KinematicChain& chain, const IkTask& task);

/// Frame error twist (position error; rotation-log error) from the current pose to the target.
Eigen::Matrix<double, 6, 1> frame_error(const Transform& current, const Transform& target);

/// Quadratic subproblem solved by one IK step, exposed for inspection.
struct IkProblem {
  Eigen::MatrixXd hessian;   // J'W^2J + lambda I
  Eigen::VectorXd gradient;  // J'W^2 v + lambda dq_post
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::Matrix<double, 6, 1> twist;  // clamped v
  Eigen::VectorXd posture_step;       // dq_post
  Jacobian jacobian;
  Eigen::Matrix<double, 6, 1> weights;
};

IkProblem build_ik_problem(const KinematicChain& chain, std::span<const double> q, const IkTask& task);

/// Value of ||W(J dq - v)||^2 + lambda ||dq - dq_post||^2.
double ik_objective(const IkProblem& problem, const Eigen::VectorXd& dq, double lambda);

struct IkStepResult {
  Eigen::VectorXd dq;
  double kkt_residual = 0.0;
};

/// One differential IK step; dq respects joint and velocity limits and is zero on frozen joints.
IkStepResult ik_step(const KinematicChain& chain, std::span<const double> q, const IkTask& task);

enum class Termination { Reached, MaxSteps, Stalled };

/// Stalled: over the last kStallWindow steps the weighted task error shrank by
/// less than kStallEfficiency of the commanded twist, or a step moved the
/// joints by less than 1e-9 rad.
inline constexpr std::size_t kStallWindow = 10;
inline constexpr double kStallEfficiency = 0.05;

std::string to_string(Termination termination);

struct Trajectory {
  std::vector<std::vector<double>> samples;
  double dt = 0.01;
  Termination termination = Termination::MaxSteps;
  double position_error = 0.0;
  double rotation_error = 0.0;

  /// Number of steps taken (samples - 1).
  int steps() const { return static_cast<int>(samples.size()) - 1; }
};

Trajectory solve_trajectory(const KinematicChain& chain, std::span<const double> q0, const IkTask& task);

struct GripperCommand {
  double t = 0.0;
  double position = 0.0;
};

/// Stepped closure from `start` toward `end` (inclusive), one command per `dwell` seconds.
std::vector<GripperCommand> gripper_close(double start, double end, double step, double dwell);

}  // namespace tribus
