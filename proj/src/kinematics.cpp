#include "tribus/kinematics.hpp"

#include <string>

#include "tribus/errors.hpp"

namespace tribus {

void check_joint_state(const KinematicChain& chain, std::span<const double> q) {
  if (q.size() != chain.dof())
    throw DomainError("joint state has " + std::to_string(q.size()) + " entries, chain has " + std::to_string(chain.dof()));
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto& j = chain.joints[i];
    if (!(q[i] >= j.limit_lo - 1e-12 && q[i] <= j.limit_hi + 1e-12))
      throw DomainError("joint " + std::to_string(i) + " (" + j.name + ") = " + std::to_string(q[i]) +
                        " outside [" + std::to_string(j.limit_lo) + ", " + std::to_string(j.limit_hi) + "]");
  }
}

std::vector<Transform> joint_frames(const KinematicChain& chain, std::span<const double> q) {
  check_joint_state(chain, q);
  std::vector<Transform> frames;
  frames.reserve(chain.dof() + 1);
  Transform pose = Transform::Identity();
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    pose = pose * chain.joints[i].origin;
    frames.push_back(pose);
    pose.linear() = pose.linear() * axis_rotation(chain.joints[i].axis, q[i]);
  }
  frames.push_back(pose * chain.end_effector_offset);
  return frames;
}

Transform fk(const KinematicChain& chain, std::span<const double> q) {
  Transform pose = joint_frames(chain, q).back();
  // Re-orthonormalize so long chains stay a proper rotation to machine precision.
  Eigen::JacobiSVD<Mat3> svd(pose.linear(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  pose.linear() = svd.matrixU() * svd.matrixV().transpose();
  return pose;
}

Jacobian jacobian(const KinematicChain& chain, std::span<const double> q, const JointSet& masked) {
  const auto frames = joint_frames(chain, q);
  const Vec3 p_end = frames.back().translation();
  Jacobian jac = Jacobian::Zero(6, static_cast<Eigen::Index>(chain.dof()));
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    if (masked.count(i)) continue;
    const Vec3 z = frames[i].linear() * chain.joints[i].axis;
    const Vec3 p = frames[i].translation();
    jac.block<3, 1>(0, static_cast<Eigen::Index>(i)) = z.cross(p_end - p);
    jac.block<3, 1>(3, static_cast<Eigen::Index>(i)) = z;
  }
  return jac;
}

double reach_from_joint(const KinematicChain& chain, std::size_t from) {
  double reach = 0.0;
  for (std::size_t i = from + 1; i < chain.dof(); ++i) reach += chain.joints[i].origin.translation().norm();
  return reach + chain.end_effector_offset.translation().norm();
}

}  // namespace tribus
