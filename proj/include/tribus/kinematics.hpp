#pragma once

#include <set>
#include <span>

#include <Eigen/Core>

#include "tribus/robot_model.hpp"

namespace tribus {

using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using JointSet = std::set<std::size_t>;

/// Throws DomainError if q has the wrong length or leaves the joint limits.
void check_joint_state(const KinematicChain& chain, std::span<const double> q);

/// End-effector pose in the chain base frame.
Transform fk(const KinematicChain& chain, std::span<const double> q);

/// World-frame pose of each joint after its origin (the frame the joint rotates in),
/// followed by the end-effector pose as the last element.
std::vector<Transform> joint_frames(const KinematicChain& chain, std::span<const double> q);

/// Geometric Jacobian in the base frame, rows (linear; angular). Columns of
/// joints in `masked` are zero.
Jacobian jacobian(const KinematicChain& chain, std::span<const double> q, const JointSet& masked = {});

/// Sum of link offsets downstream of joint `from`: the radius of the reach
/// sphere around that joint's origin.
double reach_from_joint(const KinematicChain& chain, std::size_t from);

}  // namespace tribus
