#pragma once

#include <Eigen/Geometry>
#include <string_view>

namespace tribus {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Transform = Eigen::Isometry3d;

/// Rotation of `angle` radians about unit `axis`.
Mat3 axis_rotation(const Vec3& axis, double angle);

/// Rotation vector (axis * angle, angle in [0, pi]) of a proper rotation.
Vec3 rotation_log(const Mat3& rotation);

/// Orthonormal with det = +1, to within `tol`.
bool is_proper_rotation(const Mat3& m, double tol = 1e-9);

Transform make_transform(const Mat3& rotation, const Vec3& translation);

/// Parses "x,y,z,qw,qx,qy,qz". The quaternion is normalized.
Transform parse_pose(std::string_view text);

}  // namespace tribus
