#include "tribus/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "tribus/errors.hpp"

namespace tribus {

Mat3 axis_rotation(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

Vec3 rotation_log(const Mat3& rotation) {
  const double cos_angle = std::clamp((rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double angle = std::acos(cos_angle);
  const Vec3 skew(rotation(2, 1) - rotation(1, 2), rotation(0, 2) - rotation(2, 0), rotation(1, 0) - rotation(0, 1));
  if (angle < 1e-6) {
    // First-order expansion around identity.
    return 0.5 * skew;
  }
  if (M_PI - angle < 1e-6) {
    // Near pi the skew part vanishes; recover the axis from the symmetric part.
    const Mat3 sym = (rotation + Mat3::Identity()) / 2.0;
    Eigen::Index k = 0;
    sym.diagonal().maxCoeff(&k);
    Vec3 axis = sym.col(k) / std::sqrt(std::max(sym(k, k), 1e-300));
    axis.normalize();
    return angle * axis;
  }
  return angle / (2.0 * std::sin(angle)) * skew;
}

bool is_proper_rotation(const Mat3& m, double tol) {
  return (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

Transform make_transform(const Mat3& rotation, const Vec3& translation) {
  Transform t = Transform::Identity();
  t.linear() = rotation;
  t.translation() = translation;
  return t;
}

Transform parse_pose(std::string_view text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string token(text.substr(pos, comma - pos));
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    if (first == std::string::npos) throw ParseError("pose: empty field in '" + std::string(text) + "'");
    token = token.substr(first, last - first + 1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || end != token.data() + token.size())
      throw ParseError("pose: cannot parse '" + token + "' as a number");
    values.push_back(v);
    pos = comma + 1;
  }
  if (values.size() != 7) throw ParseError("pose: expected x,y,z,qw,qx,qy,qz");
  Eigen::Quaterniond q(values[3], values[4], values[5], values[6]);
  if (q.norm() < 1e-12) throw ParseError("pose: zero quaternion");
  q.normalize();
  return make_transform(q.toRotationMatrix(), Vec3(values[0], values[1], values[2]));
}

}  // namespace tribus
