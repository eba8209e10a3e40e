#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tribus/geometry.hpp"
#include "tribus/robot_model.hpp"

namespace tribus {

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

/// Hue in degrees [0, 360), saturation and value in [0, 1].
struct Hsv {
  double h = 0.0, s = 0.0, v = 0.0;
};

/// Hexcone conversion. Achromatic pixels (max == min) get h = 0.
Hsv rgb_to_hsv(Rgb8 pixel);

struct Intrinsics {
  double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
};

/// Pixel -> camera-frame point at optical depth `depth`.
Vec3 deproject(const Intrinsics& intrinsics, const Vec2& pixel, double depth);
/// Camera-frame point -> pixel.
Vec2 project(const Intrinsics& intrinsics, const Vec3& point);

/// Row-major RGB and depth (meters, 0 = invalid). Pixel (x, y) sits at u = x, v = y.
struct RgbdFrame {
  int width = 0;
  int height = 0;
  std::vector<Rgb8> rgb;
  std::vector<double> depth;
  Intrinsics intrinsics;

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

void validate(const RgbdFrame& frame);

/// Hue window [h_lo, h_hi] wraps through 0 when h_lo > h_hi.
struct HsvRange {
  std::string label;
  double h_lo = 0.0, h_hi = 360.0;
  double s_lo = 0.0, s_hi = 1.0;
  double v_lo = 0.0, v_hi = 1.0;
  int min_area = 1;

  bool contains(const Hsv& hsv) const;
};

void validate(const HsvRange& range, const std::string& path);

struct PixelBox {
  int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
};

struct Component {
  int area = 0;
  PixelBox bbox;
  /// Member pixel indices in scanline order.
  std::vector<std::size_t> pixels;
};

struct Segmentation {
  /// Per-pixel component number, 0 for background; 1-based into `components`.
  std::vector<int> labels;
  std::vector<Component> components;
};

/// 8-connected components of the HSV mask, ordered by first pixel in scanline
/// order; components smaller than `min_area` are dropped.
Segmentation segment(const RgbdFrame& frame, const HsvRange& range);

struct Centroid3d {
  Vec2 pixel;
  double depth = 0.0;
  Vec3 point;
};

/// Mean pixel position, median valid depth, deprojected. Throws NotFoundError
/// ("no depth support") when no member pixel has depth.
Centroid3d centroid_3d(const RgbdFrame& frame, const Component& component);

/// Head camera placement. The neck chain carries the camera body frame
/// (x forward, y left, z up); `optical_alignment` maps optical axes
/// (x right, y down, z forward) into it.
struct CameraMount {
  double head_pan = 0.0;
  double head_tilt = 0.0;
  KinematicChain neck_chain;
  Mat3 optical_alignment = default_optical_alignment();
  Vec3 calibration_offset = Vec3::Zero();

  static Mat3 default_optical_alignment();
  /// Optical frame pose in the arm base frame (offset not included).
  Transform camera_pose() const;
};

void validate(const CameraMount& mount, const std::string& path);

Vec3 camera_to_base(const CameraMount& mount, const Vec3& point_camera);

struct Detection {
  std::string label;
  Vec2 pixel_centroid;
  int area = 0;
  Vec3 point_camera;
  Vec3 point_base;
};

/// Largest qualifying component of `label`, located in the base frame.
Detection detect_and_locate(const RgbdFrame& frame, std::span<const HsvRange> ranges,
                            const CameraMount& mount, const std::string& label);

}  // namespace tribus
