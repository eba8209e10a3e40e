#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tribus/perception.hpp"

namespace tribus {

enum class Shape { Sphere, Box, Disk };

/// Scene primitive placed in the arm base frame. Boxes are axis-aligned in
/// that frame; disks always face the camera (normal along the optical axis).
struct SceneObject {
  Shape shape = Shape::Sphere;
  Vec3 center = Vec3::Zero();
  double radius = 0.02;
  Vec3 half_extents = Vec3::Constant(0.02);
  Rgb8 color{255, 0, 0};
};

struct Scene {
  std::vector<SceneObject> objects;
  Rgb8 background{90, 90, 90};
  /// Depth assigned to background pixels; 0 marks them invalid.
  double background_depth = 0.0;
  std::optional<double> head_pan;
  std::optional<double> head_tilt;
};

Scene scene_from_json(const nlohmann::json& doc);
Scene load_scene(const std::string& path);

/// Mount with the scene's head angles applied, if it overrides them.
CameraMount mount_for_scene(const CameraMount& mount, const Scene& scene);

/// Ray-casts one sample per pixel centre through the pinhole model with a z-buffer.
RgbdFrame render_scene(const Scene& scene, const CameraMount& mount, const Intrinsics& intrinsics, int width,
                       int height);

}  // namespace tribus
