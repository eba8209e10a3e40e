#include "tribus/synthetic_scene.hpp"

#include <cmath>
#include <limits>

#include "json_reader.hpp"
#include "tribus/config.hpp"
#include "tribus/errors.hpp"

namespace tribus {

using detail::JsonObject;

namespace {

Rgb8 to_color(const nlohmann::json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 3) throw ParseError(where + ": expected [r, g, b]");
  std::array<int, 3> c{};
  for (int i = 0; i < 3; ++i) {
    c[i] = JsonObject::convert<int>(value[i], detail::index_path(where, i));
    if (c[i] < 0 || c[i] > 255) throw ValidationError(detail::index_path(where, i), "channel must be in [0, 255]");
  }
  return {static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]), static_cast<std::uint8_t>(c[2])};
}

constexpr double kNoHit = std::numeric_limits<double>::infinity();

/// Smallest positive ray parameter t with |t*d - c| = r.
double hit_sphere(const Vec3& d, const Vec3& c, double r) {
  const double a = d.squaredNorm();
  const double b = -2.0 * d.dot(c);
  const double cc = c.squaredNorm() - r * r;
  const double disc = b * b - 4.0 * a * cc;
  if (disc < 0.0) return kNoHit;
  const double s = std::sqrt(disc);
  const double t0 = (-b - s) / (2.0 * a);
  const double t1 = (-b + s) / (2.0 * a);
  if (t0 > 0.0) return t0;
  if (t1 > 0.0) return t1;
  return kNoHit;
}

/// Slab test against an axis-aligned box given in a frame where the ray is origin + t*d.
double hit_box(const Vec3& origin, const Vec3& d, const Vec3& lo, const Vec3& hi) {
  double t_near = -kNoHit;
  double t_far = kNoHit;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (origin[k] < lo[k] || origin[k] > hi[k]) return kNoHit;
      continue;
    }
    double t1 = (lo[k] - origin[k]) / d[k];
    double t2 = (hi[k] - origin[k]) / d[k];
    if (t1 > t2) std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
  }
  if (t_near > t_far || t_far <= 0.0) return kNoHit;
  return t_near > 0.0 ? t_near : t_far;
}

}  // namespace

Scene scene_from_json(const nlohmann::json& doc) {
  JsonObject root(doc, "", true);
  Scene scene;
  if (root.has("background")) scene.background = to_color(root.raw("background"), "background");
  scene.background_depth = root.optional<double>("background_depth", 0.0);
  if (root.has("head_pan")) scene.head_pan = root.required<double>("head_pan");
  if (root.has("head_tilt")) scene.head_tilt = root.required<double>("head_tilt");
  const auto& list = detail::require_array(root.raw("objects"), "objects");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = detail::index_path("objects", i);
    JsonObject item(list[i], path, true);
    SceneObject obj;
    const auto shape = item.required<std::string>("shape");
    if (shape == "sphere") {
      obj.shape = Shape::Sphere;
    } else if (shape == "box") {
      obj.shape = Shape::Box;
    } else if (shape == "disk") {
      obj.shape = Shape::Disk;
    } else {
      throw ValidationError(item.path("shape"), "unknown shape '" + shape + "'");
    }
    obj.center = item.vec3("center");
    if (obj.shape == Shape::Box) {
      obj.half_extents = item.vec3("half_extents");
      if ((obj.half_extents.array() <= 0.0).any()) throw ValidationError(item.path("half_extents"), "must be > 0");
    } else {
      obj.radius = item.required<double>("radius");
      if (!(obj.radius > 0.0)) throw ValidationError(item.path("radius"), "must be > 0");
    }
    if (item.has("color")) obj.color = to_color(item.raw("color"), item.path("color"));
    item.finish();
    scene.objects.push_back(obj);
  }
  if (!(scene.background_depth >= 0.0)) throw ValidationError("background_depth", "must be >= 0");
  root.finish();
  return scene;
}

Scene load_scene(const std::string& path) { return scene_from_json(parse_json_text(read_text_file(path), path)); }

CameraMount mount_for_scene(const CameraMount& mount, const Scene& scene) {
  CameraMount out = mount;
  if (scene.head_pan) out.head_pan = *scene.head_pan;
  if (scene.head_tilt) out.head_tilt = *scene.head_tilt;
  return out;
}

RgbdFrame render_scene(const Scene& scene, const CameraMount& mount, const Intrinsics& intrinsics, int width,
                       int height) {
  RgbdFrame frame;
  frame.width = width;
  frame.height = height;
  frame.intrinsics = intrinsics;
  frame.rgb.assign(static_cast<std::size_t>(width) * height, scene.background);
  frame.depth.assign(frame.rgb.size(), scene.background_depth);

  // Everything is intersected in the optical frame; the offset is a base-frame correction
  // applied after the camera transform, so undo it when placing objects.
  const Transform base_to_camera = mount.camera_pose().inverse();
  struct Placed {
    const SceneObject* obj;
    Vec3 center_cam;
    Vec3 box_origin;  // camera origin expressed in base coordinates, boxes only
    Mat3 cam_to_base;
  };
  std::vector<Placed> placed;
  for (const auto& obj : scene.objects) {
    const Vec3 center_base = obj.center - mount.calibration_offset;
    placed.push_back({&obj, base_to_camera * center_base, base_to_camera.inverse().translation(),
                      base_to_camera.inverse().linear()});
  }

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      // Ray with unit optical z, so the ray parameter equals optical depth.
      const Vec3 d((x - intrinsics.cx) / intrinsics.fx, (y - intrinsics.cy) / intrinsics.fy, 1.0);
      double best = kNoHit;
      const SceneObject* hit = nullptr;
      for (const auto& p : placed) {
        double t = kNoHit;
        switch (p.obj->shape) {
          case Shape::Sphere:
            t = hit_sphere(d, p.center_cam, p.obj->radius);
            break;
          case Shape::Disk: {
            const double z = p.center_cam.z();
            if (z > 0.0 && (z * d - p.center_cam).norm() <= p.obj->radius) t = z;
            break;
          }
          case Shape::Box: {
            const Vec3 lo = p.obj->center - mount.calibration_offset - p.obj->half_extents;
            const Vec3 hi = p.obj->center - mount.calibration_offset + p.obj->half_extents;
            t = hit_box(p.box_origin, p.cam_to_base * d, lo, hi);
            break;
          }
        }
        if (t < best) {
          best = t;
          hit = p.obj;
        }
      }
      if (hit) {
        const std::size_t i = frame.index(x, y);
        frame.rgb[i] = hit->color;
        frame.depth[i] = best;
      }
    }
  }
  return frame;
}

}  // namespace tribus
