#include "tribus/perception.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tribus/errors.hpp"
#include "tribus/kinematics.hpp"

namespace tribus {

Hsv rgb_to_hsv(Rgb8 pixel) {
  const double r = pixel.r / 255.0;
  const double g = pixel.g / 255.0;
  const double b = pixel.b / 255.0;
  const double max = std::max({r, g, b});
  const double min = std::min({r, g, b});
  const double chroma = max - min;

  Hsv out;
  out.v = max;
  out.s = max > 0.0 ? chroma / max : 0.0;
  if (chroma == 0.0) return out;  // achromatic: h = 0
  double h = 0.0;
  if (max == r) {
    h = std::fmod((g - b) / chroma, 6.0);
  } else if (max == g) {
    h = (b - r) / chroma + 2.0;
  } else {
    h = (r - g) / chroma + 4.0;
  }
  h *= 60.0;
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

Vec3 deproject(const Intrinsics& k, const Vec2& pixel, double depth) {
  return depth * Vec3((pixel.x() - k.cx) / k.fx, (pixel.y() - k.cy) / k.fy, 1.0);
}

Vec2 project(const Intrinsics& k, const Vec3& p) {
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

void validate(const RgbdFrame& frame) {
  if (frame.width <= 0 || frame.height <= 0) throw ValidationError("frame", "width and height must be positive");
  const auto n = static_cast<std::size_t>(frame.width) * static_cast<std::size_t>(frame.height);
  if (frame.rgb.size() != n) throw ValidationError("frame.rgb", "length must equal width*height");
  if (frame.depth.size() != n) throw ValidationError("frame.depth", "length must equal width*height");
  if (!(frame.intrinsics.fx > 0.0 && frame.intrinsics.fy > 0.0))
    throw ValidationError("frame.intrinsics", "fx and fy must be > 0");
  if (std::any_of(frame.depth.begin(), frame.depth.end(), [](double d) { return !(d >= 0.0); }))
    throw ValidationError("frame.depth", "depth must be >= 0");
}

bool HsvRange::contains(const Hsv& hsv) const {
  const bool hue = h_lo <= h_hi ? (hsv.h >= h_lo && hsv.h <= h_hi) : (hsv.h >= h_lo || hsv.h <= h_hi);
  return hue && hsv.s >= s_lo && hsv.s <= s_hi && hsv.v >= v_lo && hsv.v <= v_hi;
}

void validate(const HsvRange& range, const std::string& path) {
  if (range.label.empty()) throw ValidationError(path + ".label", "empty label");
  const auto in_hue = [](double h) { return h >= 0.0 && h <= 360.0; };
  if (!in_hue(range.h_lo) || !in_hue(range.h_hi)) throw ValidationError(path + ".h_lo", "hue bounds must lie in [0, 360]");
  if (!(range.s_lo >= 0.0 && range.s_lo <= range.s_hi && range.s_hi <= 1.0))
    throw ValidationError(path + ".s_lo", "need 0 <= s_lo <= s_hi <= 1");
  if (!(range.v_lo >= 0.0 && range.v_lo <= range.v_hi && range.v_hi <= 1.0))
    throw ValidationError(path + ".v_lo", "need 0 <= v_lo <= v_hi <= 1");
  if (range.min_area < 1) throw ValidationError(path + ".min_area", "must be >= 1");
}

namespace {

/// Union-find over provisional labels.
class DisjointSet {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

Segmentation segment(const RgbdFrame& frame, const HsvRange& range) {
  validate(frame);
  const int w = frame.width;
  const int h = frame.height;
  std::vector<char> mask(frame.rgb.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = range.contains(rgb_to_hsv(frame.rgb[i])) ? 1 : 0;

  // Two-pass labeling; provisional label -1 means background.
  std::vector<int> provisional(mask.size(), -1);
  DisjointSet sets;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = frame.index(x, y);
      if (!mask[i]) continue;
      int label = -1;
      // Already-visited 8-neighbours: W, NW, N, NE.
      const int dx[] = {-1, -1, 0, 1};
      const int dy[] = {0, -1, -1, -1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k];
        const int ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= w) continue;
        const int other = provisional[frame.index(nx, ny)];
        if (other < 0) continue;
        if (label < 0) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      }
      provisional[i] = label < 0 ? sets.make() : label;
    }
  }

  // Final numbering follows the first pixel of each component in scanline order.
  std::vector<int> root_to_component;
  Segmentation seg;
  std::vector<Component> all;
  std::vector<int> component_of(mask.size(), -1);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (provisional[i] < 0) continue;
    const int root = sets.find(provisional[i]);
    if (root >= static_cast<int>(root_to_component.size())) root_to_component.resize(root + 1, -1);
    if (root_to_component[root] < 0) {
      root_to_component[root] = static_cast<int>(all.size());
      Component c;
      c.bbox = {w, h, -1, -1};
      all.push_back(c);
    }
    const int id = root_to_component[root];
    component_of[i] = id;
    Component& c = all[id];
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    c.area += 1;
    c.pixels.push_back(i);
    c.bbox.x_min = std::min(c.bbox.x_min, x);
    c.bbox.y_min = std::min(c.bbox.y_min, y);
    c.bbox.x_max = std::max(c.bbox.x_max, x);
    c.bbox.y_max = std::max(c.bbox.y_max, y);
  }

  std::vector<int> kept_id(all.size(), 0);
  for (std::size_t c = 0; c < all.size(); ++c) {
    if (all[c].area < range.min_area) continue;
    seg.components.push_back(std::move(all[c]));
    kept_id[c] = static_cast<int>(seg.components.size());
  }
  seg.labels.assign(mask.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (component_of[i] >= 0) seg.labels[i] = kept_id[component_of[i]];
  }
  return seg;
}

Centroid3d centroid_3d(const RgbdFrame& frame, const Component& component) {
  if (component.pixels.empty()) throw NotFoundError("no depth support: empty component");
  const int w = frame.width;
  Vec2 sum = Vec2::Zero();
  std::vector<double> depths;
  depths.reserve(component.pixels.size());
  for (std::size_t i : component.pixels) {
    sum += Vec2(static_cast<double>(i % w), static_cast<double>(i / w));
    const double d = frame.depth[i];
    if (d > 0.0) depths.push_back(d);
  }
  if (depths.empty()) throw NotFoundError("no depth support: every member pixel has invalid depth");

  // Median; even counts average the two middle values.
  const std::size_t mid = depths.size() / 2;
  std::nth_element(depths.begin(), depths.begin() + static_cast<std::ptrdiff_t>(mid), depths.end());
  double median = depths[mid];
  if (depths.size() % 2 == 0) {
    const double lower = *std::max_element(depths.begin(), depths.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }

  Centroid3d out;
  out.pixel = sum / static_cast<double>(component.pixels.size());
  out.depth = median;
  out.point = deproject(frame.intrinsics, out.pixel, median);
  return out;
}

Mat3 CameraMount::default_optical_alignment() {
  Mat3 r;
  // Columns: optical x (right) -> body -y, optical y (down) -> body -z, optical z -> body x.
  r << 0.0, 0.0, 1.0,
      -1.0, 0.0, 0.0,
      0.0, -1.0, 0.0;
  return r;
}

Transform CameraMount::camera_pose() const {
  std::vector<double> q = neck_chain.home_posture();
  if (q.size() >= 1) q[0] = head_pan;
  if (q.size() >= 2) q[1] = head_tilt;
  const Transform body = fk(neck_chain, q);
  return body * make_transform(optical_alignment, Vec3::Zero());
}

void validate(const CameraMount& mount, const std::string& path) {
  if (!is_proper_rotation(mount.optical_alignment, 1e-6))
    throw ValidationError(path + ".optical_alignment", "must be a proper rotation");
  if (mount.neck_chain.dof() < 2) throw ValidationError(path + ".neck_chain", "neck chain needs pan and tilt joints");
}

Vec3 camera_to_base(const CameraMount& mount, const Vec3& point_camera) {
  return mount.camera_pose() * point_camera + mount.calibration_offset;
}

Detection detect_and_locate(const RgbdFrame& frame, std::span<const HsvRange> ranges, const CameraMount& mount,
                            const std::string& label) {
  const auto it = std::find_if(ranges.begin(), ranges.end(), [&](const HsvRange& r) { return r.label == label; });
  if (it == ranges.end()) throw NotFoundError("label '" + label + "' has no HSV range");
  const Segmentation seg = segment(frame, *it);
  if (seg.components.empty()) throw NotFoundError("target not found: no '" + label + "' component of at least " + std::to_string(it->min_area) + " px");

  // Largest component; ties keep the first in scanline order.
  const Component* best = &seg.components.front();
  for (const auto& c : seg.components) {
    if (c.area > best->area) best = &c;
  }
  const Centroid3d c = centroid_3d(frame, *best);
  Detection det;
  det.label = label;
  det.pixel_centroid = c.pixel;
  det.area = best->area;
  det.point_camera = c.point;
  det.point_base = camera_to_base(mount, c.point);
  return det;
}

}  // namespace tribus
