#pragma once

#include <string>

#include "tribus/perception.hpp"

namespace tribus {

/// Reads an 8-bit RGB(A)/gray PNG and a 16-bit millimeter depth PNG of the same size.
RgbdFrame load_rgbd_png(const std::string& rgb_path, const std::string& depth_path, const Intrinsics& intrinsics);

void write_rgb_png(const std::string& path, const RgbdFrame& frame);
/// Depth rounded to whole millimeters, saturated at 65535.
void write_depth_png(const std::string& path, const RgbdFrame& frame);

}  // namespace tribus
