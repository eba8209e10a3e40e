#include "tribus/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>

#include "tribus/errors.hpp"

namespace tribus {

namespace {

using FilePtr = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr fp(std::fopen(path.c_str(), mode), &std::fclose);
  if (!fp) throw ParseError("cannot open '" + path + "'");
  return fp;
}

struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  int depth = 8;
  std::vector<std::uint8_t> data;  // row-major, big-endian samples for 16-bit
};

Image read_png(const std::string& path) {
  FilePtr fp = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw ParseError("'" + path + "' is not a PNG file");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (!png || !info) throw Error("libpng allocation failed");
  Image img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError("'" + path + "': corrupt PNG data");
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int bits = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && bits < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, info);

  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = png_get_channels(png, info);
  img.depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  img.data.resize(stride * img.height);
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y) rows[y] = img.data.data() + stride * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const std::string& path, int width, int height, int color_type, int bit_depth,
               const std::vector<std::uint8_t>& data) {
  FilePtr fp = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (!png || !info) throw Error("libpng allocation failed");
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("failed writing PNG '" + path + "'");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = data.size() / height;
  for (int y = 0; y < height; ++y) png_write_row(png, const_cast<png_bytep>(data.data() + stride * y));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

RgbdFrame load_rgbd_png(const std::string& rgb_path, const std::string& depth_path, const Intrinsics& intrinsics) {
  const Image rgb = read_png(rgb_path);
  const Image depth = read_png(depth_path);
  if (rgb.width != depth.width || rgb.height != depth.height)
    throw ValidationError("depth", "depth image size differs from color image");
  if (rgb.depth != 8) throw ValidationError("rgb", "color image must be 8-bit");
  if (depth.depth != 16 || depth.channels != 1) throw ValidationError("depth", "depth image must be 16-bit grayscale");

  RgbdFrame frame;
  frame.width = rgb.width;
  frame.height = rgb.height;
  frame.intrinsics = intrinsics;
  const std::size_t n = static_cast<std::size_t>(rgb.width) * rgb.height;
  frame.rgb.resize(n);
  frame.depth.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* p = rgb.data.data() + i * rgb.channels;
    frame.rgb[i] = rgb.channels >= 3 ? Rgb8{p[0], p[1], p[2]} : Rgb8{p[0], p[0], p[0]};
    const std::uint8_t* d = depth.data.data() + i * 2;
    frame.depth[i] = ((d[0] << 8) | d[1]) / 1000.0;
  }
  validate(frame);
  return frame;
}

void write_rgb_png(const std::string& path, const RgbdFrame& frame) {
  validate(frame);
  std::vector<std::uint8_t> data;
  data.reserve(frame.rgb.size() * 3);
  for (const auto& p : frame.rgb) {
    data.push_back(p.r);
    data.push_back(p.g);
    data.push_back(p.b);
  }
  write_png(path, frame.width, frame.height, PNG_COLOR_TYPE_RGB, 8, data);
}

void write_depth_png(const std::string& path, const RgbdFrame& frame) {
  validate(frame);
  std::vector<std::uint8_t> data;
  data.reserve(frame.depth.size() * 2);
  for (double d : frame.depth) {
    const auto mm = static_cast<unsigned>(std::min(65535.0, std::round(d * 1000.0)));
    data.push_back(static_cast<std::uint8_t>(mm >> 8));
    data.push_back(static_cast<std::uint8_t>(mm & 0xff));
  }
  write_png(path, frame.width, frame.height, PNG_COLOR_TYPE_GRAY, 16, data);
}

}  // namespace tribus
