// 8-bit PNG input/output on top of libpng.
//
// Contract: RGB and grayscale PNGs, 8 bits per sample. An alpha channel is
// flattened over white on load. Masks are 8-bit grayscale with the linear
// mapping byte/255 -> alpha (255 = tampered/opaque, 0 = untouched).
#pragma once

#include <png.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dwtforge/error.hpp"
#include "dwtforge/image.hpp"

namespace dwtforge {

namespace detail {

[[noreturn]] inline void png_error_thrower(png_structp png, png_const_charp msg) {
  (void)png;
  throw Error(Errc::IoFailure, std::string("libpng: ") + msg);
}

inline void png_warning_sink(png_structp, png_const_charp) {}

struct PngReadGuard {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadGuard() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

struct PngWriteGuard {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteGuard() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    if (fp) std::fclose(fp);
  }
};

/// Decodes to interleaved 8-bit rows; palette is expanded to RGB and any
/// alpha is kept so the caller can flatten it.
inline void read_png_rows(const std::string& path, int& width, int& height,
                          int& channels, std::vector<unsigned char>& data) {
  PngReadGuard g;
  g.fp = std::fopen(path.c_str(), "rb");
  require(g.fp != nullptr, Errc::IoFailure, "cannot open " + path);
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                 png_error_thrower, png_warning_sink);
  require(g.png != nullptr, Errc::IoFailure, "png_create_read_struct failed");
  g.info = png_create_info_struct(g.png);
  require(g.info != nullptr, Errc::IoFailure, "png_create_info_struct failed");

  png_init_io(g.png, g.fp);
  png_read_info(g.png, g.info);

  const int bit_depth = png_get_bit_depth(g.png, g.info);
  const int color_type = png_get_color_type(g.png, g.info);
  require(bit_depth == 8, Errc::UnsupportedFormat,
          path + ": only 8-bit PNGs are supported (got " + std::to_string(bit_depth) + "-bit)");

  switch (color_type) {
    case PNG_COLOR_TYPE_GRAY:
    case PNG_COLOR_TYPE_GRAY_ALPHA:
    case PNG_COLOR_TYPE_RGB:
    case PNG_COLOR_TYPE_RGB_ALPHA:
      break;
    case PNG_COLOR_TYPE_PALETTE:
      png_set_palette_to_rgb(g.png);
      break;
    default:
      fail(Errc::UnsupportedFormat, path + ": unsupported PNG color type");
  }
  if (png_get_valid(g.png, g.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(g.png);

  png_set_interlace_handling(g.png);
  png_read_update_info(g.png, g.info);

  width = static_cast<int>(png_get_image_width(g.png, g.info));
  height = static_cast<int>(png_get_image_height(g.png, g.info));
  channels = png_get_channels(g.png, g.info);

  const size_t row_bytes = png_get_rowbytes(g.png, g.info);
  data.resize(row_bytes * height);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = data.data() + row_bytes * y;
  png_read_image(g.png, rows.data());
  png_read_end(g.png, nullptr);
}

inline void write_png_rows(const std::string& path, int width, int height,
                           int channels, const std::vector<unsigned char>& data) {
  PngWriteGuard g;
  g.fp = std::fopen(path.c_str(), "wb");
  require(g.fp != nullptr, Errc::IoFailure, "cannot open for writing: " + path);
  g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                  png_error_thrower, png_warning_sink);
  require(g.png != nullptr, Errc::IoFailure, "png_create_write_struct failed");
  g.info = png_create_info_struct(g.png);
  require(g.info != nullptr, Errc::IoFailure, "png_create_info_struct failed");

  png_init_io(g.png, g.fp);
  const int color_type = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(g.png, g.info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(g.png, g.info);

  const size_t row_bytes = static_cast<size_t>(width) * channels;
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y)
    rows[y] = const_cast<png_bytep>(data.data() + row_bytes * y);
  png_write_image(g.png, rows.data());
  png_write_end(g.png, g.info);
}

/// Round half-away-from-zero, then clamp to [0,255].
inline unsigned char quantize_sample(double v) {
  const double r = std::round(v);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<unsigned char>(r);
}

}  // namespace detail

/// Applies save_png's sample quantization in memory (round half-away-from-
/// zero, clamp to [0,255]) so results on the in-memory image match results
/// on the written artifact byte for byte.
inline Image quantized(const Image& img) {
  Image out = img;
  for (int c = 0; c < out.channel_count(); ++c)
    for (double& v : out.channel(c).samples())
      v = static_cast<double>(detail::quantize_sample(v));
  return out;
}

inline Image load_png(const std::string& path) {
  int w = 0, h = 0, ch = 0;
  std::vector<unsigned char> data;
  detail::read_png_rows(path, w, h, ch, data);

  const bool gray = ch <= 2;
  const bool has_alpha = ch == 2 || ch == 4;
  const int colors = gray ? 1 : 3;

  std::vector<Plane> planes;
  for (int c = 0; c < colors; ++c) planes.emplace_back(w, h);
  for (int y = 0; y < h; ++y) {
    const unsigned char* row = data.data() + static_cast<size_t>(y) * w * ch;
    for (int x = 0; x < w; ++x) {
      const unsigned char* px = row + static_cast<size_t>(x) * ch;
      const double a = has_alpha ? px[colors] / 255.0 : 1.0;
      for (int c = 0; c < colors; ++c)
        planes[c].at(x, y) = a * px[c] + (1.0 - a) * 255.0;  // flatten over white
    }
  }
  return Image(std::move(planes), gray ? ColorSpace::Gray : ColorSpace::Rgb);
}

inline void save_png(const Image& img, const std::string& path) {
  require(img.colorspace() != ColorSpace::YCbCr, Errc::BadArgument,
          "save_png expects RGB or Gray; convert YCbCr first");
  const int w = img.width();
  const int h = img.height();
  const int ch = img.channel_count();
  std::vector<unsigned char> data(static_cast<size_t>(w) * h * ch);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < ch; ++c)
        data[(static_cast<size_t>(y) * w + x) * ch + c] =
            detail::quantize_sample(img.channel(c).at(x, y));
  detail::write_png_rows(path, w, h, ch, data);
}

/// Reads an 8-bit grayscale PNG as a mask, byte/255 -> alpha.
inline Mask load_mask_png(const std::string& path) {
  const Image img = load_png(path);
  require(img.colorspace() == ColorSpace::Gray, Errc::UnsupportedFormat,
          path + ": masks must be grayscale PNGs");
  Plane alpha(img.width(), img.height());
  for (size_t i = 0; i < alpha.samples().size(); ++i)
    alpha.samples()[i] = img.channel(0).samples()[i] / 255.0;
  return Mask(std::move(alpha));
}

inline void save_mask_png(const Mask& mask, const std::string& path) {
  Image img(mask.width(), mask.height(), ColorSpace::Gray);
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      img.channel(0).at(x, y) = mask.at(x, y) * 255.0;
  save_png(img, path);
}

}  // namespace dwtforge
