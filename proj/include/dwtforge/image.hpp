// Core raster types: Plane, Image, Region, Mask.
//
// Samples are carried as doubles through the whole pipeline; the nominal
// range is [0,255] but values may transiently exceed it during processing.
// Quantization to 8 bits happens only at the PNG boundary (png_io.hpp).
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dwtforge/error.hpp"

namespace dwtforge {

/// A single height x width plane of real-valued samples, row-major.
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, double fill = 0.0)
      : width_(width), height_(height),
        samples_(static_cast<size_t>(width) * height, fill) {
    require(width > 0 && height > 0, Errc::BadArgument, "plane dimensions must be positive");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  double at(int x, int y) const { return samples_[static_cast<size_t>(y) * width_ + x]; }
  double& at(int x, int y) { return samples_[static_cast<size_t>(y) * width_ + x]; }

  const std::vector<double>& samples() const noexcept { return samples_; }
  std::vector<double>& samples() noexcept { return samples_; }

  bool same_size(const Plane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> samples_;
};

enum class ColorSpace { Rgb, YCbCr, Gray };

inline const char* to_string(ColorSpace cs) {
  switch (cs) {
    case ColorSpace::Rgb: return "RGB";
    case ColorSpace::YCbCr: return "YCbCr";
    case ColorSpace::Gray: return "Gray";
  }
  return "?";
}

/// Planar multi-channel image. Three channels for RGB/YCbCr, one for Gray;
/// all planes share the same dimensions.
class Image {
 public:
  Image() = default;

  Image(int width, int height, ColorSpace cs, double fill = 0.0)
      : colorspace_(cs) {
    const int n = cs == ColorSpace::Gray ? 1 : 3;
    planes_.reserve(n);
    for (int c = 0; c < n; ++c) planes_.emplace_back(width, height, fill);
  }

  Image(std::vector<Plane> planes, ColorSpace cs)
      : colorspace_(cs), planes_(std::move(planes)) {
    const size_t expected = cs == ColorSpace::Gray ? 1 : 3;
    require(planes_.size() == expected, Errc::BadArgument,
            "channel count does not match colorspace");
    for (const Plane& p : planes_)
      require(p.same_size(planes_.front()), Errc::DimensionMismatch,
              "image planes must share dimensions");
  }

  int width() const noexcept { return planes_.empty() ? 0 : planes_.front().width(); }
  int height() const noexcept { return planes_.empty() ? 0 : planes_.front().height(); }
  int channel_count() const noexcept { return static_cast<int>(planes_.size()); }
  ColorSpace colorspace() const noexcept { return colorspace_; }

  const Plane& channel(int c) const { return planes_.at(c); }
  Plane& channel(int c) { return planes_.at(c); }

 private:
  ColorSpace colorspace_ = ColorSpace::Gray;
  std::vector<Plane> planes_;
};

/// Axis-aligned rectangle, pixel units, top-left origin.
struct Region {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool inside(int width, int height) const noexcept {
    return x >= 0 && y >= 0 && w > 0 && h > 0 && x + w <= width && y + h <= height;
  }
  bool operator==(const Region&) const = default;
};

/// Per-pixel opacity in [0,1]. Binary masks use exactly {0,1}.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, double fill = 0.0) : alpha_(width, height, clamp01(fill)) {}

  explicit Mask(Plane alpha) : alpha_(std::move(alpha)) {
    for (double& a : alpha_.samples()) a = clamp01(a);
  }

  int width() const noexcept { return alpha_.width(); }
  int height() const noexcept { return alpha_.height(); }

  double at(int x, int y) const { return alpha_.at(x, y); }
  void set(int x, int y, double a) { alpha_.at(x, y) = clamp01(a); }

  const Plane& plane() const noexcept { return alpha_; }

  /// Pixel count with alpha >= 0.5 (the binarization rule used by metrics).
  long long support_area() const {
    long long n = 0;
    for (double a : alpha_.samples()) n += a >= 0.5 ? 1 : 0;
    return n;
  }

  static double clamp01(double a) { return std::clamp(a, 0.0, 1.0); }

 private:
  Plane alpha_;
};

/// Returns the region.w x region.h sub-image; the source is untouched.
inline Image crop(const Image& img, const Region& region) {
  require(region.inside(img.width(), img.height()), Errc::BadArgument,
          "crop region out of bounds");
  std::vector<Plane> planes;
  planes.reserve(img.channel_count());
  for (int c = 0; c < img.channel_count(); ++c) {
    Plane out(region.w, region.h);
    const Plane& src = img.channel(c);
    for (int y = 0; y < region.h; ++y)
      for (int x = 0; x < region.w; ++x)
        out.at(x, y) = src.at(region.x + x, region.y + y);
    planes.push_back(std::move(out));
  }
  return Image(std::move(planes), img.colorspace());
}

}  // namespace dwtforge
