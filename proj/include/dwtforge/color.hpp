// RGB <-> YCbCr, full-range BT.601.
//
//   Y  = 0.299 R + 0.587 G + 0.114 B
//   Cb = 128 + (B - Y) * 0.564
//   Cr = 128 + (R - Y) * 0.713
//
// The inverse is the exact analytic inverse in real arithmetic, so the
// round trip is an identity up to floating-point noise. Both directions
// keep samples unclamped.
#pragma once

#include "dwtforge/error.hpp"
#include "dwtforge/image.hpp"

namespace dwtforge {

namespace bt601 {
inline constexpr double kYR = 0.299;
inline constexpr double kYG = 0.587;
inline constexpr double kYB = 0.114;
inline constexpr double kCbScale = 0.564;
inline constexpr double kCrScale = 0.713;
inline constexpr double kChromaOffset = 128.0;
}  // namespace bt601

inline double luma_of(double r, double g, double b) {
  return bt601::kYR * r + bt601::kYG * g + bt601::kYB * b;
}

inline Image rgb_to_ycbcr(const Image& img) {
  require(img.colorspace() == ColorSpace::Rgb, Errc::BadArgument,
          "rgb_to_ycbcr expects an RGB image");
  const Plane& r = img.channel(0);
  const Plane& g = img.channel(1);
  const Plane& b = img.channel(2);
  Plane yp(img.width(), img.height());
  Plane cb(img.width(), img.height());
  Plane cr(img.width(), img.height());
  const size_t n = r.samples().size();
  for (size_t i = 0; i < n; ++i) {
    const double y = luma_of(r.samples()[i], g.samples()[i], b.samples()[i]);
    yp.samples()[i] = y;
    cb.samples()[i] = bt601::kChromaOffset + (b.samples()[i] - y) * bt601::kCbScale;
    cr.samples()[i] = bt601::kChromaOffset + (r.samples()[i] - y) * bt601::kCrScale;
  }
  return Image({std::move(yp), std::move(cb), std::move(cr)}, ColorSpace::YCbCr);
}

inline Image ycbcr_to_rgb(const Image& img) {
  require(img.colorspace() == ColorSpace::YCbCr, Errc::BadArgument,
          "ycbcr_to_rgb expects a YCbCr image");
  const Plane& yp = img.channel(0);
  const Plane& cb = img.channel(1);
  const Plane& cr = img.channel(2);
  Plane r(img.width(), img.height());
  Plane g(img.width(), img.height());
  Plane b(img.width(), img.height());
  const size_t n = yp.samples().size();
  for (size_t i = 0; i < n; ++i) {
    const double y = yp.samples()[i];
    const double rv = y + (cr.samples()[i] - bt601::kChromaOffset) / bt601::kCrScale;
    const double bv = y + (cb.samples()[i] - bt601::kChromaOffset) / bt601::kCbScale;
    const double gv = (y - bt601::kYR * rv - bt601::kYB * bv) / bt601::kYG;
    r.samples()[i] = rv;
    g.samples()[i] = gv;
    b.samples()[i] = bv;
  }
  return Image({std::move(r), std::move(g), std::move(b)}, ColorSpace::Rgb);
}

/// Luma plane of an image in any colorspace (Y for YCbCr, BT.601 luma for
/// RGB, the single plane for Gray).
inline Plane luma(const Image& img) {
  switch (img.colorspace()) {
    case ColorSpace::Gray:
    case ColorSpace::YCbCr:
      return img.channel(0);
    case ColorSpace::Rgb: {
      Plane out(img.width(), img.height());
      const Plane& r = img.channel(0);
      const Plane& g = img.channel(1);
      const Plane& b = img.channel(2);
      for (size_t i = 0; i < out.samples().size(); ++i)
        out.samples()[i] = luma_of(r.samples()[i], g.samples()[i], b.samples()[i]);
      return out;
    }
  }
  fail(Errc::BadArgument, "unknown colorspace");
}

}  // namespace dwtforge
