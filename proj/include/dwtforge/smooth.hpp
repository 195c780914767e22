// Gaussian smoothing with mirror boundary extension.
#pragma once

#include <cmath>
#include <vector>

#include "dwtforge/error.hpp"
#include "dwtforge/image.hpp"

namespace dwtforge {

namespace detail {

/// Sampled Gaussian, radius ceil(3*sigma), normalized to sum 1.
inline std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

/// Whole-sample mirror: ... x2 x1 | x0 x1 ... xN-1 | xN-2 xN-3 ...
inline int mirror_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  i = ((i % period) + period) % period;
  return i < n ? i : period - i;
}

}  // namespace detail

/// Per-channel separable Gaussian blur. sigma = 0 returns the input unchanged.
inline Image smooth(const Image& img, double sigma) {
  require(sigma >= 0.0, Errc::BadArgument, "smoothing sigma must be >= 0");
  if (sigma == 0.0) return img;

  const std::vector<double> kernel = detail::gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = img.width();
  const int h = img.height();

  std::vector<Plane> planes;
  planes.reserve(img.channel_count());
  for (int c = 0; c < img.channel_count(); ++c) {
    const Plane& src = img.channel(c);
    Plane tmp(w, h);
    // horizontal pass
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k)
          acc += kernel[k + radius] * src.at(detail::mirror_index(x + k, w), y);
        tmp.at(x, y) = acc;
      }
    // vertical pass
    Plane out(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k)
          acc += kernel[k + radius] * tmp.at(x, detail::mirror_index(y + k, h));
        out.at(x, y) = acc;
      }
    planes.push_back(std::move(out));
  }
  return Image(std::move(planes), img.colorspace());
}

}  // namespace dwtforge
