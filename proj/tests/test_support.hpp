// Shared helpers for the test suites: seeded random rasters, a synthetic
// textured host generator, temp dirs, file comparison.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "dwtforge/image.hpp"

namespace testsupport {

inline dwtforge::Plane random_plane(int w, int h, std::mt19937& rng,
                                    double lo = 0.0, double hi = 255.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  dwtforge::Plane p(w, h);
  for (double& v : p.samples()) v = dist(rng);
  return p;
}

/// Random RGB image with integral 8-bit sample values.
inline dwtforge::Image random_rgb8(int w, int h, std::mt19937& rng) {
  std::uniform_int_distribution<int> dist(0, 255);
  std::vector<dwtforge::Plane> planes;
  for (int c = 0; c < 3; ++c) {
    dwtforge::Plane p(w, h);
    for (double& v : p.samples()) v = static_cast<double>(dist(rng));
    planes.push_back(std::move(p));
  }
  return dwtforge::Image(std::move(planes), dwtforge::ColorSpace::Rgb);
}

inline dwtforge::Image random_rgb_real(int w, int h, std::mt19937& rng) {
  std::vector<dwtforge::Plane> planes;
  for (int c = 0; c < 3; ++c) planes.push_back(random_plane(w, h, rng));
  return dwtforge::Image(std::move(planes), dwtforge::ColorSpace::Rgb);
}

/// Smooth random surface: a lattice of control values every `cell` pixels,
/// bilinearly interpolated.
inline dwtforge::Plane value_noise(int w, int h, int cell, double amplitude,
                                   std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int gw = w / cell + 2;
  const int gh = h / cell + 2;
  std::vector<double> grid(static_cast<size_t>(gw) * gh);
  for (double& g : grid) g = amplitude * unit(rng);
  dwtforge::Plane p(w, h);
  for (int y = 0; y < h; ++y) {
    const int gy = y / cell;
    const double fy = static_cast<double>(y % cell) / cell;
    for (int x = 0; x < w; ++x) {
      const int gx = x / cell;
      const double fx = static_cast<double>(x % cell) / cell;
      const double a = grid[gy * gw + gx], b = grid[gy * gw + gx + 1];
      const double c = grid[(gy + 1) * gw + gx], d = grid[(gy + 1) * gw + gx + 1];
      p.at(x, y) = (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
    }
  }
  return p;
}

/// Stand-in for a natural photo: three value-noise octaves with coprime cell
/// sizes (so block means and shapes vary strongly and nothing repeats on a
/// common lattice) plus fine per-pixel noise. Every 8x8 block sits above the
/// detector's low-variance floor, and no two distant blocks are
/// near-duplicates.
inline dwtforge::Image textured_host(int w, int h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  std::vector<dwtforge::Plane> planes;
  for (int c = 0; c < 3; ++c) {
    const dwtforge::Plane coarse = value_noise(w, h, 23, 55.0, rng);
    const dwtforge::Plane mid = value_noise(w, h, 11, 24.0, rng);
    const dwtforge::Plane fine = value_noise(w, h, 5, 12.0, rng);
    dwtforge::Plane p(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double v = 128.0 + coarse.at(x, y) + mid.at(x, y) + fine.at(x, y);
        v += 6.0 * unit(rng);  // per-pixel noise keeps every block above the floor
        p.at(x, y) = std::min(250.0, std::max(5.0, v));
      }
    planes.push_back(std::move(p));
  }
  return dwtforge::Image(std::move(planes), dwtforge::ColorSpace::Rgb);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<char>(std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>());
}

inline bool same_file_bytes(const std::filesystem::path& a,
                            const std::filesystem::path& b) {
  const auto ba = read_bytes(a);
  const auto bb = read_bytes(b);
  return !ba.empty() && ba == bb;
}

inline double max_abs_diff(const dwtforge::Plane& a, const dwtforge::Plane& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.samples().size(); ++i)
    m = std::max(m, std::abs(a.samples()[i] - b.samples()[i]));
  return m;
}

inline double max_abs_diff(const dwtforge::Image& a, const dwtforge::Image& b) {
  double m = 0.0;
  for (int c = 0; c < a.channel_count(); ++c)
    m = std::max(m, max_abs_diff(a.channel(c), b.channel(c)));
  return m;
}

}  // namespace testsupport
