// Block-based copy-move detectors.
//
// Two feature families over overlapping luma blocks: orthonormal Tchebichef
// moments per 4x4 quadrant reduced by SVD, and sign vectors of the first 16
// zigzag AC coefficients of an orthonormal 8x8 DCT-II. Candidate pairs come
// from lexicographic sorting, votes accumulate per shift vector, and the
// marked map is cleaned by morphological opening plus small-component
// removal.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "dwtforge/color.hpp"
#include "dwtforge/error.hpp"
#include "dwtforge/image.hpp"

namespace dwtforge {

enum class FeatureKind { TchebichefSVD, DctSign };

inline const char* to_string(FeatureKind kind) {
  return kind == FeatureKind::TchebichefSVD ? "tchebichef" : "dctsign";
}

inline FeatureKind feature_from_string(const std::string& name) {
  if (name == "tchebichef") return FeatureKind::TchebichefSVD;
  if (name == "dctsign") return FeatureKind::DctSign;
  fail(Errc::BadArgument, "unknown feature kind: " + name);
}

struct DetectorParams {
  FeatureKind feature = FeatureKind::TchebichefSVD;
  int block_size = 8;
  int stride = 1;
  int sort_window = 10;
  // TchebichefSVD: max relative Euclidean distance for a match. The singular
  // values are dominated by the block mean, so this needs to be tight or
  // same-brightness blocks all over the image pair up.
  // DctSign: min normalized correlation for a match.
  double feature_tol = 0.005;
  double min_shift_distance = 16.0;
  int shift_vote_threshold = 50;
  double low_variance_floor = 2.0;
  int morph_open_radius = 1;
  int min_component_area = 64;

  static DetectorParams defaults(FeatureKind kind) {
    DetectorParams p;
    p.feature = kind;
    if (kind == FeatureKind::DctSign) p.feature_tol = 0.95;
    return p;
  }
};

inline void validate(const DetectorParams& p) {
  require(p.block_size >= 4, Errc::BadArgument, "block_size must be >= 4");
  require(p.stride >= 1, Errc::BadArgument, "stride must be >= 1");
  require(p.sort_window >= 1, Errc::BadArgument, "sort_window must be >= 1");
  require(p.feature_tol >= 0.0 && p.min_shift_distance >= 0.0 &&
              p.shift_vote_threshold >= 0 && p.low_variance_floor >= 0.0 &&
              p.morph_open_radius >= 0 && p.min_component_area >= 0,
          Errc::BadArgument, "detector thresholds must be >= 0");
  if (p.feature == FeatureKind::TchebichefSVD)
    require(p.block_size == 8, Errc::BadArgument,
            "TchebichefSVD features are defined for block_size 8");
  else
    require(p.block_size * p.block_size >= 17, Errc::BadArgument,
            "DctSign needs at least 16 AC coefficients per block");
}

struct BlockFeature {
  int x = 0;  // block top-left
  int y = 0;
  std::vector<double> vector;
};

struct DetectionMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> detected;  // 1 = detected

  DetectionMap() = default;
  DetectionMap(int w, int h) : width(w), height(h), detected(static_cast<size_t>(w) * h, 0) {}

  std::uint8_t at(int x, int y) const { return detected[static_cast<size_t>(y) * width + x]; }
  void set(int x, int y, std::uint8_t v) { detected[static_cast<size_t>(y) * width + x] = v; }

  long long area() const {
    long long n = 0;
    for (std::uint8_t v : detected) n += v ? 1 : 0;
    return n;
  }
};

/// Orthonormal discrete Tchebichef polynomials t_0..t_max_order on {0..N-1}:
/// Gram-Schmidt over the monomials with the uniform inner product, leading
/// coefficient positive. Result[p][x] = t_p(x).
inline std::vector<std::vector<double>> tchebichef_polynomials(int n, int max_order) {
  require(n >= 1 && max_order >= 0 && max_order < n, Errc::BadArgument,
          "need 0 <= max_order < N");
  std::vector<std::vector<double>> t(max_order + 1, std::vector<double>(n));
  for (int p = 0; p <= max_order; ++p) {
    std::vector<double>& v = t[p];
    for (int x = 0; x < n; ++x) v[x] = std::pow(static_cast<double>(x), p);
    // Two orthogonalization passes keep the Gram matrix at identity to
    // machine precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (int q = 0; q < p; ++q) {
        double dot = 0.0;
        for (int x = 0; x < n; ++x) dot += v[x] * t[q][x];
        for (int x = 0; x < n; ++x) v[x] -= dot * t[q][x];
      }
    }
    double norm = 0.0;
    for (int x = 0; x < n; ++x) norm += v[x] * v[x];
    norm = std::sqrt(norm);
    for (int x = 0; x < n; ++x) v[x] /= norm;
  }
  return t;
}

namespace detail {

/// (p,q) moment orders with p+q <= 2, fixed feature column order.
inline constexpr std::array<std::pair<int, int>, 6> kMomentOrders = {
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};

struct TchebBasis {
  std::vector<std::vector<double>> t;  // orthonormal polynomials on {0..3}
  TchebBasis() : t(tchebichef_polynomials(4, 2)) {}
};

inline const TchebBasis& tcheb_basis() {
  static const TchebBasis basis;
  return basis;
}

/// Quadrant Tchebichef moments + SVD over an 8x8 window of `plane` at
/// (ox, oy). out must hold 4 values.
inline void tchebichef_svd_at(const Plane& plane, int ox, int oy, double* out) {
  const auto& t = tcheb_basis().t;
  Eigen::Matrix<double, 4, 6> m;
  static constexpr std::array<std::pair<int, int>, 4> kQuadrants = {
      {{0, 0}, {4, 0}, {0, 4}, {4, 4}}};
  for (int q = 0; q < 4; ++q) {
    const int qx = ox + kQuadrants[q].first;
    const int qy = oy + kQuadrants[q].second;
    for (int mi = 0; mi < 6; ++mi) {
      const auto [p, r] = kMomentOrders[mi];
      double acc = 0.0;
      for (int y = 0; y < 4; ++y) {
        double row = 0.0;
        for (int x = 0; x < 4; ++x) row += t[p][x] * plane.at(qx + x, qy + y);
        acc += t[r][y] * row;
      }
      m(q, mi) = acc;
    }
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 4, 6>> svd(m);
  for (int i = 0; i < 4; ++i) out[i] = svd.singularValues()(i);
}

/// Zigzag traversal of an n x n coefficient grid, (u,v) = (x-frequency,
/// y-frequency), starting at DC.
inline std::vector<std::pair<int, int>> zigzag_order(int n) {
  std::vector<std::pair<int, int>> order;
  order.reserve(static_cast<size_t>(n) * n);
  for (int s = 0; s <= 2 * (n - 1); ++s) {
    const int lo = std::max(0, s - n + 1);
    const int hi = std::min(s, n - 1);
    if (s % 2 == 1) {
      for (int u = lo; u <= hi; ++u) order.emplace_back(u, s - u);
    } else {
      for (int v = lo; v <= hi; ++v) order.emplace_back(s - v, v);
    }
  }
  return order;
}

struct DctBasis {
  int n;
  std::vector<double> cosines;             // [u*n + x] = alpha(u) cos(pi (2x+1) u / 2n)
  std::vector<std::pair<int, int>> zigzag;

  explicit DctBasis(int n_) : n(n_), cosines(static_cast<size_t>(n_) * n_), zigzag(zigzag_order(n_)) {
    const double pi = std::acos(-1.0);
    for (int u = 0; u < n; ++u) {
      const double alpha = std::sqrt((u == 0 ? 1.0 : 2.0) / n);
      for (int x = 0; x < n; ++x)
        cosines[static_cast<size_t>(u) * n + x] =
            alpha * std::cos(pi * (2 * x + 1) * u / (2.0 * n));
    }
  }
};

/// Signs of the first 16 zigzag AC coefficients of the orthonormal DCT-II.
/// sign(0) := +1; coefficients within 1e-9 of zero count as zero so that
/// analytically vanishing terms are not flipped by summation noise.
inline void dct_sign_at(const Plane& plane, int ox, int oy, int block, double* out) {
  static const DctBasis basis8(8);
  std::unique_ptr<DctBasis> owned;
  if (block != 8) owned = std::make_unique<DctBasis>(block);
  const DctBasis& basis = owned ? *owned : basis8;
  // rows first: tmp[u][y] = sum_x C(u,x) f(x,y)
  std::vector<double> tmp(static_cast<size_t>(block) * block);
  for (int y = 0; y < block; ++y)
    for (int u = 0; u < block; ++u) {
      double acc = 0.0;
      for (int x = 0; x < block; ++x)
        acc += basis.cosines[static_cast<size_t>(u) * block + x] * plane.at(ox + x, oy + y);
      tmp[static_cast<size_t>(u) * block + y] = acc;
    }
  for (int i = 0; i < 16; ++i) {
    const auto [u, v] = basis.zigzag[i + 1];  // skip DC
    double acc = 0.0;
    for (int y = 0; y < block; ++y)
      acc += basis.cosines[static_cast<size_t>(v) * block + y] *
             tmp[static_cast<size_t>(u) * block + y];
    out[i] = acc < -1e-9 ? -1.0 : 1.0;
  }
}

inline double block_stddev(const Plane& plane, int ox, int oy, int block) {
  double sum = 0.0, sum2 = 0.0;
  for (int y = 0; y < block; ++y)
    for (int x = 0; x < block; ++x) {
      const double v = plane.at(ox + x, oy + y);
      sum += v;
      sum2 += v * v;
    }
  const double n = static_cast<double>(block) * block;
  const double mean = sum / n;
  return std::sqrt(std::max(0.0, sum2 / n - mean * mean));
}

}  // namespace detail

/// Feature of one 8x8 block: per-quadrant Tchebichef moments T_pq (p+q <= 2)
/// stacked into a 4x6 matrix, reduced to its 4 singular values (descending).
inline BlockFeature feature_tchebichef_svd(const Plane& block) {
  require(block.width() == 8 && block.height() == 8, Errc::BadArgument,
          "TchebichefSVD feature expects an 8x8 block");
  BlockFeature f;
  f.vector.resize(4);
  detail::tchebichef_svd_at(block, 0, 0, f.vector.data());
  return f;
}

/// Feature of one block: +-1 signs of the first 16 zigzag AC coefficients of
/// the orthonormal 2D DCT-II.
inline BlockFeature feature_dct_sign(const Plane& block) {
  require(block.width() == block.height(), Errc::BadArgument,
          "DctSign feature expects a square block");
  require(block.width() * block.height() >= 17, Errc::BadArgument,
          "DctSign needs at least 16 AC coefficients");
  BlockFeature f;
  f.vector.resize(16);
  detail::dct_sign_at(block, 0, 0, block.width(), f.vector.data());
  return f;
}

/// Erosion then dilation with a (2r+1)^2 square structuring element. Pixels
/// outside the map count as background. radius 0 is the identity.
inline DetectionMap morphological_open(const DetectionMap& mask, int radius) {
  require(radius >= 0, Errc::BadArgument, "radius must be >= 0");
  if (radius == 0) return mask;
  const int w = mask.width;
  const int h = mask.height;

  // Separable square SE; pixels beyond the border read as background 0.
  auto run_separable = [&](const DetectionMap& in, bool erode) {
    DetectionMap horiz(w, h), out(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        std::uint8_t v = erode ? 1 : 0;
        for (int k = -radius; k <= radius; ++k) {
          const int xx = x + k;
          const std::uint8_t s = (xx < 0 || xx >= w) ? 0 : in.at(xx, y);
          v = erode ? static_cast<std::uint8_t>(v & s) : static_cast<std::uint8_t>(v | s);
        }
        horiz.set(x, y, v);
      }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        std::uint8_t v = erode ? 1 : 0;
        for (int k = -radius; k <= radius; ++k) {
          const int yy = y + k;
          const std::uint8_t s = (yy < 0 || yy >= h) ? 0 : horiz.at(x, yy);
          v = erode ? static_cast<std::uint8_t>(v & s) : static_cast<std::uint8_t>(v | s);
        }
        out.set(x, y, v);
      }
    return out;
  };

  return run_separable(run_separable(mask, true), false);
}

/// Drops 8-connected components smaller than min_area pixels.
inline DetectionMap remove_small_components(const DetectionMap& mask, int min_area) {
  require(min_area >= 0, Errc::BadArgument, "min_area must be >= 0");
  const int w = mask.width;
  const int h = mask.height;
  DetectionMap out(w, h);
  std::vector<std::uint8_t> seen(static_cast<size_t>(w) * h, 0);
  std::vector<int> stack, component;
  for (int sy = 0; sy < h; ++sy)
    for (int sx = 0; sx < w; ++sx) {
      const int start = sy * w + sx;
      if (!mask.detected[start] || seen[start]) continue;
      stack.assign(1, start);
      component.clear();
      seen[start] = 1;
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        component.push_back(cur);
        const int cx = cur % w;
        const int cy = cur / w;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const int ni = ny * w + nx;
            if (mask.detected[ni] && !seen[ni]) {
              seen[ni] = 1;
              stack.push_back(ni);
            }
          }
      }
      if (static_cast<int>(component.size()) >= min_area)
        for (int idx : component) out.detected[idx] = 1;
    }
  return out;
}

/// Detection map as a {0,1} mask (for PNG emission, 255 = detected).
inline Mask to_mask(const DetectionMap& map) {
  Mask m(map.width, map.height);
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) m.set(x, y, map.at(x, y) ? 1.0 : 0.0);
  return m;
}

inline DetectionMap detection_from_mask(const Mask& mask) {
  DetectionMap map(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      map.set(x, y, mask.at(x, y) >= 0.5 ? 1 : 0);
  return map;
}

struct ShiftVote {
  int dx = 0;
  int dy = 0;
  int count = 0;
};

struct DetectReport {
  long long block_count = 0;
  long long skipped_blocks = 0;
  long long matched_pairs = 0;
  std::vector<ShiftVote> winning_shifts;  // count descending, then (dx, dy)
};

struct DetectionResult {
  DetectionMap map;
  DetectReport report;
};

inline nlohmann::ordered_json detector_params_json(const DetectorParams& p) {
  nlohmann::ordered_json j;
  j["feature"] = to_string(p.feature);
  j["block_size"] = p.block_size;
  j["stride"] = p.stride;
  j["sort_window"] = p.sort_window;
  j["feature_tol"] = p.feature_tol;
  j["min_shift_distance"] = p.min_shift_distance;
  j["shift_vote_threshold"] = p.shift_vote_threshold;
  j["low_variance_floor"] = p.low_variance_floor;
  j["morph_open_radius"] = p.morph_open_radius;
  j["min_component_area"] = p.min_component_area;
  return j;
}

inline DetectorParams detector_params_from_json(const nlohmann::json& j) {
  DetectorParams p = DetectorParams::defaults(
      feature_from_string(j.at("feature").get<std::string>()));
  if (j.contains("block_size")) p.block_size = j.at("block_size").get<int>();
  if (j.contains("stride")) p.stride = j.at("stride").get<int>();
  if (j.contains("sort_window")) p.sort_window = j.at("sort_window").get<int>();
  if (j.contains("feature_tol")) p.feature_tol = j.at("feature_tol").get<double>();
  if (j.contains("min_shift_distance"))
    p.min_shift_distance = j.at("min_shift_distance").get<double>();
  if (j.contains("shift_vote_threshold"))
    p.shift_vote_threshold = j.at("shift_vote_threshold").get<int>();
  if (j.contains("low_variance_floor"))
    p.low_variance_floor = j.at("low_variance_floor").get<double>();
  if (j.contains("morph_open_radius"))
    p.morph_open_radius = j.at("morph_open_radius").get<int>();
  if (j.contains("min_component_area"))
    p.min_component_area = j.at("min_component_area").get<int>();
  validate(p);
  return p;
}

inline nlohmann::ordered_json detect_report_json(const DetectorParams& params,
                                                 const DetectReport& report) {
  nlohmann::ordered_json j;
  j["params"] = detector_params_json(params);
  j["block_count"] = report.block_count;
  j["skipped_blocks"] = report.skipped_blocks;
  j["matched_pairs"] = report.matched_pairs;
  nlohmann::ordered_json shifts = nlohmann::ordered_json::array();
  for (const ShiftVote& s : report.winning_shifts) {
    nlohmann::ordered_json e;
    e["dx"] = s.dx;
    e["dy"] = s.dy;
    e["count"] = s.count;
    shifts.push_back(std::move(e));
  }
  j["winning_shifts"] = std::move(shifts);
  return j;
}

/// Full detector pipeline over the luma plane.
inline DetectionResult detect_full(const Image& img, const DetectorParams& params) {
  validate(params);
  const Plane gray = luma(img);
  const int w = gray.width();
  const int h = gray.height();
  const int block = params.block_size;
  require(w >= block && h >= block, Errc::BadArgument,
          "image smaller than the detector block");

  const int dim = params.feature == FeatureKind::TchebichefSVD ? 4 : 16;

  // Feature extraction over the stride grid, row-major block origins.
  std::vector<int> org_x, org_y;
  std::vector<double> feats;  // flat, dim values per kept block
  DetectReport report;
  for (int y = 0; y + block <= h; y += params.stride)
    for (int x = 0; x + block <= w; x += params.stride) {
      ++report.block_count;
      if (detail::block_stddev(gray, x, y, block) < params.low_variance_floor) {
        ++report.skipped_blocks;
        continue;
      }
      org_x.push_back(x);
      org_y.push_back(y);
      feats.resize(feats.size() + dim);
      double* out = feats.data() + feats.size() - dim;
      if (params.feature == FeatureKind::TchebichefSVD)
        detail::tchebichef_svd_at(gray, x, y, out);
      else
        detail::dct_sign_at(gray, x, y, block, out);
    }

  const size_t n = org_x.size();

  // Lexicographic order on the vector rounded to 4 decimals, ties by (y,x).
  std::vector<double> rounded(feats.size());
  for (size_t i = 0; i < feats.size(); ++i) rounded[i] = std::round(feats[i] * 1e4) / 1e4;
  std::vector<std::uint32_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double* ra = rounded.data() + static_cast<size_t>(a) * dim;
    const double* rb = rounded.data() + static_cast<size_t>(b) * dim;
    for (int k = 0; k < dim; ++k)
      if (ra[k] != rb[k]) return ra[k] < rb[k];
    if (org_y[a] != org_y[b]) return org_y[a] < org_y[b];
    return org_x[a] < org_x[b];
  });

  // Matching within the sorted window; matches use unrounded distances.
  const double min_shift2 = params.min_shift_distance * params.min_shift_distance;
  struct Pair {
    std::uint32_t a, b;
  };
  std::map<std::pair<int, int>, std::vector<Pair>> shift_pairs;
  for (size_t si = 0; si < n; ++si) {
    const std::uint32_t i = order[si];
    const double* fi = feats.data() + static_cast<size_t>(i) * dim;
    const size_t window_end = std::min(n, si + 1 + static_cast<size_t>(params.sort_window));
    for (size_t sj = si + 1; sj < window_end; ++sj) {
      const std::uint32_t j = order[sj];
      const double* fj = feats.data() + static_cast<size_t>(j) * dim;

      bool feature_match = false;
      if (params.feature == FeatureKind::TchebichefSVD) {
        double d2 = 0.0, na = 0.0, nb = 0.0;
        for (int k = 0; k < dim; ++k) {
          const double diff = fi[k] - fj[k];
          d2 += diff * diff;
          na += fi[k] * fi[k];
          nb += fj[k] * fj[k];
        }
        const double scale = std::sqrt(std::max(na, nb));
        feature_match = scale == 0.0 ? true : std::sqrt(d2) <= params.feature_tol * scale;
      } else {
        double dot = 0.0;
        for (int k = 0; k < dim; ++k) dot += fi[k] * fj[k];
        feature_match = dot / dim >= params.feature_tol;
      }
      if (!feature_match) continue;

      const double ddx = org_x[j] - org_x[i];
      const double ddy = org_y[j] - org_y[i];
      if (ddx * ddx + ddy * ddy < min_shift2) continue;

      int dx = org_x[j] - org_x[i];
      int dy = org_y[j] - org_y[i];
      if (dx < 0 || (dx == 0 && dy < 0)) {
        dx = -dx;
        dy = -dy;
      }
      shift_pairs[{dx, dy}].push_back(Pair{i, j});
      ++report.matched_pairs;
    }
  }

  // Shift-vector voting: every shift with enough votes marks both blocks of
  // all its pairs.
  DetectionMap marked(w, h);
  for (const auto& [shift, pairs] : shift_pairs) {
    if (static_cast<int>(pairs.size()) < params.shift_vote_threshold) continue;
    report.winning_shifts.push_back(
        ShiftVote{shift.first, shift.second, static_cast<int>(pairs.size())});
    for (const Pair& pr : pairs)
      for (std::uint32_t idx : {pr.a, pr.b})
        for (int by = 0; by < block; ++by)
          for (int bx = 0; bx < block; ++bx)
            marked.set(org_x[idx] + bx, org_y[idx] + by, 1);
  }
  std::sort(report.winning_shifts.begin(), report.winning_shifts.end(),
            [](const ShiftVote& a, const ShiftVote& b) {
              if (a.count != b.count) return a.count > b.count;
              if (a.dx != b.dx) return a.dx < b.dx;
              return a.dy < b.dy;
            });

  DetectionMap opened = morphological_open(marked, params.morph_open_radius);
  DetectionMap cleaned = remove_small_components(opened, params.min_component_area);
  return DetectionResult{std::move(cleaned), std::move(report)};
}

inline DetectionMap detect(const Image& img, const DetectorParams& params) {
  return detect_full(img, params).map;
}

}  // namespace dwtforge
