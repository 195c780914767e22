// Multi-level separable 2D DWT and inverse with perfect reconstruction.
//
// Filters are orthonormal (low-pass DC gain sqrt(2)); the filter bank runs
// periodized, which keeps level-k planes at exactly ceil(size/2^k) samples
// and makes the transform an orthogonal map (energy-preserving, exactly
// invertible). Odd-sized planes are edge-padded by one sample at the level
// where the odd size occurs and cropped back during synthesis.
//
// Sub-band naming: first letter is the filter along x, second along y.
// LH (low x, high y) carries horizontal structure, HL vertical, HH diagonal.
#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "dwtforge/error.hpp"
#include "dwtforge/image.hpp"
#include "dwtforge/png_io.hpp"

namespace dwtforge {

enum class WaveletKind { Haar, Db2 };

inline const char* to_string(WaveletKind kind) {
  return kind == WaveletKind::Haar ? "haar" : "db2";
}

inline WaveletKind wavelet_from_string(const std::string& name) {
  if (name == "haar") return WaveletKind::Haar;
  if (name == "db2") return WaveletKind::Db2;
  fail(Errc::BadArgument, "unknown wavelet kind: " + name);
}

namespace detail {

struct FilterPair {
  std::vector<double> lo;  // analysis low-pass
  std::vector<double> hi;  // analysis high-pass, hi[k] = (-1)^k lo[L-1-k]
};

inline const FilterPair& filters_for(WaveletKind kind) {
  static const FilterPair haar = [] {
    const double s = 1.0 / std::sqrt(2.0);
    FilterPair f;
    f.lo = {s, s};
    f.hi = {s, -s};
    return f;
  }();
  static const FilterPair db2 = [] {
    const double r3 = std::sqrt(3.0);
    const double d = 4.0 * std::sqrt(2.0);
    FilterPair f;
    f.lo = {(1.0 + r3) / d, (3.0 + r3) / d, (3.0 - r3) / d, (1.0 - r3) / d};
    f.hi.resize(4);
    for (int k = 0; k < 4; ++k) f.hi[k] = (k % 2 ? -1.0 : 1.0) * f.lo[3 - k];
    return f;
  }();
  return kind == WaveletKind::Haar ? haar : db2;
}

/// One analysis step on an even-length signal: approx[i] and detail[i]
/// correlate the filters with x starting at sample 2i, wrapping mod n.
inline void analyze_1d(const double* x, int n, const FilterPair& f,
                       double* approx, double* detail) {
  const int taps = static_cast<int>(f.lo.size());
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (int k = 0; k < taps; ++k) {
      int idx = 2 * i + k;
      if (idx >= n) idx -= n;
      const double v = x[idx];
      a += f.lo[k] * v;
      d += f.hi[k] * v;
    }
    approx[i] = a;
    detail[i] = d;
  }
}

/// Transpose of analyze_1d; exact inverse for orthonormal filters.
inline void synthesize_1d(const double* approx, const double* detail, int half,
                          const FilterPair& f, double* x) {
  const int taps = static_cast<int>(f.lo.size());
  const int n = 2 * half;
  for (int i = 0; i < n; ++i) x[i] = 0.0;
  for (int i = 0; i < half; ++i) {
    for (int k = 0; k < taps; ++k) {
      int idx = 2 * i + k;
      if (idx >= n) idx -= n;
      x[idx] += f.lo[k] * approx[i] + f.hi[k] * detail[i];
    }
  }
}

/// Pads a plane on the right/bottom by replicating the edge sample so both
/// dimensions are even.
inline Plane pad_to_even(const Plane& p) {
  const int w = p.width() + (p.width() % 2);
  const int h = p.height() + (p.height() % 2);
  if (w == p.width() && h == p.height()) return p;
  Plane out(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = std::min(y, p.height() - 1);
    for (int x = 0; x < w; ++x) out.at(x, y) = p.at(std::min(x, p.width() - 1), sy);
  }
  return out;
}

inline Plane crop_plane(const Plane& p, int w, int h) {
  if (w == p.width() && h == p.height()) return p;
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = p.at(x, y);
  return out;
}

}  // namespace detail

struct DetailTriple {
  Plane lh;  // low x, high y
  Plane hl;  // high x, low y
  Plane hh;  // high x, high y
};

/// Level-l decomposition of one plane: 3l+1 sub-bands. details[0] is the
/// coarsest triple (level l), details.back() the finest (level 1).
struct SubbandPyramid {
  int level = 0;
  Plane ll;
  std::vector<DetailTriple> details;
  int original_width = 0;
  int original_height = 0;

  int subband_count() const noexcept { return 3 * level + 1; }
};

inline int subband_extent(int extent, int k) {
  for (int i = 0; i < k; ++i) extent = (extent + 1) / 2;
  return extent;
}

namespace detail {

/// One 2D analysis level. The input must have even dimensions.
inline void analyze_level(const Plane& in, const FilterPair& f, Plane& ll,
                          DetailTriple& triple) {
  const int w = in.width();
  const int h = in.height();
  const int hw = w / 2;
  const int hh2 = h / 2;

  // rows: split each row into low-x / high-x halves
  Plane lox(hw, h), hix(hw, h);
  std::vector<double> row(w), a(hw), d(hw);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) row[x] = in.at(x, y);
    analyze_1d(row.data(), w, f, a.data(), d.data());
    for (int x = 0; x < hw; ++x) {
      lox.at(x, y) = a[x];
      hix.at(x, y) = d[x];
    }
  }

  // columns
  ll = Plane(hw, hh2);
  triple.lh = Plane(hw, hh2);
  triple.hl = Plane(hw, hh2);
  triple.hh = Plane(hw, hh2);
  std::vector<double> col(h), ca(hh2), cd(hh2);
  for (int x = 0; x < hw; ++x) {
    for (int y = 0; y < h; ++y) col[y] = lox.at(x, y);
    analyze_1d(col.data(), h, f, ca.data(), cd.data());
    for (int y = 0; y < hh2; ++y) {
      ll.at(x, y) = ca[y];
      triple.lh.at(x, y) = cd[y];
    }
    for (int y = 0; y < h; ++y) col[y] = hix.at(x, y);
    analyze_1d(col.data(), h, f, ca.data(), cd.data());
    for (int y = 0; y < hh2; ++y) {
      triple.hl.at(x, y) = ca[y];
      triple.hh.at(x, y) = cd[y];
    }
  }
}

/// One 2D synthesis level, the exact transpose of analyze_level.
inline Plane synthesize_level(const Plane& ll, const DetailTriple& triple,
                              const FilterPair& f) {
  const int hw = ll.width();
  const int hh2 = ll.height();
  const int w = 2 * hw;
  const int h = 2 * hh2;

  Plane lox(hw, h), hix(hw, h);
  std::vector<double> col(h), ca(hh2), cd(hh2);
  for (int x = 0; x < hw; ++x) {
    for (int y = 0; y < hh2; ++y) {
      ca[y] = ll.at(x, y);
      cd[y] = triple.lh.at(x, y);
    }
    synthesize_1d(ca.data(), cd.data(), hh2, f, col.data());
    for (int y = 0; y < h; ++y) lox.at(x, y) = col[y];
    for (int y = 0; y < hh2; ++y) {
      ca[y] = triple.hl.at(x, y);
      cd[y] = triple.hh.at(x, y);
    }
    synthesize_1d(ca.data(), cd.data(), hh2, f, col.data());
    for (int y = 0; y < h; ++y) hix.at(x, y) = col[y];
  }

  Plane out(w, h);
  std::vector<double> row(w), a(hw), d(hw);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < hw; ++x) {
      a[x] = lox.at(x, y);
      d[x] = hix.at(x, y);
    }
    synthesize_1d(a.data(), d.data(), hw, f, row.data());
    for (int x = 0; x < w; ++x) out.at(x, y) = row[x];
  }
  return out;
}

}  // namespace detail

inline SubbandPyramid dwt2(const Plane& plane, WaveletKind kind, int level) {
  require(level >= 1, Errc::BadArgument, "decomposition level must be >= 1");
  const int min_dim = 1 << level;
  require(plane.width() >= min_dim && plane.height() >= min_dim, Errc::BadArgument,
          "level " + std::to_string(level) + " too deep for a " +
              std::to_string(plane.width()) + "x" + std::to_string(plane.height()) + " plane");

  const detail::FilterPair& f = detail::filters_for(kind);
  SubbandPyramid pyr;
  pyr.level = level;
  pyr.original_width = plane.width();
  pyr.original_height = plane.height();

  Plane current = plane;
  for (int k = 1; k <= level; ++k) {
    const Plane even = detail::pad_to_even(current);
    DetailTriple triple;
    Plane ll;
    detail::analyze_level(even, f, ll, triple);
    pyr.details.push_back(std::move(triple));
    current = std::move(ll);
  }
  pyr.ll = std::move(current);
  std::reverse(pyr.details.begin(), pyr.details.end());  // finest last
  return pyr;
}

inline Plane idwt2(const SubbandPyramid& pyr, WaveletKind kind) {
  require(pyr.level >= 1 && static_cast<int>(pyr.details.size()) == pyr.level,
          Errc::BadArgument, "pyramid level does not match detail triple count");

  // Expected plane size at each level, finest first.
  std::vector<std::pair<int, int>> sizes(pyr.level + 1);
  sizes[0] = {pyr.original_width, pyr.original_height};
  for (int k = 1; k <= pyr.level; ++k)
    sizes[k] = {(sizes[k - 1].first + 1) / 2, (sizes[k - 1].second + 1) / 2};

  for (int k = 1; k <= pyr.level; ++k) {
    // details holds the finest triple last.
    const DetailTriple& t = pyr.details[pyr.level - k];
    require(t.lh.width() == sizes[k].first && t.lh.height() == sizes[k].second &&
                t.lh.same_size(t.hl) && t.lh.same_size(t.hh),
            Errc::DimensionMismatch, "inconsistent sub-band dimensions");
  }
  require(pyr.ll.width() == sizes[pyr.level].first &&
              pyr.ll.height() == sizes[pyr.level].second,
          Errc::DimensionMismatch, "inconsistent LL dimensions");

  const detail::FilterPair& f = detail::filters_for(kind);
  Plane current = pyr.ll;
  for (int k = pyr.level; k >= 1; --k) {
    const DetailTriple& t = pyr.details[pyr.level - k];
    // Synthesis works on the padded (even) geometry of the finer level.
    const int target_w = sizes[k - 1].first;
    const int target_h = sizes[k - 1].second;
    Plane up = detail::synthesize_level(current, t, f);
    current = detail::crop_plane(up, target_w, target_h);
  }
  return current;
}

/// Per-channel decomposition of a YCbCr image, pyramids in Y, Cb, Cr order.
inline std::vector<SubbandPyramid> dwt_image(const Image& img, WaveletKind kind, int level) {
  require(img.colorspace() == ColorSpace::YCbCr, Errc::BadArgument,
          "dwt_image expects a YCbCr image");
  std::vector<SubbandPyramid> pyrs;
  pyrs.reserve(img.channel_count());
  for (int c = 0; c < img.channel_count(); ++c)
    pyrs.push_back(dwt2(img.channel(c), kind, level));
  return pyrs;
}

inline double energy(const Plane& p) {
  double e = 0.0;
  for (double v : p.samples()) e += v * v;
  return e;
}

inline double energy(const SubbandPyramid& pyr) {
  double e = energy(pyr.ll);
  for (const DetailTriple& t : pyr.details)
    e += energy(t.lh) + energy(t.hl) + energy(t.hh);
  return e;
}

/// Debug visualization: writes every sub-band as a min-max normalized
/// grayscale PNG ("<base>_LL.png", "<base>_LH1.png", ...). Level suffix 1 is
/// the finest level. Never read back by the pipeline.
inline void dump_subbands(const SubbandPyramid& pyr, const std::string& base_path) {
  auto write_normalized = [](const Plane& p, const std::string& path) {
    double lo = p.samples().front(), hi = lo;
    for (double v : p.samples()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    Image img(p.width(), p.height(), ColorSpace::Gray);
    const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    for (size_t i = 0; i < p.samples().size(); ++i)
      img.channel(0).samples()[i] = (p.samples()[i] - lo) * scale;
    save_png(img, path);
  };
  write_normalized(pyr.ll, base_path + "_LL.png");
  for (int k = 1; k <= pyr.level; ++k) {
    const DetailTriple& t = pyr.details[pyr.level - k];
    write_normalized(t.lh, base_path + "_LH" + std::to_string(k) + ".png");
    write_normalized(t.hl, base_path + "_HL" + std::to_string(k) + ".png");
    write_normalized(t.hh, base_path + "_HH" + std::to_string(k) + ".png");
  }
}

}  // namespace dwtforge
