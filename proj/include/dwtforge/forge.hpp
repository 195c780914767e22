// Copy-move forgery synthesis.
//
// forge_dwt runs the frequency-domain pipeline: smooth, crop the patch from
// the host, convert both to YCbCr, decompose at level l, paste every patch
// sub-band into the corresponding host sub-band at floor-mapped coordinates,
// inverse transform, convert back to RGB. forge_spatial is the plain
// pixel-domain baseline with the same contract.
//
// The patch always originates from the host image (copy-move); splicing from
// a foreign image is rejected by construction since only a host is accepted.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dwtforge/color.hpp"
#include "dwtforge/error.hpp"
#include "dwtforge/image.hpp"
#include "dwtforge/smooth.hpp"
#include "dwtforge/wavelet.hpp"

namespace dwtforge {

enum class BlendMode { CutOut, AlphaMatte };

inline const char* to_string(BlendMode mode) {
  return mode == BlendMode::CutOut ? "cutout" : "alpha";
}

inline BlendMode blend_from_string(const std::string& name) {
  if (name == "cutout") return BlendMode::CutOut;
  if (name == "alpha") return BlendMode::AlphaMatte;
  fail(Errc::BadArgument, "unknown blend mode: " + name);
}

struct ForgerySpec {
  Region patch_region;              // source rect in the host
  int paste_x = 0;                  // top-left destination in the host
  int paste_y = 0;
  int level = 1;
  WaveletKind wavelet = WaveletKind::Haar;
  BlendMode blend = BlendMode::CutOut;
  double feather = 0.0;             // alpha-matte edge width, pixels
  double smooth_sigma = 0.0;        // preprocessing blur, 0 = off
};

struct ForgeryOutput {
  Image forged;       // RGB, real-valued samples (quantized only on save)
  Mask truth_mask;    // binary paste footprint at full resolution
  ForgerySpec spec_echo;
};

/// Sidecar schema shared by the CLI and the corpus runner.
inline nlohmann::ordered_json forgery_spec_json(const ForgerySpec& spec) {
  nlohmann::ordered_json j;
  j["patch_x"] = spec.patch_region.x;
  j["patch_y"] = spec.patch_region.y;
  j["patch_w"] = spec.patch_region.w;
  j["patch_h"] = spec.patch_region.h;
  j["paste_x"] = spec.paste_x;
  j["paste_y"] = spec.paste_y;
  j["level"] = spec.level;
  j["wavelet"] = to_string(spec.wavelet);
  j["blend"] = to_string(spec.blend);
  j["feather"] = spec.feather;
  j["smooth_sigma"] = spec.smooth_sigma;
  return j;
}

inline ForgerySpec forgery_spec_from_json(const nlohmann::json& j) {
  ForgerySpec spec;
  spec.patch_region = {j.at("patch_x").get<int>(), j.at("patch_y").get<int>(),
                       j.at("patch_w").get<int>(), j.at("patch_h").get<int>()};
  spec.paste_x = j.at("paste_x").get<int>();
  spec.paste_y = j.at("paste_y").get<int>();
  spec.level = j.at("level").get<int>();
  spec.wavelet = wavelet_from_string(j.at("wavelet").get<std::string>());
  spec.blend = blend_from_string(j.at("blend").get<std::string>());
  spec.feather = j.at("feather").get<double>();
  spec.smooth_sigma = j.at("smooth_sigma").get<double>();
  return spec;
}

/// Floor-maps a full-resolution offset into level-k sub-band coordinates.
inline std::pair<int, int> map_offset_to_subband(int x, int y, int k) {
  return {x >> k, y >> k};
}

/// Sub-band footprint of a region at level k: the offset floor-divides, the
/// extent is the patch sub-band extent (iterated ceil halving).
inline Region map_region_to_subband(const Region& region, int k) {
  return Region{region.x >> k, region.y >> k,
                subband_extent(region.w, k), subband_extent(region.h, k)};
}

/// Alpha mask for a w x h paste: 1 in the interior, separable linear ramp to
/// 0 over `feather` pixels from each edge (pixel-center distances). feather 0
/// gives the all-ones binary mask.
inline Mask make_alpha_mask(int width, int height, double feather) {
  require(feather >= 0.0, Errc::BadArgument, "feather must be >= 0");
  require(width > 0 && height > 0, Errc::BadArgument, "mask extent must be positive");
  Plane alpha(width, height, 1.0);
  if (feather > 0.0) {
    auto ramp = [feather](int i, int extent) {
      const double edge_dist = std::min(i + 0.5, extent - i - 0.5);
      return std::min(1.0, edge_dist / feather);
    };
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        alpha.at(x, y) = ramp(x, width) * ramp(y, height);
  }
  return Mask(std::move(alpha));
}

namespace detail {

/// Mean over 2^k x 2^k cells; edge cells clipped to the mask extent keep an
/// all-ones mask exactly binary.
inline Plane downsample_mask(const Plane& alpha, int k) {
  if (k == 0) return alpha;
  const int cell = 1 << k;
  const int w = subband_extent(alpha.width(), k);
  const int h = subband_extent(alpha.height(), k);
  Plane out(w, h);
  for (int v = 0; v < h; ++v) {
    const int y0 = v * cell;
    const int y1 = std::min(y0 + cell, alpha.height());
    for (int u = 0; u < w; ++u) {
      const int x0 = u * cell;
      const int x1 = std::min(x0 + cell, alpha.width());
      double sum = 0.0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) sum += alpha.at(x, y);
      out.at(u, v) = sum / ((y1 - y0) * (x1 - x0));
    }
  }
  return out;
}

inline void blend_into(Plane& dest, const Plane& src, const Plane& alpha, int ox, int oy) {
  require(ox >= 0 && oy >= 0 && ox + src.width() <= dest.width() &&
              oy + src.height() <= dest.height(),
          Errc::BadArgument, "paste footprint out of bounds");
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x) {
      const double a = alpha.at(x, y);
      double& d = dest.at(ox + x, oy + y);
      d = a * src.at(x, y) + (1.0 - a) * d;
    }
}

inline void validate_spec(const Image& host, const ForgerySpec& spec) {
  require(host.colorspace() == ColorSpace::Rgb, Errc::BadArgument,
          "forgery host must be RGB");
  require(spec.patch_region.w > 0 && spec.patch_region.h > 0, Errc::BadArgument,
          "patch region must have positive area");
  require(spec.patch_region.inside(host.width(), host.height()), Errc::BadArgument,
          "patch region out of host bounds");
  require(spec.paste_x >= 0 && spec.paste_y >= 0 &&
              spec.paste_x + spec.patch_region.w <= host.width() &&
              spec.paste_y + spec.patch_region.h <= host.height(),
          Errc::BadArgument, "paste footprint out of host bounds");
  require(spec.feather >= 0.0, Errc::BadArgument, "feather must be >= 0");
  require(spec.smooth_sigma >= 0.0, Errc::BadArgument, "smooth sigma must be >= 0");
  if (spec.blend == BlendMode::AlphaMatte)
    require(spec.feather > 0.0, Errc::BadArgument, "alpha matting needs feather > 0");
}

inline Mask paste_mask(const ForgerySpec& spec) {
  return spec.blend == BlendMode::CutOut
             ? make_alpha_mask(spec.patch_region.w, spec.patch_region.h, 0.0)
             : make_alpha_mask(spec.patch_region.w, spec.patch_region.h, spec.feather);
}

inline Mask footprint_mask(const Image& host, const ForgerySpec& spec) {
  Mask truth(host.width(), host.height(), 0.0);
  for (int y = 0; y < spec.patch_region.h; ++y)
    for (int x = 0; x < spec.patch_region.w; ++x)
      truth.set(spec.paste_x + x, spec.paste_y + y, 1.0);
  return truth;
}

}  // namespace detail

/// Plain pixel-domain paste, the baseline the laundered pipeline is
/// compared against.
inline ForgeryOutput forge_spatial(const Image& host, const ForgerySpec& spec) {
  detail::validate_spec(host, spec);
  Image work = smooth(host, spec.smooth_sigma);
  const Image patch = crop(work, spec.patch_region);
  const Mask mask = detail::paste_mask(spec);
  for (int c = 0; c < work.channel_count(); ++c)
    detail::blend_into(work.channel(c), patch.channel(c), mask.plane(),
                       spec.paste_x, spec.paste_y);
  return ForgeryOutput{std::move(work), detail::footprint_mask(host, spec), spec};
}

/// Frequency-domain paste: every sub-band of the patch pyramid (LL plus each
/// detail triple of every channel) lands in the corresponding host sub-band.
inline ForgeryOutput forge_dwt(const Image& host, const ForgerySpec& spec) {
  detail::validate_spec(host, spec);
  require(spec.level >= 1, Errc::BadArgument, "decomposition level must be >= 1");
  const int min_dim = 1 << spec.level;
  require(spec.patch_region.w >= min_dim && spec.patch_region.h >= min_dim,
          Errc::BadArgument, "level too deep for patch size");
  require(host.width() >= min_dim && host.height() >= min_dim, Errc::BadArgument,
          "level too deep for host size");

  const Image work = smooth(host, spec.smooth_sigma);
  const Image patch = crop(work, spec.patch_region);
  const Image host_ycc = rgb_to_ycbcr(work);
  const Image patch_ycc = rgb_to_ycbcr(patch);

  std::vector<SubbandPyramid> host_pyrs = dwt_image(host_ycc, spec.wavelet, spec.level);
  const std::vector<SubbandPyramid> patch_pyrs =
      dwt_image(patch_ycc, spec.wavelet, spec.level);

  const Mask mask = detail::paste_mask(spec);
  std::vector<Plane> level_masks(spec.level + 1);  // index k = level-k sub-band mask
  for (int k = 1; k <= spec.level; ++k)
    level_masks[k] = detail::downsample_mask(mask.plane(), k);

  for (size_t c = 0; c < host_pyrs.size(); ++c) {
    SubbandPyramid& hp = host_pyrs[c];
    const SubbandPyramid& pp = patch_pyrs[c];
    for (int k = 1; k <= spec.level; ++k) {
      const auto [ox, oy] = map_offset_to_subband(spec.paste_x, spec.paste_y, k);
      const DetailTriple& pt = pp.details[spec.level - k];
      DetailTriple& ht = hp.details[spec.level - k];
      detail::blend_into(ht.lh, pt.lh, level_masks[k], ox, oy);
      detail::blend_into(ht.hl, pt.hl, level_masks[k], ox, oy);
      detail::blend_into(ht.hh, pt.hh, level_masks[k], ox, oy);
    }
    const auto [ox, oy] = map_offset_to_subband(spec.paste_x, spec.paste_y, spec.level);
    detail::blend_into(hp.ll, pp.ll, level_masks[spec.level], ox, oy);
  }

  std::vector<Plane> channels;
  channels.reserve(host_pyrs.size());
  for (const SubbandPyramid& pyr : host_pyrs)
    channels.push_back(idwt2(pyr, spec.wavelet));
  const Image forged_ycc(std::move(channels), ColorSpace::YCbCr);
  return ForgeryOutput{ycbcr_to_rgb(forged_ycc), detail::footprint_mask(host, spec), spec};
}

}  // namespace dwtforge
