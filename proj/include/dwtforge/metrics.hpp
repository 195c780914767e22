// Detection accuracy r and false detection rate w, plus corpus aggregation.
//
//   r = |R ∩ D| / |R|
//   w = |D \ R| / |R|
//
// The literal textbook form |F - D| / |R| with F the falsely detected area
// is identically zero (F is a subset of D); it is co-reported as w_literal
// so the discrepancy stays visible.
#pragma once

#include <cmath>
#include <vector>

#include <json.hpp>

#include "dwtforge/detect.hpp"
#include "dwtforge/error.hpp"
#include "dwtforge/image.hpp"

namespace dwtforge {

struct MetricsReport {
  double r = 0.0;
  double w = 0.0;
  double w_literal = 0.0;
  long long area_R = 0;
  long long area_D = 0;
  long long area_intersection = 0;
  long long area_false = 0;
};

/// Scores a detection map against the ground-truth mask. The mask binarizes
/// at alpha >= 0.5.
inline MetricsReport score(const Mask& truth, const DetectionMap& detected) {
  require(truth.width() == detected.width && truth.height() == detected.height,
          Errc::DimensionMismatch, "truth and detection dimensions differ");
  MetricsReport rep;
  for (int y = 0; y < truth.height(); ++y)
    for (int x = 0; x < truth.width(); ++x) {
      const bool in_r = truth.at(x, y) >= 0.5;
      const bool in_d = detected.at(x, y) != 0;
      rep.area_R += in_r;
      rep.area_D += in_d;
      rep.area_intersection += in_r && in_d;
    }
  require(rep.area_R > 0, Errc::BadArgument, "ground truth mask is empty");
  rep.area_false = rep.area_D - rep.area_intersection;
  rep.r = static_cast<double>(rep.area_intersection) / static_cast<double>(rep.area_R);
  rep.w = static_cast<double>(rep.area_false) / static_cast<double>(rep.area_R);
  rep.w_literal = 0.0;  // |F \ D| = 0 by construction
  return rep;
}

struct CorpusSummary {
  std::vector<MetricsReport> per_image;
  double mean_r = 0.0;
  double sigma_r = 0.0;
  double mean_w = 0.0;
  double sigma_w = 0.0;
};

/// Arithmetic mean and population standard deviation over the reports.
inline CorpusSummary summarize(const std::vector<MetricsReport>& reports) {
  require(!reports.empty(), Errc::BadArgument, "cannot summarize an empty report list");
  CorpusSummary s;
  s.per_image = reports;
  const double n = static_cast<double>(reports.size());
  for (const MetricsReport& rep : reports) {
    s.mean_r += rep.r;
    s.mean_w += rep.w;
  }
  s.mean_r /= n;
  s.mean_w /= n;
  double vr = 0.0, vw = 0.0;
  for (const MetricsReport& rep : reports) {
    vr += (rep.r - s.mean_r) * (rep.r - s.mean_r);
    vw += (rep.w - s.mean_w) * (rep.w - s.mean_w);
  }
  s.sigma_r = std::sqrt(vr / n);
  s.sigma_w = std::sqrt(vw / n);
  return s;
}

inline nlohmann::ordered_json metrics_json(const MetricsReport& rep) {
  nlohmann::ordered_json j;
  j["r"] = rep.r;
  j["w"] = rep.w;
  j["w_literal"] = rep.w_literal;
  j["area_R"] = rep.area_R;
  j["area_D"] = rep.area_D;
  j["area_intersection"] = rep.area_intersection;
  j["area_false"] = rep.area_false;
  return j;
}

inline nlohmann::ordered_json summary_json(const CorpusSummary& s) {
  nlohmann::ordered_json j;
  j["mean_r"] = s.mean_r;
  j["sigma_r"] = s.sigma_r;
  j["mean_w"] = s.mean_w;
  j["sigma_w"] = s.sigma_w;
  j["n"] = s.per_image.size();
  return j;
}

}  // namespace dwtforge
