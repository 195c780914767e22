// Corpus experiment runner: for every host image, synthesize a DWT-laundered
// forgery and a plain spatial forgery from the same spec, run every
// configured detector on both, score against ground truth, and aggregate
// per (forger x detector) cell.
//
// Every randomized choice derives from the config seed and the image's index
// in filename order, so results are identical no matter how many worker
// threads run.
#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dwtforge/detect.hpp"
#include "dwtforge/error.hpp"
#include "dwtforge/forge.hpp"
#include "dwtforge/metrics.hpp"
#include "dwtforge/png_io.hpp"

namespace dwtforge {

namespace detail {

/// Deterministic, platform-independent generator for spec randomization.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

inline int uniform_int(SplitMix64& rng, int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t threshold = (0 - span) % span;
  for (;;) {
    const std::uint64_t r = rng.next();
    if (r >= threshold) return lo + static_cast<int>(r % span);
  }
}

inline bool regions_overlap(const Region& a, const Region& b) {
  return a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h;
}

/// Odd placement keeps paste offsets off every 2^l grid.
inline int uniform_odd(SplitMix64& rng, int max_value) {
  const int max_odd = max_value % 2 == 0 ? max_value - 1 : max_value;
  require(max_odd >= 1, Errc::BadArgument, "no odd offset fits");
  return 1 + 2 * uniform_int(rng, 0, (max_odd - 1) / 2);
}

}  // namespace detail

struct CorpusConfig {
  std::string input_dir;
  std::string output_dir;
  std::uint64_t seed = 0;
  int jobs = 1;
  nlohmann::json global_spec = nlohmann::json::object();
  std::map<std::string, nlohmann::json> per_image;  // keyed by file name
  std::vector<DetectorParams> detectors;
};

inline CorpusConfig corpus_config_from_json(const nlohmann::json& j) {
  CorpusConfig cfg;
  cfg.input_dir = j.at("input_dir").get<std::string>();
  cfg.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
  if (j.contains("spec")) cfg.global_spec = j.at("spec");
  if (j.contains("per_image"))
    for (const auto& [name, spec] : j.at("per_image").items()) cfg.per_image[name] = spec;
  require(j.contains("detectors") && j.at("detectors").is_array() &&
              !j.at("detectors").empty(),
          Errc::BadArgument, "corpus config needs at least one detector");
  for (const auto& d : j.at("detectors")) cfg.detectors.push_back(detector_params_from_json(d));
  return cfg;
}

inline CorpusConfig load_corpus_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::IoFailure, "cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::BadArgument, std::string("config parse error: ") + e.what());
  }
  return corpus_config_from_json(j);
}

namespace detail {

/// Builds the per-image spec: explicit fields from the merged overrides win;
/// missing geometry is drawn from the seeded generator. Patch sides span
/// 10-25% of the min host dimension; the paste site avoids the source
/// region and uses odd (grid-unaligned) offsets.
inline ForgerySpec build_spec(int host_w, int host_h, const nlohmann::json& overrides,
                              SplitMix64& rng) {
  ForgerySpec spec;
  spec.level = 1;
  spec.wavelet = WaveletKind::Db2;
  spec.blend = BlendMode::AlphaMatte;
  spec.feather = 3.0;
  spec.smooth_sigma = 0.0;

  if (overrides.contains("level")) spec.level = overrides.at("level").get<int>();
  if (overrides.contains("wavelet"))
    spec.wavelet = wavelet_from_string(overrides.at("wavelet").get<std::string>());
  if (overrides.contains("blend"))
    spec.blend = blend_from_string(overrides.at("blend").get<std::string>());
  if (overrides.contains("feather")) spec.feather = overrides.at("feather").get<double>();
  if (overrides.contains("smooth_sigma"))
    spec.smooth_sigma = overrides.at("smooth_sigma").get<double>();

  const bool explicit_geom =
      overrides.contains("patch_x") || overrides.contains("patch_w") ||
      overrides.contains("paste_x");
  if (explicit_geom) {
    spec.patch_region = {overrides.at("patch_x").get<int>(), overrides.at("patch_y").get<int>(),
                         overrides.at("patch_w").get<int>(), overrides.at("patch_h").get<int>()};
    spec.paste_x = overrides.at("paste_x").get<int>();
    spec.paste_y = overrides.at("paste_y").get<int>();
    return spec;
  }

  const int min_dim = std::min(host_w, host_h);
  const int lo = std::max(1 << spec.level, min_dim / 10);
  const int hi = std::max(lo, min_dim / 4);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Region patch;
    patch.w = uniform_int(rng, lo, hi);
    patch.h = uniform_int(rng, lo, hi);
    if (patch.w > host_w || patch.h > host_h) continue;
    patch.x = uniform_int(rng, 0, host_w - patch.w);
    patch.y = uniform_int(rng, 0, host_h - patch.h);
    if (host_w - patch.w < 1 || host_h - patch.h < 1) continue;
    const int px = uniform_odd(rng, host_w - patch.w);
    const int py = uniform_odd(rng, host_h - patch.h);
    if (regions_overlap(patch, Region{px, py, patch.w, patch.h})) continue;
    spec.patch_region = patch;
    spec.paste_x = px;
    spec.paste_y = py;
    return spec;
  }
  fail(Errc::BadArgument, "could not place a non-overlapping patch");
}

}  // namespace detail

struct CorpusCell {
  std::string forger;  // "dwt" or "spatial"
  int detector_index = 0;
  CorpusSummary summary;
};

struct CorpusResult {
  std::vector<std::string> images;    // processed, filename order
  std::vector<std::string> failures;  // "name: reason", filename order
  std::vector<CorpusCell> cells;      // forger-major, detector-minor
  nlohmann::ordered_json report;      // full JSON written to summary.json
};

namespace detail {

struct PerImageOutcome {
  std::string name;
  bool ok = false;
  std::string error;
  ForgerySpec spec;
  // metrics[forger][detector]
  std::vector<std::vector<MetricsReport>> metrics;
};

inline constexpr const char* kForgers[2] = {"dwt", "spatial"};

inline PerImageOutcome process_one(const std::filesystem::path& path, size_t index,
                                   const CorpusConfig& cfg,
                                   const std::filesystem::path& out_dir) {
  PerImageOutcome outcome;
  outcome.name = path.filename().string();
  try {
    const Image host = load_png(path.string());

    nlohmann::json overrides = cfg.global_spec;
    if (auto it = cfg.per_image.find(outcome.name); it != cfg.per_image.end())
      for (const auto& [k, v] : it->second.items()) overrides[k] = v;

    SplitMix64 rng{cfg.seed ^ (0x9e3779b97f4a7c15ULL * (index + 1))};
    const ForgerySpec spec = build_spec(host.width(), host.height(), overrides, rng);
    outcome.spec = spec;

    const std::string stem = path.stem().string();
    const ForgeryOutput outputs[2] = {forge_dwt(host, spec), forge_spatial(host, spec)};

    outcome.metrics.assign(2, std::vector<MetricsReport>(cfg.detectors.size()));
    for (int f = 0; f < 2; ++f) {
      const std::string base = (out_dir / (stem + "_" + kForgers[f])).string();
      save_png(outputs[f].forged, base + ".png");
      save_mask_png(outputs[f].truth_mask, base + "_mask.png");
      std::ofstream sidecar(base + ".json");
      sidecar << forgery_spec_json(outputs[f].spec_echo).dump(2) << "\n";

      const Image published = quantized(outputs[f].forged);
      for (size_t d = 0; d < cfg.detectors.size(); ++d) {
        const DetectionResult res = detect_full(published, cfg.detectors[d]);
        outcome.metrics[f][d] = score(outputs[f].truth_mask, res.map);

        const std::string dbase =
            base + "_" + to_string(cfg.detectors[d].feature) + std::to_string(d);
        save_mask_png(to_mask(res.map), dbase + "_detected.png");
        nlohmann::ordered_json dreport = detect_report_json(cfg.detectors[d], res.report);
        dreport["metrics"] = metrics_json(outcome.metrics[f][d]);
        std::ofstream rf(dbase + "_report.json");
        rf << dreport.dump(2) << "\n";
      }
    }
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace detail

inline CorpusResult run_corpus(const CorpusConfig& cfg) {
  namespace fs = std::filesystem;
  require(!cfg.detectors.empty(), Errc::BadArgument, "at least one detector required");
  require(cfg.jobs >= 1, Errc::BadArgument, "jobs must be >= 1");
  require(fs::is_directory(cfg.input_dir), Errc::BadArgument,
          "input_dir is not a directory: " + cfg.input_dir);

  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(cfg.input_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".png")
      inputs.push_back(entry.path());
  require(!inputs.empty(), Errc::BadArgument, "no PNG images in " + cfg.input_dir);
  std::sort(inputs.begin(), inputs.end());

  const fs::path out_dir(cfg.output_dir);
  fs::create_directories(out_dir);

  std::vector<detail::PerImageOutcome> outcomes(inputs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= inputs.size()) return;
      outcomes[i] = detail::process_one(inputs[i], i, cfg, out_dir);
    }
  };
  if (cfg.jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(cfg.jobs, static_cast<int>(inputs.size()));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  CorpusResult result;
  for (const auto& o : outcomes) {
    if (o.ok)
      result.images.push_back(o.name);
    else
      result.failures.push_back(o.name + ": " + o.error);
  }
  require(!result.images.empty(), Errc::BadArgument, "every corpus image failed");

  nlohmann::ordered_json report;
  report["n_images"] = result.images.size();
  report["seed"] = cfg.seed;
  report["failures"] = result.failures;

  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (int f = 0; f < 2; ++f)
    for (size_t d = 0; d < cfg.detectors.size(); ++d) {
      std::vector<MetricsReport> reports;
      for (const auto& o : outcomes)
        if (o.ok) reports.push_back(o.metrics[f][d]);
      CorpusCell cell;
      cell.forger = detail::kForgers[f];
      cell.detector_index = static_cast<int>(d);
      cell.summary = summarize(reports);

      nlohmann::ordered_json cj;
      cj["forger"] = cell.forger;
      cj["detector_index"] = cell.detector_index;
      cj["feature"] = to_string(cfg.detectors[d].feature);
      cj.update(summary_json(cell.summary));
      cells.push_back(std::move(cj));
      result.cells.push_back(std::move(cell));
    }
  report["cells"] = std::move(cells);

  nlohmann::ordered_json per_image = nlohmann::ordered_json::array();
  for (const auto& o : outcomes) {
    if (!o.ok) continue;
    nlohmann::ordered_json ij;
    ij["image"] = o.name;
    ij["spec"] = forgery_spec_json(o.spec);
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    for (int f = 0; f < 2; ++f)
      for (size_t d = 0; d < cfg.detectors.size(); ++d) {
        nlohmann::ordered_json rj;
        rj["forger"] = detail::kForgers[f];
        rj["detector_index"] = d;
        rj["feature"] = to_string(cfg.detectors[d].feature);
        rj.update(metrics_json(o.metrics[f][d]));
        results.push_back(std::move(rj));
      }
    ij["results"] = std::move(results);
    per_image.push_back(std::move(ij));
  }
  report["per_image"] = std::move(per_image);

  std::ofstream sf(out_dir / "summary.json");
  require(sf.good(), Errc::IoFailure, "cannot write corpus summary");
  sf << report.dump(2) << "\n";
  result.report = std::move(report);
  return result;
}

}  // namespace dwtforge
