// dwtforge command-line front end.
//
// Subcommands: forge, detect, evaluate, corpus, selfcheck.
// Exit codes: 0 success, 1 check/threshold failure, 2 usage or precondition
// error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dwtforge/dwtforge.hpp"

namespace {

using namespace dwtforge;

struct ForgeArgs {
  std::string host;
  std::vector<int> patch;     // x,y,w,h
  std::vector<int> paste_at;  // x,y
  int level = 1;
  std::string wavelet = "haar";
  std::string blend = "cutout";
  double feather = 0.0;
  double smooth_sigma = 0.0;
  bool spatial = false;
  std::string out;
  std::string mask_out;
  std::string sidecar;
};

int cmd_forge(const ForgeArgs& a) {
  ForgerySpec spec;
  spec.patch_region = {a.patch[0], a.patch[1], a.patch[2], a.patch[3]};
  spec.paste_x = a.paste_at[0];
  spec.paste_y = a.paste_at[1];
  spec.level = a.level;
  spec.wavelet = wavelet_from_string(a.wavelet);
  spec.blend = blend_from_string(a.blend);
  spec.feather = a.feather;
  spec.smooth_sigma = a.smooth_sigma;
  if (spec.blend == BlendMode::AlphaMatte && spec.feather == 0.0) spec.feather = 3.0;

  const Image host = load_png(a.host);
  const ForgeryOutput out = a.spatial ? forge_spatial(host, spec) : forge_dwt(host, spec);

  save_png(out.forged, a.out);
  save_mask_png(out.truth_mask, a.mask_out);
  const std::string sidecar_path =
      a.sidecar.empty()
          ? std::filesystem::path(a.out).replace_extension(".json").string()
          : a.sidecar;
  std::ofstream sf(sidecar_path);
  require(sf.good(), Errc::IoFailure, "cannot write sidecar: " + sidecar_path);
  sf << forgery_spec_json(out.spec_echo).dump(2) << "\n";
  return 0;
}

struct DetectArgs {
  std::string input;
  std::string feature = "tchebichef";
  int block = 8;
  int stride = 1;
  int sort_window = 10;
  double tol = -1.0;  // -1 = per-feature default
  double min_shift = 16.0;
  int votes = 50;
  double variance_floor = 2.0;
  int open_radius = 1;
  int min_area = 64;
  std::string out;
  std::string report;
};

int cmd_detect(const DetectArgs& a) {
  DetectorParams p = DetectorParams::defaults(feature_from_string(a.feature));
  p.block_size = a.block;
  p.stride = a.stride;
  p.sort_window = a.sort_window;
  if (a.tol >= 0.0) p.feature_tol = a.tol;
  p.min_shift_distance = a.min_shift;
  p.shift_vote_threshold = a.votes;
  p.low_variance_floor = a.variance_floor;
  p.morph_open_radius = a.open_radius;
  p.min_component_area = a.min_area;
  validate(p);

  const Image img = load_png(a.input);
  const DetectionResult res = detect_full(img, p);
  save_mask_png(to_mask(res.map), a.out);
  if (!a.report.empty()) {
    std::ofstream rf(a.report);
    require(rf.good(), Errc::IoFailure, "cannot write report: " + a.report);
    rf << detect_report_json(p, res.report).dump(2) << "\n";
  }
  return 0;
}

int cmd_evaluate(const std::string& truth_path, const std::string& detected_path,
                 const std::string& report_path) {
  const Mask truth = load_mask_png(truth_path);
  const DetectionMap detected = detection_from_mask(load_mask_png(detected_path));
  const MetricsReport rep = score(truth, detected);
  if (!report_path.empty()) {
    std::ofstream rf(report_path);
    require(rf.good(), Errc::IoFailure, "cannot write report: " + report_path);
    rf << metrics_json(rep).dump(2) << "\n";
  }
  std::printf("r=%.2f%% w=%.2f%%\n", rep.r * 100.0, rep.w * 100.0);
  return 0;
}

int cmd_corpus(const std::string& config_path, int jobs_override) {
  CorpusConfig cfg = load_corpus_config(config_path);
  if (jobs_override > 0) cfg.jobs = jobs_override;
  const CorpusResult result = run_corpus(cfg);

  std::printf("%-8s %-12s %9s %9s %9s %9s %4s\n", "forger", "feature", "mean_r%",
              "sigma_r%", "mean_w%", "sigma_w%", "n");
  for (const CorpusCell& cell : result.cells) {
    const CorpusSummary& s = cell.summary;
    std::printf("%-8s %-12s %9.2f %9.2f %9.2f %9.2f %4zu\n", cell.forger.c_str(),
                to_string(cfg.detectors[cell.detector_index].feature), s.mean_r * 100.0,
                s.sigma_r * 100.0, s.mean_w * 100.0, s.sigma_w * 100.0,
                s.per_image.size());
  }
  for (const std::string& failure : result.failures)
    std::fprintf(stderr, "skipped %s\n", failure.c_str());
  return 0;
}

int cmd_selfcheck(const std::string& input, int level) {
  const Image img = load_png(input);
  require(level >= 1, Errc::BadArgument, "level must be >= 1");
  const int min_dim = 1 << level;
  require(img.width() >= min_dim && img.height() >= min_dim, Errc::BadArgument,
          "level too deep for image size");

  bool ok = true;
  auto check = [&ok](const char* name, double err, double tol) {
    const bool pass = err < tol;
    std::printf("%-28s max error %.3e  tol %.0e  %s\n", name, err, tol,
                pass ? "ok" : "FAIL");
    ok = ok && pass;
  };

  if (img.colorspace() == ColorSpace::Rgb) {
    const Image round = ycbcr_to_rgb(rgb_to_ycbcr(img));
    double err = 0.0;
    for (int c = 0; c < 3; ++c)
      for (size_t i = 0; i < round.channel(c).samples().size(); ++i)
        err = std::max(err, std::abs(round.channel(c).samples()[i] -
                                     img.channel(c).samples()[i]));
    check("color round trip", err, 1e-10);
  }

  const Plane gray = luma(img);
  for (WaveletKind kind : {WaveletKind::Haar, WaveletKind::Db2}) {
    for (int l = 1; l <= level; ++l) {
      const SubbandPyramid pyr = dwt2(gray, kind, l);
      const Plane recon = idwt2(pyr, kind);
      double err = 0.0;
      for (size_t i = 0; i < gray.samples().size(); ++i)
        err = std::max(err, std::abs(recon.samples()[i] - gray.samples()[i]));
      const std::string name =
          std::string("dwt recon ") + to_string(kind) + " level " + std::to_string(l);
      check(name.c_str(), err, 1e-9);

      const double in_energy = energy(gray);
      const double rel =
          in_energy > 0.0 ? std::abs(energy(pyr) - in_energy) / in_energy : 0.0;
      const std::string ename =
          std::string("energy ") + to_string(kind) + " level " + std::to_string(l);
      check(ename.c_str(), rel, 1e-6);
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copy-move forgery synthesis in the DWT domain, block-matching "
               "detectors, and evaluation metrics"};
  app.require_subcommand(1);

  ForgeArgs fa;
  CLI::App* forge = app.add_subcommand("forge", "synthesize a copy-move forgery");
  forge->add_option("--host", fa.host, "host PNG")->required();
  forge->add_option("--patch", fa.patch, "source rect x,y,w,h")
      ->required()
      ->delimiter(',')
      ->expected(4);
  forge->add_option("--paste-at", fa.paste_at, "destination x,y")
      ->required()
      ->delimiter(',')
      ->expected(2);
  forge->add_option("--level", fa.level, "DWT level (1-3)")->check(CLI::Range(1, 3));
  forge->add_option("--wavelet", fa.wavelet)->check(CLI::IsMember({"haar", "db2"}));
  forge->add_option("--blend", fa.blend)->check(CLI::IsMember({"cutout", "alpha"}));
  forge->add_option("--feather", fa.feather, "alpha ramp width, px");
  forge->add_option("--smooth", fa.smooth_sigma, "preprocess blur sigma");
  forge->add_flag("--spatial", fa.spatial, "pixel-domain baseline forger");
  forge->add_option("--out", fa.out, "forged PNG")->required();
  forge->add_option("--mask-out", fa.mask_out, "ground-truth mask PNG")->required();
  forge->add_option("--sidecar", fa.sidecar, "spec sidecar path (default: out with .json)");

  DetectArgs da;
  CLI::App* det = app.add_subcommand("detect", "run a copy-move detector");
  det->add_option("--input", da.input, "suspect PNG")->required();
  det->add_option("--feature", da.feature)
      ->check(CLI::IsMember({"tchebichef", "dctsign"}));
  det->add_option("--block", da.block, "block size");
  det->add_option("--stride", da.stride, "block stride");
  det->add_option("--sort-window", da.sort_window, "sorted neighbors compared");
  det->add_option("--tol", da.tol,
                  "feature tolerance (tchebichef: max rel distance; dctsign: min corr)");
  det->add_option("--min-shift", da.min_shift, "min spatial distance of a pair, px");
  det->add_option("--votes", da.votes, "shift-vector vote threshold");
  det->add_option("--variance-floor", da.variance_floor, "skip blocks below this stddev");
  det->add_option("--open-radius", da.open_radius, "morphological opening radius");
  det->add_option("--min-area", da.min_area, "min connected component area, px^2");
  det->add_option("--out", da.out, "detection mask PNG")->required();
  det->add_option("--report", da.report, "JSON report path");

  std::string ev_truth, ev_detected, ev_report;
  CLI::App* ev = app.add_subcommand("evaluate", "score a detection against ground truth");
  ev->add_option("--truth", ev_truth, "ground-truth mask PNG")->required();
  ev->add_option("--detected", ev_detected, "detection mask PNG")->required();
  ev->add_option("--report", ev_report, "JSON report path");

  std::string corpus_config;
  int corpus_jobs = 0;
  CLI::App* co = app.add_subcommand("corpus", "run the full forge/detect/score experiment");
  co->add_option("--config", corpus_config, "corpus config JSON")->required();
  co->add_option("--jobs", corpus_jobs, "worker threads (overrides config)");

  std::string sc_input;
  int sc_level = 1;
  CLI::App* sc = app.add_subcommand("selfcheck", "wavelet and color invariant checks");
  sc->add_option("--input", sc_input, "PNG to check")->required();
  sc->add_option("--level", sc_level, "max DWT level")->check(CLI::Range(1, 3));

  try {
    app.parse(argc, argv);
    if (forge->parsed()) return cmd_forge(fa);
    if (det->parsed()) return cmd_detect(da);
    if (ev->parsed()) return cmd_evaluate(ev_truth, ev_detected, ev_report);
    if (co->parsed()) return cmd_corpus(corpus_config, corpus_jobs);
    if (sc->parsed()) return cmd_selfcheck(sc_input, sc_level);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const dwtforge::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
