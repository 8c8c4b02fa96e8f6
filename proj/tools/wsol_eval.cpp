// Copyright 2026 The wsol-eval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// wsol_eval: command-line front end for the evaluation toolkit.
//
// Exit codes: 0 success, 1 I/O failure, 2 validation failure, 3 internal.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "wsol/dataset_io.hpp"
#include "wsol/error.hpp"
#include "wsol/evaluate.hpp"
#include "wsol/report.hpp"
#include "wsol/search.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInternal = 3;

int default_jobs() {
  if (const char* env = std::getenv("WSOL_EVAL_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return 1;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Flags shared by evaluate, curve and search.
struct EvalFlags {
  std::string task = "boxes";
  std::string norm = "minmax";
  std::string taus = "1000";
  std::vector<double> deltas{0.3, 0.5, 0.7};
  std::string resize_order = "normalize-first";
  std::string pooling = "category";
  double px_acc_tau = 0.5;
  double blur_sigma = 0.0;
  int jobs = default_jobs();

  void add_to(CLI::App* app, bool with_jobs = true) {
    app->add_option("--task", task, "Ground-truth type")
        ->check(CLI::IsMember({"boxes", "masks"}))
        ->capture_default_str();
    app->add_option("--norm", norm, "Per-image score normalization")
        ->check(CLI::IsMember({"minmax", "max", "none"}))
        ->capture_default_str();
    app->add_option("--taus", taus, "Threshold grid size N, or 'exact'")
        ->capture_default_str();
    app->add_option("--deltas", deltas, "IoU thresholds for MaxBoxAccV2")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--resize-order", resize_order, "Order of normalization and resizing")
        ->check(CLI::IsMember({"normalize-first", "resize-first"}))
        ->capture_default_str();
    app->add_option("--pooling", pooling, "PxAP pooling: per category or per image")
        ->check(CLI::IsMember({"category", "image"}))
        ->capture_default_str();
    app->add_option("--px-acc-tau", px_acc_tau, "Threshold for PxAcc")->capture_default_str();
    app->add_option("--blur-sigma", blur_sigma, "Gaussian blur of incoming maps (0 = off)")
        ->capture_default_str();
    if (with_jobs) {
      app->add_option("--jobs", jobs, "Worker threads (default: $WSOL_EVAL_JOBS or 1)")
          ->capture_default_str();
    }
  }

  wsol::EvalConfig config() const {
    wsol::EvalConfig c;
    c.task = task == "boxes" ? wsol::Task::kBoxes : wsol::Task::kMasks;
    c.normalization = norm == "minmax" ? wsol::Normalization::kMinMax
                      : norm == "max"  ? wsol::Normalization::kMax
                                       : wsol::Normalization::kNone;
    if (taus == "exact") {
      c.thresholds = wsol::ThresholdSpec::exact();
    } else {
      int n = 0;
      try {
        std::size_t used = 0;
        n = std::stoi(taus, &used);
        if (used != taus.size()) n = 0;
      } catch (...) {
        n = 0;
      }
      if (n < 1) {
        throw wsol::Error(wsol::ErrorCode::kInvalidArgument,
                          "--taus must be a positive integer or 'exact'");
      }
      c.thresholds = wsol::ThresholdSpec::uniform(n);
    }
    c.deltas = deltas;
    c.resize_order = resize_order == "normalize-first" ? wsol::ResizeOrder::kNormalizeFirst
                                                       : wsol::ResizeOrder::kResizeFirst;
    c.pooling = pooling == "category" ? wsol::Pooling::kCategory : wsol::Pooling::kImage;
    c.px_acc_tau = px_acc_tau;
    if (blur_sigma < 0.0) {
      throw wsol::Error(wsol::ErrorCode::kInvalidSigma, "--blur-sigma must be >= 0");
    }
    c.blur_sigma = blur_sigma;
    c.jobs = std::max(jobs, 1);
    return c;
  }
};

std::unique_ptr<wsol::GroundTruth> load_ground_truth(wsol::Task task,
                                                     const fs::path& gt,
                                                     const fs::path& manifest_path,
                                                     wsol::io::Split split) {
  wsol::io::SplitManifest manifest = wsol::io::read_manifest(manifest_path, split);
  if (task == wsol::Task::kBoxes) {
    auto boxes = wsol::io::read_boxes(gt, manifest);
    return std::make_unique<wsol::BoxGroundTruth>(std::move(manifest), std::move(boxes));
  }
  if (!fs::is_directory(gt)) {
    throw wsol::Error(wsol::ErrorCode::kIoFailure,
                      "mask directory " + gt.string() + " does not exist");
  }
  return std::make_unique<wsol::MaskDirectoryGroundTruth>(std::move(manifest), gt);
}

struct InputFlags {
  std::string scoremaps;
  std::string gt;
  std::string manifest;
  std::string split = "test-fullsup";

  void add_to(CLI::App* app) {
    app->add_option("--scoremaps", scoremaps, "Scorepack file")->required();
    app->add_option("--gt", gt, "Box file (boxes) or mask directory (masks)")->required();
    app->add_option("--manifest", manifest, "Split manifest")->required();
    app->add_option("--split", split, "Split the manifest describes")
        ->check(CLI::IsMember({"train-weaksup", "train-fullsup", "test-fullsup"}))
        ->capture_default_str();
  }
};

wsol::Evaluation run_evaluation(const InputFlags& in, const EvalFlags& flags) {
  const wsol::EvalConfig config = flags.config();
  auto gt = load_ground_truth(config.task, in.gt, in.manifest,
                              wsol::io::parse_split(in.split));
  wsol::io::ScorepackReader reader(in.scoremaps);
  wsol::Evaluation eval = wsol::evaluate(reader, *gt, config);
  eval.report.config.scoremaps = in.scoremaps;
  eval.report.config.ground_truth = in.gt;
  eval.report.config.manifest = in.manifest;
  return eval;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw wsol::Error(wsol::ErrorCode::kIoFailure, "cannot create " + path);
  out << text;
  if (!out) throw wsol::Error(wsol::ErrorCode::kIoFailure, "write failed on " + path);
}

std::string box_curve_csv(const wsol::BoxAccCurve& curve) {
  std::string out = "tau";
  for (double d : curve.deltas) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), ",boxacc@%g", d);
    out += buf;
  }
  out += '\n';
  for (std::size_t k = 0; k < curve.taus.size(); ++k) {
    out += fmt_number(curve.taus[k]);
    for (const auto& row : curve.accuracy) out += "," + fmt_number(row[k]);
    out += '\n';
  }
  return out;
}

std::string pr_curve_csv(const wsol::PrCurve& curve) {
  std::string out = "tau,precision,recall\n";
  for (std::size_t k = 0; k < curve.taus.size(); ++k) {
    out += fmt_number(curve.taus[k]) + "," + fmt_number(curve.precision[k]) + "," +
           fmt_number(curve.recall[k]) + "\n";
  }
  return out;
}

std::vector<fs::path> json_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw wsol::Error(wsol::ErrorCode::kIoFailure, dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold-independent evaluation of weakly-supervised object localization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", wsol::kToolkitVersion);

  // evaluate
  InputFlags eval_in;
  EvalFlags eval_flags;
  std::string eval_out;
  bool stamp = false;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score a scorepack against ground truth");
  eval_in.add_to(evaluate);
  eval_flags.add_to(evaluate);
  evaluate->add_option("--out", eval_out, "Report path (default: stdout)");
  evaluate->add_flag("--stamp", stamp, "Record a generation timestamp in the report");

  // curve
  InputFlags curve_in;
  EvalFlags curve_flags;
  std::string curve_out;
  int curve_category = -1;
  bool curve_legacy = false;
  CLI::App* curve = app.add_subcommand("curve", "Write the per-threshold curve as CSV");
  curve_in.add_to(curve);
  curve_flags.add_to(curve);
  curve->add_option("--out", curve_out, "CSV path (default: stdout)");
  curve->add_option("--category", curve_category, "Masks: restrict the PR curve to one category");
  curve->add_flag("--legacy", curve_legacy, "Boxes: largest-component curve at the legacy delta");

  // baseline
  std::string baseline_manifest;
  std::string baseline_out;
  double baseline_sigma = 1.0;
  CLI::App* baseline = app.add_subcommand("baseline", "Write center-Gaussian score maps");
  baseline->add_option("--manifest", baseline_manifest, "Split manifest")->required();
  baseline->add_option("--sigma", baseline_sigma, "Std. dev. in half-short-side units")
      ->capture_default_str();
  baseline->add_option("--out", baseline_out, "Scorepack path")->required();

  // search
  EvalFlags search_flags;
  std::string space_path, trainer, work_dir, search_out;
  std::string val_manifest, val_gt, test_manifest, test_gt;
  int n_trials = 30;
  std::uint64_t search_seed = 0;
  int search_jobs = default_jobs();
  CLI::App* search = app.add_subcommand("search", "Random hyperparameter search around a trainer");
  search->add_option("--space", space_path, "Search space JSON")->required();
  search->add_option("--trainer", trainer,
                     "Trainer command template with {trial_dir} and {hparams_file}")
      ->required();
  search->add_option("--work-dir", work_dir, "Directory for trial outputs")->required();
  search->add_option("--trials", n_trials, "Number of trials")->capture_default_str();
  search->add_option("--seed", search_seed, "Search seed")->capture_default_str();
  search->add_option("--val-manifest", val_manifest, "train-fullsup manifest")->required();
  search->add_option("--val-gt", val_gt, "train-fullsup ground truth")->required();
  search->add_option("--test-manifest", test_manifest, "test-fullsup manifest")->required();
  search->add_option("--test-gt", test_gt, "test-fullsup ground truth")->required();
  search->add_option("--jobs", search_jobs, "Parallel trials (default: $WSOL_EVAL_JOBS or 1)")
      ->capture_default_str();
  search->add_option("--out", search_out, "Search report path (default: stdout)");
  search_flags.add_to(search, /*with_jobs=*/false);

  // rank-compare
  std::string rank_a, rank_b, rank_out;
  CLI::App* rank = app.add_subcommand("rank-compare",
                                      "Kendall's tau between two collections of reports");
  rank->add_option("--a", rank_a, "Directory of reports")->required();
  rank->add_option("--b", rank_b, "Directory of reports, matched by file name")->required();
  rank->add_option("--out", rank_out, "Output path (default: stdout)");

  // validate
  std::string v_weak, v_full, v_test, v_gt_type, v_full_gt, v_test_gt, v_out;
  CLI::App* validate = app.add_subcommand("validate", "Check the three-split protocol");
  validate->add_option("--train-weaksup", v_weak, "train-weaksup manifest")->required();
  validate->add_option("--train-fullsup", v_full, "train-fullsup manifest")->required();
  validate->add_option("--test-fullsup", v_test, "test-fullsup manifest")->required();
  validate->add_option("--gt-type", v_gt_type, "Annotation type for coverage checks")
      ->check(CLI::IsMember({"boxes", "masks"}));
  validate->add_option("--train-fullsup-gt", v_full_gt, "train-fullsup annotations");
  validate->add_option("--test-fullsup-gt", v_test_gt, "test-fullsup annotations");
  validate->add_option("--out", v_out, "Output path (default: stdout)");

  // proxy
  std::string p_manifest, p_split = "train-weaksup", p_out;
  double p_fraction = 0.10;
  std::uint64_t p_seed = 0;
  CLI::App* proxy = app.add_subcommand("proxy", "Stratified per-category manifest subsample");
  proxy->add_option("--manifest", p_manifest, "Input manifest")->required();
  proxy->add_option("--split", p_split, "Split the manifest describes")
      ->check(CLI::IsMember({"train-weaksup", "train-fullsup", "test-fullsup"}))
      ->capture_default_str();
  proxy->add_option("--fraction", p_fraction, "Fraction kept per category")->capture_default_str();
  proxy->add_option("--seed", p_seed, "Sampling seed")->capture_default_str();
  proxy->add_option("--out", p_out, "Output manifest")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*evaluate) {
      wsol::Evaluation eval = run_evaluation(eval_in, eval_flags);
      if (stamp) eval.report.generated_at = utc_timestamp();
      write_text(wsol::dump_report(wsol::to_json(eval.report)), eval_out);
    } else if (*curve) {
      const wsol::Evaluation eval = run_evaluation(curve_in, curve_flags);
      if (eval.box_curve) {
        write_text(box_curve_csv(curve_legacy ? *eval.legacy_curve : *eval.box_curve),
                   curve_out);
      } else if (curve_category >= 0) {
        auto it = eval.category_pr.find(curve_category);
        if (it == eval.category_pr.end()) {
          throw wsol::Error(wsol::ErrorCode::kInvalidArgument,
                            "category " + std::to_string(curve_category) +
                                " is not in the manifest");
        }
        write_text(pr_curve_csv(it->second), curve_out);
      } else {
        write_text(pr_curve_csv(*eval.pooled_pr), curve_out);
      }
    } else if (*baseline) {
      const auto manifest =
          wsol::io::read_manifest(baseline_manifest, wsol::io::Split::kTestFullsup);
      wsol::io::ScorepackWriter writer(baseline_out);
      for (const auto& e : manifest.entries()) {
        wsol::ScoreMap map = wsol::center_gaussian(e.height, e.width, baseline_sigma);
        map.set_image_id(e.image_id);
        writer.write(map);
      }
      writer.close();
    } else if (*search) {
      wsol::search::SearchConfig config;
      config.space = wsol::search::HyperparameterSpace::from_json(wsol::read_json_file(space_path));
      config.n_trials = n_trials;
      config.trainer_template = trainer;
      config.work_dir = work_dir;
      config.seed = search_seed;
      config.jobs = std::max(search_jobs, 1);
      config.eval = search_flags.config();
      auto val = load_ground_truth(config.eval.task, val_gt, val_manifest,
                                   wsol::io::Split::kTrainFullsup);
      auto test = load_ground_truth(config.eval.task, test_gt, test_manifest,
                                    wsol::io::Split::kTestFullsup);
      const auto report = wsol::search::run_search(config, *val, *test);
      write_text(wsol::dump_report(wsol::search::to_json(report)), search_out);
      if (report.status != "ok") {
        std::cerr << "error: " << report.status << " (non-convergence ratio "
                  << report.non_convergence_ratio << ")\n";
        return kExitValidation;
      }
    } else if (*rank) {
      json pairs = json::array();
      std::vector<double> a_scores;
      std::vector<double> b_scores;
      for (const fs::path& fa : json_files(rank_a)) {
        const fs::path fb = fs::path(rank_b) / fa.filename();
        if (!fs::exists(fb)) continue;
        const auto ra = wsol::metric_report_from_json(wsol::read_json_file(fa));
        const auto rb = wsol::metric_report_from_json(wsol::read_json_file(fb));
        a_scores.push_back(wsol::headline_score(ra));
        b_scores.push_back(wsol::headline_score(rb));
        pairs.push_back({{"name", fa.filename().string()},
                         {"a", a_scores.back()},
                         {"b", b_scores.back()}});
      }
      const double tau = wsol::search::kendall_tau(a_scores, b_scores);
      json out = {{"n", a_scores.size()}, {"kendall_tau", tau}, {"pairs", pairs}};
      write_text(wsol::dump_report(out), rank_out);
    } else if (*validate) {
      using wsol::io::Split;
      const auto weak = wsol::io::read_manifest(v_weak, Split::kTrainWeaksup);
      const auto full = wsol::io::read_manifest(v_full, Split::kTrainFullsup);
      const auto test = wsol::io::read_manifest(v_test, Split::kTestFullsup);
      wsol::io::AnnotationProbe probe;
      std::set<std::pair<Split, std::string>> annotated;
      if (!v_gt_type.empty()) {
        if (v_full_gt.empty() || v_test_gt.empty()) {
          throw wsol::Error(wsol::ErrorCode::kInvalidArgument,
                            "--gt-type needs --train-fullsup-gt and --test-fullsup-gt");
        }
        if (v_gt_type == "boxes") {
          for (auto [split, manifest, path] :
               {std::tuple{Split::kTrainFullsup, &full, v_full_gt},
                std::tuple{Split::kTestFullsup, &test, v_test_gt}}) {
            for (const auto& [id, boxes] : wsol::io::read_boxes(path, *manifest)) {
              annotated.emplace(split, id);
            }
          }
          probe = [&](Split s, const std::string& id) { return annotated.contains({s, id}); };
        } else {
          probe = [&](Split s, const std::string& id) {
            return wsol::io::find_mask_file(s == Split::kTrainFullsup ? v_full_gt : v_test_gt, id)
                .has_value();
          };
        }
      }
      const auto report = wsol::io::validate_splits(weak, full, test, probe);
      json out = {{"ok", report.ok()},
                  {"violations", report.violations},
                  {"warnings", report.warnings}};
      json counts = json::object();
      for (const auto& [split, per_cat] : report.category_counts) {
        json c = json::object();
        for (const auto& [cat, n] : per_cat) c[std::to_string(cat)] = n;
        counts[split] = c;
      }
      out["category_counts"] = counts;
      write_text(wsol::dump_report(out), v_out);
      if (!report.ok()) {
        for (const auto& v : report.violations) std::cerr << "violation: " << v << "\n";
        return kExitValidation;
      }
    } else if (*proxy) {
      const auto manifest = wsol::io::read_manifest(p_manifest, wsol::io::parse_split(p_split));
      wsol::io::write_manifest(wsol::search::proxy_manifest(manifest, p_fraction, p_seed), p_out);
    }
  } catch (const wsol::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.category() == wsol::ErrorCategory::kIo ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
