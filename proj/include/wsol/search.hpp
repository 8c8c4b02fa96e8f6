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
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wsol/dataset_io.hpp"
#include "wsol/evaluate.hpp"

namespace wsol::search {

using Value = std::variant<double, std::string>;

// One named hyperparameter and its sampling distribution.
struct Dimension {
  enum class Kind {
    kLogUniform,          // exp(U[log low, log high])
    kUniform,             // U[low, high]
    kUniformConditional,  // U[parent value, high]
    kCategorical,         // uniform over `choices`
    kReciprocalShift,     // 1 / U(0, high] - 1 / high
  };

  std::string name;
  Kind kind = Kind::kUniform;
  double low = 0.0;
  double high = 1.0;
  std::string parent;
  std::vector<Value> choices;

  // Maps a unit draw u in [0, 1) onto the distribution by inverse CDF.
  // `parent_value` is used only by conditional dimensions.
  Value transform(double u, double parent_value = 0.0) const;
};

std::string_view to_string(Dimension::Kind kind);

class HyperparameterSpace {
 public:
  HyperparameterSpace() = default;
  // Throws Error(kInvalidSpace) on bad bounds, unknown or non-numeric parents,
  // duplicate names; Error(kCyclicDependency) on conditional cycles.
  explicit HyperparameterSpace(std::vector<Dimension> dimensions);

  // {"dimensions": [{"name": ..., "kind": "log_uniform", "low": .., "high": ..},
  //                 {"name": ..., "kind": "categorical", "values": [..]}, ...]}
  static HyperparameterSpace from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const std::vector<Dimension>& dimensions() const { return dimensions_; }
  // Dimension indices with every parent ahead of its children.
  const std::vector<std::size_t>& sampling_order() const { return order_; }

 private:
  std::vector<Dimension> dimensions_;
  std::vector<std::size_t> order_;
};

// Sampled values in declaration order.
using Sample = std::vector<std::pair<std::string, Value>>;

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Deterministic per-trial seed derived from (seed, trial_id).
std::uint64_t trial_seed(std::uint64_t seed, int trial_id);

Sample sample(const HyperparameterSpace& space, std::uint64_t rng_seed);

// `name=value` per line; numbers carry 17 significant digits.
std::string format_hparams(const Sample& values);
std::string format_value(const Value& value);

// Tie-corrected Kendall rank correlation (tau-b) in O(n log n).
// Throws Error(kLengthMismatch) for unequal or too-short inputs and
// Error(kDegenerateAllTies) if either input is constant.
double kendall_tau(std::span<const double> a, std::span<const double> b);

// Stratified per-category subsample: ceil(fraction * n_c) images of each
// category, chosen without replacement, kept in manifest order.
io::SplitManifest proxy_manifest(const io::SplitManifest& manifest,
                                 double fraction, std::uint64_t seed);

enum class TrialOutcome { kConverged, kNonConvergent, kFailed };
std::string_view to_string(TrialOutcome outcome);

struct Trial {
  int trial_id = 0;
  std::uint64_t seed = 0;
  Sample values;
  TrialOutcome outcome = TrialOutcome::kFailed;
  int exit_code = 0;
  std::string note;
  std::optional<double> validation_score;
  std::optional<double> test_score;
};

// File names inside each trial directory.
inline constexpr const char* kHparamsFile = "hparams.txt";
inline constexpr const char* kNonConvergentSentinel = "NONCONVERGENT";
inline constexpr const char* kTrainerLog = "trainer.log";
std::string scorepack_name(io::Split split);

struct SearchConfig {
  HyperparameterSpace space;
  int n_trials = 30;
  // Shell command; {trial_dir} and {hparams_file} are substituted.
  std::string trainer_template;
  std::filesystem::path work_dir;
  std::uint64_t seed = 0;
  // Trials run as parallel processes up to this limit.
  int jobs = 1;
  EvalConfig eval;
};

struct SearchReport {
  std::string status;  // "ok" or "AllTrialsNonConvergent"
  std::vector<Trial> trials;
  std::optional<int> selected_trial;
  std::optional<double> test_score;
  std::optional<MetricReport> test_report;
  double non_convergence_ratio = 0.0;
  double failure_ratio = 0.0;
  std::string selection_metric;
  SearchConfig config;
};

// Random search: sample, train via the external command, score each converged
// trial on `validation`, pick the best (lowest id on ties), then score only the
// selected trial on `test`.
SearchReport run_search(const SearchConfig& config, const GroundTruth& validation,
                        const GroundTruth& test);

nlohmann::json to_json(const SearchReport& report);

// Replaces every {key} in `tmpl`.
std::string substitute(std::string tmpl,
                       const std::map<std::string, std::string>& values);

// Runs `/bin/sh -c command` with stdout and stderr appended to `log`. Returns
// the exit status (128 + signal for signalled children). Throws
// Error(kTrainerSpawnFailure) if the process cannot be started.
int run_shell(const std::string& command, const std::filesystem::path& log);

}  // namespace wsol::search
