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
#include "wsol/search.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>

#include "wsol/error.hpp"
#include "wsol/parallel.hpp"

extern char** environ;

namespace wsol::search {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Error invalid_space(const std::string& what) {
  return Error(ErrorCode::kInvalidSpace, what);
}

bool is_numeric(Dimension::Kind kind) {
  return kind != Dimension::Kind::kCategorical;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Dimension::Kind parse_kind(const std::string& s) {
  using K = Dimension::Kind;
  for (K k : {K::kLogUniform, K::kUniform, K::kUniformConditional,
              K::kCategorical, K::kReciprocalShift}) {
    if (to_string(k) == s) return k;
  }
  throw invalid_space("unknown distribution kind '" + s + "'");
}

json value_to_json(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

}  // namespace

std::string_view to_string(Dimension::Kind kind) {
  switch (kind) {
    case Dimension::Kind::kLogUniform: return "log_uniform";
    case Dimension::Kind::kUniform: return "uniform";
    case Dimension::Kind::kUniformConditional: return "uniform_conditional";
    case Dimension::Kind::kCategorical: return "categorical";
    case Dimension::Kind::kReciprocalShift: return "reciprocal_shift";
  }
  return "unknown";
}

Value Dimension::transform(double u, double parent_value) const {
  switch (kind) {
    case Kind::kLogUniform: {
      const double lo = std::log(low);
      const double v = std::exp(lo + u * (std::log(high) - lo));
      return std::clamp(v, low, high);
    }
    case Kind::kUniform:
      return low + u * (high - low);
    case Kind::kUniformConditional:
      if (parent_value > high) {
        throw invalid_space("dimension '" + name + "': parent value " +
                            format_value(parent_value) + " exceeds upper bound");
      }
      return parent_value + u * (high - parent_value);
    case Kind::kCategorical: {
      const auto n = choices.size();
      const auto i = std::min(static_cast<std::size_t>(u * static_cast<double>(n)), n - 1);
      return choices[i];
    }
    case Kind::kReciprocalShift: {
      // Draw from (0, high] so the reciprocal stays finite.
      const double x = high * (1.0 - u);
      return 1.0 / x - 1.0 / high;
    }
  }
  return 0.0;
}

HyperparameterSpace::HyperparameterSpace(std::vector<Dimension> dimensions)
    : dimensions_(std::move(dimensions)) {
  std::map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < dimensions_.size(); ++i) {
    const Dimension& d = dimensions_[i];
    if (d.name.empty() || d.name.find_first_of("=\n") != std::string::npos) {
      throw invalid_space("dimension names must be non-empty without '=' or newlines");
    }
    if (!by_name.emplace(d.name, i).second) {
      throw invalid_space("duplicate dimension '" + d.name + "'");
    }
    switch (d.kind) {
      case Dimension::Kind::kLogUniform:
        if (!(d.low > 0.0 && d.low < d.high)) {
          throw invalid_space("'" + d.name + "' needs 0 < low < high");
        }
        break;
      case Dimension::Kind::kUniform:
        if (!(d.low < d.high)) {
          throw invalid_space("'" + d.name + "' needs low < high");
        }
        break;
      case Dimension::Kind::kUniformConditional:
        if (d.parent.empty()) {
          throw invalid_space("'" + d.name + "' needs a parent dimension");
        }
        break;
      case Dimension::Kind::kCategorical:
        if (d.choices.empty()) {
          throw invalid_space("'" + d.name + "' has no categories");
        }
        break;
      case Dimension::Kind::kReciprocalShift:
        if (!(d.high > 0.0)) {
          throw invalid_space("'" + d.name + "' needs high > 0");
        }
        break;
    }
    if (!std::isfinite(d.low) || !std::isfinite(d.high)) {
      throw invalid_space("'" + d.name + "' has non-finite bounds");
    }
  }
  for (const Dimension& d : dimensions_) {
    if (d.kind != Dimension::Kind::kUniformConditional) continue;
    auto it = by_name.find(d.parent);
    if (it == by_name.end()) {
      throw invalid_space("'" + d.name + "' references unknown parent '" +
                          d.parent + "'");
    }
    if (!is_numeric(dimensions_[it->second].kind)) {
      throw invalid_space("'" + d.name + "' has a categorical parent");
    }
  }

  // Depth-first topological order; declaration order among independents.
  enum class Mark { kNone, kActive, kDone };
  std::vector<Mark> marks(dimensions_.size(), Mark::kNone);
  auto visit = [&](auto&& self, std::size_t i) -> void {
    if (marks[i] == Mark::kDone) return;
    if (marks[i] == Mark::kActive) {
      throw Error(ErrorCode::kCyclicDependency,
                  "conditional dimensions form a cycle through '" +
                      dimensions_[i].name + "'");
    }
    marks[i] = Mark::kActive;
    if (dimensions_[i].kind == Dimension::Kind::kUniformConditional) {
      self(self, by_name.at(dimensions_[i].parent));
    }
    marks[i] = Mark::kDone;
    order_.push_back(i);
  };
  for (std::size_t i = 0; i < dimensions_.size(); ++i) visit(visit, i);
}

HyperparameterSpace HyperparameterSpace::from_json(const json& j) {
  std::vector<Dimension> dims;
  try {
    for (const json& item : j.at("dimensions")) {
      Dimension d;
      d.name = item.at("name").get<std::string>();
      d.kind = parse_kind(item.at("kind").get<std::string>());
      switch (d.kind) {
        case Dimension::Kind::kLogUniform:
        case Dimension::Kind::kUniform:
          d.low = item.at("low").get<double>();
          d.high = item.at("high").get<double>();
          break;
        case Dimension::Kind::kUniformConditional:
          d.parent = item.at("parent").get<std::string>();
          d.high = item.value("high", 1.0);
          break;
        case Dimension::Kind::kCategorical:
          for (const json& v : item.at("values")) {
            if (v.is_number()) {
              d.choices.emplace_back(v.get<double>());
            } else if (v.is_string()) {
              d.choices.emplace_back(v.get<std::string>());
            } else if (v.is_boolean()) {
              d.choices.emplace_back(std::string(v.get<bool>() ? "true" : "false"));
            } else {
              throw invalid_space("'" + d.name + "' has a non-scalar category");
            }
          }
          break;
        case Dimension::Kind::kReciprocalShift:
          d.high = item.value("high", 2.0);
          break;
      }
      dims.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw invalid_space(std::string("malformed space: ") + e.what());
  }
  return HyperparameterSpace(std::move(dims));
}

json HyperparameterSpace::to_json() const {
  json dims = json::array();
  for (const Dimension& d : dimensions_) {
    json item = {{"name", d.name}, {"kind", to_string(d.kind)}};
    switch (d.kind) {
      case Dimension::Kind::kLogUniform:
      case Dimension::Kind::kUniform:
        item["low"] = d.low;
        item["high"] = d.high;
        break;
      case Dimension::Kind::kUniformConditional:
        item["parent"] = d.parent;
        item["high"] = d.high;
        break;
      case Dimension::Kind::kCategorical: {
        json values = json::array();
        for (const Value& v : d.choices) values.push_back(value_to_json(v));
        item["values"] = values;
        break;
      }
      case Dimension::Kind::kReciprocalShift:
        item["high"] = d.high;
        break;
    }
    dims.push_back(item);
  }
  return {{"dimensions", dims}};
}

std::uint64_t trial_seed(std::uint64_t seed, int trial_id) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(trial_id));
}

Sample sample(const HyperparameterSpace& space, std::uint64_t rng_seed) {
  const auto& dims = space.dimensions();
  std::mt19937_64 rng(rng_seed);
  std::vector<Value> drawn(dims.size());
  std::map<std::string, double> numeric;
  for (std::size_t i : space.sampling_order()) {
    const Dimension& d = dims[i];
    const double parent =
        d.kind == Dimension::Kind::kUniformConditional ? numeric.at(d.parent) : 0.0;
    drawn[i] = d.transform(unit_draw(rng), parent);
    if (const double* v = std::get_if<double>(&drawn[i])) numeric[d.name] = *v;
  }
  Sample out;
  out.reserve(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    out.emplace_back(dims[i].name, drawn[i]);
  }
  return out;
}

std::string format_value(const Value& value) {
  if (const double* d = std::get_if<double>(&value)) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", *d);
    return buf;
  }
  return std::get<std::string>(value);
}

std::string format_hparams(const Sample& values) {
  std::string out;
  for (const auto& [name, value] : values) {
    out += name;
    out += '=';
    out += format_value(value);
    out += '\n';
  }
  return out;
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw Error(ErrorCode::kLengthMismatch,
                "need two equal-length sequences of at least 2 scores, got " +
                    std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  const std::size_t n = a.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    return a[i] != a[j] ? a[i] < a[j] : b[i] < b[j];
  });

  auto tied_pairs = [](std::int64_t run) { return run * (run - 1) / 2; };
  std::int64_t ties_a = 0;
  std::int64_t ties_joint = 0;
  {
    std::int64_t run_a = 1;
    std::int64_t run_ab = 1;
    for (std::size_t k = 1; k <= n; ++k) {
      const bool same_a = k < n && a[idx[k]] == a[idx[k - 1]];
      const bool same_ab = same_a && b[idx[k]] == b[idx[k - 1]];
      if (same_a) {
        ++run_a;
      } else {
        ties_a += tied_pairs(run_a);
        run_a = 1;
      }
      if (same_ab) {
        ++run_ab;
      } else {
        ties_joint += tied_pairs(run_ab);
        run_ab = 1;
      }
    }
  }

  // Count strict inversions of b in this order with a bottom-up merge sort.
  std::vector<double> seq(n);
  for (std::size_t k = 0; k < n; ++k) seq[k] = b[idx[k]];
  std::vector<double> buf(n);
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo;
      std::size_t j = mid;
      std::size_t out = lo;
      while (i < mid && j < hi) {
        if (seq[j] < seq[i]) {
          swaps += static_cast<std::int64_t>(mid - i);
          buf[out++] = seq[j++];
        } else {
          buf[out++] = seq[i++];
        }
      }
      while (i < mid) buf[out++] = seq[i++];
      while (j < hi) buf[out++] = seq[j++];
    }
    std::swap(seq, buf);
  }

  std::int64_t ties_b = 0;
  {
    std::int64_t run = 1;
    for (std::size_t k = 1; k <= n; ++k) {
      if (k < n && seq[k] == seq[k - 1]) {
        ++run;
      } else {
        ties_b += tied_pairs(run);
        run = 1;
      }
    }
  }

  const std::int64_t total = static_cast<std::int64_t>(n) * (static_cast<std::int64_t>(n) - 1) / 2;
  if (total == ties_a || total == ties_b) {
    throw Error(ErrorCode::kDegenerateAllTies,
                "every pair is tied in at least one ranking");
  }
  const std::int64_t concordant_minus_discordant =
      total - ties_a - ties_b + ties_joint - 2 * swaps;
  return static_cast<double>(concordant_minus_discordant) /
         std::sqrt(static_cast<double>(total - ties_a) *
                   static_cast<double>(total - ties_b));
}

io::SplitManifest proxy_manifest(const io::SplitManifest& manifest,
                                 double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "proxy fraction must lie in (0, 1], got " + format_value(fraction));
  }
  std::map<int, std::vector<std::size_t>> by_category;
  const auto& entries = manifest.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    by_category[entries[i].category_id].push_back(i);
  }
  std::mt19937_64 rng(splitmix64(seed));
  std::vector<char> keep(entries.size(), 0);
  for (auto& [category, members] : by_category) {
    const auto n = static_cast<double>(members.size());
    // fraction * n can land a hair above an integer (0.1 * 30); snap it.
    const double target = fraction * n;
    const double nearest = std::round(target);
    const double k = std::abs(target - nearest) <= 1e-9 * std::max(1.0, target)
                         ? nearest
                         : std::ceil(target);
    const auto take = static_cast<std::size_t>(k);
    for (std::size_t i = members.size(); i-- > 1;) {
      const auto j = static_cast<std::size_t>(unit_draw(rng) * static_cast<double>(i + 1));
      std::swap(members[i], members[std::min(j, i)]);
    }
    for (std::size_t i = 0; i < take && i < members.size(); ++i) keep[members[i]] = 1;
  }
  std::vector<io::ManifestEntry> kept;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (keep[i]) kept.push_back(entries[i]);
  }
  return io::SplitManifest(manifest.split(), std::move(kept));
}

std::string_view to_string(TrialOutcome outcome) {
  switch (outcome) {
    case TrialOutcome::kConverged: return "converged";
    case TrialOutcome::kNonConvergent: return "non-convergent";
    case TrialOutcome::kFailed: return "failed";
  }
  return "failed";
}

std::string scorepack_name(io::Split split) {
  return std::string(io::split_name(split)) + ".wsep";
}

std::string substitute(std::string tmpl,
                       const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string needle = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = tmpl.find(needle, pos)) != std::string::npos) {
      tmpl.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }
  return tmpl;
}

int run_shell(const std::string& command, const fs::path& log) {
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(),
                                   O_WRONLY | O_CREAT | O_APPEND, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);

  std::string sh = "/bin/sh";
  std::string dash_c = "-c";
  std::string cmd = command;
  char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw Error(ErrorCode::kTrainerSpawnFailure,
                "cannot start trainer: " + std::string(std::strerror(rc)));
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) {
      throw Error(ErrorCode::kTrainerSpawnFailure,
                  "waitpid failed: " + std::string(std::strerror(errno)));
    }
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return 255;
}

SearchReport run_search(const SearchConfig& config, const GroundTruth& validation,
                        const GroundTruth& test) {
  if (config.n_trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one trial");
  }
  if (config.trainer_template.find("{trial_dir}") == std::string::npos &&
      config.trainer_template.find("{hparams_file}") == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "trainer command needs a {trial_dir} or {hparams_file} placeholder");
  }
  std::error_code ec;
  fs::create_directories(config.work_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure,
                "cannot create " + config.work_dir.string() + ": " + ec.message());
  }

  SearchReport report;
  report.config = config;
  report.selection_metric =
      config.eval.task == Task::kBoxes ? "max_box_acc_v2" : "m_px_ap";
  report.trials.resize(static_cast<std::size_t>(config.n_trials));
  for (int t = 0; t < config.n_trials; ++t) {
    Trial& trial = report.trials[t];
    trial.trial_id = t;
    trial.seed = trial_seed(config.seed, t);
    trial.values = sample(config.space, trial.seed);
  }

  EvalConfig trial_eval = config.eval;
  if (config.jobs > 1) trial_eval.jobs = 1;

  auto trial_dir = [&](int t) {
    char name[32];
    std::snprintf(name, sizeof(name), "trial_%03d", t);
    return config.work_dir / name;
  };

  parallel_for(report.trials.size(), config.jobs, [&](std::size_t, std::size_t i) {
    Trial& trial = report.trials[i];
    const fs::path dir = trial_dir(trial.trial_id);
    std::error_code err;
    fs::remove_all(dir, err);
    fs::create_directories(dir, err);
    if (err) {
      throw Error(ErrorCode::kIoFailure, "cannot create " + dir.string());
    }
    const fs::path hparams = dir / kHparamsFile;
    {
      std::ofstream out(hparams, std::ios::binary);
      out << format_hparams(trial.values);
      if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + hparams.string());
    }
    const std::string command = substitute(
        config.trainer_template,
        {{"trial_dir", dir.string()}, {"hparams_file", hparams.string()}});
    trial.exit_code = run_shell(command, dir / kTrainerLog);
    if (trial.exit_code != 0) {
      trial.outcome = TrialOutcome::kNonConvergent;
      trial.note = "trainer exited with status " + std::to_string(trial.exit_code);
      return;
    }
    if (fs::exists(dir / kNonConvergentSentinel)) {
      trial.outcome = TrialOutcome::kNonConvergent;
      trial.note = "trainer reported divergence";
      return;
    }
    const fs::path pack = dir / scorepack_name(io::Split::kTrainFullsup);
    if (!fs::exists(pack)) {
      trial.outcome = TrialOutcome::kFailed;
      trial.note = "missing " + pack.filename().string();
      return;
    }
    try {
      io::ScorepackReader reader(pack);
      const Evaluation eval = evaluate(reader, validation, trial_eval);
      trial.validation_score = headline_score(eval.report);
      trial.outcome = TrialOutcome::kConverged;
    } catch (const Error& e) {
      trial.outcome = TrialOutcome::kFailed;
      trial.note = e.what();
    }
  });

  std::int64_t non_convergent = 0;
  std::int64_t failed = 0;
  const Trial* best = nullptr;
  for (const Trial& t : report.trials) {
    if (t.outcome == TrialOutcome::kNonConvergent) ++non_convergent;
    if (t.outcome == TrialOutcome::kFailed) ++failed;
    if (t.outcome == TrialOutcome::kConverged &&
        (best == nullptr || *t.validation_score > *best->validation_score)) {
      best = &t;
    }
  }
  const auto n = static_cast<double>(report.trials.size());
  report.non_convergence_ratio = static_cast<double>(non_convergent) / n;
  report.failure_ratio = static_cast<double>(non_convergent + failed) / n;
  if (best == nullptr) {
    report.status = std::string(error_code_name(ErrorCode::kAllTrialsNonConvergent));
    return report;
  }

  const int selected = best->trial_id;
  const fs::path test_pack = trial_dir(selected) / scorepack_name(io::Split::kTestFullsup);
  if (!fs::exists(test_pack)) {
    throw Error(ErrorCode::kMissingScorepack,
                "selected trial " + std::to_string(selected) + " produced no " +
                    test_pack.filename().string());
  }
  io::ScorepackReader reader(test_pack);
  const Evaluation final_eval = evaluate(reader, test, config.eval);
  report.status = "ok";
  report.selected_trial = selected;
  report.test_score = headline_score(final_eval.report);
  report.test_report = final_eval.report;
  report.trials[selected].test_score = report.test_score;
  return report;
}

json to_json(const SearchReport& report) {
  json trials = json::array();
  for (const Trial& t : report.trials) {
    json values = json::object();
    for (const auto& [name, value] : t.values) values[name] = value_to_json(value);
    json item = {{"trial_id", t.trial_id},
                 {"seed", t.seed},
                 {"hyperparameters", values},
                 {"outcome", to_string(t.outcome)},
                 {"exit_code", t.exit_code}};
    if (!t.note.empty()) item["note"] = t.note;
    item["validation_score"] = t.validation_score ? json(*t.validation_score) : json();
    if (t.test_score) item["test_score"] = *t.test_score;
    trials.push_back(item);
  }
  const SearchConfig& c = report.config;
  json j;
  j["toolkit_version"] = kToolkitVersion;
  j["schema_version"] = kReportSchemaVersion;
  j["status"] = report.status;
  j["config"] = {
      {"n_trials", c.n_trials},
      {"seed", c.seed},
      {"trainer", c.trainer_template},
      {"space", c.space.to_json()},
      {"selection_metric", report.selection_metric},
      {"task", to_string(c.eval.task)},
      {"normalization", to_string(c.eval.normalization)},
      {"resize_order", to_string(c.eval.resize_order)},
      {"thresholds",
       {{"mode", c.eval.thresholds.is_exact() ? "exact" : "grid"},
        {"count", c.eval.thresholds.taus().size()}}},
      {"deltas", c.eval.deltas},
      {"legacy_delta", c.eval.legacy_delta},
      {"px_acc_tau", c.eval.px_acc_tau},
      {"pooling", to_string(c.eval.pooling)},
      {"blur_sigma", c.eval.blur_sigma},
  };
  j["trials"] = trials;
  j["non_convergence_ratio"] = report.non_convergence_ratio;
  j["failure_ratio"] = report.failure_ratio;
  j["selected_trial"] = report.selected_trial ? json(*report.selected_trial) : json();
  j["test_score"] = report.test_score ? json(*report.test_score) : json();
  if (report.test_report) j["test_report"] = wsol::to_json(*report.test_report);
  return j;
}

}  // namespace wsol::search
