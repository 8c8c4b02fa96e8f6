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
// Stand-in trainer for search tests. Writes box-indicator score maps for the
// train-fullsup and test-fullsup splits found in --data. Trials listed in
// --winner get exact indicators; every other trial gets indicators shifted by
// a few pixels.
//
//   mock_trainer --trial-dir DIR --hparams FILE --data DIR
//                [--winner 7[,12]] [--fail-all] [--diverge-above LR]
//                [--skip-test-pack]

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wsol/dataset_io.hpp"
#include "wsol/search.hpp"

namespace fs = std::filesystem;
namespace io = wsol::io;

namespace {

wsol::ScoreMap indicator(const io::ManifestEntry& e, const std::vector<wsol::Box>& boxes, int shift) {
  std::vector<double> values(static_cast<std::size_t>(e.height) * e.width, 0.0);
  for (const wsol::Box& b : boxes) {
    for (int r = b.y0 + shift; r < b.y1 + shift && r < e.height; ++r) {
      for (int c = b.x0 + shift; c < b.x1 + shift && c < e.width; ++c) {
        values[static_cast<std::size_t>(r) * e.width + c] = 1.0;
      }
    }
  }
  // A faint ramp keeps maps from being constant.
  values[0] = std::max(values[0], 0.01);
  return wsol::ScoreMap(e.image_id, e.height, e.width, std::move(values));
}

void write_split(const fs::path& data, const fs::path& out_dir, io::Split split, int shift) {
  const std::string stem(io::split_name(split));
  const auto manifest = io::read_manifest(data / (stem + "_manifest.csv"), split);
  const auto boxes = io::read_boxes(data / (stem + "_boxes.csv"), manifest);
  io::ScorepackWriter writer(out_dir / wsol::search::scorepack_name(split));
  for (const auto& e : manifest.entries()) writer.write(indicator(e, boxes.at(e.image_id), shift));
  writer.close();
}

}  // namespace

int main(int argc, char** argv) {
  fs::path trial_dir, hparams, data;
  std::set<int> winners;
  bool fail_all = false, skip_test = false;
  double diverge_above = 2.0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto value = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << arg << "\n";
        std::exit(64);
      }
      return argv[++i];
    };
    if (arg == "--trial-dir") {
      trial_dir = value();
    } else if (arg == "--hparams") {
      hparams = value();
    } else if (arg == "--data") {
      data = value();
    } else if (arg == "--winner") {
      std::stringstream list(value());
      for (std::string item; std::getline(list, item, ',');) winners.insert(std::stoi(item));
    } else if (arg == "--fail-all") {
      fail_all = true;
    } else if (arg == "--skip-test-pack") {
      skip_test = true;
    } else if (arg == "--diverge-above") {
      diverge_above = std::stod(value());
    } else {
      std::cerr << "unknown argument " << arg << "\n";
      return 64;
    }
  }
  if (fail_all) {
    std::cerr << "loss is nan\n";
    return 1;
  }

  double learning_rate = -1.0;
  std::ifstream in(hparams);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos && line.substr(0, eq) == "learning_rate") {
      learning_rate = std::stod(line.substr(eq + 1));
    }
  }
  if (learning_rate < 0.0) {
    std::cerr << "no learning_rate in " << hparams << "\n";
    return 65;
  }
  std::cout << "learning_rate=" << learning_rate << "\n";

  const std::string name = trial_dir.filename().string();
  const int trial = std::atoi(name.c_str() + name.find('_') + 1);
  if (learning_rate > diverge_above && !winners.contains(trial)) {
    std::ofstream(trial_dir / wsol::search::kNonConvergentSentinel) << "diverged\n";
    return 0;
  }
  const int shift = winners.contains(trial) ? 0 : 3 + trial % 3;
  try {
    write_split(data, trial_dir, io::Split::kTrainFullsup, shift);
    if (!skip_test) write_split(data, trial_dir, io::Split::kTestFullsup, shift);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
