// Copyright 2026 The dagrpo Authors
// SPDX-License-Identifier: Apache-2.0
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

// Run directories: metrics CSV, JSON summary and checkpoints, plus the
// sweep driver that fills one directory per grid cell.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dagrpo/config.hpp"
#include "dagrpo/trainer.hpp"

namespace dagrpo {

// Config echo, per-task accuracy matrix, forgetting reports and final
// trailing usage.
std::string summary_json(const RunConfig& config, const RunArtifacts& art);

// root/run-<hash>-seed<seed>. Throws ConfigError when it already exists and
// `force` is false; nothing is computed before this check.
std::filesystem::path prepare_run_dir(const RunConfig& config,
                                      const std::filesystem::path& root,
                                      bool force);

// Writes metrics.csv, summary.json and checkpoints/<label>.ckpt.
void write_run_outputs(const std::filesystem::path& dir, const RunConfig& config,
                       const RunArtifacts& art);

struct SweepCellResult {
  std::string label;
  std::string run_dir;
  int exit_code = 0;  // 0 ok, 1 validation, 2 runtime
  std::string message;
};

struct SweepResult {
  std::filesystem::path index_path;
  std::vector<SweepCellResult> cells;
  int exit_code() const;
};

// Runs every cell serially. A failing cell is recorded and the sweep moves
// on.
SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& root,
                      bool force);

}  // namespace dagrpo
