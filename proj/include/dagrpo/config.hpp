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

// YAML run, sweep and plot configuration.
//
// Errors carry the 1-based line and column of the offending node. Unknown
// keys are rejected so a typo never silently falls back to a default. The
// run config's JSON echo (written into every run's summary) is itself valid
// YAML and parses back to an equal RunConfig.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dagrpo/trainer.hpp"

namespace dagrpo {

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical JSON form, keys in a fixed order.
std::string run_config_to_json(const RunConfig& config, int indent = 2);

// 16 hex digits identifying everything in the config except the seed.
std::string config_hash(const RunConfig& config);
// run-<hash>-seed<seed>
std::string run_dir_name(const RunConfig& config);

// $DAGRPO_OUTPUT_DIR, or ./runs when unset.
std::filesystem::path output_root();

struct SweepCell {
  std::string label;  // axis=value pairs joined by ','
  RunConfig config;
};

struct SweepSpec {
  RunConfig base;
  std::vector<double> eta_theta;
  std::vector<double> eta_lambda;
  std::vector<double> lambda_init;
  std::vector<std::uint64_t> seed;
  std::vector<std::vector<double>> tau_schedule;  // one tau per task
  std::vector<Strategy> strategy;
  int axis_count = 0;
};

SweepSpec parse_sweep_spec(const std::string& text);
SweepSpec load_sweep_spec(const std::filesystem::path& path);
// Cross product in declaration order (eta_theta slowest, strategy fastest).
std::vector<SweepCell> expand_sweep(const SweepSpec& spec);

struct PhaseMarker {
  int iteration = 0;
  std::optional<double> tau;  // target from this marker onward
};

struct PlotSpec {
  std::vector<std::filesystem::path> sources;
  std::vector<std::string> series;
  std::filesystem::path output;
  std::string title;
  std::vector<PhaseMarker> phase_markers;
  // Panels that get the dashed target lines.
  std::vector<std::string> tau_series = {"j_hat_c"};
  // Target in force before the first marker.
  std::optional<double> initial_tau;
};

// Relative source/output paths resolve against `base_dir`.
PlotSpec parse_plot_spec(const std::string& text,
                         const std::filesystem::path& base_dir = {});
PlotSpec load_plot_spec(const std::filesystem::path& path);

}  // namespace dagrpo
