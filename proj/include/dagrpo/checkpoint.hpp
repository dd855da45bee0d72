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

// Plain-text training checkpoints.
//
// Layout (one record per line, fields separated by single spaces, numbers
// in shortest round-trip decimal form):
//
//   dagrpo-checkpoint 1
//   seed <u64>
//   iteration <int>
//   task_index <int>
//   task_iteration <int>
//   dual <lambda> <eta_lambda> <tau_current>
//   dual_history <n>          followed by n lines: <iteration> <lambda> <j_hat_c>
//   dual_targets <n>          followed by n lines: <iteration> <tau>
//   logits <rows> <cols>      followed by rows lines of cols values
//   router <n> <frozen> <threshold>
//                             followed by n lines: <successes> <trials> <offload>
//   router_holdout <n>        followed by one line of n prompt ids
//   end
//
// Random streams are addressed by (seed, iteration, slot, ...) counters, so
// seed and iteration are the whole generator state.

#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "dagrpo/trainer.hpp"

namespace dagrpo {

inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const TrainState& state);
// Throws ConfigError (with the offending line) on malformed input or an
// unknown version.
TrainState read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const TrainState& state);
TrainState load_checkpoint(const std::filesystem::path& path);

}  // namespace dagrpo
