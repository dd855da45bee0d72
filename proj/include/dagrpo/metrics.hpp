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

// Noise-free evaluation, forgetting rate, trailing usage ratio and the
// per-run metrics CSV.

#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dagrpo/environment.hpp"
#include "dagrpo/policy.hpp"

namespace dagrpo {

struct EvalRecord {
  int iteration = 0;
  std::uint32_t task_evaluated = 0;
  double joint_accuracy = 0.0;
  // Accuracy over the prompts answered locally; absent when there are none.
  std::optional<double> local_only_accuracy;
  double local_fraction = 0.0;
  double realized_ratio = 0.0;
  double lambda = 0.0;
  // Denominators, so strategies with different local subsets can be compared.
  double local_count = 0.0;
  std::size_t prompt_count = 0;
};

struct EvalOptions {
  HelpMode mode = HelpMode::kEnabled;
  // Optional per-prompt probability (indexed over the prompt space) that a
  // router sends the prompt to the cloud before the policy acts.
  std::span<const double> offload_prob;
};

// Greedy local actions, cloud correctness taken in expectation and no format
// noise, over every prompt of `task`. A prompt contributes its cloud share
// s = o + (1 - o) [greedy == HELP] to the realized ratio and 1 - s to the
// local subset.
EvalRecord evaluate(const PolicyParams& params, const TaskSpec& task,
                    const CloudOracle& oracle, const EvalOptions& options = {});

struct ForgettingReport {
  double acc_task = 0.0;
  double acc_switch = 0.0;
  std::optional<double> forgetting_rate;  // absent when acc_task == 0
};

// (acc_task - acc_switch) / acc_task, unclamped. Inputs may be fractions or
// percentages; the rate is a fraction either way.
ForgettingReport forgetting(double acc_task, double acc_switch);

// Mean of the last `window` entries.
double trailing_ratio(std::span<const double> history, std::size_t window);

struct MetricsRow {
  int iteration = 0;
  std::uint32_t task_index = 0;
  double lambda = 0.0;
  double j_hat_c = 0.0;
  double train_mean_reward = 0.0;
  std::optional<double> eval_joint_acc;
  std::optional<double> eval_local_only_acc;
  std::optional<double> eval_local_fraction;
};

inline constexpr const char* kMetricsHeader =
    "iteration,task_index,lambda,j_hat_c,train_mean_reward,eval_joint_acc,"
    "eval_local_only_acc,eval_local_fraction";

// Shortest decimal form that round-trips to the same double.
std::string format_number(double x);

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);

}  // namespace dagrpo
