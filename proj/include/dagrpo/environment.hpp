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

// Synthetic continual-learning world: task prompt sets with ground-truth
// answers, a fixed cloud oracle, the composition rule for HELP responses,
// and the reward / cost functions.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dagrpo/policy.hpp"
#include "dagrpo/rng.hpp"

namespace dagrpo {

struct RewardWeights {
  double answer = 1.0;          // alpha_a
  double format_penalty = 0.1;  // alpha_f
  double cloud_cost = 1.0;      // alpha_c
  bool operator==(const RewardWeights&) const = default;
};

// A target change inside a task, `at` iterations after the task starts.
struct TauChange {
  int at = 0;
  double tau = 0.0;
  bool operator==(const TauChange&) const = default;
};

struct TaskSpec {
  std::uint32_t task_id = 0;
  std::uint32_t num_answers = 0;  // K; HELP is action K
  std::vector<PromptId> prompt_ids;  // ascending
  // The maps below are indexed by PromptId over the whole prompt space;
  // entries for prompts outside the task are unused.
  std::vector<ActionId> correct_action;
  std::vector<bool> locally_solvable;
  // Per-prompt cloud difficulty in [0,1]; the cloud is correct with
  // probability accuracy * (1 - difficulty). All zero unless configured.
  std::vector<double> cloud_difficulty;
  int iterations = 1;
  double tau = 0.0;
  std::vector<TauChange> tau_changes;
  double format_violation_prob = 0.0;

  bool contains(PromptId p) const;
  std::size_t prompt_space() const { return correct_action.size(); }
  ActionId help() const { return {num_answers}; }
  // Checks the structural invariants; throws ConfigError.
  void validate() const;
};

struct CloudOracle {
  double accuracy = 0.984;

  // Probability that the cloud answers `prompt` correctly.
  double accuracy_for(const TaskSpec& task, PromptId prompt) const;
};

struct Outcome {
  PromptId prompt;
  ActionId local_action;
  bool cloud_used = false;
  ActionId final_action;
  bool format_ok = true;
  double reward = 0.0;
  double cost = 0.0;
};

struct RewardCost {
  double reward = 0.0;
  double cost = 0.0;
  bool operator==(const RewardCost&) const = default;
};

// Composition operator: a HELP response takes the cloud's answer, anything
// else keeps the local answer. `help` is the HELP action id.
ActionId compose(ActionId local, ActionId cloud_answer, ActionId help);

ActionId cloud_answer(const CloudOracle& oracle, const TaskSpec& task,
                      PromptId prompt, RngStream& stream);

RewardCost reward_and_cost(const TaskSpec& task, const RewardWeights& weights,
                           PromptId prompt, ActionId local_action,
                           ActionId final_action, bool format_ok);

bool simulate_format(const TaskSpec& task, RngStream& stream);

// Closed-form E[r - lambda * c | local action] for one prompt, folding in
// format noise and cloud accuracy. Used by the exact-gradient oracle.
double expected_shaped_reward(const TaskSpec& task, const CloudOracle& oracle,
                              const RewardWeights& weights, PromptId prompt,
                              ActionId local_action, double lambda);

struct TaskConfig {
  int iterations = 1;
  double tau = 0.3;
  std::vector<TauChange> tau_changes;
  std::optional<double> hard_fraction;  // overrides ScheduleConfig's
  bool operator==(const TaskConfig&) const = default;
};

struct ScheduleConfig {
  std::uint32_t num_prompts = 200;       // shared prompt space
  std::uint32_t num_answers = 4;         // K
  std::uint32_t prompts_per_task = 100;
  // Fraction of each task's prompts carried over from the previous task with
  // a different correct answer.
  double overlap = 0.3;
  double hard_fraction = 0.5;
  // Cloud difficulty of hard prompts is spread evenly over [0, spread].
  double cloud_difficulty_spread = 0.0;
  double format_violation_prob = 0.05;
  std::vector<TaskConfig> tasks;

  // Throws ConfigError on inconsistency.
  void validate() const;
  bool operator==(const ScheduleConfig&) const = default;
};

struct TaskSchedule {
  std::uint32_t num_prompts = 0;
  std::uint32_t num_answers = 0;
  std::vector<TaskSpec> tasks;

  int total_iterations() const;
};

TaskSchedule make_continual_schedule(const ScheduleConfig& config,
                                     std::uint64_t seed);

}  // namespace dagrpo
