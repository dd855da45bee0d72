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

// The continual primal-dual training loop and the comparison strategies
// that share its harness.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dagrpo/advantage.hpp"
#include "dagrpo/dual.hpp"
#include "dagrpo/environment.hpp"
#include "dagrpo/metrics.hpp"
#include "dagrpo/policy.hpp"

namespace dagrpo {

enum class Strategy {
  kDaGrpo,           // learned HELP, adaptive lambda
  kFixedRewardGrpo,  // learned HELP, constant lambda
  kNaiveRouter,      // HELP masked, prompts offloaded at random
  kTrainedRouter,    // HELP masked, per-prompt router table
  kEdgeOnly,         // HELP masked, never offloads
};

std::string_view strategy_name(Strategy s);
// Throws ConfigError for an unknown name.
Strategy parse_strategy(std::string_view name);

struct RunConfig {
  std::uint64_t seed = 0;
  int group_size = 8;
  int batch_size = 128;
  double eta_theta = 50.0;
  double eta_lambda = 1e-2;
  double lambda_init = 0.5;
  Strategy strategy = Strategy::kDaGrpo;
  // fixed_reward_grpo: one lambda for the whole run, or one per task when
  // fixed_lambda_per_task is non-empty.
  double fixed_lambda = 0.5;
  std::vector<double> fixed_lambda_per_task;
  // naive_router
  double offload_prob = 0.3;
  // trained_router: share of each task's iterations spent fitting the
  // router table, and the share of those rollouts held out for threshold
  // calibration.
  double router_train_fraction = 0.5;
  double router_holdout_fraction = 0.2;
  int eval_every = 100;
  // Per-iteration group sampling workers. Output does not depend on it.
  int threads = 1;
  bool normalize_std = false;
  // Periodic checkpoints in addition to the one at every task end; 0 = off.
  int checkpoint_every = 0;
  RewardWeights rewards;
  double cloud_accuracy = 0.984;
  ScheduleConfig schedule;

  // Throws ConfigError.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

HelpMode help_mode_for(Strategy s);

struct RouterState {
  std::vector<double> successes;  // correct local responses
  std::vector<double> trials;     // local responses observed
  std::vector<bool> offload;      // frozen decision per prompt
  std::vector<PromptId> holdout;  // prompt draws kept for calibration
  bool frozen = false;
  double threshold = 0.0;
};

struct TrainState {
  PolicyParams params;
  DualState dual;
  int iteration = 0;
  std::uint32_t task_index = 0;
  int task_iteration = 0;  // iterations completed inside the current task
  std::uint64_t seed = 0;
  RouterState router;
};

TrainState make_initial_state(const RunConfig& config,
                              const TaskSchedule& schedule);

struct IterationStats {
  int iteration = 0;
  double j_hat_c = 0.0;
  double train_mean_reward = 0.0;
  double lambda_used = 0.0;
  double lambda_after = 0.0;
};

// Instrumentation hooks. on_cloud_draws is called once per batch slot, in
// slot order, with the number of cloud oracle draws that slot made.
struct RunHooks {
  std::function<void(int iteration, int slot, PromptId prompt, int draws)>
      on_cloud_draws;
};

// One batch: sample prompts, G local responses each, at most one shared
// cloud answer per prompt, rewards and costs, dual-weighted primal step,
// then the dual step. Advances state.iteration and state.task_iteration.
IterationStats run_iteration(TrainState& state, const RunConfig& config,
                             const TaskSpec& task, const RunHooks& hooks = {});

// The lambda a strategy trains with at the current state.
double training_lambda(const TrainState& state, const RunConfig& config);

// Per-prompt router offload probabilities for evaluation (empty when the
// strategy has no router).
std::vector<double> eval_offload(const TrainState& state,
                                 const RunConfig& config,
                                 const TaskSpec& task);

EvalRecord evaluate_state(const TrainState& state, const RunConfig& config,
                          const TaskSpec& task, const CloudOracle& oracle);

struct Snapshot {
  std::string label;  // "task0-end", "iter000500", ...
  TrainState state;
};

struct RunArtifacts {
  TaskSchedule schedule;
  std::vector<MetricsRow> rows;
  std::vector<EvalRecord> evals;
  // accuracy[i][j]: joint accuracy on task j right after task i ends.
  std::vector<std::vector<double>> accuracy;
  std::vector<std::vector<std::optional<double>>> local_only_accuracy;
  // Per task: end-of-own-phase vs end-of-run joint accuracy.
  std::vector<ForgettingReport> forgetting;
  std::vector<Snapshot> snapshots;
  std::optional<TrainState> final_state;

  std::vector<double> j_hat_history() const;
  std::vector<double> lambda_history() const;
};

RunArtifacts run_schedule(const RunConfig& config, const RunHooks& hooks = {});

// Grid-searches fixed_reward_grpo's lambda on the first task alone and
// returns the grid value whose trailing-`window` usage at the end of that
// task is closest to the task's target.
double tune_fixed_lambda(const RunConfig& config, std::span<const double> grid,
                         std::size_t window = 100);

}  // namespace dagrpo
