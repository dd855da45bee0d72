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

#include "dagrpo/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dagrpo/errors.hpp"

namespace dagrpo {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

void shuffle(std::vector<PromptId>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint32_t j = rng.below(static_cast<std::uint32_t>(i));
    std::swap(v[i - 1], v[j]);
  }
}

void check_known_prompt(const TaskSpec& task, PromptId prompt) {
  if (!task.contains(prompt)) {
    throw DomainError("prompt " + std::to_string(prompt.index) +
                      " is not part of task " + std::to_string(task.task_id));
  }
}

}  // namespace

bool TaskSpec::contains(PromptId p) const {
  return std::binary_search(prompt_ids.begin(), prompt_ids.end(), p);
}

void TaskSpec::validate() const {
  const std::string where = "task " + std::to_string(task_id) + ": ";
  if (num_answers == 0) throw ConfigError(where + "needs at least one answer");
  if (prompt_ids.empty()) throw ConfigError(where + "empty prompt set");
  if (!std::is_sorted(prompt_ids.begin(), prompt_ids.end())) {
    throw ConfigError(where + "prompt ids must be ascending");
  }
  if (locally_solvable.size() != correct_action.size() ||
      cloud_difficulty.size() != correct_action.size()) {
    throw ConfigError(where + "per-prompt maps disagree in size");
  }
  for (PromptId p : prompt_ids) {
    if (p.index >= correct_action.size()) {
      throw ConfigError(where + "prompt outside the prompt space");
    }
    if (correct_action[p.index].index >= num_answers) {
      throw ConfigError(where + "correct action must be an answer action");
    }
    if (!in_unit(cloud_difficulty[p.index])) {
      throw ConfigError(where + "cloud difficulty outside [0,1]");
    }
  }
  if (iterations <= 0) throw ConfigError(where + "iterations must be > 0");
  if (!in_unit(tau)) throw ConfigError(where + "tau outside [0,1]");
  int last_at = 0;
  for (const auto& ch : tau_changes) {
    if (!in_unit(ch.tau)) throw ConfigError(where + "tau change outside [0,1]");
    if (ch.at <= last_at || ch.at >= iterations) {
      throw ConfigError(where +
                        "tau changes must be strictly increasing inside "
                        "(0, iterations)");
    }
    last_at = ch.at;
  }
  if (!in_unit(format_violation_prob)) {
    throw ConfigError(where + "format_violation_prob outside [0,1]");
  }
}

double CloudOracle::accuracy_for(const TaskSpec& task, PromptId prompt) const {
  return accuracy * (1.0 - task.cloud_difficulty[prompt.index]);
}

ActionId compose(ActionId local, ActionId cloud_answer, ActionId help) {
  if (cloud_answer == help) {
    throw DomainError("cloud answer cannot be HELP");
  }
  return local == help ? cloud_answer : local;
}

ActionId cloud_answer(const CloudOracle& oracle, const TaskSpec& task,
                      PromptId prompt, RngStream& stream) {
  check_known_prompt(task, prompt);
  const ActionId correct = task.correct_action[prompt.index];
  const double acc = oracle.accuracy_for(task, prompt);
  if (stream.bernoulli(acc)) return correct;
  if (task.num_answers < 2) {
    throw DomainError("cloud error needs at least two answer actions");
  }
  // Uniform over the K-1 wrong answers.
  const std::uint32_t k = stream.below(task.num_answers - 1);
  return {k < correct.index ? k : k + 1};
}

RewardCost reward_and_cost(const TaskSpec& task, const RewardWeights& weights,
                           PromptId prompt, ActionId local_action,
                           ActionId final_action, bool format_ok) {
  check_known_prompt(task, prompt);
  if (final_action.index >= task.num_answers) {
    throw DomainError("final action must be an answer action");
  }
  if (!format_ok) return {-weights.format_penalty, 0.0};
  const bool used_cloud = local_action == task.help();
  // Hard prompts have no locally reachable correct answer.
  const bool reachable = used_cloud || task.locally_solvable[prompt.index];
  const bool correct =
      reachable && final_action == task.correct_action[prompt.index];
  return {correct ? weights.answer : 0.0,
          used_cloud ? weights.cloud_cost : 0.0};
}

bool simulate_format(const TaskSpec& task, RngStream& stream) {
  return !stream.bernoulli(task.format_violation_prob);
}

double expected_shaped_reward(const TaskSpec& task, const CloudOracle& oracle,
                              const RewardWeights& weights, PromptId prompt,
                              ActionId local_action, double lambda) {
  check_known_prompt(task, prompt);
  const double f = task.format_violation_prob;
  const double formatted_value = [&] {
    if (local_action == task.help()) {
      return oracle.accuracy_for(task, prompt) * weights.answer -
             lambda * weights.cloud_cost;
    }
    const bool right = task.locally_solvable[prompt.index] &&
                       local_action == task.correct_action[prompt.index];
    return right ? weights.answer : 0.0;
  }();
  return (1.0 - f) * formatted_value - f * weights.format_penalty;
}

void ScheduleConfig::validate() const {
  if (tasks.empty()) throw ConfigError("schedule needs at least one task");
  if (num_answers == 0) throw ConfigError("num_answers must be >= 1");
  if (prompts_per_task == 0) throw ConfigError("empty prompt set");
  if (prompts_per_task > num_prompts) {
    throw ConfigError("prompts_per_task exceeds num_prompts");
  }
  if (!in_unit(overlap)) throw ConfigError("overlap must be in [0,1]");
  if (!in_unit(hard_fraction)) {
    throw ConfigError("hard_fraction must be in [0,1]");
  }
  if (!in_unit(cloud_difficulty_spread)) {
    throw ConfigError("cloud_difficulty_spread must be in [0,1]");
  }
  if (!in_unit(format_violation_prob)) {
    throw ConfigError("format_violation_prob must be in [0,1]");
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    const std::string where = "tasks[" + std::to_string(i) + "]: ";
    if (t.iterations <= 0) throw ConfigError(where + "iterations must be > 0");
    if (!in_unit(t.tau)) throw ConfigError(where + "tau must be in [0,1]");
    if (t.hard_fraction && !in_unit(*t.hard_fraction)) {
      throw ConfigError(where + "hard_fraction must be in [0,1]");
    }
    int last_at = 0;
    for (const auto& ch : t.tau_changes) {
      if (!in_unit(ch.tau)) throw ConfigError(where + "tau change outside [0,1]");
      if (ch.at <= last_at || ch.at >= t.iterations) {
        throw ConfigError(where +
                          "tau_changes must be strictly increasing inside "
                          "(0, iterations)");
      }
      last_at = ch.at;
    }
  }
  const auto shared = static_cast<std::uint32_t>(
      std::lround(overlap * prompts_per_task));
  const std::uint64_t needed =
      prompts_per_task +
      std::uint64_t{prompts_per_task - shared} * (tasks.size() - 1);
  if (needed > num_prompts) {
    throw ConfigError("schedule needs " + std::to_string(needed) +
                      " distinct prompts but num_prompts is " +
                      std::to_string(num_prompts));
  }
  if (tasks.size() > 1 && shared > 0 && num_answers < 2) {
    throw ConfigError("conflicting overlap needs num_answers >= 2");
  }
}

int TaskSchedule::total_iterations() const {
  int total = 0;
  for (const auto& t : tasks) total += t.iterations;
  return total;
}

TaskSchedule make_continual_schedule(const ScheduleConfig& config,
                                     std::uint64_t seed) {
  config.validate();
  const std::uint32_t space = config.num_prompts;
  const std::uint32_t k = config.num_answers;
  const std::uint32_t n = config.prompts_per_task;
  const auto shared_count =
      static_cast<std::uint32_t>(std::lround(config.overlap * n));

  TaskSchedule schedule;
  schedule.num_prompts = space;
  schedule.num_answers = k;
  std::uint32_t next_fresh = 0;

  for (std::size_t ti = 0; ti < config.tasks.size(); ++ti) {
    const TaskConfig& tc = config.tasks[ti];
    RngStream rng(seed, "schedule", static_cast<std::uint32_t>(ti));

    TaskSpec task;
    task.task_id = static_cast<std::uint32_t>(ti);
    task.num_answers = k;
    task.correct_action.assign(space, ActionId{0});
    task.locally_solvable.assign(space, true);
    task.cloud_difficulty.assign(space, 0.0);
    task.iterations = tc.iterations;
    task.tau = tc.tau;
    task.tau_changes = tc.tau_changes;
    task.format_violation_prob = config.format_violation_prob;

    std::vector<PromptId> carried;
    if (ti > 0) {
      const TaskSpec& prev = schedule.tasks.back();
      std::vector<PromptId> pool = prev.prompt_ids;
      shuffle(pool, rng);
      carried.assign(pool.begin(), pool.begin() + shared_count);
      for (PromptId p : carried) {
        const std::uint32_t old = prev.correct_action[p.index].index;
        task.correct_action[p.index] = {(old + 1 + rng.below(k - 1)) % k};
      }
    }
    task.prompt_ids = carried;
    const std::uint32_t fresh = ti == 0 ? n : n - shared_count;
    for (std::uint32_t i = 0; i < fresh; ++i) {
      const PromptId p{next_fresh++};
      task.prompt_ids.push_back(p);
      task.correct_action[p.index] = {rng.below(k)};
    }
    std::sort(task.prompt_ids.begin(), task.prompt_ids.end());

    const double hard_fraction =
        tc.hard_fraction.value_or(config.hard_fraction);
    const auto hard_count =
        static_cast<std::size_t>(std::lround(hard_fraction * n));
    std::vector<PromptId> order = task.prompt_ids;
    shuffle(order, rng);
    for (std::size_t j = 0; j < hard_count; ++j) {
      const PromptId p = order[j];
      task.locally_solvable[p.index] = false;
      task.cloud_difficulty[p.index] =
          hard_count > 1 ? config.cloud_difficulty_spread *
                               static_cast<double>(j) /
                               static_cast<double>(hard_count - 1)
                         : 0.0;
    }
    task.validate();
    schedule.tasks.push_back(std::move(task));
  }
  return schedule;
}

}  // namespace dagrpo
