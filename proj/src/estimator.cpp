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

#include "dagrpo/estimator.hpp"

#include <string>
#include <utility>
#include <vector>

#include "dagrpo/errors.hpp"
#include "dagrpo/kernels.hpp"

namespace dagrpo {

void group_gradient_row(const PolicyParams& params, const GroupSample& group,
                        const AdvantagePair& adv, HelpMode mode,
                        std::span<double> row) {
  const std::size_t g = group.size();
  if (g < 2) {
    throw DomainError("group size must be >= 2, got " + std::to_string(g));
  }
  if (adv.dual_weighted.size() != g) {
    throw DomainError("advantages do not match the group size");
  }
  const auto probs = action_probabilities(params, group.prompt, mode);
  std::fill(row.begin(), row.end(), 0.0);
  for (std::size_t i = 0; i < g; ++i) {
    add_log_prob_gradient_row(probs, group.local_actions[i],
                              adv.dual_weighted[i], row);
  }
  kernels::scale(1.0 / static_cast<double>(g - 1), row);
}

Matrix group_gradient(const PolicyParams& params, const GroupSample& group,
                      const AdvantagePair& adv, HelpMode mode) {
  Matrix out(params.num_prompts(), params.num_actions(), 0.0);
  group_gradient_row(params, group, adv, mode, out.row(group.prompt.index));
  return out;
}

GradientAccumulator batch_gradient(const PolicyParams& params,
                                   std::span<const GroupSample> groups,
                                   std::span<const AdvantagePair> advs,
                                   HelpMode mode) {
  if (groups.empty()) throw DomainError("empty batch");
  if (groups.size() != advs.size()) {
    throw DomainError("groups and advantages are misaligned");
  }
  GradientAccumulator acc{
      Matrix(params.num_prompts(), params.num_actions(), 0.0), 0};
  Matrix comp(params.num_prompts(), params.num_actions(), 0.0);
  std::vector<double> scratch(params.num_actions());
  for (std::size_t b = 0; b < groups.size(); ++b) {
    const std::uint32_t r = groups[b].prompt.index;
    group_gradient_row(params, groups[b], advs[b], mode, scratch);
    kernels::kahan_axpy(1.0, scratch, acc.grad.row(r), comp.row(r));
    ++acc.sample_count;
  }
  kernels::scale(1.0 / static_cast<double>(acc.sample_count), acc.grad.flat());
  return acc;
}

Matrix brute_force_policy_gradient(const PolicyParams& params,
                                   const TaskSpec& task,
                                   const CloudOracle& oracle,
                                   const RewardWeights& weights,
                                   PromptId prompt, double lambda,
                                   HelpMode mode) {
  const auto p = action_probabilities(params, prompt, mode);
  std::vector<double> shaped(p.size(), 0.0);
  double mean = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] == 0.0) continue;
    shaped[a] = expected_shaped_reward(task, oracle, weights, prompt,
                                       {static_cast<std::uint32_t>(a)}, lambda);
    mean += p[a] * shaped[a];
  }
  // d/d logit_j of sum_a p_a r_a = p_j (r_j - E[r]).
  Matrix g(params.num_prompts(), params.num_actions(), 0.0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    g(prompt.index, j) = p[j] * (shaped[j] - mean);
  }
  return g;
}

Matrix enumerate_estimator_expectation(const PolicyParams& params,
                                       const TaskSpec& task,
                                       const CloudOracle& oracle,
                                       const RewardWeights& weights,
                                       PromptId prompt, double lambda, int G,
                                       HelpMode mode) {
  if (G < 2) throw DomainError("group size must be >= 2");
  const std::size_t n_act = params.num_actions();
  std::uint64_t tuples = 1;
  for (int i = 0; i < G; ++i) {
    tuples *= n_act;
    if (tuples > kEnumerationBudget) {
      throw ResourceError("enumeration needs (K+1)^G > " +
                              std::to_string(kEnumerationBudget) + " tuples",
                          tuples);
    }
  }
  const auto p = action_probabilities(params, prompt, mode);
  const ActionId help = task.help();
  const ActionId correct = task.correct_action[prompt.index];
  const double acc = oracle.accuracy_for(task, prompt);
  const double f = task.format_violation_prob;

  // The one cloud draw shared by all HELP responses of a group.
  std::vector<std::pair<ActionId, double>> cloud_branches;
  cloud_branches.emplace_back(correct, acc);
  if (acc < 1.0) {
    if (task.num_answers < 2) {
      throw DomainError("cloud error needs at least two answer actions");
    }
    const double each = (1.0 - acc) / static_cast<double>(task.num_answers - 1);
    for (std::uint32_t w = 0; w < task.num_answers; ++w) {
      if (w != correct.index) cloud_branches.emplace_back(ActionId{w}, each);
    }
  }

  Matrix expectation(params.num_prompts(), n_act, 0.0);
  auto out_row = expectation.row(prompt.index);
  std::vector<double> row(n_act);
  std::vector<double> rewards(G), costs(G);
  GroupSample group;
  group.prompt = prompt;
  group.local_actions.resize(G);
  group.outcomes.resize(G);

  for (std::uint64_t t = 0; t < tuples; ++t) {
    double p_tuple = 1.0;
    bool any_help = false;
    std::uint64_t code = t;
    for (int i = 0; i < G; ++i) {
      const auto a = static_cast<std::uint32_t>(code % n_act);
      code /= n_act;
      group.local_actions[i] = {a};
      p_tuple *= p[a];
      any_help = any_help || ActionId{a} == help;
    }
    if (p_tuple == 0.0) continue;

    const std::size_t n_cloud = any_help ? cloud_branches.size() : 1;
    for (std::size_t cb = 0; cb < n_cloud; ++cb) {
      const double p_cloud = any_help ? cloud_branches[cb].second : 1.0;
      if (p_cloud == 0.0) continue;
      for (std::uint32_t fmt = 0; fmt < (1u << G); ++fmt) {
        double p_fmt = 1.0;
        for (int i = 0; i < G; ++i) {
          const bool ok = ((fmt >> i) & 1u) == 0;
          p_fmt *= ok ? 1.0 - f : f;
        }
        if (p_fmt == 0.0) continue;
        for (int i = 0; i < G; ++i) {
          const ActionId local = group.local_actions[i];
          const bool ok = ((fmt >> i) & 1u) == 0;
          const ActionId fin =
              local == help ? compose(local, cloud_branches[cb].first, help)
                            : local;
          const RewardCost rc =
              reward_and_cost(task, weights, prompt, local, fin, ok);
          rewards[i] = rc.reward;
          costs[i] = rc.cost;
        }
        const AdvantagePair adv = group_advantages(rewards, costs, lambda);
        group_gradient_row(params, group, adv, mode, row);
        const double w = p_tuple * p_cloud * p_fmt;
        for (std::size_t j = 0; j < n_act; ++j) out_row[j] += w * row[j];
      }
    }
  }
  return expectation;
}

}  // namespace dagrpo
