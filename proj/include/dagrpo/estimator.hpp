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

// Dual-weighted group policy-gradient estimator and two exact references
// for it: the closed-form Lagrangian gradient, and the expectation of the
// estimator itself taken by enumerating every joint group outcome.

#pragma once

#include <cstdint>
#include <span>

#include "dagrpo/advantage.hpp"
#include "dagrpo/environment.hpp"
#include "dagrpo/policy.hpp"

namespace dagrpo {

struct GradientAccumulator {
  Matrix grad;
  std::size_t sample_count = 0;
};

// (1 / (G - 1)) * sum_i grad log pi(local_i | x) * dual_weighted_i.
//
// Always differentiates the LOCAL action, including for responses whose
// outcome was composed from the cloud answer.
Matrix group_gradient(const PolicyParams& params, const GroupSample& group,
                      const AdvantagePair& adv,
                      HelpMode mode = HelpMode::kEnabled);

// Same value, written into the prompt's row only (`row` is zeroed first).
void group_gradient_row(const PolicyParams& params, const GroupSample& group,
                        const AdvantagePair& adv, HelpMode mode,
                        std::span<double> row);

// Mean of group gradients, summed in ascending batch order with Kahan
// compensation. Throws DomainError on an empty or misaligned batch.
GradientAccumulator batch_gradient(const PolicyParams& params,
                                   std::span<const GroupSample> groups,
                                   std::span<const AdvantagePair> advs,
                                   HelpMode mode = HelpMode::kEnabled);

// Exact grad_theta E_{y ~ pi}[r - lambda c] at one prompt, from closed-form
// expected shaped rewards per local action.
Matrix brute_force_policy_gradient(const PolicyParams& params,
                                   const TaskSpec& task,
                                   const CloudOracle& oracle,
                                   const RewardWeights& weights,
                                   PromptId prompt, double lambda,
                                   HelpMode mode = HelpMode::kEnabled);

inline constexpr std::uint64_t kEnumerationBudget = 1'000'000;

// Exact E[group_gradient] over all local action tuples, the single shared
// cloud draw, and every response's format coin. Throws ResourceError when
// (K+1)^G exceeds kEnumerationBudget.
Matrix enumerate_estimator_expectation(const PolicyParams& params,
                                       const TaskSpec& task,
                                       const CloudOracle& oracle,
                                       const RewardWeights& weights,
                                       PromptId prompt, double lambda, int G,
                                       HelpMode mode = HelpMode::kEnabled);

}  // namespace dagrpo
