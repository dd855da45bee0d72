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

#pragma once

#include <span>
#include <vector>

#include "dagrpo/environment.hpp"
#include "dagrpo/policy.hpp"

namespace dagrpo {

// One prompt with its G sampled responses.
struct GroupSample {
  PromptId prompt;
  std::vector<ActionId> local_actions;
  std::vector<Outcome> outcomes;
  // Set when a router sent the whole prompt to the cloud; such groups carry
  // no local learning signal.
  bool offloaded = false;

  std::size_t size() const { return local_actions.size(); }
  std::vector<double> rewards() const;
  std::vector<double> costs() const;
};

struct AdvantagePair {
  std::vector<double> reward_adv;     // A^r_i
  std::vector<double> cost_adv;       // A^c_i
  std::vector<double> dual_weighted;  // A^r_i - lambda * A^c_i
  double lambda_used = 0.0;
};

struct AdvantageOptions {
  // Divide the dual-weighted advantage by its group standard deviation.
  // Ablation only; breaks the exact A^r - lambda A^c identity.
  bool normalize_std = false;
};

// Mean-centred reward and cost advantages and their dual-weighted
// combination. Requires G >= 2, lambda >= 0 and finite inputs.
AdvantagePair group_advantages(std::span<const double> rewards,
                               std::span<const double> costs, double lambda,
                               AdvantageOptions options = {});

// Group-relative advantages of the shaped scalar reward r - lambda * c.
// An independent route to the same numbers as dual_weighted.
std::vector<double> shaped_reward_advantages(std::span<const double> rewards,
                                             std::span<const double> costs,
                                             double lambda);

}  // namespace dagrpo
