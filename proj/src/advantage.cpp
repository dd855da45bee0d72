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

#include "dagrpo/advantage.hpp"

#include <cmath>
#include <string>

#include "dagrpo/errors.hpp"

namespace dagrpo {

namespace {

void check_inputs(std::span<const double> rewards,
                  std::span<const double> costs, double lambda) {
  if (rewards.size() != costs.size()) {
    throw DomainError("rewards and costs differ in length");
  }
  if (rewards.size() < 2) {
    throw DomainError("group size must be >= 2, got " +
                      std::to_string(rewards.size()));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("lambda must be finite and >= 0");
  }
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (!std::isfinite(rewards[i]) || !std::isfinite(costs[i])) {
      throw DomainError("non-finite reward or cost at index " +
                        std::to_string(i));
    }
  }
}

std::vector<double> centred(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - mean;
  return out;
}

}  // namespace

std::vector<double> GroupSample::rewards() const {
  std::vector<double> r;
  r.reserve(outcomes.size());
  for (const auto& o : outcomes) r.push_back(o.reward);
  return r;
}

std::vector<double> GroupSample::costs() const {
  std::vector<double> c;
  c.reserve(outcomes.size());
  for (const auto& o : outcomes) c.push_back(o.cost);
  return c;
}

AdvantagePair group_advantages(std::span<const double> rewards,
                               std::span<const double> costs, double lambda,
                               AdvantageOptions options) {
  check_inputs(rewards, costs, lambda);
  AdvantagePair out;
  out.lambda_used = lambda;
  out.reward_adv = centred(rewards);
  out.cost_adv = centred(costs);
  out.dual_weighted.resize(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out.dual_weighted[i] = out.reward_adv[i] - lambda * out.cost_adv[i];
  }
  if (options.normalize_std) {
    double sq = 0.0;
    for (double a : out.dual_weighted) sq += a * a;
    const double sd = std::sqrt(sq / static_cast<double>(rewards.size()));
    if (sd > 0.0) {
      for (double& a : out.dual_weighted) a /= sd;
    }
  }
  return out;
}

std::vector<double> shaped_reward_advantages(std::span<const double> rewards,
                                             std::span<const double> costs,
                                             double lambda) {
  check_inputs(rewards, costs, lambda);
  std::vector<double> shaped(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    shaped[i] = rewards[i] - lambda * costs[i];
  }
  return centred(shaped);
}

}  // namespace dagrpo
