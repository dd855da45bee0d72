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

#include "dagrpo/verify.hpp"

#include <chrono>
#include <cmath>

#include "dagrpo/dual.hpp"
#include "dagrpo/estimator.hpp"
#include "dagrpo/rng.hpp"

namespace dagrpo {

UnbiasednessReport verify_unbiasedness(std::uint64_t seed, int instances,
                                       double tolerance) {
  const auto start = std::chrono::steady_clock::now();
  constexpr std::uint32_t kPrompts = 2;
  constexpr double kLambdas[] = {0.0, 0.5, 2.0};
  UnbiasednessReport rep;
  rep.tolerance = tolerance;

  for (int n = 0; n < instances; ++n) {
    RngStream rng(seed, "verify", static_cast<std::uint32_t>(n));
    // The first 48 instances walk the full grid; later ones add per-prompt
    // cloud difficulty, random reward weights and a masked HELP action.
    const int cell = n % 48;
    const bool extended = n >= 48;
    const std::uint32_t k = 2 + cell % 2;
    const int g = 2 + (cell / 2) % 2;
    const double lambda = kLambdas[(cell / 4) % 3];
    const double accuracy = (cell / 12) % 2 == 0 ? 0.5 : 1.0;
    const double format_p = (cell / 24) % 2 == 0 ? 0.0 : 0.1;
    const HelpMode mode =
        extended && n % 4 == 3 ? HelpMode::kMasked : HelpMode::kEnabled;

    TaskSpec task;
    task.num_answers = k;
    task.format_violation_prob = format_p;
    for (std::uint32_t p = 0; p < kPrompts; ++p) {
      task.prompt_ids.push_back({p});
      task.correct_action.push_back({rng.below(k)});
      task.locally_solvable.push_back(rng.bernoulli(0.5));
      task.cloud_difficulty.push_back(extended ? 0.5 * rng.uniform() : 0.0);
    }
    const CloudOracle oracle{accuracy};
    const RewardWeights w =
        extended ? RewardWeights{0.5 + rng.uniform(), 0.3 * rng.uniform(),
                                 0.5 + rng.uniform()}
                 : RewardWeights{};
    Matrix logits(kPrompts, k + 1);
    for (double& x : logits.flat()) x = 4.0 * rng.uniform() - 2.0;
    const PolicyParams params(std::move(logits));
    const PromptId prompt{rng.below(kPrompts)};

    const Matrix exact = brute_force_policy_gradient(params, task, oracle, w,
                                                     prompt, lambda, mode);
    const Matrix mean = enumerate_estimator_expectation(
        params, task, oracle, w, prompt, lambda, g, mode);
    double err = 0.0;
    for (std::size_t i = 0; i < exact.flat().size(); ++i) {
      err = std::max(err, std::abs(exact.flat()[i] - mean.flat()[i]));
    }
    rep.max_abs_error = std::max(rep.max_abs_error, err);
    if (!(err <= tolerance)) ++rep.failures;
    ++rep.instances;
  }
  rep.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return rep;
}

double stub_usage(double lambda) {
  return 1.0 / (1.0 + std::exp(-5.0 * (1.0 - lambda)));
}

std::vector<FixedPointResult> verify_dual_fixed_point(
    std::span<const double> taus, int steps, double eta_lambda,
    double lambda_init, double tolerance) {
  std::vector<FixedPointResult> out;
  for (double tau : taus) {
    DualState s = make_dual_state(lambda_init, eta_lambda, tau);
    for (int t = 0; t < steps; ++t) dual_update(s, stub_usage(s.lambda), t);
    FixedPointResult r;
    r.tau = tau;
    r.lambda = s.lambda;
    r.usage = stub_usage(s.lambda);
    r.gap = std::abs(r.usage - tau);
    r.pass = r.gap <= tolerance;
    out.push_back(r);
  }
  return out;
}

}  // namespace dagrpo
