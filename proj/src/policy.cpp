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

#include "dagrpo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dagrpo/errors.hpp"
#include "dagrpo/kernels.hpp"

namespace dagrpo {

PolicyParams::PolicyParams(std::size_t num_prompts, std::size_t num_answers)
    : logits_(num_prompts, num_answers + 1, 0.0) {
  if (num_prompts == 0) throw DomainError("policy needs at least one prompt");
  if (num_answers == 0) throw DomainError("policy needs at least one answer");
}

PolicyParams::PolicyParams(Matrix logits) : logits_(std::move(logits)) {
  if (logits_.rows() == 0 || logits_.cols() < 2) {
    throw DomainError("policy logits need >=1 row and >=2 columns");
  }
}

void PolicyParams::check_finite() const {
  if (kernels::all_finite(logits_.flat())) return;
  for (std::size_t r = 0; r < logits_.rows(); ++r) {
    for (std::size_t c = 0; c < logits_.cols(); ++c) {
      if (!std::isfinite(logits_(r, c))) {
        throw RuntimeAbort("non-finite policy logit at prompt " +
                           std::to_string(r) + ", action " +
                           std::to_string(c) + "; reduce eta_theta");
      }
    }
  }
}

void check_prompt(const PolicyParams& params, PromptId prompt) {
  if (prompt.index >= params.num_prompts()) {
    throw DomainError("prompt " + std::to_string(prompt.index) +
                      " out of range [0, " +
                      std::to_string(params.num_prompts()) + ")");
  }
}

void check_action(const PolicyParams& params, ActionId action) {
  if (action.index >= params.num_actions()) {
    throw DomainError("action " + std::to_string(action.index) +
                      " out of range [0, " +
                      std::to_string(params.num_actions()) + ")");
  }
}

std::vector<double> action_probabilities(const PolicyParams& params,
                                         PromptId prompt, HelpMode mode) {
  check_prompt(params, prompt);
  const auto row = params.logits().row(prompt.index);
  const std::size_t live =
      mode == HelpMode::kMasked ? row.size() - 1 : row.size();
  std::vector<double> p(row.size(), 0.0);
  const double hi = *std::max_element(row.begin(), row.begin() + live);
  double total = 0.0;
  for (std::size_t j = 0; j < live; ++j) {
    p[j] = std::exp(row[j] - hi);
    total += p[j];
  }
  for (std::size_t j = 0; j < live; ++j) p[j] /= total;
  return p;
}

ActionId sample_from(std::span<const double> probs, RngStream& stream) {
  const double u = stream.uniform();
  double cdf = 0.0;
  std::size_t last_live = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    last_live = j;
    cdf += probs[j];
    if (u < cdf) return {static_cast<std::uint32_t>(j)};
  }
  // Rounding left cdf a hair below 1.
  return {static_cast<std::uint32_t>(last_live)};
}

ActionId sample_action(const PolicyParams& params, PromptId prompt,
                       RngStream& stream, HelpMode mode) {
  const auto p = action_probabilities(params, prompt, mode);
  return sample_from(p, stream);
}

void add_log_prob_gradient_row(std::span<const double> probs, ActionId action,
                               double weight, std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double indicator = j == action.index ? 1.0 : 0.0;
    out[j] += weight * (indicator - probs[j]);
  }
}

Matrix log_prob_gradient(const PolicyParams& params, PromptId prompt,
                         ActionId action, HelpMode mode) {
  check_action(params, action);
  const auto p = action_probabilities(params, prompt, mode);
  if (mode == HelpMode::kMasked && params.is_help(action)) {
    throw DomainError("HELP has zero probability under a masked policy");
  }
  Matrix g(params.num_prompts(), params.num_actions(), 0.0);
  add_log_prob_gradient_row(p, action, 1.0, g.row(prompt.index));
  return g;
}

ActionId greedy_action(const PolicyParams& params, PromptId prompt,
                       HelpMode mode) {
  check_prompt(params, prompt);
  const auto row = params.logits().row(prompt.index);
  const std::size_t live =
      mode == HelpMode::kMasked ? row.size() - 1 : row.size();
  std::size_t best = 0;
  for (std::size_t j = 1; j < live; ++j) {
    if (row[j] > row[best]) best = j;
  }
  return {static_cast<std::uint32_t>(best)};
}

}  // namespace dagrpo
