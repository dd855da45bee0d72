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

// Tabular softmax policy over a finite prompt set. Each prompt row holds
// K answer logits followed by one HELP logit (always the last column).

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dagrpo/rng.hpp"

namespace dagrpo {

struct PromptId {
  std::uint32_t index = 0;
  auto operator<=>(const PromptId&) const = default;
};

struct ActionId {
  std::uint32_t index = 0;
  auto operator<=>(const ActionId&) const = default;
};

// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  bool same_shape(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Whether the HELP action may be selected. Local-only strategies train and
// act with HELP masked out (its probability is exactly zero).
enum class HelpMode { kEnabled, kMasked };

class PolicyParams {
 public:
  // Zero logits: the uniform policy.
  PolicyParams(std::size_t num_prompts, std::size_t num_answers);
  explicit PolicyParams(Matrix logits);

  std::size_t num_prompts() const { return logits_.rows(); }
  std::size_t num_answers() const { return logits_.cols() - 1; }
  std::size_t num_actions() const { return logits_.cols(); }
  ActionId help() const {
    return {static_cast<std::uint32_t>(logits_.cols() - 1)};
  }
  bool is_help(ActionId a) const { return a == help(); }

  const Matrix& logits() const { return logits_; }
  Matrix& mutable_logits() { return logits_; }

  // Throws RuntimeAbort naming the first non-finite entry.
  void check_finite() const;

 private:
  Matrix logits_;
};

void check_prompt(const PolicyParams& params, PromptId prompt);
void check_action(const PolicyParams& params, ActionId action);

// Softmax of the prompt's logit row. Throws DomainError for an out-of-range
// prompt.
std::vector<double> action_probabilities(const PolicyParams& params,
                                         PromptId prompt,
                                         HelpMode mode = HelpMode::kEnabled);

ActionId sample_action(const PolicyParams& params, PromptId prompt,
                       RngStream& stream, HelpMode mode = HelpMode::kEnabled);

// Inverse-CDF draw from an explicit probability vector.
ActionId sample_from(std::span<const double> probs, RngStream& stream);

// Gradient of log pi(action | prompt) w.r.t. all logits: zero outside the
// prompt row, [j == action] - softmax_j inside it.
Matrix log_prob_gradient(const PolicyParams& params, PromptId prompt,
                         ActionId action, HelpMode mode = HelpMode::kEnabled);

// Row-only variant used by the estimator hot path: adds
// weight * ([j == action] - probs[j]) into out.
void add_log_prob_gradient_row(std::span<const double> probs, ActionId action,
                               double weight, std::span<double> out);

// Argmax with lowest-index tie-breaking.
ActionId greedy_action(const PolicyParams& params, PromptId prompt,
                       HelpMode mode = HelpMode::kEnabled);

}  // namespace dagrpo
