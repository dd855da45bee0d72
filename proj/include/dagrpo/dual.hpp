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

// Projected dual ascent on the cloud-usage multiplier.

#pragma once

#include <span>
#include <vector>

#include "dagrpo/advantage.hpp"

namespace dagrpo {

struct DualRecord {
  int iteration = 0;
  double lambda = 0.0;  // after the update
  double j_hat_c = 0.0;
};

struct TargetRecord {
  int iteration = 0;
  double tau = 0.0;
};

// Runaway guard: a multiplier this large means eta_lambda is misconfigured.
inline constexpr double kLambdaAbortThreshold = 1e6;

struct DualState {
  double lambda = 0.5;
  double eta_lambda = 1e-2;
  double tau_current = 0.0;
  std::vector<DualRecord> history;
  std::vector<TargetRecord> targets;

  // Throws DomainError unless lambda >= 0, eta_lambda >= 0 and tau in [0,1].
  void validate() const;
};

DualState make_dual_state(double lambda_init, double eta_lambda, double tau);

// Mean over groups of the per-group mean cost, divided by cost_unit so the
// result is a rate in [0, 1]. Throws DomainError on an empty batch, mixed
// group sizes or cost_unit <= 0.
double empirical_cloud_usage(std::span<const GroupSample> groups,
                             double cost_unit = 1.0);

// lambda <- max(0, lambda + eta_lambda * (j_hat_c - tau)), appended to the
// history under `iteration`. Throws DomainError when j_hat_c is outside
// [0,1] or the iteration does not advance; RuntimeAbort when lambda leaves
// the finite range or exceeds kLambdaAbortThreshold.
void dual_update(DualState& state, double j_hat_c, int iteration);

// Replaces the target; lambda is carried over unchanged.
void set_task_target(DualState& state, double tau, int iteration);

}  // namespace dagrpo
