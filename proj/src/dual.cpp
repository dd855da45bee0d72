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

#include "dagrpo/dual.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dagrpo/errors.hpp"

namespace dagrpo {

namespace {

void check_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw DomainError("tau must be in [0,1], got " + std::to_string(tau));
  }
}

}  // namespace

void DualState::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("lambda must be finite and >= 0");
  }
  if (!(eta_lambda >= 0.0) || !std::isfinite(eta_lambda)) {
    throw DomainError("eta_lambda must be finite and >= 0");
  }
  check_tau(tau_current);
}

DualState make_dual_state(double lambda_init, double eta_lambda, double tau) {
  DualState s;
  s.lambda = lambda_init;
  s.eta_lambda = eta_lambda;
  s.tau_current = tau;
  s.validate();
  return s;
}

double empirical_cloud_usage(std::span<const GroupSample> groups,
                             double cost_unit) {
  if (groups.empty()) throw DomainError("empty batch");
  if (!(cost_unit > 0.0)) throw DomainError("cost unit must be > 0");
  const std::size_t g = groups.front().size();
  double total = 0.0;
  for (const auto& group : groups) {
    if (group.size() != g || g == 0) {
      throw DomainError("groups in a batch must share one group size");
    }
    double sum = 0.0;
    for (const auto& o : group.outcomes) sum += o.cost;
    total += sum / static_cast<double>(g);
  }
  const double rate =
      total / static_cast<double>(groups.size()) / cost_unit;
  return std::clamp(rate, 0.0, 1.0);
}

void dual_update(DualState& state, double j_hat_c, int iteration) {
  if (!(j_hat_c >= 0.0 && j_hat_c <= 1.0)) {
    throw DomainError("j_hat_c must be in [0,1], got " +
                      std::to_string(j_hat_c));
  }
  if (!state.history.empty() && iteration <= state.history.back().iteration) {
    throw DomainError("dual history iterations must increase");
  }
  const double next =
      std::max(0.0, state.lambda + state.eta_lambda * (j_hat_c - state.tau_current));
  if (!std::isfinite(next) || next > kLambdaAbortThreshold) {
    throw RuntimeAbort("lambda diverged to " + std::to_string(next) +
                       " at iteration " + std::to_string(iteration) +
                       "; eta_lambda is likely too large");
  }
  state.lambda = next;
  state.history.push_back({iteration, next, j_hat_c});
}

void set_task_target(DualState& state, double tau, int iteration) {
  check_tau(tau);
  state.tau_current = tau;
  state.targets.push_back({iteration, tau});
}

}  // namespace dagrpo
