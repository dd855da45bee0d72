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

// Self-checks run by `dagrpo verify`: exact unbiasedness of the group
// estimator on random small instances, and convergence of the dual update
// against a stub usage curve.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dagrpo {

struct UnbiasednessReport {
  int instances = 0;
  int failures = 0;
  double max_abs_error = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  bool pass() const { return instances > 0 && failures == 0; }
};

// Instances over K in {2,3}, G in {2,3}, lambda in {0, 0.5, 2}, cloud
// accuracy in {0.5, 1}, format noise in {0, 0.1}, with random logits in
// [-2, 2], answers and solvability. Compares the enumerated estimator mean
// against the closed-form gradient entrywise.
UnbiasednessReport verify_unbiasedness(std::uint64_t seed, int instances = 60,
                                       double tolerance = 1e-10);

// Decreasing stub usage curve sigma(5 (1 - lambda)).
double stub_usage(double lambda);

struct FixedPointResult {
  double tau = 0.0;
  double lambda = 0.0;
  double usage = 0.0;
  double gap = 0.0;  // |usage - tau|
  bool pass = false;
};

std::vector<FixedPointResult> verify_dual_fixed_point(
    std::span<const double> taus, int steps = 10'000, double eta_lambda = 0.01,
    double lambda_init = 0.5, double tolerance = 1e-3);

}  // namespace dagrpo
