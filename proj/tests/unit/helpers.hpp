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

#include <cstdint>
#include <vector>

#include "dagrpo/environment.hpp"
#include "dagrpo/trainer.hpp"

namespace dagrpo::testing {

// Single task over prompts 0..n-1 with the given answers; every prompt is
// locally solvable unless listed in `hard`.
inline TaskSpec make_task(std::uint32_t num_answers,
                          std::vector<std::uint32_t> answers,
                          std::vector<std::uint32_t> hard = {},
                          double format_p = 0.0) {
  TaskSpec t;
  t.num_answers = num_answers;
  for (std::uint32_t p = 0; p < answers.size(); ++p) {
    t.prompt_ids.push_back({p});
    t.correct_action.push_back({answers[p]});
    t.locally_solvable.push_back(true);
    t.cloud_difficulty.push_back(0.0);
  }
  for (auto h : hard) t.locally_solvable[h] = false;
  t.iterations = 10;
  t.tau = 0.3;
  t.format_violation_prob = format_p;
  return t;
}

// Small single-task run used by the trainer and CLI tests.
inline RunConfig small_run(int iterations = 200, double tau = 0.3) {
  RunConfig c;
  c.seed = 11;
  c.batch_size = 32;
  c.eval_every = 50;
  c.schedule.num_prompts = 40;
  c.schedule.prompts_per_task = 40;
  c.schedule.hard_fraction = 0.5;
  c.schedule.cloud_difficulty_spread = 0.5;
  c.schedule.tasks = {TaskConfig{iterations, tau, {}, {}}};
  return c;
}

}  // namespace dagrpo::testing
