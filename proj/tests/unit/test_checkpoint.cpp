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

#include <doctest.h>

#include <sstream>

#include "dagrpo/checkpoint.hpp"
#include "dagrpo/errors.hpp"
#include "dagrpo/trainer.hpp"
#include "helpers.hpp"

using namespace dagrpo;

namespace {

std::string dump(const TrainState& s) {
  std::ostringstream out;
  write_checkpoint(out, s);
  return out.str();
}

TrainState trained(Strategy strategy) {
  auto c = dagrpo::testing::small_run(120);
  c.strategy = strategy;
  return *run_schedule(c).final_state;
}

}  // namespace

TEST_CASE("checkpoints round-trip exactly") {
  for (auto strategy : {Strategy::kDaGrpo, Strategy::kTrainedRouter}) {
    const TrainState s = trained(strategy);
    const std::string text = dump(s);
    std::istringstream in(text);
    const TrainState back = read_checkpoint(in);
    CHECK(back.params.logits() == s.params.logits());
    CHECK(back.dual.lambda == s.dual.lambda);
    CHECK(back.dual.tau_current == s.dual.tau_current);
    CHECK(back.dual.history.size() == s.dual.history.size());
    if (!s.dual.history.empty()) {
      CHECK(back.dual.history.back().j_hat_c == s.dual.history.back().j_hat_c);
    }
    CHECK(back.iteration == s.iteration);
    CHECK(back.seed == s.seed);
    CHECK(back.router.frozen == s.router.frozen);
    CHECK(back.router.offload == s.router.offload);
    CHECK(back.router.successes == s.router.successes);
    CHECK(dump(back) == text);
  }
}

TEST_CASE("malformed checkpoints are rejected") {
  const std::string text = dump(trained(Strategy::kDaGrpo));
  {
    std::istringstream in("dagrpo-checkpoint 99\n");
    CHECK_THROWS_AS(read_checkpoint(in), ConfigError);
  }
  {
    std::istringstream in(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(read_checkpoint(in), ConfigError);
  }
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/x.ckpt"), ConfigError);
}
