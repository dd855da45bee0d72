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

#include <cmath>
#include <sstream>

#include "dagrpo/errors.hpp"
#include "dagrpo/trainer.hpp"
#include "helpers.hpp"

using namespace dagrpo;
using dagrpo::testing::small_run;

namespace {

std::string csv(const RunArtifacts& art) {
  std::ostringstream out;
  write_metrics_csv(out, art.rows);
  return out.str();
}

struct Stepper {
  RunConfig config;
  TaskSchedule schedule;
  TrainState state;

  explicit Stepper(RunConfig c)
      : config(std::move(c)),
        schedule(make_continual_schedule(config.schedule, config.seed)),
        state(make_initial_state(config, schedule)) {
    set_task_target(state.dual, schedule.tasks[0].tau, 0);
  }
  IterationStats step(const RunHooks& hooks = {}) {
    return run_iteration(state, config, schedule.tasks[0], hooks);
  }
};

}  // namespace

TEST_CASE("strategy names") {
  for (auto s : {Strategy::kDaGrpo, Strategy::kFixedRewardGrpo,
                 Strategy::kNaiveRouter, Strategy::kTrainedRouter,
                 Strategy::kEdgeOnly}) {
    CHECK(parse_strategy(strategy_name(s)) == s);
  }
  CHECK(strategy_name(Strategy::kDaGrpo) == "da_grpo");
  CHECK_THROWS_AS(parse_strategy("random_forest"), ConfigError);
}

TEST_CASE("run config validation") {
  auto c = small_run();
  c.group_size = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_run();
  c.offload_prob = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_run();
  c.schedule.tasks[0].tau = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_run();
  c.batch_size = 0;
  CHECK_THROWS_AS(run_schedule(c), ConfigError);
}

TEST_CASE("zero policy step leaves parameters unchanged") {
  auto c = small_run();
  c.eta_theta = 0.0;
  Stepper s(c);
  const Matrix before = s.state.params.logits();
  for (int i = 0; i < 20; ++i) s.step();
  CHECK(s.state.params.logits() == before);
  CHECK(s.state.dual.history.size() == 20);
  CHECK(s.state.dual.lambda != 0.5);
  CHECK(s.state.iteration == 20);
}

TEST_CASE("zero dual step freezes lambda") {
  auto c = small_run(150);
  c.eta_lambda = 0.0;
  c.lambda_init = 0.7;
  const auto art = run_schedule(c);
  for (double l : art.lambda_history()) CHECK(l == 0.7);
}

TEST_CASE("a policy that never asks for help drives lambda to zero") {
  auto c = small_run();
  Stepper s(c);
  auto& logits = s.state.params.mutable_logits();
  for (std::size_t p = 0; p < logits.rows(); ++p) {
    logits(p, logits.cols() - 1) = -1000.0;
  }
  for (int i = 0; i < 250; ++i) {
    const auto st = s.step();
    CHECK(st.j_hat_c == 0.0);
  }
  CHECK(s.state.dual.lambda == 0.0);
  const int tail = 50;
  const auto& h = s.state.dual.history;
  for (std::size_t i = h.size() - tail; i < h.size(); ++i) {
    CHECK(h[i].lambda == 0.0);
  }
}

TEST_CASE("non-finite parameters abort the run") {
  auto c = small_run();
  Stepper s(c);
  s.state.params.mutable_logits()(0, 0) = std::nan("");
  CHECK_THROWS_AS(s.step(), RuntimeAbort);
}

TEST_CASE("one cloud draw per prompt per iteration") {
  auto c = small_run();
  c.strategy = Strategy::kFixedRewardGrpo;
  c.fixed_lambda = 0.0;
  c.schedule.tasks[0].tau = 0.9;
  for (int threads : {1, 3}) {
    c.threads = threads;
    int max_draws = 0, total = 0, calls = 0;
    RunHooks hooks;
    hooks.on_cloud_draws = [&](int, int, PromptId, int draws) {
      max_draws = std::max(max_draws, draws);
      total += draws;
      ++calls;
    };
    run_schedule(c, hooks);
    CHECK(max_draws == 1);
    CHECK(total > 0);
    CHECK(calls == 200 * c.batch_size);
  }
}

TEST_CASE("runs are deterministic and independent of the thread count") {
  auto c = small_run(120);
  const auto a = csv(run_schedule(c));
  CHECK(a == csv(run_schedule(c)));
  c.threads = 4;
  CHECK(a == csv(run_schedule(c)));
  c.threads = 1;
  c.seed = 12;
  CHECK(a != csv(run_schedule(c)));
}

TEST_CASE("two-phase run marks the task switch") {
  auto c = small_run(80, 0.3);
  c.schedule.num_prompts = 80;
  c.schedule.tasks.push_back(TaskConfig{70, 0.5, {}, {}});
  const auto art = run_schedule(c);
  REQUIRE(art.rows.size() == 150);
  for (std::size_t i = 0; i < art.rows.size(); ++i) {
    CHECK(art.rows[i].iteration == static_cast<int>(i));
    CHECK(art.rows[i].task_index == (i < 80 ? 0u : 1u));
  }
  const auto& targets = art.final_state->dual.targets;
  REQUIRE(targets.size() == 2);
  CHECK(targets[1].iteration == 80);
  CHECK(targets[1].tau == 0.5);
  CHECK(art.accuracy.size() == 2);
  CHECK(art.forgetting.size() == 2);
  CHECK(art.snapshots.back().label == "task1-end");
}

TEST_CASE("lambda turns at every target change") {
  RunConfig c;
  c.seed = 2;
  c.batch_size = 64;
  c.schedule.num_prompts = 100;
  c.schedule.prompts_per_task = 100;
  c.schedule.hard_fraction = 1.0;
  c.schedule.cloud_difficulty_spread = 0.15;
  c.eval_every = 1000;
  const int phase = 800;
  c.schedule.tasks = {
      TaskConfig{4 * phase, 0.1, {{phase, 0.5}, {2 * phase, 0.2}, {3 * phase, 0.7}}, {}}};
  const auto art = run_schedule(c);
  const auto lam = art.lambda_history();
  const auto j = art.j_hat_history();
  const double taus[4] = {0.1, 0.5, 0.2, 0.7};
  for (int b = 1; b < 4; ++b) {
    const std::size_t at = static_cast<std::size_t>(b * phase);
    const double ratio = trailing_ratio(std::span(j).first(at), 100);
    const double old_sign = ratio > taus[b - 1] ? 1.0 : -1.0;
    const double new_sign = ratio > taus[b] ? 1.0 : -1.0;
    CAPTURE(b);
    CAPTURE(ratio);
    CHECK(new_sign * (lam[at + 100] - lam[at - 1]) > 0.0);
    if (old_sign != new_sign) {
      CHECK(old_sign * (lam[at - 1] - lam[at - 101]) >= 0.0);
    }
  }
}

TEST_CASE("naive router with p = 0 evaluates like edge only") {
  auto c = small_run(150);
  c.strategy = Strategy::kEdgeOnly;
  const auto edge = run_schedule(c);
  c.strategy = Strategy::kNaiveRouter;
  c.offload_prob = 0.0;
  const auto naive = run_schedule(c);
  REQUIRE(edge.evals.size() == naive.evals.size());
  for (std::size_t i = 0; i < edge.evals.size(); ++i) {
    CHECK(edge.evals[i].joint_accuracy == naive.evals[i].joint_accuracy);
    CHECK(edge.evals[i].realized_ratio == naive.evals[i].realized_ratio);
    CHECK(edge.evals[i].realized_ratio == 0.0);
  }
  for (const auto& r : edge.rows) CHECK(r.j_hat_c == 0.0);
}

TEST_CASE("naive router offloads at its rate") {
  auto c = small_run(100);
  c.strategy = Strategy::kNaiveRouter;
  c.offload_prob = 0.4;
  const auto art = run_schedule(c);
  CHECK(trailing_ratio(art.j_hat_history(), 100) ==
        doctest::Approx(0.4).epsilon(0.1));
  CHECK(art.evals.back().realized_ratio == doctest::Approx(0.4));
}

TEST_CASE("fixed reward with lambda 0 overshoots the budget") {
  auto c = small_run(300, 0.3);
  c.strategy = Strategy::kFixedRewardGrpo;
  c.fixed_lambda = 0.0;
  const auto art = run_schedule(c);
  CHECK(trailing_ratio(art.j_hat_history(), 100) > 0.4);
  for (double l : art.lambda_history()) CHECK(l == 0.0);
}

TEST_CASE("trained router calibrates its offload rate to the budget") {
  auto c = small_run(400, 0.3);
  c.strategy = Strategy::kTrainedRouter;
  const auto art = run_schedule(c);
  const auto& router = art.final_state->router;
  CHECK(router.frozen);
  const double ratio = art.evals.back().realized_ratio;
  CHECK(ratio <= 0.3 + 1e-12);
  CHECK(ratio >= 0.15);
  CHECK(trailing_ratio(art.j_hat_history(), 100) == doctest::Approx(ratio).epsilon(0.2));
}

TEST_CASE("checkpoint snapshots follow checkpoint_every") {
  auto c = small_run(100);
  c.checkpoint_every = 40;
  const auto art = run_schedule(c);
  REQUIRE(art.snapshots.size() == 3);
  CHECK(art.snapshots[0].label == "iter000000040");
  CHECK(art.snapshots[1].label == "iter000000080");
  CHECK(art.snapshots[2].label == "task0-end");
  CHECK(art.snapshots[0].state.iteration == 40);
}

TEST_CASE("fixed lambda tuning picks a grid value") {
  auto c = small_run(150, 0.3);
  const std::vector<double> grid{0.0, 0.5, 5.0};
  const double best = tune_fixed_lambda(c, grid, 50);
  CHECK(best == 0.5);
}
