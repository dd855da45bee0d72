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

#include "dagrpo/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "dagrpo/errors.hpp"
#include "dagrpo/estimator.hpp"
#include "dagrpo/kernels.hpp"
#include "dagrpo/rng.hpp"

namespace dagrpo {

namespace {

constexpr std::pair<Strategy, std::string_view> kStrategyNames[] = {
    {Strategy::kDaGrpo, "da_grpo"},
    {Strategy::kFixedRewardGrpo, "fixed_reward_grpo"},
    {Strategy::kNaiveRouter, "naive_router"},
    {Strategy::kTrainedRouter, "trained_router"},
    {Strategy::kEdgeOnly, "edge_only"},
};

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }
bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

struct SlotResult {
  GroupSample group;
  int cloud_draws = 0;
};

// Samples one group. Everything random is keyed by (iteration, slot), so
// slots may run on any thread in any order.
void sample_slot(const TrainState& state, const RunConfig& config,
                 const TaskSpec& task, const CloudOracle& oracle, int slot,
                 PromptId prompt, bool offloaded, SlotResult& out) {
  const auto iter = static_cast<std::uint32_t>(state.iteration);
  const auto s = static_cast<std::uint32_t>(slot);
  const int g = config.group_size;
  const ActionId help = task.help();
  const HelpMode mode = help_mode_for(config.strategy);

  GroupSample& group = out.group;
  group.prompt = prompt;
  group.offloaded = offloaded;
  group.local_actions.assign(g, help);
  group.outcomes.assign(g, Outcome{});

  bool any_help = offloaded;
  if (!offloaded) {
    const auto probs = action_probabilities(state.params, prompt, mode);
    for (int i = 0; i < g; ++i) {
      RngStream rs(state.seed, "response", iter, s, static_cast<std::uint32_t>(i));
      group.local_actions[i] = sample_from(probs, rs);
      any_help = any_help || group.local_actions[i] == help;
    }
  }
  ActionId cloud{0};
  if (any_help) {
    RngStream cs(state.seed, "cloud", iter, s);
    cloud = cloud_answer(oracle, task, prompt, cs);
    ++out.cloud_draws;
  }
  for (int i = 0; i < g; ++i) {
    RngStream fs(state.seed, "format", iter, s, static_cast<std::uint32_t>(i));
    Outcome& o = group.outcomes[i];
    o.prompt = prompt;
    o.local_action = group.local_actions[i];
    o.cloud_used = o.local_action == help;
    o.final_action = o.cloud_used ? compose(o.local_action, cloud, help)
                                  : o.local_action;
    o.format_ok = simulate_format(task, fs);
    const RewardCost rc = reward_and_cost(task, config.rewards, prompt,
                                          o.local_action, o.final_action,
                                          o.format_ok);
    o.reward = rc.reward;
    o.cost = rc.cost;
  }
}

void run_slots(const TrainState& state, const RunConfig& config,
               const TaskSpec& task, const CloudOracle& oracle,
               const std::vector<PromptId>& prompts,
               const std::vector<bool>& offload,
               std::vector<SlotResult>& results) {
  const int n = static_cast<int>(prompts.size());
  const int workers = std::clamp(config.threads, 1, n);
  auto work = [&](int w) {
    for (int s = w; s < n; s += workers) {
      sample_slot(state, config, task, oracle, s, prompts[s], offload[s],
                  results[s]);
    }
  };
  if (workers == 1) {
    work(0);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        work(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  try {
    work(0);
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int router_train_iterations(const RunConfig& config, const TaskSpec& task) {
  const int n = static_cast<int>(
      std::ceil(config.router_train_fraction * task.iterations));
  return std::clamp(n, 1, task.iterations);
}

double tau_in_effect(const TaskSpec& task, int task_iteration) {
  double tau = task.tau;
  for (const auto& ch : task.tau_changes) {
    if (ch.at <= task_iteration) tau = ch.tau;
  }
  return tau;
}

// Largest threshold whose held-out offload rate stays within tau; prompts
// whose estimated local success falls below it go to the cloud.
void calibrate_router(RouterState& router, const TaskSpec& task, double tau) {
  auto estimate = [&](PromptId p) {
    return (router.successes[p.index] + 1.0) / (router.trials[p.index] + 2.0);
  };
  std::vector<PromptId> holdout = router.holdout;
  if (holdout.empty()) holdout = task.prompt_ids;
  std::vector<double> held;
  held.reserve(holdout.size());
  for (PromptId p : holdout) held.push_back(estimate(p));
  std::sort(held.begin(), held.end());

  std::vector<double> candidates;
  for (PromptId p : task.prompt_ids) candidates.push_back(estimate(p));
  candidates.push_back(std::numeric_limits<double>::infinity());
  std::sort(candidates.begin(), candidates.end());

  double best = candidates.front();
  for (double t : candidates) {
    const auto below = std::lower_bound(held.begin(), held.end(), t) - held.begin();
    const double rate = static_cast<double>(below) / static_cast<double>(held.size());
    if (rate <= tau) best = t;
  }
  router.threshold = best;
  for (PromptId p : task.prompt_ids) router.offload[p.index] = estimate(p) < best;
  router.frozen = true;
}

void reset_router_for_task(RouterState& router, const TaskSpec& task) {
  for (PromptId p : task.prompt_ids) {
    router.successes[p.index] = 0.0;
    router.trials[p.index] = 0.0;
    router.offload[p.index] = false;
  }
  router.holdout.clear();
  router.frozen = false;
  router.threshold = 0.0;
}

double kahan_mean_reward(const std::vector<SlotResult>& results) {
  double sum = 0.0, comp = 0.0;
  std::size_t n = 0;
  for (const auto& r : results) {
    for (const auto& o : r.group.outcomes) {
      const double y = o.reward - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

}  // namespace

std::string_view strategy_name(Strategy s) {
  for (const auto& [v, name] : kStrategyNames) {
    if (v == s) return name;
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (const auto& [v, n] : kStrategyNames) {
    if (n == name) return v;
  }
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected da_grpo, fixed_reward_grpo, naive_router, "
                    "trained_router or edge_only)");
}

HelpMode help_mode_for(Strategy s) {
  return s == Strategy::kDaGrpo || s == Strategy::kFixedRewardGrpo
             ? HelpMode::kEnabled
             : HelpMode::kMasked;
}

void RunConfig::validate() const {
  if (group_size < 2) throw ConfigError("group_size must be >= 2");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!finite_nonneg(eta_theta)) throw ConfigError("eta_theta must be >= 0");
  if (!finite_nonneg(eta_lambda)) throw ConfigError("eta_lambda must be >= 0");
  if (!finite_nonneg(lambda_init)) {
    throw ConfigError("lambda_init must be >= 0");
  }
  if (!finite_nonneg(fixed_lambda)) {
    throw ConfigError("fixed_lambda must be >= 0");
  }
  for (double l : fixed_lambda_per_task) {
    if (!finite_nonneg(l)) {
      throw ConfigError("fixed_lambda_per_task entries must be >= 0");
    }
  }
  if (!fixed_lambda_per_task.empty() &&
      fixed_lambda_per_task.size() != schedule.tasks.size()) {
    throw ConfigError("fixed_lambda_per_task needs one entry per task");
  }
  if (!in_unit(offload_prob)) throw ConfigError("offload_prob must be in [0,1]");
  if (!(router_train_fraction > 0.0 && router_train_fraction <= 1.0)) {
    throw ConfigError("router_train_fraction must be in (0,1]");
  }
  if (!(router_holdout_fraction >= 0.0 && router_holdout_fraction < 1.0)) {
    throw ConfigError("router_holdout_fraction must be in [0,1)");
  }
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (!finite_nonneg(rewards.answer) || !finite_nonneg(rewards.format_penalty) ||
      !(std::isfinite(rewards.cloud_cost) && rewards.cloud_cost > 0.0)) {
    throw ConfigError(
        "rewards: answer and format_penalty must be >= 0, cloud_cost > 0");
  }
  if (!in_unit(cloud_accuracy)) {
    throw ConfigError("cloud_accuracy must be in [0,1]");
  }
  schedule.validate();
}

TrainState make_initial_state(const RunConfig& config,
                              const TaskSchedule& schedule) {
  const double tau = schedule.tasks.empty() ? 0.0 : schedule.tasks[0].tau;
  TrainState s{PolicyParams(schedule.num_prompts, schedule.num_answers),
               make_dual_state(config.lambda_init, config.eta_lambda, tau),
               0,
               0,
               0,
               config.seed,
               {}};
  const std::size_t space = schedule.num_prompts;
  s.router.successes.assign(space, 0.0);
  s.router.trials.assign(space, 0.0);
  s.router.offload.assign(space, false);
  return s;
}

double training_lambda(const TrainState& state, const RunConfig& config) {
  switch (config.strategy) {
    case Strategy::kDaGrpo:
      return state.dual.lambda;
    case Strategy::kFixedRewardGrpo:
      return config.fixed_lambda_per_task.empty()
                 ? config.fixed_lambda
                 : config.fixed_lambda_per_task.at(state.task_index);
    default:
      return 0.0;
  }
}

IterationStats run_iteration(TrainState& state, const RunConfig& config,
                             const TaskSpec& task, const RunHooks& hooks) {
  const CloudOracle oracle{config.cloud_accuracy};
  const auto iter = static_cast<std::uint32_t>(state.iteration);
  const int batch = config.batch_size;
  const bool trained_router = config.strategy == Strategy::kTrainedRouter;
  const bool router_training = trained_router && !state.router.frozen;

  // (1) prompts, and which of them a router sends straight to the cloud.
  std::vector<PromptId> prompts(batch);
  std::vector<bool> offload(batch, false);
  std::vector<bool> holdout(batch, false);
  RngStream bs(state.seed, "batch", iter);
  const auto n_task = static_cast<std::uint32_t>(task.prompt_ids.size());
  for (int s = 0; s < batch; ++s) {
    prompts[s] = task.prompt_ids[bs.below(n_task)];
    const auto slot = static_cast<std::uint32_t>(s);
    if (config.strategy == Strategy::kNaiveRouter) {
      RngStream rs(state.seed, "route", iter, slot);
      offload[s] = rs.bernoulli(config.offload_prob);
    } else if (trained_router) {
      if (state.router.frozen) {
        offload[s] = state.router.offload[prompts[s].index];
      } else {
        RngStream rs(state.seed, "route", iter, slot);
        holdout[s] = rs.bernoulli(config.router_holdout_fraction);
      }
    }
  }

  // (2)-(4) groups, shared cloud draw, rewards and costs.
  std::vector<SlotResult> results(batch);
  run_slots(state, config, task, oracle, prompts, offload, results);
  if (hooks.on_cloud_draws) {
    for (int s = 0; s < batch; ++s) {
      hooks.on_cloud_draws(state.iteration, s, prompts[s],
                           results[s].cloud_draws);
    }
  }

  std::vector<GroupSample> groups;
  groups.reserve(batch);
  for (auto& r : results) groups.push_back(r.group);

  // (5)-(6) advantages and the primal step, on locally answered groups only.
  const double lambda = training_lambda(state, config);
  std::vector<GroupSample> local;
  std::vector<AdvantagePair> advs;
  for (const auto& g : groups) {
    if (g.offloaded) continue;
    advs.push_back(group_advantages(g.rewards(), g.costs(), lambda,
                                    {config.normalize_std}));
    local.push_back(g);
  }
  if (!local.empty()) {
    const GradientAccumulator acc = batch_gradient(
        state.params, local, advs, help_mode_for(config.strategy));
    kernels::axpy(config.eta_theta, acc.grad.flat(),
                  state.params.mutable_logits().flat());
    state.params.check_finite();
  }

  // (7) usage estimate and the dual step.
  IterationStats stats;
  stats.iteration = state.iteration;
  stats.j_hat_c = empirical_cloud_usage(groups, config.rewards.cloud_cost);
  stats.train_mean_reward = kahan_mean_reward(results);
  stats.lambda_used = lambda;
  if (config.strategy == Strategy::kDaGrpo) {
    dual_update(state.dual, stats.j_hat_c, state.iteration);
  }

  if (router_training) {
    RouterState& router = state.router;
    for (int s = 0; s < batch; ++s) {
      const PromptId p = prompts[s];
      if (holdout[s]) {
        router.holdout.push_back(p);
        continue;
      }
      for (ActionId a : groups[s].local_actions) {
        router.trials[p.index] += 1.0;
        if (task.locally_solvable[p.index] && a == task.correct_action[p.index]) {
          router.successes[p.index] += 1.0;
        }
      }
    }
    if (state.task_iteration + 1 == router_train_iterations(config, task)) {
      calibrate_router(router, task,
                       tau_in_effect(task, state.task_iteration));
    }
  }

  ++state.iteration;
  ++state.task_iteration;
  stats.lambda_after = training_lambda(state, config);
  return stats;
}

std::vector<double> eval_offload(const TrainState& state,
                                 const RunConfig& config,
                                 const TaskSpec& task) {
  switch (config.strategy) {
    case Strategy::kNaiveRouter:
      return std::vector<double>(task.prompt_space(), config.offload_prob);
    case Strategy::kTrainedRouter: {
      std::vector<double> o(task.prompt_space(), 0.0);
      for (std::size_t i = 0; i < o.size() && i < state.router.offload.size(); ++i) {
        o[i] = state.router.offload[i] ? 1.0 : 0.0;
      }
      return o;
    }
    default:
      return {};
  }
}

EvalRecord evaluate_state(const TrainState& state, const RunConfig& config,
                          const TaskSpec& task, const CloudOracle& oracle) {
  const auto offload = eval_offload(state, config, task);
  EvalRecord r = evaluate(state.params, task, oracle,
                          {help_mode_for(config.strategy), offload});
  r.iteration = state.iteration - 1;
  r.lambda = training_lambda(state, config);
  return r;
}

std::vector<double> RunArtifacts::j_hat_history() const {
  std::vector<double> h;
  h.reserve(rows.size());
  for (const auto& r : rows) h.push_back(r.j_hat_c);
  return h;
}

std::vector<double> RunArtifacts::lambda_history() const {
  std::vector<double> h;
  h.reserve(rows.size());
  for (const auto& r : rows) h.push_back(r.lambda);
  return h;
}

RunArtifacts run_schedule(const RunConfig& config, const RunHooks& hooks) {
  config.validate();
  RunArtifacts art;
  art.schedule = make_continual_schedule(config.schedule, config.seed);
  const auto& tasks = art.schedule.tasks;
  const CloudOracle oracle{config.cloud_accuracy};
  TrainState state = make_initial_state(config, art.schedule);
  art.rows.reserve(art.schedule.total_iterations());

  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    const TaskSpec& task = tasks[ti];
    state.task_index = static_cast<std::uint32_t>(ti);
    state.task_iteration = 0;
    set_task_target(state.dual, task.tau, state.iteration);
    reset_router_for_task(state.router, task);
    std::size_t next_change = 0;

    for (int k = 0; k < task.iterations; ++k) {
      if (next_change < task.tau_changes.size() &&
          task.tau_changes[next_change].at == k) {
        set_task_target(state.dual, task.tau_changes[next_change].tau,
                        state.iteration);
        ++next_change;
      }
      const IterationStats st = run_iteration(state, config, task, hooks);
      MetricsRow row;
      row.iteration = st.iteration;
      row.task_index = state.task_index;
      row.lambda = st.lambda_after;
      row.j_hat_c = st.j_hat_c;
      row.train_mean_reward = st.train_mean_reward;
      if (state.iteration % config.eval_every == 0) {
        const EvalRecord ev = evaluate_state(state, config, task, oracle);
        row.eval_joint_acc = ev.joint_accuracy;
        row.eval_local_only_acc = ev.local_only_accuracy;
        row.eval_local_fraction = ev.local_fraction;
        art.evals.push_back(ev);
      }
      art.rows.push_back(row);
      if (config.checkpoint_every > 0 &&
          state.iteration % config.checkpoint_every == 0) {
        std::string label = std::to_string(state.iteration);
        label.insert(0, label.size() < 9 ? 9 - label.size() : 0, '0');
        art.snapshots.push_back({"iter" + label, state});
      }
    }

    std::vector<double> acc;
    std::vector<std::optional<double>> local_acc;
    for (const auto& other : tasks) {
      const EvalRecord ev = evaluate_state(state, config, other, oracle);
      acc.push_back(ev.joint_accuracy);
      local_acc.push_back(ev.local_only_accuracy);
    }
    art.accuracy.push_back(std::move(acc));
    art.local_only_accuracy.push_back(std::move(local_acc));
    art.snapshots.push_back({"task" + std::to_string(ti) + "-end", state});
  }

  for (std::size_t j = 0; j < tasks.size(); ++j) {
    art.forgetting.push_back(
        forgetting(art.accuracy[j][j], art.accuracy.back()[j]));
  }
  art.final_state = std::move(state);
  return art;
}

double tune_fixed_lambda(const RunConfig& config, std::span<const double> grid,
                         std::size_t window) {
  if (grid.empty()) throw DomainError("empty lambda grid");
  if (config.schedule.tasks.empty()) throw DomainError("schedule has no tasks");
  RunConfig c = config;
  c.strategy = Strategy::kFixedRewardGrpo;
  c.fixed_lambda_per_task.clear();
  c.schedule.tasks.resize(1);
  const TaskConfig& t0 = c.schedule.tasks[0];
  double tau = t0.tau;
  for (const auto& ch : t0.tau_changes) tau = ch.tau;

  double best = grid.front();
  double best_gap = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    c.fixed_lambda = lambda;
    const RunArtifacts art = run_schedule(c);
    const auto h = art.j_hat_history();
    const double gap =
        std::abs(trailing_ratio(h, std::min(window, h.size())) - tau);
    if (gap < best_gap) {
      best_gap = gap;
      best = lambda;
    }
  }
  return best;
}

}  // namespace dagrpo
