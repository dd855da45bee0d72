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

#include "dagrpo/metrics.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "dagrpo/errors.hpp"

namespace dagrpo {

EvalRecord evaluate(const PolicyParams& params, const TaskSpec& task,
                    const CloudOracle& oracle, const EvalOptions& options) {
  if (task.prompt_ids.empty()) throw DomainError("task has no prompts");
  if (!options.offload_prob.empty() &&
      options.offload_prob.size() != task.prompt_space()) {
    throw DomainError("offload_prob must cover the prompt space");
  }
  const ActionId help = task.help();
  double joint = 0.0, cloud_share = 0.0, local_w = 0.0, local_correct = 0.0;
  for (PromptId p : task.prompt_ids) {
    const double o =
        options.offload_prob.empty() ? 0.0 : options.offload_prob[p.index];
    const ActionId a = greedy_action(params, p, options.mode);
    const double s = a == help ? 1.0 : o;
    const bool right = a != help && task.locally_solvable[p.index] &&
                       a == task.correct_action[p.index];
    const double c = right ? 1.0 : 0.0;
    joint += s * oracle.accuracy_for(task, p) + (1.0 - s) * c;
    cloud_share += s;
    local_w += 1.0 - s;
    local_correct += (1.0 - s) * c;
  }
  const double n = static_cast<double>(task.prompt_ids.size());
  EvalRecord r;
  r.task_evaluated = task.task_id;
  r.joint_accuracy = joint / n;
  r.realized_ratio = cloud_share / n;
  r.local_fraction = local_w / n;
  r.local_count = local_w;
  r.prompt_count = task.prompt_ids.size();
  if (local_w > 0.0) r.local_only_accuracy = local_correct / local_w;
  return r;
}

ForgettingReport forgetting(double acc_task, double acc_switch) {
  if (!std::isfinite(acc_task) || !std::isfinite(acc_switch) ||
      acc_task < 0.0 || acc_switch < 0.0) {
    throw DomainError("accuracies must be finite and >= 0");
  }
  ForgettingReport r{acc_task, acc_switch, std::nullopt};
  if (acc_task > 0.0) r.forgetting_rate = (acc_task - acc_switch) / acc_task;
  return r;
}

double trailing_ratio(std::span<const double> history, std::size_t window) {
  if (window == 0) throw DomainError("empty window");
  if (window > history.size()) {
    throw DomainError("window " + std::to_string(window) +
                      " exceeds history length " +
                      std::to_string(history.size()));
  }
  double sum = 0.0;
  for (std::size_t i = history.size() - window; i < history.size(); ++i) {
    sum += history[i];
  }
  return sum / static_cast<double>(window);
}

std::string format_number(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  auto opt = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
  };
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    out << r.iteration << ',' << r.task_index << ',' << format_number(r.lambda)
        << ',' << format_number(r.j_hat_c) << ','
        << format_number(r.train_mean_reward) << ',' << opt(r.eval_joint_acc)
        << ',' << opt(r.eval_local_only_acc) << ','
        << opt(r.eval_local_fraction) << '\n';
  }
}

}  // namespace dagrpo
