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

#include "dagrpo/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <string_view>

#include "dagrpo/errors.hpp"
#include "dagrpo/rng.hpp"

namespace dagrpo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail_at(const YAML::Mark& m, const std::string& what) {
  if (m.is_null()) throw ConfigError(what);
  throw ConfigError(what + " (line " + std::to_string(m.line + 1) +
                        ", column " + std::to_string(m.column + 1) + ")",
                    m.line + 1, m.column + 1);
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) {
  fail_at(n.Mark(), what);
}

YAML::Node parse_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail_at(e.mark, "YAML syntax error: " + e.msg);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void require_map(const YAML::Node& n, const std::string& field) {
  if (!n.IsMap()) fail(n, field + " must be a mapping");
}

void check_keys(const YAML::Node& map, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) {
      fail(kv.first, "unknown key '" + key + "'" +
                         (where.empty() ? "" : " in " + where));
    }
  }
}

template <typename T>
T scalar_as(const YAML::Node& n, const std::string& field, const char* kind) {
  if (!n.IsScalar()) fail(n, field + " must be " + kind);
  try {
    return n.as<T>();
  } catch (const YAML::BadConversion&) {
    fail(n, field + " must be " + kind + ", got '" + n.Scalar() + "'");
  }
}

double real_in(const YAML::Node& n, const std::string& field, double lo,
               double hi, bool lo_open = false, bool hi_open = false) {
  const double v = scalar_as<double>(n, field, "a number");
  const bool ok = std::isfinite(v) && (lo_open ? v > lo : v >= lo) &&
                  (hi_open ? v < hi : v <= hi);
  if (!ok) {
    std::string range = std::string(lo_open ? "(" : "[") + std::to_string(lo) +
                        ", " + (hi == kInf ? "inf" : std::to_string(hi)) +
                        (hi_open || hi == kInf ? ")" : "]");
    fail(n, field + " = " + n.Scalar() + " is outside " + range);
  }
  return v;
}

int int_at_least(const YAML::Node& n, const std::string& field, int lo) {
  const int v = scalar_as<int>(n, field, "an integer");
  if (v < lo) {
    fail(n, field + " = " + n.Scalar() + " must be >= " + std::to_string(lo));
  }
  return v;
}

// Runs `f` on map[key] when present.
void with(const YAML::Node& map, const char* key,
          const std::function<void(const YAML::Node&)>& f) {
  const YAML::Node n = map[key];
  if (n) f(n);
}

std::vector<double> real_list(const YAML::Node& n, const std::string& field,
                              double lo, double hi) {
  if (!n.IsSequence()) fail(n, field + " must be a list");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    out.push_back(real_in(n[i], field + "[" + std::to_string(i) + "]", lo, hi));
  }
  return out;
}

void parse_task(const YAML::Node& n, const std::string& where, TaskConfig& t) {
  require_map(n, where);
  check_keys(n, where, {"iterations", "tau", "tau_changes", "hard_fraction"});
  if (!n["iterations"]) fail(n, where + " needs 'iterations'");
  if (!n["tau"]) fail(n, where + " needs 'tau'");
  t.iterations = int_at_least(n["iterations"], where + ".iterations", 1);
  t.tau = real_in(n["tau"], where + ".tau", 0.0, 1.0);
  with(n, "hard_fraction", [&](const YAML::Node& v) {
    t.hard_fraction = real_in(v, where + ".hard_fraction", 0.0, 1.0);
  });
  with(n, "tau_changes", [&](const YAML::Node& seq) {
    if (!seq.IsSequence()) fail(seq, where + ".tau_changes must be a list");
    t.tau_changes.clear();
    int last = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const std::string w = where + ".tau_changes[" + std::to_string(i) + "]";
      const YAML::Node c = seq[i];
      require_map(c, w);
      check_keys(c, w, {"at", "tau"});
      if (!c["at"] || !c["tau"]) fail(c, w + " needs 'at' and 'tau'");
      TauChange ch;
      ch.at = int_at_least(c["at"], w + ".at", last + 1);
      if (ch.at >= t.iterations) {
        fail(c["at"], w + ".at must be below the task's iterations");
      }
      ch.tau = real_in(c["tau"], w + ".tau", 0.0, 1.0);
      last = ch.at;
      t.tau_changes.push_back(ch);
    }
  });
}

void parse_schedule(const YAML::Node& n, ScheduleConfig& s) {
  require_map(n, "schedule");
  check_keys(n, "schedule",
             {"num_prompts", "num_answers", "prompts_per_task", "overlap",
              "hard_fraction", "cloud_difficulty_spread",
              "format_violation_prob", "tasks"});
  with(n, "num_prompts", [&](const YAML::Node& v) {
    s.num_prompts = int_at_least(v, "schedule.num_prompts", 1);
  });
  with(n, "num_answers", [&](const YAML::Node& v) {
    s.num_answers = int_at_least(v, "schedule.num_answers", 1);
  });
  with(n, "prompts_per_task", [&](const YAML::Node& v) {
    s.prompts_per_task = int_at_least(v, "schedule.prompts_per_task", 1);
  });
  with(n, "overlap", [&](const YAML::Node& v) {
    s.overlap = real_in(v, "schedule.overlap", 0.0, 1.0);
  });
  with(n, "hard_fraction", [&](const YAML::Node& v) {
    s.hard_fraction = real_in(v, "schedule.hard_fraction", 0.0, 1.0);
  });
  with(n, "cloud_difficulty_spread", [&](const YAML::Node& v) {
    s.cloud_difficulty_spread =
        real_in(v, "schedule.cloud_difficulty_spread", 0.0, 1.0);
  });
  with(n, "format_violation_prob", [&](const YAML::Node& v) {
    s.format_violation_prob =
        real_in(v, "schedule.format_violation_prob", 0.0, 1.0);
  });
  const YAML::Node tasks = n["tasks"];
  if (!tasks) fail(n, "schedule needs 'tasks'");
  if (!tasks.IsSequence() || tasks.size() == 0) {
    fail(tasks, "schedule.tasks must be a non-empty list");
  }
  s.tasks.assign(tasks.size(), TaskConfig{});
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    parse_task(tasks[i], "schedule.tasks[" + std::to_string(i) + "]",
               s.tasks[i]);
  }
}

void parse_run_node(const YAML::Node& root, RunConfig& c) {
  require_map(root, "run config");
  check_keys(root, "",
             {"seed", "strategy", "group_size", "batch_size", "eta_theta",
              "eta_lambda", "lambda_init", "fixed_lambda",
              "fixed_lambda_per_task", "offload_prob", "router_train_fraction",
              "router_holdout_fraction", "eval_every", "threads",
              "normalize_std", "checkpoint_every", "cloud_accuracy", "rewards",
              "schedule"});
  with(root, "seed", [&](const YAML::Node& v) {
    c.seed = scalar_as<std::uint64_t>(v, "seed", "a non-negative integer");
  });
  with(root, "strategy", [&](const YAML::Node& v) {
    try {
      c.strategy = parse_strategy(scalar_as<std::string>(v, "strategy", "a name"));
    } catch (const ConfigError& e) {
      fail(v, e.what());
    }
  });
  with(root, "group_size", [&](const YAML::Node& v) {
    c.group_size = int_at_least(v, "group_size", 2);
  });
  with(root, "batch_size", [&](const YAML::Node& v) {
    c.batch_size = int_at_least(v, "batch_size", 1);
  });
  with(root, "eta_theta", [&](const YAML::Node& v) {
    c.eta_theta = real_in(v, "eta_theta", 0.0, kInf);
  });
  with(root, "eta_lambda", [&](const YAML::Node& v) {
    c.eta_lambda = real_in(v, "eta_lambda", 0.0, kInf);
  });
  with(root, "lambda_init", [&](const YAML::Node& v) {
    c.lambda_init = real_in(v, "lambda_init", 0.0, kInf);
  });
  with(root, "fixed_lambda", [&](const YAML::Node& v) {
    c.fixed_lambda = real_in(v, "fixed_lambda", 0.0, kInf);
  });
  with(root, "fixed_lambda_per_task", [&](const YAML::Node& v) {
    c.fixed_lambda_per_task = real_list(v, "fixed_lambda_per_task", 0.0, kInf);
  });
  with(root, "offload_prob", [&](const YAML::Node& v) {
    c.offload_prob = real_in(v, "offload_prob", 0.0, 1.0);
  });
  with(root, "router_train_fraction", [&](const YAML::Node& v) {
    c.router_train_fraction =
        real_in(v, "router_train_fraction", 0.0, 1.0, true, false);
  });
  with(root, "router_holdout_fraction", [&](const YAML::Node& v) {
    c.router_holdout_fraction =
        real_in(v, "router_holdout_fraction", 0.0, 1.0, false, true);
  });
  with(root, "eval_every", [&](const YAML::Node& v) {
    c.eval_every = int_at_least(v, "eval_every", 1);
  });
  with(root, "threads", [&](const YAML::Node& v) {
    c.threads = int_at_least(v, "threads", 1);
  });
  with(root, "normalize_std", [&](const YAML::Node& v) {
    c.normalize_std = scalar_as<bool>(v, "normalize_std", "true or false");
  });
  with(root, "checkpoint_every", [&](const YAML::Node& v) {
    c.checkpoint_every = int_at_least(v, "checkpoint_every", 0);
  });
  with(root, "cloud_accuracy", [&](const YAML::Node& v) {
    c.cloud_accuracy = real_in(v, "cloud_accuracy", 0.0, 1.0);
  });
  with(root, "rewards", [&](const YAML::Node& r) {
    require_map(r, "rewards");
    check_keys(r, "rewards", {"answer", "format_penalty", "cloud_cost"});
    with(r, "answer", [&](const YAML::Node& v) {
      c.rewards.answer = real_in(v, "rewards.answer", 0.0, kInf);
    });
    with(r, "format_penalty", [&](const YAML::Node& v) {
      c.rewards.format_penalty = real_in(v, "rewards.format_penalty", 0.0, kInf);
    });
    with(r, "cloud_cost", [&](const YAML::Node& v) {
      c.rewards.cloud_cost = real_in(v, "rewards.cloud_cost", 0.0, kInf, true);
    });
  });
  const YAML::Node sched = root["schedule"];
  if (!sched) fail(root, "run config needs 'schedule'");
  parse_schedule(sched, c.schedule);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    fail(root, e.what());
  }
}

nlohmann::ordered_json to_json(const RunConfig& c, bool with_seed) {
  nlohmann::ordered_json j;
  if (with_seed) j["seed"] = c.seed;
  j["strategy"] = std::string(strategy_name(c.strategy));
  j["group_size"] = c.group_size;
  j["batch_size"] = c.batch_size;
  j["eta_theta"] = c.eta_theta;
  j["eta_lambda"] = c.eta_lambda;
  j["lambda_init"] = c.lambda_init;
  j["fixed_lambda"] = c.fixed_lambda;
  j["fixed_lambda_per_task"] = c.fixed_lambda_per_task;
  j["offload_prob"] = c.offload_prob;
  j["router_train_fraction"] = c.router_train_fraction;
  j["router_holdout_fraction"] = c.router_holdout_fraction;
  j["eval_every"] = c.eval_every;
  j["threads"] = c.threads;
  j["normalize_std"] = c.normalize_std;
  j["checkpoint_every"] = c.checkpoint_every;
  j["cloud_accuracy"] = c.cloud_accuracy;
  j["rewards"] = {{"answer", c.rewards.answer},
                  {"format_penalty", c.rewards.format_penalty},
                  {"cloud_cost", c.rewards.cloud_cost}};
  const ScheduleConfig& s = c.schedule;
  nlohmann::ordered_json sj;
  sj["num_prompts"] = s.num_prompts;
  sj["num_answers"] = s.num_answers;
  sj["prompts_per_task"] = s.prompts_per_task;
  sj["overlap"] = s.overlap;
  sj["hard_fraction"] = s.hard_fraction;
  sj["cloud_difficulty_spread"] = s.cloud_difficulty_spread;
  sj["format_violation_prob"] = s.format_violation_prob;
  sj["tasks"] = nlohmann::ordered_json::array();
  for (const auto& t : s.tasks) {
    nlohmann::ordered_json tj;
    tj["iterations"] = t.iterations;
    tj["tau"] = t.tau;
    tj["tau_changes"] = nlohmann::ordered_json::array();
    for (const auto& ch : t.tau_changes) {
      tj["tau_changes"].push_back({{"at", ch.at}, {"tau", ch.tau}});
    }
    if (t.hard_fraction) tj["hard_fraction"] = *t.hard_fraction;
    sj["tasks"].push_back(tj);
  }
  j["schedule"] = sj;
  return j;
}

std::string hex16(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = kDigits[v & 0xf];
  return s;
}

int phase_count(const ScheduleConfig& s) {
  int n = 0;
  for (const auto& t : s.tasks) n += 1 + static_cast<int>(t.tau_changes.size());
  return n;
}

void apply_tau_schedule(ScheduleConfig& s, const std::vector<double>& taus) {
  std::size_t k = 0;
  for (auto& t : s.tasks) {
    t.tau = taus.at(k++);
    for (auto& ch : t.tau_changes) ch.tau = taus.at(k++);
  }
}

std::string label_number(double x) {
  std::ostringstream ss;
  ss << x;
  return ss.str();
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  const YAML::Node root = parse_yaml(text);
  if (!root || root.IsNull()) throw ConfigError("empty run config");
  RunConfig c;
  parse_run_node(root, c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  try {
    return parse_run_config(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), e.line(), e.column());
  }
}

std::string run_config_to_json(const RunConfig& config, int indent) {
  return to_json(config, true).dump(indent);
}

std::string config_hash(const RunConfig& config) {
  return hex16(fnv1a64(to_json(config, false).dump()));
}

std::string run_dir_name(const RunConfig& config) {
  return "run-" + config_hash(config) + "-seed" + std::to_string(config.seed);
}

std::filesystem::path output_root() {
  const char* env = std::getenv("DAGRPO_OUTPUT_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("runs");
}

SweepSpec parse_sweep_spec(const std::string& text) {
  const YAML::Node root = parse_yaml(text);
  if (!root || !root.IsMap()) throw ConfigError("sweep config must be a mapping");
  check_keys(root, "sweep config", {"base", "grid"});
  if (!root["base"]) fail(root, "sweep config needs 'base'");
  SweepSpec spec;
  parse_run_node(root["base"], spec.base);

  const YAML::Node grid = root["grid"];
  if (!grid) fail(root, "sweep config needs 'grid'");
  if (!grid.IsMap()) fail(grid, "grid must be a mapping");
  check_keys(grid, "grid",
             {"eta_theta", "eta_lambda", "lambda_init", "seed", "tau_schedule",
              "strategy"});
  auto axis = [&](const char* key) -> YAML::Node {
    const YAML::Node n = grid[key];
    if (!n) return n;
    if (!n.IsSequence() || n.size() == 0) {
      fail(n, std::string("grid.") + key + " must be a non-empty list");
    }
    ++spec.axis_count;
    return n;
  };
  if (auto n = axis("eta_theta")) {
    spec.eta_theta = real_list(n, "grid.eta_theta", 0.0, kInf);
  }
  if (auto n = axis("eta_lambda")) {
    spec.eta_lambda = real_list(n, "grid.eta_lambda", 0.0, kInf);
  }
  if (auto n = axis("lambda_init")) {
    spec.lambda_init = real_list(n, "grid.lambda_init", 0.0, kInf);
  }
  if (auto n = axis("seed")) {
    for (std::size_t i = 0; i < n.size(); ++i) {
      spec.seed.push_back(scalar_as<std::uint64_t>(
          n[i], "grid.seed[" + std::to_string(i) + "]", "a non-negative integer"));
    }
  }
  if (auto n = axis("tau_schedule")) {
    const int phases = phase_count(spec.base.schedule);
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string f = "grid.tau_schedule[" + std::to_string(i) + "]";
      auto taus = real_list(n[i], f, 0.0, 1.0);
      if (static_cast<int>(taus.size()) != phases) {
        fail(n[i], f + " needs " + std::to_string(phases) +
                       " values (one per task and tau change)");
      }
      spec.tau_schedule.push_back(std::move(taus));
    }
  }
  if (auto n = axis("strategy")) {
    for (std::size_t i = 0; i < n.size(); ++i) {
      try {
        spec.strategy.push_back(parse_strategy(
            scalar_as<std::string>(n[i], "grid.strategy", "a name")));
      } catch (const ConfigError& e) {
        if (e.line() > 0) throw;
        fail(n[i], e.what());
      }
    }
  }
  if (spec.axis_count == 0) fail(grid, "empty grid: no parameter axes given");
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  try {
    return parse_sweep_spec(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), e.line(), e.column());
  }
}

std::vector<SweepCell> expand_sweep(const SweepSpec& spec) {
  if (spec.axis_count == 0) throw ConfigError("empty grid");
  std::vector<SweepCell> cells{{"", spec.base}};
  auto extend = [&](std::size_t n, const std::function<void(SweepCell&, std::size_t)>& set) {
    if (n == 0) return;
    std::vector<SweepCell> next;
    for (const auto& c : cells) {
      for (std::size_t i = 0; i < n; ++i) {
        SweepCell cell = c;
        set(cell, i);
        next.push_back(std::move(cell));
      }
    }
    cells = std::move(next);
  };
  auto tag = [](SweepCell& c, const std::string& kv) {
    c.label += (c.label.empty() ? "" : ",") + kv;
  };
  extend(spec.eta_theta.size(), [&](SweepCell& c, std::size_t i) {
    c.config.eta_theta = spec.eta_theta[i];
    tag(c, "eta_theta=" + label_number(spec.eta_theta[i]));
  });
  extend(spec.eta_lambda.size(), [&](SweepCell& c, std::size_t i) {
    c.config.eta_lambda = spec.eta_lambda[i];
    tag(c, "eta_lambda=" + label_number(spec.eta_lambda[i]));
  });
  extend(spec.lambda_init.size(), [&](SweepCell& c, std::size_t i) {
    c.config.lambda_init = spec.lambda_init[i];
    tag(c, "lambda_init=" + label_number(spec.lambda_init[i]));
  });
  extend(spec.tau_schedule.size(), [&](SweepCell& c, std::size_t i) {
    apply_tau_schedule(c.config.schedule, spec.tau_schedule[i]);
    std::string s;
    for (double t : spec.tau_schedule[i]) {
      s += (s.empty() ? "" : ">") + label_number(t);
    }
    tag(c, "tau=" + s);
  });
  extend(spec.strategy.size(), [&](SweepCell& c, std::size_t i) {
    c.config.strategy = spec.strategy[i];
    tag(c, "strategy=" + std::string(strategy_name(spec.strategy[i])));
  });
  extend(spec.seed.size(), [&](SweepCell& c, std::size_t i) {
    c.config.seed = spec.seed[i];
    tag(c, "seed=" + std::to_string(spec.seed[i]));
  });
  return cells;
}

PlotSpec parse_plot_spec(const std::string& text,
                         const std::filesystem::path& base_dir) {
  const YAML::Node root = parse_yaml(text);
  if (!root || !root.IsMap()) throw ConfigError("plot spec must be a mapping");
  check_keys(root, "plot spec",
             {"source", "series", "output", "title", "phase_markers",
              "tau_series", "initial_tau"});
  PlotSpec p;
  auto resolve = [&](const std::string& s) {
    std::filesystem::path path(s);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  auto strings = [&](const YAML::Node& n, const std::string& field) {
    std::vector<std::string> out;
    if (n.IsScalar()) {
      out.push_back(n.as<std::string>());
    } else if (n.IsSequence()) {
      for (std::size_t i = 0; i < n.size(); ++i) {
        out.push_back(scalar_as<std::string>(n[i], field, "a string"));
      }
    } else {
      fail(n, field + " must be a string or a list of strings");
    }
    if (out.empty()) fail(n, field + " must not be empty");
    return out;
  };
  if (!root["source"]) fail(root, "plot spec needs 'source'");
  for (const auto& s : strings(root["source"], "source")) {
    p.sources.push_back(resolve(s));
  }
  if (!root["series"]) fail(root, "plot spec needs 'series'");
  p.series = strings(root["series"], "series");
  if (!root["output"]) fail(root, "plot spec needs 'output'");
  p.output = resolve(scalar_as<std::string>(root["output"], "output", "a path"));
  with(root, "title", [&](const YAML::Node& v) {
    p.title = scalar_as<std::string>(v, "title", "a string");
  });
  with(root, "tau_series", [&](const YAML::Node& v) {
    p.tau_series = strings(v, "tau_series");
  });
  with(root, "initial_tau", [&](const YAML::Node& v) {
    p.initial_tau = real_in(v, "initial_tau", 0.0, 1.0);
  });
  with(root, "phase_markers", [&](const YAML::Node& seq) {
    if (!seq.IsSequence()) fail(seq, "phase_markers must be a list");
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const std::string w = "phase_markers[" + std::to_string(i) + "]";
      const YAML::Node m = seq[i];
      PhaseMarker pm;
      if (m.IsScalar()) {
        pm.iteration = int_at_least(m, w, 0);
      } else {
        require_map(m, w);
        check_keys(m, w, {"iteration", "tau"});
        if (!m["iteration"]) fail(m, w + " needs 'iteration'");
        pm.iteration = int_at_least(m["iteration"], w + ".iteration", 0);
        with(m, "tau", [&](const YAML::Node& v) {
          pm.tau = real_in(v, w + ".tau", 0.0, 1.0);
        });
      }
      p.phase_markers.push_back(pm);
    }
  });
  return p;
}

PlotSpec load_plot_spec(const std::filesystem::path& path) {
  try {
    return parse_plot_spec(read_file(path), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), e.line(), e.column());
  }
}

}  // namespace dagrpo
