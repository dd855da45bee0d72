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

#include "dagrpo/artifacts.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "dagrpo/checkpoint.hpp"
#include "dagrpo/errors.hpp"
#include "dagrpo/metrics.hpp"
#include "dagrpo/rng.hpp"

namespace dagrpo {

namespace {

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeAbort("cannot write " + path.string());
  out << text;
  if (!out) throw RuntimeAbort("failed writing " + path.string());
}

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

std::string summary_json(const RunConfig& config, const RunArtifacts& art) {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::parse(run_config_to_json(config));
  j["run_dir"] = run_dir_name(config);
  j["iterations"] = art.rows.size();
  j["accuracy_after_task"] = art.accuracy;
  auto& local = j["local_only_accuracy_after_task"];
  local = nlohmann::ordered_json::array();
  for (const auto& row : art.local_only_accuracy) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& v : row) r.push_back(optional_json(v));
    local.push_back(r);
  }
  auto& fr = j["forgetting"];
  fr = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < art.forgetting.size(); ++t) {
    const auto& f = art.forgetting[t];
    fr.push_back({{"task", t},
                  {"acc_task", f.acc_task},
                  {"acc_switch", f.acc_switch},
                  {"forgetting_rate", optional_json(f.forgetting_rate)}});
  }
  const auto h = art.j_hat_history();
  if (!h.empty()) {
    j["final_trailing_ratio_100"] = trailing_ratio(h, std::min<std::size_t>(100, h.size()));
    j["final_lambda"] = art.rows.back().lambda;
  }
  return j.dump(2) + "\n";
}

std::filesystem::path prepare_run_dir(const RunConfig& config,
                                      const std::filesystem::path& root,
                                      bool force) {
  const auto dir = root / run_dir_name(config);
  if (std::filesystem::exists(dir)) {
    if (!force) {
      throw ConfigError("run directory " + dir.string() +
                        " already exists; pass --force to overwrite");
    }
    std::filesystem::remove_all(dir);
  }
  std::filesystem::create_directories(dir / "checkpoints");
  return dir;
}

void write_run_outputs(const std::filesystem::path& dir, const RunConfig& config,
                       const RunArtifacts& art) {
  {
    std::ofstream out(dir / "metrics.csv", std::ios::binary);
    if (!out) throw RuntimeAbort("cannot write " + (dir / "metrics.csv").string());
    write_metrics_csv(out, art.rows);
  }
  write_text(dir / "summary.json", summary_json(config, art));
  for (const auto& snap : art.snapshots) {
    save_checkpoint(dir / "checkpoints" / (snap.label + ".ckpt"), snap.state);
  }
}

int SweepResult::exit_code() const {
  int code = 0;
  for (const auto& c : cells) code = std::max(code, c.exit_code);
  return code;
}

SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& root,
                      bool force) {
  const auto cells = expand_sweep(spec);
  std::string ids;
  for (const auto& c : cells) ids += run_dir_name(c.config) + ";";
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a64(ids);
  std::string tag(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) tag[i] = kHex[h & 0xf];

  std::filesystem::create_directories(root);
  SweepResult result;
  result.index_path = root / ("sweep-" + tag + "-index.csv");
  for (const auto& cell : cells) {
    SweepCellResult r;
    r.label = cell.label;
    r.run_dir = run_dir_name(cell.config);
    try {
      cell.config.validate();
      const auto dir = prepare_run_dir(cell.config, root, force);
      const RunArtifacts art = run_schedule(cell.config);
      write_run_outputs(dir, cell.config, art);
      r.message = "ok";
    } catch (const ConfigError& e) {
      r.exit_code = 1;
      r.message = e.what();
    } catch (const DomainError& e) {
      r.exit_code = 1;
      r.message = e.what();
    } catch (const std::exception& e) {
      r.exit_code = 2;
      r.message = e.what();
    }
    result.cells.push_back(std::move(r));
  }

  std::ofstream index(result.index_path, std::ios::binary);
  if (!index) throw RuntimeAbort("cannot write " + result.index_path.string());
  index << "cell,label,run_dir,status,message\n";
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const auto& c = result.cells[i];
    index << i << ',' << csv_field(c.label) << ',' << c.run_dir << ','
          << (c.exit_code == 0 ? "ok" : "failed") << ',' << csv_field(c.message)
          << '\n';
  }
  return result;
}

}  // namespace dagrpo
