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

// dagrpo: run, sweep, plot, verify.
//
// Exit codes: 0 success, 1 invalid input, 2 runtime failure.

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <exception>
#include <iostream>

#include "dagrpo/artifacts.hpp"
#include "dagrpo/config.hpp"
#include "dagrpo/errors.hpp"
#include "dagrpo/metrics.hpp"
#include "dagrpo/plot.hpp"
#include "dagrpo/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

int cmd_run(const std::string& path, bool force) {
  const dagrpo::RunConfig config = dagrpo::load_run_config(path);
  const auto dir = dagrpo::prepare_run_dir(config, dagrpo::output_root(), force);
  const dagrpo::RunArtifacts art = dagrpo::run_schedule(config);
  dagrpo::write_run_outputs(dir, config, art);
  const auto h = art.j_hat_history();
  std::cout << dir.string() << '\n'
            << "iterations " << h.size() << ", final lambda "
            << dagrpo::format_number(art.rows.back().lambda)
            << ", trailing-100 usage "
            << dagrpo::format_number(
                   dagrpo::trailing_ratio(h, std::min<std::size_t>(100, h.size())))
            << '\n';
  return kOk;
}

int cmd_sweep(const std::string& path, bool force) {
  const dagrpo::SweepSpec spec = dagrpo::load_sweep_spec(path);
  const dagrpo::SweepResult res =
      dagrpo::run_sweep(spec, dagrpo::output_root(), force);
  for (const auto& c : res.cells) {
    std::cout << (c.exit_code == 0 ? "ok     " : "FAILED ") << c.label << "  "
              << c.run_dir;
    if (c.exit_code != 0) std::cout << "  " << c.message;
    std::cout << '\n';
  }
  std::cout << "index: " << res.index_path.string() << '\n';
  return res.exit_code();
}

int cmd_plot(const std::string& path) {
  const dagrpo::PlotSpec spec = dagrpo::load_plot_spec(path);
  dagrpo::emit_plot(spec);
  std::cout << spec.output.string() << '\n';
  return kOk;
}

int cmd_verify(std::uint64_t seed) {
  bool ok = true;
  const auto rep = dagrpo::verify_unbiasedness(seed);
  ok = ok && rep.pass();
  std::printf("%s  estimator unbiasedness: %d instances, max |error| %.3g (tol %.0e), %.2fs\n",
              rep.pass() ? "PASS" : "FAIL", rep.instances, rep.max_abs_error,
              rep.tolerance, rep.seconds);
  constexpr std::array<double, 4> kTaus = {0.1, 0.3, 0.5, 0.7};
  for (const auto& r : dagrpo::verify_dual_fixed_point(kTaus)) {
    ok = ok && r.pass;
    std::printf("%s  dual fixed point tau=%.1f: lambda %.6f, usage %.6f, gap %.2e\n",
                r.pass ? "PASS" : "FAIL", r.tau, r.lambda, r.usage, r.gap);
  }
  return ok ? kOk : kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-ascent GRPO edge/cloud collaboration simulator"};
  app.require_subcommand(1);

  std::string run_path, sweep_path, plot_path;
  bool force = false;
  std::uint64_t verify_seed = 20260101;

  auto* run = app.add_subcommand("run", "Train one configuration");
  run->add_option("config", run_path, "YAML run config")->required();
  run->add_flag("--force", force, "Overwrite an existing run directory");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid");
  sweep->add_option("sweep-config", sweep_path, "YAML sweep config")->required();
  sweep->add_flag("--force", force, "Overwrite existing run directories");

  auto* plot = app.add_subcommand("plot", "Render metrics CSVs to SVG");
  plot->add_option("plot-spec", plot_path, "YAML plot spec")->required();

  auto* verify = app.add_subcommand("verify", "Run the built-in exactness checks");
  verify->add_option("--seed", verify_seed, "Instance generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(run_path, force);
    if (*sweep) return cmd_sweep(sweep_path, force);
    if (*plot) return cmd_plot(plot_path);
    if (*verify) return cmd_verify(verify_seed);
  } catch (const dagrpo::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const dagrpo::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const dagrpo::RuntimeAbort& e) {
    std::cerr << "aborted: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "aborted: " << e.what() << '\n';
    return kRuntime;
  }
  return kInvalid;
}
