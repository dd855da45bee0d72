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

#include "dagrpo/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dagrpo/errors.hpp"
#include "dagrpo/metrics.hpp"

namespace dagrpo {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line split on spaces; the first token must equal `tag` when given.
  std::vector<std::string> next(const char* tag = nullptr) {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of checkpoint");
    ++line_no_;
    std::vector<std::string> tokens;
    std::istringstream ss(line);
    for (std::string t; ss >> t;) tokens.push_back(t);
    if (tag && (tokens.empty() || tokens[0] != tag)) {
      fail(std::string("expected '") + tag + "'");
    }
    return tokens;
  }

  template <typename T>
  T number(const std::string& s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail("bad number '" + s + "'");
    }
    return v;
  }

  void expect_count(const std::vector<std::string>& t, std::size_t n) {
    if (t.size() != n) fail("wrong field count");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("checkpoint line " + std::to_string(line_no_) + ": " + what,
                      line_no_, 1);
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace

void write_checkpoint(std::ostream& out, const TrainState& s) {
  const auto& f = format_number;
  out << "dagrpo-checkpoint " << kCheckpointVersion << '\n';
  out << "seed " << s.seed << '\n';
  out << "iteration " << s.iteration << '\n';
  out << "task_index " << s.task_index << '\n';
  out << "task_iteration " << s.task_iteration << '\n';
  out << "dual " << f(s.dual.lambda) << ' ' << f(s.dual.eta_lambda) << ' '
      << f(s.dual.tau_current) << '\n';
  out << "dual_history " << s.dual.history.size() << '\n';
  for (const auto& h : s.dual.history) {
    out << h.iteration << ' ' << f(h.lambda) << ' ' << f(h.j_hat_c) << '\n';
  }
  out << "dual_targets " << s.dual.targets.size() << '\n';
  for (const auto& t : s.dual.targets) {
    out << t.iteration << ' ' << f(t.tau) << '\n';
  }
  const Matrix& m = s.params.logits();
  out << "logits " << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out << (c ? " " : "") << f(m(r, c));
    }
    out << '\n';
  }
  const RouterState& rt = s.router;
  out << "router " << rt.successes.size() << ' ' << (rt.frozen ? 1 : 0) << ' '
      << f(rt.threshold) << '\n';
  for (std::size_t i = 0; i < rt.successes.size(); ++i) {
    out << f(rt.successes[i]) << ' ' << f(rt.trials[i]) << ' '
        << (rt.offload[i] ? 1 : 0) << '\n';
  }
  out << "router_holdout " << rt.holdout.size() << '\n';
  for (std::size_t i = 0; i < rt.holdout.size(); ++i) {
    out << (i ? " " : "") << rt.holdout[i].index;
  }
  out << "\nend\n";
}

TrainState read_checkpoint(std::istream& in) {
  LineReader rd(in);
  auto t = rd.next("dagrpo-checkpoint");
  rd.expect_count(t, 2);
  if (rd.number<int>(t[1]) != kCheckpointVersion) {
    rd.fail("unsupported checkpoint version " + t[1]);
  }
  t = rd.next("seed");
  rd.expect_count(t, 2);
  const auto seed = rd.number<std::uint64_t>(t[1]);
  t = rd.next("iteration");
  rd.expect_count(t, 2);
  const int iteration = rd.number<int>(t[1]);
  t = rd.next("task_index");
  rd.expect_count(t, 2);
  const auto task_index = rd.number<std::uint32_t>(t[1]);
  t = rd.next("task_iteration");
  rd.expect_count(t, 2);
  const int task_iteration = rd.number<int>(t[1]);

  t = rd.next("dual");
  rd.expect_count(t, 4);
  DualState dual;
  dual.lambda = rd.number<double>(t[1]);
  dual.eta_lambda = rd.number<double>(t[2]);
  dual.tau_current = rd.number<double>(t[3]);
  t = rd.next("dual_history");
  rd.expect_count(t, 2);
  const auto n_hist = rd.number<std::size_t>(t[1]);
  for (std::size_t i = 0; i < n_hist; ++i) {
    t = rd.next();
    rd.expect_count(t, 3);
    dual.history.push_back({rd.number<int>(t[0]), rd.number<double>(t[1]),
                            rd.number<double>(t[2])});
  }
  t = rd.next("dual_targets");
  rd.expect_count(t, 2);
  const auto n_targets = rd.number<std::size_t>(t[1]);
  for (std::size_t i = 0; i < n_targets; ++i) {
    t = rd.next();
    rd.expect_count(t, 2);
    dual.targets.push_back({rd.number<int>(t[0]), rd.number<double>(t[1])});
  }

  t = rd.next("logits");
  rd.expect_count(t, 3);
  const auto rows = rd.number<std::size_t>(t[1]);
  const auto cols = rd.number<std::size_t>(t[2]);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    t = rd.next();
    rd.expect_count(t, cols);
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rd.number<double>(t[c]);
  }

  t = rd.next("router");
  rd.expect_count(t, 4);
  RouterState router;
  const auto n_router = rd.number<std::size_t>(t[1]);
  router.frozen = rd.number<int>(t[2]) != 0;
  router.threshold = rd.number<double>(t[3]);
  for (std::size_t i = 0; i < n_router; ++i) {
    t = rd.next();
    rd.expect_count(t, 3);
    router.successes.push_back(rd.number<double>(t[0]));
    router.trials.push_back(rd.number<double>(t[1]));
    router.offload.push_back(rd.number<int>(t[2]) != 0);
  }
  t = rd.next("router_holdout");
  rd.expect_count(t, 2);
  const auto n_hold = rd.number<std::size_t>(t[1]);
  t = rd.next();
  rd.expect_count(t, n_hold);
  for (const auto& id : t) router.holdout.push_back({rd.number<std::uint32_t>(id)});
  rd.next("end");

  try {
    return TrainState{PolicyParams(std::move(m)), std::move(dual), iteration,
                      task_index, task_iteration, seed, std::move(router)};
  } catch (const DomainError& e) {
    rd.fail(e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const TrainState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeAbort("cannot write checkpoint " + path.string());
  write_checkpoint(out, state);
  if (!out) throw RuntimeAbort("failed writing checkpoint " + path.string());
}

TrainState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace dagrpo
