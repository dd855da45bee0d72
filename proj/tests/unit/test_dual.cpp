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

#include "dagrpo/dual.hpp"
#include "dagrpo/errors.hpp"
#include "dagrpo/rng.hpp"

using namespace dagrpo;

namespace {

GroupSample group_with_costs(std::vector<double> costs) {
  GroupSample g;
  g.prompt = {0};
  for (double c : costs) {
    g.local_actions.push_back({0});
    Outcome o;
    o.cost = c;
    g.outcomes.push_back(o);
  }
  return g;
}

}  // namespace

TEST_CASE("empirical cloud usage") {
  std::vector<GroupSample> none{group_with_costs({0, 0, 0, 0})};
  CHECK(empirical_cloud_usage(none) == 0.0);
  std::vector<GroupSample> all{group_with_costs({1, 1}), group_with_costs({1, 1})};
  CHECK(empirical_cloud_usage(all) == 1.0);
  std::vector<GroupSample> mixed{group_with_costs({1, 0, 0, 0}),
                                 group_with_costs({1, 1, 1, 0})};
  CHECK(empirical_cloud_usage(mixed) == doctest::Approx(0.5));
  std::vector<GroupSample> scaled{group_with_costs({3, 0})};
  CHECK(empirical_cloud_usage(scaled, 3.0) == doctest::Approx(0.5));

  CHECK_THROWS_AS(empirical_cloud_usage(std::vector<GroupSample>{}), DomainError);
  std::vector<GroupSample> ragged{group_with_costs({0, 0}),
                                  group_with_costs({0, 0, 0})};
  CHECK_THROWS_AS(empirical_cloud_usage(ragged), DomainError);
}

TEST_CASE("dual update examples") {
  auto s = make_dual_state(0.5, 0.01, 0.3);
  dual_update(s, 0.4, 1);
  CHECK(s.lambda == doctest::Approx(0.501).epsilon(1e-12));
  REQUIRE(s.history.size() == 1);
  CHECK(s.history[0].iteration == 1);
  CHECK(s.history[0].j_hat_c == 0.4);

  auto p = make_dual_state(0.005, 0.01, 0.7);
  dual_update(p, 0.0, 1);
  CHECK(p.lambda == 0.0);

  auto b = make_dual_state(0.0, 0.01, 0.4);
  dual_update(b, 0.4, 1);
  CHECK(b.lambda == 0.0);
}

TEST_CASE("dual update errors") {
  auto s = make_dual_state(0.5, 0.01, 0.3);
  CHECK_THROWS_AS(dual_update(s, 1.2, 1), DomainError);
  CHECK_THROWS_AS(dual_update(s, -0.1, 1), DomainError);
  dual_update(s, 0.3, 5);
  CHECK_THROWS_AS(dual_update(s, 0.3, 5), DomainError);
  CHECK_THROWS_AS(make_dual_state(-1.0, 0.01, 0.3), DomainError);
  CHECK_THROWS_AS(make_dual_state(0.5, 0.01, 1.3), DomainError);

  auto runaway = make_dual_state(0.5, 1e7, 0.0);
  CHECK_THROWS_AS(dual_update(runaway, 1.0, 1), RuntimeAbort);
}

TEST_CASE("lambda stays nonnegative and responds monotonically") {
  RngStream r(23, "dual-props");
  for (int trial = 0; trial < 200; ++trial) {
    auto s = make_dual_state(r.uniform(), 0.5 * r.uniform(), r.uniform());
    for (int it = 1; it <= 200; ++it) {
      const double before = s.lambda;
      const double j = r.uniform();
      dual_update(s, j, it);
      CHECK(s.lambda >= 0.0);
      if (before > 0.0 && s.lambda > 0.0) {
        if (j > s.tau_current) CHECK(s.lambda > before);
        if (j < s.tau_current) CHECK(s.lambda < before);
      }
    }
  }
}

TEST_CASE("task targets carry lambda over") {
  auto s = make_dual_state(0.5, 0.01, 0.3);
  dual_update(s, 0.9, 1);
  const double lam = s.lambda;
  set_task_target(s, 0.5, 2);
  CHECK(s.lambda == lam);
  CHECK(s.tau_current == 0.5);
  set_task_target(s, 0.5, 3);
  CHECK(s.lambda == lam);
  CHECK(s.targets.size() == 2);
  CHECK_THROWS_AS(set_task_target(s, 1.5, 4), DomainError);

  auto staged = make_dual_state(0.5, 0.01, 0.1);
  int it = 0;
  for (double tau : {0.3, 0.5, 0.7}) {
    for (int k = 0; k < 10; ++k) dual_update(staged, 0.2, ++it);
    set_task_target(staged, tau, it);
    CHECK(staged.tau_current == tau);
  }
  REQUIRE(staged.targets.size() == 3);
  CHECK(staged.targets[0].iteration == 10);
  CHECK(staged.targets[2].iteration == 30);
}
