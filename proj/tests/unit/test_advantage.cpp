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
#include <limits>

#include "dagrpo/advantage.hpp"
#include "dagrpo/errors.hpp"
#include "dagrpo/rng.hpp"

using namespace dagrpo;
using V = std::vector<double>;

namespace {

void check_close(const V& got, const V& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(std::abs(got[i] - want[i]) <= tol);
  }
}

double sum(const V& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("four-response example") {
  const auto a = group_advantages(V{1, 0, 1, 0}, V{0, 0, 1, 1}, 0.5);
  check_close(a.reward_adv, {0.5, -0.5, 0.5, -0.5}, 1e-15);
  check_close(a.cost_adv, {-0.5, -0.5, 0.5, 0.5}, 1e-15);
  check_close(a.dual_weighted, {0.75, -0.25, 0.25, -0.75}, 1e-15);
  CHECK(a.lambda_used == 0.5);
}

TEST_CASE("constant group gives zero advantages") {
  const auto a = group_advantages(V{0.3, 0.3, 0.3}, V{1, 1, 1}, 2.0);
  for (const V* v : {&a.reward_adv, &a.cost_adv, &a.dual_weighted}) {
    for (double x : *v) CHECK(x == 0.0);
  }
}

TEST_CASE("lambda zero reduces to reward advantages") {
  const auto a = group_advantages(V{1, 0, -0.1, 1}, V{1, 0, 0, 1}, 0.0);
  CHECK(a.dual_weighted == a.reward_adv);
}

TEST_CASE("shaped reward examples") {
  check_close(shaped_reward_advantages(V{1, 1}, V{0, 1}, 0.5), {0.25, -0.25},
              1e-15);
  check_close(shaped_reward_advantages(V{0, 0}, V{1, 0}, 2.0), {-1, 1}, 1e-15);
}

TEST_CASE("input errors") {
  CHECK_THROWS_AS(group_advantages(V{1}, V{0}, 0.5), DomainError);
  CHECK_THROWS_AS(group_advantages(V{1, 0}, V{0, 0}, -0.1), DomainError);
  CHECK_THROWS_AS(group_advantages(V{1, std::nan("")}, V{0, 0}, 0.1),
                  DomainError);
  CHECK_THROWS_AS(group_advantages(V{1, 0}, V{0, 0, 1}, 0.1), DomainError);
  CHECK_THROWS_AS(shaped_reward_advantages(V{1}, V{0}, 0.5), DomainError);
}

TEST_CASE("random groups: zero sum, shaped identity, shift invariance, monotone dual") {
  RngStream r(17, "advantage-props");
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t g = 2 + r.below(15);
    V rew(g), cost(g);
    for (std::size_t i = 0; i < g; ++i) {
      rew[i] = 4 * r.uniform() - 2;
      cost[i] = r.bernoulli(0.4) ? 1.0 : 0.0;
    }
    const double lambda = 3 * r.uniform();
    const auto a = group_advantages(rew, cost, lambda);
    CHECK(std::abs(sum(a.reward_adv)) <= 1e-10);
    CHECK(std::abs(sum(a.cost_adv)) <= 1e-10);
    CHECK(std::abs(sum(a.dual_weighted)) <= 1e-10);
    for (std::size_t i = 0; i < g; ++i) {
      CHECK(a.dual_weighted[i] == a.reward_adv[i] - lambda * a.cost_adv[i]);
    }
    check_close(shaped_reward_advantages(rew, cost, lambda), a.dual_weighted,
                1e-12);

    const double shift = 10 * r.uniform() - 5;
    V rew2 = rew, cost2 = cost;
    for (auto& x : rew2) x += shift;
    for (auto& x : cost2) x += shift;
    const auto b = group_advantages(rew2, cost2, lambda);
    check_close(b.reward_adv, a.reward_adv, 1e-12);
    check_close(b.cost_adv, a.cost_adv, 1e-12);

    const auto c = group_advantages(rew, cost, lambda + 0.25);
    for (std::size_t i = 0; i < g; ++i) {
      if (a.cost_adv[i] > 0) CHECK(c.dual_weighted[i] < a.dual_weighted[i]);
      if (a.cost_adv[i] < 0) CHECK(c.dual_weighted[i] > a.dual_weighted[i]);
    }
  }
}

TEST_CASE("std normalisation is opt-in") {
  const V rew{1, 0, 1, 0}, cost{0, 0, 1, 1};
  const auto plain = group_advantages(rew, cost, 0.5);
  const auto norm = group_advantages(rew, cost, 0.5, {true});
  double sq = 0.0;
  for (double x : norm.dual_weighted) sq += x * x;
  CHECK(std::sqrt(sq / 4) == doctest::Approx(1.0));
  CHECK(norm.reward_adv == plain.reward_adv);
  const auto flat = group_advantages(V{1, 1}, V{0, 0}, 0.5, {true});
  CHECK(flat.dual_weighted == V{0, 0});
}
