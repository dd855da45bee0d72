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

#include "dagrpo/verify.hpp"

using namespace dagrpo;

TEST_CASE("estimator unbiasedness over the instance family") {
  const auto r = verify_unbiasedness(1);
  CHECK(r.instances == 60);
  CHECK(r.failures == 0);
  CHECK(r.max_abs_error <= 1e-10);
  CHECK(r.pass());
}

TEST_CASE("dual fixed point on a stub usage curve") {
  CHECK(stub_usage(1.0) == doctest::Approx(0.5));
  CHECK(stub_usage(0.0) > stub_usage(2.0));
  const std::vector<double> taus{0.1, 0.3, 0.5, 0.7, 0.9};
  for (const auto& r : verify_dual_fixed_point(taus)) {
    CAPTURE(r.tau);
    CHECK(r.pass);
    CHECK(r.gap <= 1e-3);
  }
}
