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
#include <cstring>
#include <limits>
#include <vector>

#include "dagrpo/errors.hpp"
#include "dagrpo/kernels.hpp"
#include "dagrpo/rng.hpp"

namespace k = dagrpo::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint32_t tag) {
  dagrpo::RngStream r(99, "kernels", tag);
  std::vector<double> v(n);
  for (auto& x : v) x = (r.uniform() - 0.5) * std::pow(10.0, r.below(9) - 4.0);
  return v;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(k::isa_supported(k::Isa::kScalar));
  CHECK(k::table_for(k::Isa::kScalar).isa == k::Isa::kScalar);
  CHECK(k::isa_name(k::Isa::kScalar) == "scalar");
}

TEST_CASE("scalar reference results") {
  std::vector<double> x{1, 2, 3}, y{10, 20, 30};
  k::scalar_table().axpy(2.0, x.data(), y.data(), 3);
  CHECK(y == std::vector<double>{12, 24, 36});
  k::scalar_table().scale(0.5, y.data(), 3);
  CHECK(y == std::vector<double>{6, 12, 18});

  // Compensation recovers what plain summation loses.
  std::vector<double> sum{1.0}, comp{0.0}, tiny{1e-16};
  for (int i = 0; i < 1000; ++i) {
    k::scalar_table().kahan_axpy(1.0, tiny.data(), sum.data(), comp.data(), 1);
  }
  CHECK(sum[0] - comp[0] == doctest::Approx(1.0 + 1e-13).epsilon(1e-15));
  CHECK(sum[0] > 1.0);
}

#if defined(DAGRPO_HAVE_AVX2)
TEST_CASE("avx2 kernels match scalar bit for bit") {
  if (!k::isa_supported(k::Isa::kAvx2)) return;
  const auto& s = k::scalar_table();
  const auto& v = k::avx2_table();
  for (std::size_t n = 0; n <= 67; ++n) {
    CAPTURE(n);
    const auto x = random_vec(n, static_cast<std::uint32_t>(n));
    const auto y0 = random_vec(n, static_cast<std::uint32_t>(n + 1000));

    auto ys = y0, yv = y0;
    s.axpy(-1.7, x.data(), ys.data(), n);
    v.axpy(-1.7, x.data(), yv.data(), n);
    CHECK(bits_equal(ys, yv));

    ys = y0;
    yv = y0;
    s.scale(0.3, ys.data(), n);
    v.scale(0.3, yv.data(), n);
    CHECK(bits_equal(ys, yv));

    auto ss = y0, sv = y0;
    std::vector<double> cs(n, 0.0), cv(n, 0.0);
    for (int rep = 0; rep < 5; ++rep) {
      s.kahan_axpy(0.1, x.data(), ss.data(), cs.data(), n);
      v.kahan_axpy(0.1, x.data(), sv.data(), cv.data(), n);
    }
    CHECK(bits_equal(ss, sv));
    CHECK(bits_equal(cs, cv));

    CHECK(s.all_finite(x.data(), n) == v.all_finite(x.data(), n));
  }
}

TEST_CASE("avx2 all_finite finds a bad value in every lane and tail slot") {
  if (!k::isa_supported(k::Isa::kAvx2)) return;
  for (std::size_t n = 1; n <= 19; ++n) {
    for (std::size_t pos = 0; pos < n; ++pos) {
      for (double bad : {std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity()}) {
        std::vector<double> x(n, 1.0);
        x[pos] = bad;
        CHECK_FALSE(k::avx2_table().all_finite(x.data(), n));
        CHECK_FALSE(k::scalar_table().all_finite(x.data(), n));
      }
    }
  }
}
#endif

TEST_CASE("select switches the active table and rejects unsupported ISAs") {
  const k::Isa before = k::active_isa();
  k::select(k::Isa::kScalar);
  CHECK(k::active_isa() == k::Isa::kScalar);
  if (!k::isa_supported(k::Isa::kAvx2)) {
    CHECK_THROWS_AS(k::select(k::Isa::kAvx2), dagrpo::DomainError);
  }
  k::select(before);
}
