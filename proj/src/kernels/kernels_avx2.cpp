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

// Compiled with -mavx2 only. Do not add -mfma: the multiply and add must
// stay separate roundings to match the scalar reference.

#include <immintrin.h>

#include <cmath>

#include "dagrpo/kernels.hpp"

namespace dagrpo::kernels {

namespace {

constexpr std::size_t kLanes = 4;

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  }
  for (; i < n; ++i) x[i] *= a;
}

void kahan_axpy_avx2(double a, const double* x, double* sum, double* comp,
                     std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d s = _mm256_loadu_pd(sum + i);
    const __m256d c = _mm256_loadu_pd(comp + i);
    const __m256d term =
        _mm256_sub_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)), c);
    const __m256d next = _mm256_add_pd(s, term);
    _mm256_storeu_pd(comp + i, _mm256_sub_pd(_mm256_sub_pd(next, s), term));
    _mm256_storeu_pd(sum + i, next);
  }
  for (; i < n; ++i) {
    const double term = a * x[i] - comp[i];
    const double next = sum[i] + term;
    comp[i] = (next - sum[i]) - term;
    sum[i] = next;
  }
}

bool all_finite_avx2(const double* x, std::size_t n) {
  // x - x is 0 for finite x and NaN for NaN/Inf; an ordered compare against
  // itself then flags exactly the non-finite lanes.
  std::size_t i = 0;
  __m256d bad = _mm256_setzero_pd();
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d d = _mm256_sub_pd(v, v);
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(d, d, _CMP_UNORD_Q));
  }
  if (_mm256_movemask_pd(bad) != 0) return false;
  for (; i < n; ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::kAvx2, axpy_avx2, scale_avx2,
                                 kahan_axpy_avx2, all_finite_avx2};
  return table;
}

}  // namespace dagrpo::kernels
