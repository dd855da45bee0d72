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

#include <cmath>

#include "dagrpo/kernels.hpp"

namespace dagrpo::kernels {

namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void kahan_axpy_scalar(double a, const double* x, double* sum, double* comp,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double term = a * x[i] - comp[i];
    const double next = sum[i] + term;
    comp[i] = (next - sum[i]) - term;
    sum[i] = next;
  }
}

bool all_finite_scalar(const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::kScalar, axpy_scalar, scale_scalar,
                                 kahan_axpy_scalar, all_finite_scalar};
  return table;
}

}  // namespace dagrpo::kernels
