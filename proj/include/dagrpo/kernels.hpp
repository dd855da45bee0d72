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

// Dense elementwise kernels over the logit / gradient matrices.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variants perform the same IEEE operations in the same order
// per element (no FMA, no reassociation), so results are bit-identical and
// the choice of ISA never changes a run's output. The active table is picked
// at first use from CPU features; DAGRPO_SIMD=scalar|avx2 overrides it.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace dagrpo::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scale)(double a, double* x, std::size_t n);
  // Kahan-compensated sum[i] += a * x[i], compensation carried in comp[i].
  void (*kahan_axpy)(double a, const double* x, double* sum, double* comp,
                     std::size_t n);
  // True iff no element is NaN or +-Inf.
  bool (*all_finite)(const double* x, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(DAGRPO_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

bool isa_supported(Isa isa);
const KernelTable& table_for(Isa isa);

// The table used by the library. Thread-safe after first call.
const KernelTable& active();
Isa active_isa();
// Forces a specific ISA (tests, benchmarking). Throws DomainError if the
// CPU or build does not support it.
void select(Isa isa);

std::string_view isa_name(Isa isa);

// Span conveniences over the active table.
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), y.size());
}
inline void scale(double a, std::span<double> x) {
  active().scale(a, x.data(), x.size());
}
inline void kahan_axpy(double a, std::span<const double> x,
                       std::span<double> sum, std::span<double> comp) {
  active().kahan_axpy(a, x.data(), sum.data(), comp.data(), sum.size());
}
inline bool all_finite(std::span<const double> x) {
  return active().all_finite(x.data(), x.size());
}

}  // namespace dagrpo::kernels
