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

#include <atomic>
#include <cstdlib>
#include <string>

#include "dagrpo/errors.hpp"
#include "dagrpo/kernels.hpp"

namespace dagrpo::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(DAGRPO_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* detect() {
  if (const char* env = std::getenv("DAGRPO_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_table();
#if defined(DAGRPO_HAVE_AVX2)
    if (want == "avx2" && cpu_has_avx2()) return &avx2_table();
#endif
  }
#if defined(DAGRPO_HAVE_AVX2)
  if (cpu_has_avx2()) return &avx2_table();
#endif
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{detect()};
  return current;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw DomainError("kernel ISA not available: " +
                      std::string(isa_name(isa)));
  }
#if defined(DAGRPO_HAVE_AVX2)
  if (isa == Isa::kAvx2) return avx2_table();
#endif
  return scalar_table();
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

Isa active_isa() { return active().isa; }

void select(Isa isa) {
  slot().store(&table_for(isa), std::memory_order_release);
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace dagrpo::kernels
