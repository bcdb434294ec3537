// Copyright 2026 The edgesim Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "edgesim/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace edgesim::kernels {
namespace {

std::atomic<const Ops*> g_active{nullptr};

const Ops* resolve_default() {
  if (const char* env = std::getenv("EDGESIM_KERNELS")) {
    const std::string name(env);
    if (name == "scalar") return &scalar_ops();
    if (name == "avx2" && avx2_available()) return &avx2_ops();
    // Unknown or unsupported names fall back to the default choice.
  }
  if (avx2_available()) return &avx2_ops();
  return &scalar_ops();
}

}  // namespace

bool avx2_available() {
#if defined(EDGESIM_HAVE_AVX2_KERNELS)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

#if !defined(EDGESIM_HAVE_AVX2_KERNELS)
const Ops& avx2_ops() {
  throw std::logic_error("avx2 kernels not compiled into this binary");
}
#endif

const Ops& active() {
  const Ops* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = resolve_default();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void force(const std::string& name) {
  if (name == "scalar") {
    g_active.store(&scalar_ops(), std::memory_order_release);
    return;
  }
  if (name == "avx2") {
    if (!avx2_available()) {
      throw std::invalid_argument("avx2 kernels unavailable on this machine");
    }
    g_active.store(&avx2_ops(), std::memory_order_release);
    return;
  }
  throw std::invalid_argument("unknown kernel table: " + name);
}

std::vector<const Ops*> all_available() {
  std::vector<const Ops*> tables{&scalar_ops()};
  if (avx2_available()) tables.push_back(&avx2_ops());
  return tables;
}

}  // namespace edgesim::kernels
