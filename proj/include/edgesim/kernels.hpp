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

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace edgesim::kernels {

// The arithmetic inner loops shared by the forecaster and the feature code.
// Every entry has a scalar reference implementation and, on x86-64, an AVX2
// variant. The active table is resolved once per process, so identical
// inputs produce identical bits for the lifetime of the process.
//
// Matrices are dense row-major, rows x cols.
struct Ops {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  double (*reduce_add)(const double* x, std::size_t n);
  // sum_i (a_i - b_i)^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  // y = W x
  void (*matvec)(const double* w, const double* x, double* y,
                 std::size_t rows, std::size_t cols);
  // x = W^T y
  void (*matvec_t)(const double* w, const double* y, double* x,
                   std::size_t rows, std::size_t cols);
  // out_i = max(z_i, 0)
  void (*relu)(const double* z, double* out, std::size_t n);
  // out_i = z_i > 0 ? g_i : 0
  void (*relu_mask)(const double* z, const double* g, double* out,
                    std::size_t n);
};

const Ops& scalar_ops();

// True when the AVX2 variant was compiled in and the CPU reports AVX2+FMA.
bool avx2_available();
// Valid only when avx2_available().
const Ops& avx2_ops();

// Active table. EDGESIM_KERNELS=scalar|avx2 in the environment overrides the
// default choice (best supported variant).
const Ops& active();

// Pins the active table by name; throws std::invalid_argument for unknown or
// unsupported names. Intended for tests and benchmarks.
void force(const std::string& name);

// Every table usable on this machine (scalar first).
std::vector<const Ops*> all_available();

}  // namespace edgesim::kernels
