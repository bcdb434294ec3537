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

// Scalar reference kernels. These define the semantics the SIMD variants are
// equivalence-tested against; keep them simple and obviously correct.

#include "edgesim/kernels.hpp"

namespace edgesim::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double reduce_add_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sum_sq_diff_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void matvec_scalar(const double* w, const double* x, double* y,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = dot_scalar(w + r * cols, x, cols);
  }
}

void matvec_t_scalar(const double* w, const double* y, double* x,
                     std::size_t rows, std::size_t cols) {
  for (std::size_t c = 0; c < cols; ++c) x[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    axpy_scalar(y[r], w + r * cols, x, cols);
  }
}

void relu_scalar(const double* z, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_mask_scalar(const double* z, const double* g, double* out,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i] > 0.0 ? g[i] : 0.0;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table{
      "scalar",        dot_scalar,    axpy_scalar,     scale_scalar,
      reduce_add_scalar, sum_sq_diff_scalar, matvec_scalar, matvec_t_scalar,
      relu_scalar,     relu_mask_scalar,
  };
  return table;
}

}  // namespace edgesim::kernels
