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

// Throughput comparison of the kernel tables. Not a unit test; run by hand
// when touching the kernels.

#include <chrono>
#include <cstdio>
#include <vector>

#include "edgesim/kernels.hpp"
#include "edgesim/rng.hpp"

using namespace edgesim;

namespace {

volatile double g_sink = 0.0;

template <typename Fn>
double seconds_per_call(Fn&& fn, int reps) {
  // One warmup, then best of three timed runs.
  fn();
  double best = 1e300;
  for (int run = 0; run < 3; ++run) {
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    best = std::min(best, elapsed / reps);
  }
  return best;
}

}  // namespace

int main() {
  const std::size_t n = 4096;
  const std::size_t rows = 64;
  const std::size_t cols = 64;
  const int reps = 20000;

  Rng rng(1);
  std::vector<double> a(n);
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.uniform(-1.0, 1.0);
    b[i] = rng.uniform(-1.0, 1.0);
  }
  std::vector<double> w(rows * cols);
  for (double& v : w) v = rng.uniform(-1.0, 1.0);
  std::vector<double> x(cols);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  std::vector<double> y(rows);

  std::printf("%-8s %-14s %-14s %-14s\n", "table", "dot4096 (ns)", "ssd4096 (ns)",
              "matvec64 (ns)");
  for (const kernels::Ops* table : kernels::all_available()) {
    const double dot_ns =
        seconds_per_call([&] { g_sink = table->dot(a.data(), b.data(), n); }, reps) * 1e9;
    const double ssd_ns =
        seconds_per_call([&] { g_sink = table->sum_sq_diff(a.data(), b.data(), n); }, reps) * 1e9;
    const double mv_ns = seconds_per_call(
        [&] {
          table->matvec(w.data(), x.data(), y.data(), rows, cols);
          g_sink = y[0];
        },
        reps) * 1e9;
    std::printf("%-8s %-14.1f %-14.1f %-14.1f\n", table->name, dot_ns, ssd_ns, mv_ns);
  }
  std::printf("active: %s\n", kernels::active().name);
  return 0;
}
