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

#include <cmath>

namespace edgesim {

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  int evals = 0;
};

// Golden-section search for the minimum of a unimodal f on [lo, hi].
// Shrinks the bracket until its width is below `tol` (absolute).
template <typename F>
GoldenResult golden_section_min(F&& f, double lo, double hi, double tol,
                                int max_iters = 200) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  for (int it = 0; (b - a) > tol && it < max_iters; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  const double x = 0.5 * (a + b);
  return {x, f(x), evals + 1};
}

}  // namespace edgesim
