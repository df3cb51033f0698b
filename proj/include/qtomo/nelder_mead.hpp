// Copyright 2026 The qtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace qtomo {

struct NelderMeadOptions {
  int max_iterations = 2000;
  // Stop once max f - min f over the simplex is at most this (absolute).
  double objective_tolerance = 1e-9;
  // ... or once every vertex is within this (max-norm) of the best vertex.
  double param_tolerance = 1e-8;
  // Edge length of the axis-aligned initial simplex.
  double initial_step = 0.1;
  bool record_history = false;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  // Best objective value after each iteration (only if record_history).
  std::vector<double> best_history;
};

/// Standard Nelder-Mead simplex minimization with reflection 1, expansion 2,
/// contraction 0.5 and shrink 0.5.
template <typename Objective>
NelderMeadResult nelder_mead(Objective&& f, std::vector<double> x0, const NelderMeadOptions& opts) {
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  const std::size_t n = x0.size();
  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1][i] += opts.initial_step;
  }
  std::vector<double> values(n + 1);
  NelderMeadResult result;
  for (std::size_t i = 0; i <= n; ++i) {
    values[i] = f(simplex[i]);
  }
  result.evaluations = static_cast<int>(n + 1);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), reflected(n), expanded(n), contracted(n);

  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s(n + 1);
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s[i] = std::move(simplex[order[i]]);
      v[i] = values[order[i]];
    }
    simplex = std::move(s);
    values = std::move(v);
  };

  auto has_converged = [&] {
    if (values[n] - values[0] <= opts.objective_tolerance) return true;
    double spread = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        spread = std::max(spread, std::abs(simplex[i][j] - simplex[0][j]));
      }
    }
    return spread <= opts.param_tolerance;
  };

  auto along = [&](double coeff, const std::vector<double>& from, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coeff * (from[j] - centroid[j]);
  };

  sort_simplex();
  while (result.iterations < opts.max_iterations) {
    if (has_converged()) {
      result.converged = true;
      break;
    }
    ++result.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    along(-kReflect, simplex[n], reflected);
    const double f_reflected = f(reflected);
    ++result.evaluations;

    if (f_reflected < values[0]) {
      along(-kReflect * kExpand, simplex[n], expanded);
      const double f_expanded = f(expanded);
      ++result.evaluations;
      if (f_expanded < f_reflected) {
        simplex[n] = expanded;
        values[n] = f_expanded;
      } else {
        simplex[n] = reflected;
        values[n] = f_reflected;
      }
    } else if (f_reflected < values[n - 1]) {
      simplex[n] = reflected;
      values[n] = f_reflected;
    } else {
      bool shrink = false;
      if (f_reflected < values[n]) {
        // Outside contraction.
        along(-kReflect * kContract, simplex[n], contracted);
        const double f_contracted = f(contracted);
        ++result.evaluations;
        if (f_contracted <= f_reflected) {
          simplex[n] = contracted;
          values[n] = f_contracted;
        } else {
          shrink = true;
        }
      } else {
        // Inside contraction.
        along(kContract, simplex[n], contracted);
        const double f_contracted = f(contracted);
        ++result.evaluations;
        if (f_contracted < values[n]) {
          simplex[n] = contracted;
          values[n] = f_contracted;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            simplex[i][j] = simplex[0][j] + kShrink * (simplex[i][j] - simplex[0][j]);
          }
          values[i] = f(simplex[i]);
          ++result.evaluations;
        }
      }
    }
    sort_simplex();
    if (opts.record_history) result.best_history.push_back(values[0]);
  }
  if (!result.converged && has_converged()) result.converged = true;

  result.x = simplex[0];
  result.value = values[0];
  return result;
}

}  // namespace qtomo
