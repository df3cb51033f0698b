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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qtomo/frames.hpp"
#include "qtomo/measurement_sim.hpp"
#include "qtomo/quantum_core.hpp"

namespace qtomo {

struct EstimatorConfig {
  int n_starts = 5;
  int max_iterations = 2000;       // per start
  double objective_tolerance = 1e-9;
  double param_tolerance = 1e-8;
  std::uint64_t start_seed = 0;
  double initial_step = 0.1;

  void validate() const;
};

struct EstimateResult {
  DensityMatrix rho = DensityMatrix::maximally_mixed(2);
  CholeskyParams params;
  double objective_value = 0.0;  // photons^2
  int iterations_used = 0;       // of the winning start
  int starts_tried = 0;
  int best_start = 0;            // 0-based
  bool converged = false;
  // Set when the frame fails the injectivity check; the estimate is still returned.
  std::optional<std::string> warning;
};

/// Penalty returned by the objective inside the degenerate zone |t|^2 < 1e-12.
inline constexpr double kDegeneratePenalty = 1e30;
inline constexpr double kDegenerateNormSquared = 1e-12;
// Two starts whose objectives differ by at most this are tied.
inline constexpr double kStartTieTolerance = 1e-12;

/// n_k = N Tr(|xi_k><xi_k| rho).
std::vector<double> expected_counts(const Frame& frame, const DensityMatrix& rho, double mean_photons);

/// Least-squares objective sum_k (N <xi_k|rho(t)|xi_k> - counts_k)^2 for a
/// qubit frame, with the frame's projector entries precomputed.
class LsObjective {
 public:
  LsObjective(const Frame& frame, const CountRecord& record);

  double operator()(const CholeskyParams& params) const;
  double operator()(const std::vector<double>& t) const;

 private:
  struct Element {
    // For xi = (x, y): <xi|rho|xi> = |x|^2 rho00 + |y|^2 rho11 + 2 Re(conj(x) y rho01).
    double p00;
    double p11;
    Complex cross;
    double count;
  };
  double evaluate(double t1, double t2, double t3, double t4) const;

  std::vector<Element> elements_;
  double mean_photons_;
};

double ls_objective(const CholeskyParams& params, const Frame& frame, const CountRecord& record);

/// Multi-start Nelder-Mead least-squares fit of rho over CholeskyParams.
/// Start 0 is the maximally mixed point (1, 1, 0, 0)/sqrt(2); the others are
/// uniform on [-1, 1]^4 from cfg.start_seed. The lowest objective wins, ties
/// go to the lower start index.
EstimateResult estimate(const Frame& frame, const CountRecord& record, const EstimatorConfig& cfg);

/// As above with a caller-supplied list of starting points (used to check
/// sign symmetry); cfg.n_starts is ignored.
EstimateResult estimate_from(const Frame& frame, const CountRecord& record, const EstimatorConfig& cfg,
                             const std::vector<CholeskyParams>& starts);

std::vector<CholeskyParams> start_points(const EstimatorConfig& cfg);

}  // namespace qtomo
