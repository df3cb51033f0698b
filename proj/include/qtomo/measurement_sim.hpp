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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qtomo/frames.hpp"
#include "qtomo/quantum_core.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

struct NoiseConfig {
  double mean_photons = 1000.0;  // expected photons per measurement
  double epsilon = 0.0;          // dark-count admixture of the maximally mixed state
  std::uint64_t seed = 0;

  /// Throws DomainError unless mean_photons > 0 and epsilon in [0, 1].
  void validate() const;
};

/// Simulated counts for one state measured with one frame.
struct CountRecord {
  std::string frame_id;
  std::vector<double> counts;
  std::vector<std::int64_t> poisson_draws;
  NoiseConfig config;
  std::uint64_t state_index = 0;
};

/// Exact Poisson(lambda) draw. Sequential-search inversion for lambda < 30,
/// Hormann's PTRS transformed rejection otherwise.
std::int64_t poisson_sample(double lambda, Rng& stream);

/// Seed of the substream that drives element `element_index` of the frame
/// `frame_id` for sample state `state_index`. Draws are keyed by element index,
/// not by evaluation order, so states and elements may be simulated in any
/// order or concurrently.
std::uint64_t element_seed(std::uint64_t master_seed, std::uint64_t state_index, const std::string& frame_id,
                           std::uint64_t element_index);

/// Poisson noise only: counts_k = N_k |<xi_k|psi>|^2 with N_k ~ Poisson(N).
/// config.epsilon must be 0.
CountRecord simulate_counts(const Frame& frame, const Ket& psi, const NoiseConfig& config,
                            std::uint64_t state_index = 0);

/// Poisson plus dark counts: counts_k = (1 - eps) N_k |<xi_k|psi>|^2 + N_k eps / 2,
/// one draw N_k per element shared by both terms.
CountRecord simulate_counts_noisy(const Frame& frame, const Ket& psi, const NoiseConfig& config,
                                  std::uint64_t state_index = 0);

/// Counts equal to their expectation N Tr(|xi_k><xi_k| rho); no sampling.
/// poisson_draws hold ceil(N) so that counts_k <= poisson_draws_k still holds.
CountRecord noiseless_counts(const Frame& frame, const DensityMatrix& rho, double mean_photons);

/// CSV `frame_id,element_index,poisson_draw,count` (1-based element index)
/// plus a JSON sidecar at `sidecar_path(csv_path)` holding the NoiseConfig.
void write_count_record(const CountRecord& record, const std::filesystem::path& csv_path);
CountRecord read_count_record(const std::filesystem::path& csv_path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace qtomo
