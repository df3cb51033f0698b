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
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "qtomo/estimator.hpp"
#include "qtomo/frames.hpp"
#include "qtomo/quantum_core.hpp"

namespace qtomo {

struct SampleSpec {
  int n_theta = 20;
  int n_phi = 20;

  void validate() const;
  std::size_t size() const { return static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi); }
};

struct SampleState {
  double theta;
  double phi;
  Ket ket;
};

/// Midpoint grid: theta_j = pi (j + 1/2) / n_theta, phi_k = 2 pi k / n_phi,
/// theta outer.
std::vector<SampleState> generate_sample(const SampleSpec& spec);

/// Per-state outcome of one (frame, N, epsilon) cell.
struct StateOutcome {
  std::size_t state_index;
  double theta;
  double phi;
  double fidelity;
  double purity;
  double objective;
  bool converged;
};

struct RunSummary {
  std::string frame_id;
  double mean_photons = 0.0;
  double epsilon = 0.0;
  double f_avg = 0.0;
  double f_std = 0.0;
  double gamma_avg = 0.0;
  double gamma_std = 0.0;
  std::size_t n_states = 0;
  std::size_t n_converged = 0;
  std::uint64_t master_seed = 0;
  // Not part of the summary CSV.
  double f_min = 0.0;
  double objective_max = 0.0;
};

struct RunOptions {
  SampleSpec sample;
  std::uint64_t master_seed = 0;
  EstimatorConfig estimator;
  // 0 = one worker per hardware thread.
  unsigned workers = 1;
};

/// Seed for the estimator's random starts for one sample state.
std::uint64_t start_seed_for(std::uint64_t master_seed, std::size_t state_index, const std::string& frame_id);

/// Simulates, reconstructs and scores every sample state for one
/// (frame, N, epsilon) cell. Fidelity is taken against the pure input state.
/// Output is independent of the worker count.
RunSummary run_cell(const Frame& frame, double mean_photons, double epsilon, const RunOptions& opts,
                    std::vector<StateOutcome>* details = nullptr);

/// As run_cell, but the counts are set to their exact expectations.
RunSummary run_noiseless_cell(const Frame& frame, double mean_photons, const RunOptions& opts,
                              std::vector<StateOutcome>* details = nullptr);

/// Poisson noise only (epsilon = 0), one summary per photon number.
std::vector<RunSummary> run_photon_sweep(const Frame& frame, const std::vector<double>& photons,
                                         const RunOptions& opts);

/// Poisson plus dark counts at fixed N, one summary per epsilon.
std::vector<RunSummary> run_epsilon_sweep(const Frame& frame, double mean_photons,
                                          const std::vector<double>& epsilons, const RunOptions& opts);

inline constexpr const char* kSummaryCsvHeader =
    "frame_id,mean_photons,epsilon,f_avg,f_std,gamma_avg,gamma_std,n_states,n_converged,master_seed";
inline constexpr const char* kDetailCsvHeader = "state_index,theta,phi,fidelity,purity,objective,converged";

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows);
std::string summary_csv(const std::vector<RunSummary>& rows);
void write_detail_csv(std::ostream& out, const std::vector<StateOutcome>& rows);

/// Flat `key = value` file; `#` starts a comment. Duplicate or unknown keys
/// are reported by the caller, not here.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Comma-separated numbers, or an inclusive range `start:stop:step`.
std::vector<double> parse_number_list(const std::string& text);
std::vector<std::string> parse_string_list(const std::string& text);

}  // namespace qtomo
