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

#include "qtomo/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "gtest/gtest.h"
#include "qtomo/errors.hpp"

using namespace qtomo;

namespace {

RunOptions small_run(unsigned workers = 1) {
  RunOptions o;
  o.sample = {4, 5};
  o.master_seed = 7;
  o.workers = workers;
  return o;
}

}  // namespace

TEST(GenerateSample, GridCardinalityAndDistinctness) {
  const std::vector<SampleState> s = generate_sample({20, 20});
  ASSERT_EQ(s.size(), 400u);
  for (std::size_t a = 0; a < s.size(); ++a) {
    for (std::size_t b = a + 1; b < s.size(); ++b) {
      EXPECT_LT(std::abs(s[a].ket.amplitudes().dot(s[b].ket.amplitudes())), 1.0 - 1e-9) << a << "," << b;
    }
  }
}

TEST(GenerateSample, TwoByTwo) {
  const std::vector<SampleState> s = generate_sample({2, 2});
  ASSERT_EQ(s.size(), 4u);
  constexpr double pi = std::numbers::pi;
  EXPECT_DOUBLE_EQ(s[0].theta, pi / 4);
  EXPECT_DOUBLE_EQ(s[0].phi, 0.0);
  EXPECT_DOUBLE_EQ(s[1].phi, pi);
  EXPECT_DOUBLE_EQ(s[2].theta, 3 * pi / 4);
  EXPECT_NEAR(s[0].ket[0].real(), std::cos(pi / 8), 1e-15);
  EXPECT_NEAR(s[0].ket[1].real(), std::sin(pi / 8), 1e-15);
  EXPECT_NEAR(s[0].ket[1].imag(), 0.0, 1e-15);
}

TEST(GenerateSample, RejectsDegenerateGrid) {
  EXPECT_THROW(generate_sample({1, 20}), DomainError);
  EXPECT_THROW(generate_sample({20, 1}), DomainError);
}

TEST(RunCell, SummaryFieldsAndRanges) {
  const RunOptions o = small_run();
  std::vector<StateOutcome> details;
  const RunSummary r = run_cell(sic_frame(), 25.0, 0.2, o, &details);
  EXPECT_EQ(r.frame_id, "sic");
  EXPECT_EQ(r.n_states, 20u);
  EXPECT_EQ(r.master_seed, 7u);
  EXPECT_EQ(r.mean_photons, 25.0);
  EXPECT_EQ(r.epsilon, 0.2);
  ASSERT_EQ(details.size(), 20u);
  double f_sum = 0.0;
  for (const StateOutcome& d : details) f_sum += d.fidelity;
  EXPECT_DOUBLE_EQ(r.f_avg, f_sum / 20.0);
  EXPECT_GE(r.f_avg, 0.0);
  EXPECT_LE(r.f_avg, 1.0);
  EXPECT_GE(r.gamma_avg, 0.5);
  EXPECT_LE(r.gamma_avg, 1.0);
  EXPECT_LE(r.n_converged, r.n_states);
}

TEST(RunCell, IndependentOfWorkerCount) {
  const std::string one = summary_csv({run_cell(mub_frame(), 5.0, 0.1, small_run(1))});
  const std::string four = summary_csv({run_cell(mub_frame(), 5.0, 0.1, small_run(4))});
  const std::string again = summary_csv({run_cell(mub_frame(), 5.0, 0.1, small_run(1))});
  EXPECT_EQ(one, four);
  EXPECT_EQ(one, again);
}

TEST(RunCell, SeedChangesResults) {
  RunOptions a = small_run(), b = small_run();
  b.master_seed = 8;
  EXPECT_NE(run_cell(sic_frame(), 5.0, 0.0, a).f_avg, run_cell(sic_frame(), 5.0, 0.0, b).f_avg);
}

TEST(Sweeps, EpsilonZeroMatchesPhotonSweep) {
  const RunOptions o = small_run();
  const std::vector<RunSummary> a = run_photon_sweep(sic_frame(), {10.0}, o);
  const std::vector<RunSummary> b = run_epsilon_sweep(sic_frame(), 10.0, {0.0, 0.5}, o);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(summary_csv(a), summary_csv({b[0]}));
}

TEST(Sweeps, FidelityImprovesWithPhotons) {
  // Non-decreasing within two standard errors over the table1 photon grid.
  RunOptions o;
  o.master_seed = 42;
  const std::vector<double> photons{1, 5, 10, 25, 50, 100, 1000, 10000};
  for (const Frame& f : {sic_frame(), mub_frame()}) {
    const std::vector<RunSummary> rows = run_photon_sweep(f, photons, o);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double se = std::hypot(rows[i].f_std, rows[i - 1].f_std) / std::sqrt(400.0);
      EXPECT_GE(rows[i].f_avg, rows[i - 1].f_avg - 2 * se) << f.id() << " N=" << rows[i].mean_photons;
    }
  }
}

TEST(NoiselessCell, RecoversSample) {
  RunOptions o;
  o.sample = {6, 6};
  const RunSummary r = run_noiseless_cell(mub_frame(), 1000.0, o);
  EXPECT_GE(r.f_min, 0.9999);
  EXPECT_LE(r.objective_max, 1e-6 * 1000.0 * 1000.0);
}

TEST(SummaryCsv, Schema) {
  RunSummary r;
  r.frame_id = "mub";
  r.mean_photons = 10000;
  r.epsilon = 0.05;
  r.f_avg = 0.5;
  r.n_states = 400;
  r.n_converged = 399;
  r.master_seed = 42;
  const std::string csv = summary_csv({r});
  EXPECT_EQ(csv,
            "frame_id,mean_photons,epsilon,f_avg,f_std,gamma_avg,gamma_std,n_states,n_converged,master_seed\n"
            "mub,10000,0.05,0.5000000000,0.0000000000,0.0000000000,0.0000000000,400,399,42\n");
}

TEST(ParseNumberList, ListsAndRanges) {
  EXPECT_EQ(parse_number_list("1,5, 10"), (std::vector<double>{1, 5, 10}));
  const std::vector<double> r = parse_number_list("0:1:0.05");
  ASSERT_EQ(r.size(), 21u);
  EXPECT_EQ(r.front(), 0.0);
  EXPECT_EQ(r[3], 0.15);
  EXPECT_EQ(r.back(), 1.0);
  EXPECT_EQ(parse_number_list("0.1:0.5:0.1").size(), 5u);
  EXPECT_THROW(parse_number_list(""), DomainError);
  EXPECT_THROW(parse_number_list("1,x"), DomainError);
  EXPECT_THROW(parse_number_list("0:1"), DomainError);
  EXPECT_THROW(parse_number_list("1:0:0.1"), DomainError);
  EXPECT_THROW(parse_number_list("0:1:0"), DomainError);
}

TEST(ConfigFile, KeyValues) {
  const auto path = std::filesystem::temp_directory_path() / "qtomo_config_test.cfg";
  std::ofstream(path) << "# table 1\nframes = sic,mub\nphotons=1,5  # few\n\nseed = 42\n";
  const auto cfg = read_config_file(path);
  EXPECT_EQ(cfg.at("frames"), "sic,mub");
  EXPECT_EQ(cfg.at("photons"), "1,5");
  EXPECT_EQ(cfg.at("seed"), "42");

  std::ofstream(path) << "seed = 1\nseed = 2\n";
  EXPECT_THROW(read_config_file(path), FileFormatError);
  std::ofstream(path) << "just a line\n";
  EXPECT_THROW(read_config_file(path), FileFormatError);
}
