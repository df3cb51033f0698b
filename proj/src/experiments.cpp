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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "qtomo/errors.hpp"
#include "qtomo/measurement_sim.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

void SampleSpec::validate() const {
  if (n_theta < 2 || n_phi < 2) {
    throw DomainError("sample grid needs at least 2 points in theta and in phi");
  }
}

std::vector<SampleState> generate_sample(const SampleSpec& spec) {
  spec.validate();
  constexpr double pi = std::numbers::pi;
  std::vector<SampleState> sample;
  sample.reserve(spec.size());
  for (int j = 0; j < spec.n_theta; ++j) {
    const double theta = pi * (j + 0.5) / spec.n_theta;
    for (int k = 0; k < spec.n_phi; ++k) {
      const double phi = 2.0 * pi * k / spec.n_phi;
      sample.push_back({theta, phi, ket_from_angles(theta, phi)});
    }
  }
  return sample;
}

std::uint64_t start_seed_for(std::uint64_t master_seed, std::size_t state_index, const std::string& frame_id) {
  return derive_seed({master_seed, state_index, fnv1a64(frame_id), fnv1a64("starts")});
}

namespace {

template <typename MakeRecord>
RunSummary run_states(const Frame& frame, double mean_photons, double epsilon, const RunOptions& opts,
                      MakeRecord&& make_record, std::vector<StateOutcome>* details) {
  opts.estimator.validate();
  const std::vector<SampleState> sample = generate_sample(opts.sample);
  std::vector<StateOutcome> outcomes(sample.size());

  auto work = [&](std::size_t i) {
    const SampleState& s = sample[i];
    const CountRecord record = make_record(s, i);
    EstimatorConfig cfg = opts.estimator;
    cfg.start_seed = start_seed_for(opts.master_seed, i, frame.id());
    const EstimateResult est = estimate(frame, record, cfg);
    outcomes[i] = {i, s.theta, s.phi, fidelity(s.ket, est.rho), purity(est.rho), est.objective_value, est.converged};
  };

  unsigned workers = opts.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.workers;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, sample.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < sample.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < sample.size() && !failed; i = next++) work(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
        (void)w;
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  RunSummary summary;
  summary.frame_id = frame.id();
  summary.mean_photons = mean_photons;
  summary.epsilon = epsilon;
  summary.n_states = outcomes.size();
  summary.master_seed = opts.master_seed;
  summary.f_min = 1.0;
  double f_sum = 0.0, g_sum = 0.0;
  for (const StateOutcome& o : outcomes) {
    f_sum += o.fidelity;
    g_sum += o.purity;
    summary.f_min = std::min(summary.f_min, o.fidelity);
    summary.objective_max = std::max(summary.objective_max, o.objective);
    if (o.converged) {
      ++summary.n_converged;
    } else {
      spdlog::debug("{} N={} eps={}: state {} did not converge (objective {})", frame.id(), mean_photons, epsilon,
                    o.state_index, o.objective);
    }
  }
  const auto n = static_cast<double>(outcomes.size());
  summary.f_avg = f_sum / n;
  summary.gamma_avg = g_sum / n;
  double f_var = 0.0, g_var = 0.0;
  for (const StateOutcome& o : outcomes) {
    f_var += (o.fidelity - summary.f_avg) * (o.fidelity - summary.f_avg);
    g_var += (o.purity - summary.gamma_avg) * (o.purity - summary.gamma_avg);
  }
  summary.f_std = std::sqrt(f_var / (n - 1.0));
  summary.gamma_std = std::sqrt(g_var / (n - 1.0));
  if (summary.n_converged < summary.n_states) {
    spdlog::info("{} N={} eps={}: {} of {} estimates hit the iteration cap", frame.id(), mean_photons, epsilon,
                 summary.n_states - summary.n_converged, summary.n_states);
  }
  if (details) *details = std::move(outcomes);
  return summary;
}

}  // namespace

RunSummary run_cell(const Frame& frame, double mean_photons, double epsilon, const RunOptions& opts,
                    std::vector<StateOutcome>* details) {
  NoiseConfig noise{mean_photons, epsilon, opts.master_seed};
  noise.validate();
  return run_states(
      frame, mean_photons, epsilon, opts,
      [&](const SampleState& s, std::size_t i) { return simulate_counts_noisy(frame, s.ket, noise, i); }, details);
}

RunSummary run_noiseless_cell(const Frame& frame, double mean_photons, const RunOptions& opts,
                              std::vector<StateOutcome>* details) {
  return run_states(
      frame, mean_photons, 0.0, opts,
      [&](const SampleState& s, std::size_t) { return noiseless_counts(frame, projector(s.ket), mean_photons); },
      details);
}

std::vector<RunSummary> run_photon_sweep(const Frame& frame, const std::vector<double>& photons,
                                         const RunOptions& opts) {
  std::vector<RunSummary> rows;
  for (double n : photons) rows.push_back(run_cell(frame, n, 0.0, opts));
  return rows;
}

std::vector<RunSummary> run_epsilon_sweep(const Frame& frame, double mean_photons,
                                          const std::vector<double>& epsilons, const RunOptions& opts) {
  std::vector<RunSummary> rows;
  for (double eps : epsilons) rows.push_back(run_cell(frame, mean_photons, eps, opts));
  return rows;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_number(const std::string& token) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::logic_error&) {
    throw DomainError("not a number: '" + token + "'");
  }
  if (used != token.size() || !std::isfinite(v)) {
    throw DomainError("not a number: '" + token + "'");
  }
  return v;
}

}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows) {
  out << kSummaryCsvHeader << '\n';
  for (const RunSummary& r : rows) {
    out << r.frame_id << ',' << format_number(r.mean_photons) << ',' << format_number(r.epsilon) << ','
        << format_fixed(r.f_avg) << ',' << format_fixed(r.f_std) << ',' << format_fixed(r.gamma_avg) << ','
        << format_fixed(r.gamma_std) << ',' << r.n_states << ',' << r.n_converged << ',' << r.master_seed << '\n';
  }
}

std::string summary_csv(const std::vector<RunSummary>& rows) {
  std::ostringstream out;
  write_summary_csv(out, rows);
  return out.str();
}

void write_detail_csv(std::ostream& out, const std::vector<StateOutcome>& rows) {
  out << kDetailCsvHeader << '\n';
  for (const StateOutcome& o : rows) {
    out << o.state_index << ',' << format_fixed(o.theta) << ',' << format_fixed(o.phi) << ','
        << format_fixed(o.fidelity) << ',' << format_fixed(o.purity) << ',' << format_number(o.objective) << ','
        << (o.converged ? 1 : 0) << '\n';
  }
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FileFormatError(path.string(), 0, "cannot open config file");
  }
  std::map<std::string, std::string> values;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FileFormatError(path.string(), line_no, "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw FileFormatError(path.string(), line_no, "empty key");
    }
    if (!values.emplace(key, value).second) {
      throw FileFormatError(path.string(), line_no, "duplicate key '" + key + "'");
    }
  }
  return values;
}

std::vector<double> parse_number_list(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) {
    throw DomainError("empty number list");
  }
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(trim(p));
    if (parts.size() != 3) {
      throw DomainError("range must be start:stop:step, got '" + s + "'");
    }
    const double start = to_number(parts[0]);
    const double stop = to_number(parts[1]);
    const double step = to_number(parts[2]);
    if (!(step > 0.0) || stop < start) {
      throw DomainError("range needs step > 0 and stop >= start: '" + s + "'");
    }
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) {
      // Snap to the nearest 1e-12 so 0:1:0.05 yields 0.15, not 0.15000000000000002.
      const double v = start + static_cast<double>(i) * step;
      out.push_back(std::round(v * 1e12) / 1e12);
    }
    return out;
  }
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(to_number(trim(p)));
  return out;
}

std::vector<std::string> parse_string_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    p = trim(p);
    if (!p.empty()) out.push_back(p);
  }
  if (out.empty()) {
    throw DomainError("empty list");
  }
  return out;
}

}  // namespace qtomo
