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

#include "qtomo/measurement_sim.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "qtomo/errors.hpp"

namespace qtomo {

void NoiseConfig::validate() const {
  if (!(mean_photons > 0.0) || !std::isfinite(mean_photons)) {
    throw DomainError("mean photon number must be positive and finite");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw DomainError("epsilon must lie in [0, 1]");
  }
}

namespace {

std::int64_t poisson_inversion(double lambda, Rng& stream) {
  const double u = stream.uniform();
  double term = std::exp(-lambda);
  double cdf = term;
  std::int64_t k = 0;
  // The tail beyond k = 200 has probability below 1e-100 for lambda < 30; the
  // cap only guards against cdf saturating under rounding.
  while (u > cdf && k < 200) {
    ++k;
    term *= lambda / static_cast<double>(k);
    cdf += term;
  }
  return k;
}

// W. Hormann, "The transformed rejection method for generating Poisson random
// variables", Insurance: Mathematics and Economics 12 (1993).
std::int64_t poisson_ptrs(double lambda, Rng& stream) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = stream.uniform() - 0.5;
    const double v = stream.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) {
      return static_cast<std::int64_t>(k);
    }
    if (k < 0.0 || (us < 0.013 && v > us)) {
      continue;
    }
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

CountRecord simulate(const Frame& frame, const Ket& psi, const NoiseConfig& config, std::uint64_t state_index) {
  config.validate();
  const std::vector<double> intensities = intensity_map(frame, psi);
  const double eps = config.epsilon;
  const double background = eps / static_cast<double>(frame.dim());

  CountRecord record;
  record.frame_id = frame.id();
  record.config = config;
  record.state_index = state_index;
  record.counts.reserve(frame.size());
  record.poisson_draws.reserve(frame.size());
  for (std::size_t k = 0; k < frame.size(); ++k) {
    Rng stream(element_seed(config.seed, state_index, frame.id(), k));
    const std::int64_t draw = poisson_sample(config.mean_photons, stream);
    const double n = static_cast<double>(draw);
    record.poisson_draws.push_back(draw);
    record.counts.push_back((1.0 - eps) * n * intensities[k] + n * background);
  }
  return record;
}

}  // namespace

std::int64_t poisson_sample(double lambda, Rng& stream) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("poisson_sample: lambda must be positive and finite");
  }
  return lambda < 30.0 ? poisson_inversion(lambda, stream) : poisson_ptrs(lambda, stream);
}

std::uint64_t element_seed(std::uint64_t master_seed, std::uint64_t state_index, const std::string& frame_id,
                           std::uint64_t element_index) {
  return derive_seed({master_seed, state_index, fnv1a64(frame_id), element_index});
}

CountRecord simulate_counts(const Frame& frame, const Ket& psi, const NoiseConfig& config,
                            std::uint64_t state_index) {
  if (config.epsilon != 0.0) {
    throw DomainError("simulate_counts: epsilon must be 0 (use simulate_counts_noisy)");
  }
  return simulate(frame, psi, config, state_index);
}

CountRecord simulate_counts_noisy(const Frame& frame, const Ket& psi, const NoiseConfig& config,
                                  std::uint64_t state_index) {
  return simulate(frame, psi, config, state_index);
}

CountRecord noiseless_counts(const Frame& frame, const DensityMatrix& rho, double mean_photons) {
  NoiseConfig config{mean_photons, 0.0, 0};
  config.validate();
  if (frame.dim() != rho.dim()) {
    throw DomainError("noiseless_counts: dimension mismatch");
  }
  CountRecord record;
  record.frame_id = frame.id();
  record.config = config;
  const auto ceiling = static_cast<std::int64_t>(std::ceil(mean_photons));
  for (const Ket& xi : frame.elements()) {
    const double p = xi.amplitudes().dot(rho.entries() * xi.amplitudes()).real();
    record.counts.push_back(mean_photons * p);
    record.poisson_draws.push_back(ceiling);
  }
  return record;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_count_record(const CountRecord& record, const std::filesystem::path& csv_path) {
  std::ofstream csv(csv_path);
  if (!csv) {
    throw std::runtime_error("cannot write " + csv_path.string());
  }
  csv << "frame_id,element_index,poisson_draw,count\n" << std::setprecision(17);
  for (std::size_t k = 0; k < record.counts.size(); ++k) {
    csv << record.frame_id << ',' << (k + 1) << ',' << record.poisson_draws[k] << ',' << record.counts[k] << '\n';
  }
  if (!csv) {
    throw std::runtime_error("failed writing " + csv_path.string());
  }

  nlohmann::ordered_json meta;
  meta["frame_id"] = record.frame_id;
  meta["mean_photons"] = record.config.mean_photons;
  meta["epsilon"] = record.config.epsilon;
  meta["seed"] = record.config.seed;
  meta["state_index"] = record.state_index;
  std::ofstream json(sidecar_path(csv_path));
  if (!json) {
    throw std::runtime_error("cannot write " + sidecar_path(csv_path).string());
  }
  json << meta.dump(2) << '\n';
}

CountRecord read_count_record(const std::filesystem::path& csv_path) {
  const std::string name = csv_path.string();
  std::ifstream csv(csv_path);
  if (!csv) {
    throw FileFormatError(name, 0, "cannot open count record");
  }
  CountRecord record;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(csv, line) || line.rfind("frame_id,element_index,poisson_draw,count", 0) != 0) {
    throw FileFormatError(name, 1, "missing header 'frame_id,element_index,poisson_draw,count'");
  }
  while (std::getline(csv, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string field; std::getline(ss, field, ',');) fields.push_back(field);
    if (fields.size() != 4) {
      throw FileFormatError(name, line_no, "expected 4 fields");
    }
    try {
      std::size_t used = 0;
      const long long index = std::stoll(fields[1], &used);
      if (used != fields[1].size() || index != static_cast<long long>(record.counts.size() + 1)) {
        throw FileFormatError(name, line_no, "element indices must run 1, 2, ... in order");
      }
      const long long draw = std::stoll(fields[2], &used);
      if (used != fields[2].size() || draw < 0) {
        throw FileFormatError(name, line_no, "poisson_draw must be a non-negative integer");
      }
      const double count = std::stod(fields[3], &used);
      if (used != fields[3].size() || !(count >= 0.0)) {
        throw FileFormatError(name, line_no, "count must be a non-negative number");
      }
      if (record.frame_id.empty()) {
        record.frame_id = fields[0];
      } else if (fields[0] != record.frame_id) {
        throw FileFormatError(name, line_no, "mixed frame ids in one record");
      }
      record.poisson_draws.push_back(draw);
      record.counts.push_back(count);
    } catch (const std::logic_error&) {
      throw FileFormatError(name, line_no, "malformed number");
    }
  }
  if (record.counts.empty()) {
    throw FileFormatError(name, 0, "no count rows");
  }

  const std::filesystem::path meta_path = sidecar_path(csv_path);
  std::ifstream json(meta_path);
  if (!json) {
    throw FileFormatError(meta_path.string(), 0, "missing JSON sidecar");
  }
  try {
    const nlohmann::json meta = nlohmann::json::parse(json);
    record.config.mean_photons = meta.at("mean_photons").get<double>();
    record.config.epsilon = meta.at("epsilon").get<double>();
    record.config.seed = meta.at("seed").get<std::uint64_t>();
    record.state_index = meta.value("state_index", std::uint64_t{0});
    if (meta.contains("frame_id") && meta["frame_id"].get<std::string>() != record.frame_id) {
      throw FileFormatError(meta_path.string(), 0, "frame_id disagrees with the CSV");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FileFormatError(meta_path.string(), 0, e.what());
  }
  try {
    record.config.validate();
  } catch (const DomainError& e) {
    throw FileFormatError(meta_path.string(), 0, e.what());
  }
  return record;
}

}  // namespace qtomo
