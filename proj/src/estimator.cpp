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

#include "qtomo/estimator.hpp"

#include <cmath>

#include "qtomo/errors.hpp"
#include "qtomo/nelder_mead.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

void EstimatorConfig::validate() const {
  if (n_starts < 1 || max_iterations < 1 || !(objective_tolerance > 0.0) || !(param_tolerance > 0.0) ||
      !(initial_step > 0.0)) {
    throw DomainError("estimator settings must all be positive");
  }
}

std::vector<double> expected_counts(const Frame& frame, const DensityMatrix& rho, double mean_photons) {
  if (frame.dim() != rho.dim()) {
    throw DomainError("expected_counts: dimension mismatch");
  }
  if (!(mean_photons > 0.0)) {
    throw DomainError("expected_counts: mean photon number must be positive");
  }
  std::vector<double> out;
  out.reserve(frame.size());
  for (const Ket& xi : frame.elements()) {
    out.push_back(mean_photons * xi.amplitudes().dot(rho.entries() * xi.amplitudes()).real());
  }
  return out;
}

LsObjective::LsObjective(const Frame& frame, const CountRecord& record) : mean_photons_(record.config.mean_photons) {
  if (frame.dim() != 2) {
    throw DomainError("least-squares objective is defined for qubit frames");
  }
  if (record.counts.size() != frame.size()) {
    throw DomainError("count record has " + std::to_string(record.counts.size()) + " entries but frame '" +
                      frame.id() + "' has " + std::to_string(frame.size()) + " elements");
  }
  elements_.reserve(frame.size());
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const Complex x = frame[k][0];
    const Complex y = frame[k][1];
    elements_.push_back({std::norm(x), std::norm(y), std::conj(x) * y, record.counts[k]});
  }
}

double LsObjective::evaluate(double t1, double t2, double t3, double t4) const {
  const double trace = t1 * t1 + t2 * t2 + t3 * t3 + t4 * t4;
  if (!(trace >= kDegenerateNormSquared)) {
    return kDegeneratePenalty;
  }
  const double scale = mean_photons_ / trace;
  const double rho00 = t1 * t1 + t3 * t3 + t4 * t4;
  const double rho11 = t2 * t2;
  // rho01 = conj(t3 + i t4) t2, unnormalized.
  const Complex rho01(t3 * t2, -t4 * t2);
  double sum = 0.0;
  for (const Element& e : elements_) {
    const double expected = scale * (e.p00 * rho00 + e.p11 * rho11 + 2.0 * (e.cross * rho01).real());
    const double r = expected - e.count;
    sum += r * r;
  }
  return sum;
}

double LsObjective::operator()(const CholeskyParams& params) const {
  return evaluate(params.t[0], params.t[1], params.t[2], params.t[3]);
}

double LsObjective::operator()(const std::vector<double>& t) const { return evaluate(t[0], t[1], t[2], t[3]); }

double ls_objective(const CholeskyParams& params, const Frame& frame, const CountRecord& record) {
  return LsObjective(frame, record)(params);
}

std::vector<CholeskyParams> start_points(const EstimatorConfig& cfg) {
  cfg.validate();
  std::vector<CholeskyParams> starts;
  const double h = 1.0 / std::sqrt(2.0);
  starts.push_back({{h, h, 0.0, 0.0}});
  Rng stream(derive_seed({cfg.start_seed, fnv1a64("estimator-starts")}));
  while (starts.size() < static_cast<std::size_t>(cfg.n_starts)) {
    CholeskyParams p;
    for (double& t : p.t) t = stream.uniform(-1.0, 1.0);
    // Redraw the (measure-zero) points inside the degenerate zone.
    if (p.norm_squared() < 1e-6) continue;
    starts.push_back(p);
  }
  return starts;
}

EstimateResult estimate_from(const Frame& frame, const CountRecord& record, const EstimatorConfig& cfg,
                             const std::vector<CholeskyParams>& starts) {
  cfg.validate();
  if (starts.empty()) {
    throw DomainError("estimate: no starting points");
  }
  if (record.frame_id != frame.id()) {
    throw DomainError("count record for frame '" + record.frame_id + "' used with frame '" + frame.id() + "'");
  }
  const LsObjective objective(frame, record);

  NelderMeadOptions opts;
  opts.max_iterations = cfg.max_iterations;
  opts.objective_tolerance = cfg.objective_tolerance;
  opts.param_tolerance = cfg.param_tolerance;
  opts.initial_step = cfg.initial_step;

  EstimateResult best;
  bool have_best = false;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const auto& t = starts[s].t;
    NelderMeadResult run = nelder_mead(objective, std::vector<double>(t.begin(), t.end()), opts);
    if (!have_best || run.value < best.objective_value - kStartTieTolerance) {
      have_best = true;
      best.params = CholeskyParams{{run.x[0], run.x[1], run.x[2], run.x[3]}};
      best.objective_value = run.value;
      best.iterations_used = run.iterations;
      best.converged = run.converged;
      best.best_start = static_cast<int>(s);
    }
  }
  best.starts_tried = static_cast<int>(starts.size());
  best.rho = density_from_cholesky(best.params);
  // Report the objective of the returned params exactly.
  best.objective_value = objective(best.params);

  const InjectivityReport report = check_injectivity(frame);
  if (report.verdict != Verdict::kInjective) {
    best.warning = "frame '" + frame.id() + "' is " + to_string(report.verdict) +
                   "; the least-squares minimizer may not be unique";
  }
  return best;
}

EstimateResult estimate(const Frame& frame, const CountRecord& record, const EstimatorConfig& cfg) {
  return estimate_from(frame, record, cfg, start_points(cfg));
}

}  // namespace qtomo
