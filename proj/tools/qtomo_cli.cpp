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

// Command-line driver: frame utilities, single-state simulate/estimate, and
// the Table I / Table II / epsilon-sweep experiment runners.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qtomo/errors.hpp"
#include "qtomo/estimator.hpp"
#include "qtomo/experiments.hpp"
#include "qtomo/frames.hpp"
#include "qtomo/measurement_sim.hpp"

#ifndef QTOMO_VERSION
#define QTOMO_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

/// Built-in id, or a path to a frame file.
qtomo::Frame resolve_frame(const std::string& spec) {
  for (const std::string& id : qtomo::builtin_frame_ids()) {
    if (spec == id) return qtomo::builtin_frame(id);
  }
  if (fs::exists(spec)) return qtomo::load_frame(spec);
  throw qtomo::DomainError("unknown frame '" + spec + "' (expected sic, mub, or a frame file)");
}

fs::path prepare_output_dir(const std::string& dir) {
  if (dir.empty()) {
    throw qtomo::DomainError("no output directory given (-o)");
  }
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) {
    throw std::runtime_error("cannot create output directory " + dir);
  }
  const fs::path probe = p / ".qtomo-write-test";
  {
    std::ofstream out(probe);
    if (!out) throw std::runtime_error("output directory " + dir + " is not writable");
  }
  fs::remove(probe, ec);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ordered_json estimator_json(const qtomo::EstimatorConfig& cfg) {
  return {{"n_starts", cfg.n_starts},
          {"max_iterations", cfg.max_iterations},
          {"objective_tolerance", cfg.objective_tolerance},
          {"param_tolerance", cfg.param_tolerance},
          {"initial_step", cfg.initial_step}};
}

ordered_json matrix_json(const qtomo::CMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

// Settings shared by the experiment runners. Defaults, then the config file,
// then explicit flags.
struct ExperimentSettings {
  std::string config_path;
  std::string frames;
  std::string photons;
  std::string epsilons;
  int n_theta = 20;
  int n_phi = 20;
  std::uint64_t seed = 42;
  int n_starts = 5;
  int max_iterations = 2000;
  double objective_tolerance = 1e-9;
  double param_tolerance = 1e-8;
  unsigned workers = 1;
  std::string output_dir;
  bool details = false;
};

struct ExperimentCommand {
  explicit ExperimentCommand(CLI::App* sub) : app(sub) {}

  CLI::App* app;
  ExperimentSettings s;
  std::map<std::string, CLI::Option*> flags;  // config key -> option
};

void add_experiment_flags(ExperimentCommand& cmd, const std::string& frames_flag, const std::string& frames_help) {
  CLI::App* app = cmd.app;
  ExperimentSettings& s = cmd.s;
  app->add_option("--config", s.config_path, "Flat key = value config file; flags override it")->check(CLI::ExistingFile);
  cmd.flags["frames"] = app->add_option(frames_flag, s.frames, frames_help);
  cmd.flags["photons"] = app->add_option("--photons", s.photons, "Mean photon number(s) N");
  cmd.flags["epsilons"] = app->add_option("--eps", s.epsilons, "Dark-count parameter(s): a,b,c or start:stop:step");
  cmd.flags["n_theta"] = app->add_option("--n-theta", s.n_theta, "Sample grid points in theta");
  cmd.flags["n_phi"] = app->add_option("--n-phi", s.n_phi, "Sample grid points in phi");
  cmd.flags["seed"] = app->add_option("--seed", s.seed, "Master seed");
  cmd.flags["n_starts"] = app->add_option("--n-starts", s.n_starts, "Nelder-Mead starts per state");
  cmd.flags["max_iterations"] = app->add_option("--max-iterations", s.max_iterations, "Iteration cap per start");
  cmd.flags["objective_tolerance"] = app->add_option("--objective-tolerance", s.objective_tolerance, "Simplex f-spread stop");
  cmd.flags["param_tolerance"] = app->add_option("--param-tolerance", s.param_tolerance, "Simplex size stop");
  cmd.flags["workers"] = app->add_option("--workers", s.workers, "Worker threads (0 = all cores)");
  cmd.flags["output_dir"] = app->add_option("-o,--output", s.output_dir, "Output directory");
  cmd.flags["details"] = app->add_flag("--details", s.details, "Also write per-state CSVs");
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) {
    throw qtomo::DomainError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

void apply_config_file(ExperimentCommand& cmd) {
  if (cmd.s.config_path.empty()) return;
  ExperimentSettings& s = cmd.s;
  for (const auto& [key, value] : qtomo::read_config_file(cmd.s.config_path)) {
    const auto flag = cmd.flags.find(key);
    const bool known = flag != cmd.flags.end() || key == "tolerances" || key == "frame";
    if (!known) {
      throw qtomo::DomainError("config file: unknown key '" + key + "'");
    }
    if (flag != cmd.flags.end() && flag->second->count() > 0) continue;  // flag wins
    if (key == "frames" || key == "frame") s.frames = value;
    else if (key == "photons") s.photons = value;
    else if (key == "epsilons") s.epsilons = value;
    else if (key == "n_theta") s.n_theta = parse_value<int>(key, value);
    else if (key == "n_phi") s.n_phi = parse_value<int>(key, value);
    else if (key == "seed") s.seed = parse_value<std::uint64_t>(key, value);
    else if (key == "n_starts") s.n_starts = parse_value<int>(key, value);
    else if (key == "max_iterations") s.max_iterations = parse_value<int>(key, value);
    else if (key == "objective_tolerance") s.objective_tolerance = parse_value<double>(key, value);
    else if (key == "param_tolerance") s.param_tolerance = parse_value<double>(key, value);
    else if (key == "tolerances") {
      // "tolerances = <objective>,<param>"
      const std::vector<double> tol = qtomo::parse_number_list(value);
      if (tol.size() != 2) throw qtomo::DomainError("config key 'tolerances' needs two values");
      if (cmd.flags["objective_tolerance"]->count() == 0) s.objective_tolerance = tol[0];
      if (cmd.flags["param_tolerance"]->count() == 0) s.param_tolerance = tol[1];
    } else if (key == "workers") s.workers = parse_value<unsigned>(key, value);
    else if (key == "output_dir") s.output_dir = value;
    else if (key == "details") s.details = value == "true" || value == "1" || value == "yes";
  }
}

qtomo::RunOptions run_options(const ExperimentSettings& s) {
  qtomo::RunOptions opts;
  opts.sample = {s.n_theta, s.n_phi};
  opts.sample.validate();
  opts.master_seed = s.seed;
  opts.estimator.n_starts = s.n_starts;
  opts.estimator.max_iterations = s.max_iterations;
  opts.estimator.objective_tolerance = s.objective_tolerance;
  opts.estimator.param_tolerance = s.param_tolerance;
  opts.estimator.validate();
  opts.workers = s.workers;
  return opts;
}

std::string number_tag(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

// Runs every (frame, N, eps) cell and writes summary.csv, manifest.json and,
// with --details, one per-state CSV per cell.
int run_experiment(const std::string& command, const ExperimentSettings& s) {
  const std::vector<std::string> frame_specs = qtomo::parse_string_list(s.frames);
  const std::vector<double> photons = qtomo::parse_number_list(s.photons);
  const std::vector<double> epsilons = qtomo::parse_number_list(s.epsilons);
  for (double n : photons) qtomo::NoiseConfig{n, 0.0, 0}.validate();
  for (double e : epsilons) qtomo::NoiseConfig{1.0, e, 0}.validate();
  std::vector<qtomo::Frame> frames;
  for (const std::string& f : frame_specs) frames.push_back(resolve_frame(f));
  const qtomo::RunOptions opts = run_options(s);
  const fs::path out_dir = prepare_output_dir(s.output_dir);

  std::vector<qtomo::RunSummary> rows;
  ordered_json detail_files = ordered_json::array();
  for (const qtomo::Frame& frame : frames) {
    const qtomo::InjectivityReport report = qtomo::check_injectivity(frame);
    if (report.verdict != qtomo::Verdict::kInjective) {
      spdlog::warn("frame '{}' is {}; estimates may not be unique", frame.id(), qtomo::to_string(report.verdict));
    }
    for (double n : photons) {
      for (double eps : epsilons) {
        std::vector<qtomo::StateOutcome> details;
        rows.push_back(qtomo::run_cell(frame, n, eps, opts, s.details ? &details : nullptr));
        const qtomo::RunSummary& r = rows.back();
        spdlog::info("{:>4} N={:<6} eps={:<5} F_av={:.4f} gamma_av={:.4f} converged {}/{}", r.frame_id,
                     r.mean_photons, r.epsilon, r.f_avg, r.gamma_avg, r.n_converged, r.n_states);
        if (s.details) {
          const std::string name = "detail_" + frame.id() + "_N" + number_tag(n) + "_eps" + number_tag(eps) + ".csv";
          std::ostringstream text;
          qtomo::write_detail_csv(text, details);
          write_text(out_dir / name, text.str());
          detail_files.push_back(name);
        }
      }
    }
  }
  write_text(out_dir / "summary.csv", qtomo::summary_csv(rows));

  ordered_json manifest;
  manifest["command"] = command;
  manifest["version"] = QTOMO_VERSION;
  manifest["config"] = {{"frames", frame_specs},
                        {"photons", photons},
                        {"epsilons", epsilons},
                        {"n_theta", s.n_theta},
                        {"n_phi", s.n_phi},
                        {"seed", s.seed},
                        {"estimator", estimator_json(opts.estimator)},
                        {"workers", s.workers},
                        {"output_dir", s.output_dir}};
  manifest["outputs"] = {{"summary", "summary.csv"}, {"details", detail_files}};
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << qtomo::summary_csv(rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least-squares qubit tomography with SIC and MUB frames under photon-counting noise"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(QTOMO_VERSION));
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  // frames
  CLI::App* frames_cmd = app.add_subcommand("frames", "Built-in frames, injectivity check, export");
  frames_cmd->require_subcommand(1);
  CLI::App* frames_list = frames_cmd->add_subcommand("list", "List built-in frames");
  std::string check_frame, check_out;
  CLI::App* frames_check = frames_cmd->add_subcommand("check", "Run the injectivity check on a frame");
  frames_check->add_option("--frame", check_frame, "sic, mub, or a frame file")->required();
  frames_check->add_option("-o,--output", check_out, "Directory for injectivity.json");
  std::string export_frame, export_path;
  CLI::App* frames_export = frames_cmd->add_subcommand("export", "Write a built-in frame to a frame file");
  frames_export->add_option("--frame", export_frame, "sic or mub")->required();
  frames_export->add_option("-o,--output", export_path, "Output frame file")->required();

  // simulate
  std::string sim_frame, sim_out;
  double sim_theta = 0.0, sim_phi = 0.0, sim_photons = 1000.0, sim_eps = 0.0;
  std::uint64_t sim_seed = 42, sim_state = 0;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Simulate photon counts for one input state");
  simulate_cmd->add_option("--frame", sim_frame, "sic, mub, or a frame file")->required();
  simulate_cmd->add_option("--theta", sim_theta, "Polar angle in [0, pi]")->required();
  simulate_cmd->add_option("--phi", sim_phi, "Azimuth in [0, 2 pi)")->required();
  simulate_cmd->add_option("--photons", sim_photons, "Mean photon number N");
  simulate_cmd->add_option("--eps", sim_eps, "Dark-count parameter in [0, 1]");
  simulate_cmd->add_option("--seed", sim_seed, "Master seed");
  simulate_cmd->add_option("--state-index", sim_state, "State index used for seeding");
  simulate_cmd->add_option("-o,--output", sim_out, "Output directory")->required();

  // estimate
  std::string est_frame, est_counts, est_out;
  qtomo::EstimatorConfig est_cfg;
  std::optional<double> est_theta, est_phi;
  CLI::App* estimate_cmd = app.add_subcommand("estimate", "Least-squares reconstruction from a count record");
  estimate_cmd->add_option("--frame", est_frame, "sic, mub, or a frame file")->required();
  estimate_cmd->add_option("--counts", est_counts, "Count record CSV (JSON sidecar next to it)")
      ->required()
      ->check(CLI::ExistingFile);
  estimate_cmd->add_option("--n-starts", est_cfg.n_starts, "Nelder-Mead starts");
  estimate_cmd->add_option("--max-iterations", est_cfg.max_iterations, "Iteration cap per start");
  estimate_cmd->add_option("--objective-tolerance", est_cfg.objective_tolerance, "Simplex f-spread stop");
  estimate_cmd->add_option("--param-tolerance", est_cfg.param_tolerance, "Simplex size stop");
  estimate_cmd->add_option("--start-seed", est_cfg.start_seed, "Seed for random starts");
  estimate_cmd->add_option("--theta", est_theta, "True polar angle, to report fidelity");
  estimate_cmd->add_option("--phi", est_phi, "True azimuth, to report fidelity");
  estimate_cmd->add_option("-o,--output", est_out, "Output directory")->required();

  ExperimentCommand table1{app.add_subcommand("table1", "Photon sweep with Poisson noise only")};
  table1.s.frames = "sic,mub";
  table1.s.photons = "1,5,10,25,50,100,1000,10000";
  table1.s.epsilons = "0";
  add_experiment_flags(table1, "--frames", "Comma-separated frames");

  ExperimentCommand table2{app.add_subcommand("table2", "Dark-count rows at few photons")};
  table2.s.frames = "sic,mub";
  table2.s.photons = "10";
  table2.s.epsilons = "0.1,0.2,0.3,0.4,0.5";
  add_experiment_flags(table2, "--frames", "Comma-separated frames");

  ExperimentCommand sweep{app.add_subcommand("sweep-eps", "Dark-count sweep at fixed N")};
  sweep.s.frames = "mub";
  sweep.s.photons = "1000";
  sweep.s.epsilons = "0:1:0.05";
  add_experiment_flags(sweep, "--frame,--frames", "Frame(s)");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("qtomo"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_pattern("[%l] %v");

  try {
    if (*frames_list) {
      for (const std::string& id : qtomo::builtin_frame_ids()) {
        const qtomo::Frame f = qtomo::builtin_frame(id);
        std::cout << id << "  d=" << f.dim() << "  M=" << f.size() << '\n';
      }
      return 0;
    }
    if (*frames_check) {
      const qtomo::Frame frame = resolve_frame(check_frame);
      const qtomo::InjectivityReport r = qtomo::check_injectivity(frame);
      std::cout << "frame " << r.frame_id << " (d=" << frame.dim() << ", M=" << frame.size() << ")\n"
                << "verdict " << qtomo::to_string(r.verdict) << "\n"
                << "kernel_dimension " << r.kernel_dimension << "\n"
                << "singular_values";
      for (double v : r.singular_values) std::cout << ' ' << v;
      std::cout << '\n';
      if (!check_out.empty()) {
        ordered_json j;
        j["frame_id"] = r.frame_id;
        j["dim"] = frame.dim();
        j["size"] = frame.size();
        j["verdict"] = qtomo::to_string(r.verdict);
        j["kernel_dimension"] = r.kernel_dimension;
        j["singular_values"] = r.singular_values;
        j["kernel_basis"] = ordered_json::array();
        for (const qtomo::CMatrix& q : r.kernel_basis) j["kernel_basis"].push_back(matrix_json(q));
        write_text(prepare_output_dir(check_out) / "injectivity.json", j.dump(2) + "\n");
      }
      return 0;
    }
    if (*frames_export) {
      const fs::path parent = fs::path(export_path).parent_path();
      if (!parent.empty()) prepare_output_dir(parent.string());
      qtomo::save_frame(qtomo::builtin_frame(export_frame), export_path);
      return 0;
    }
    if (*simulate_cmd) {
      const qtomo::Frame frame = resolve_frame(sim_frame);
      const qtomo::Ket psi = qtomo::ket_from_angles(sim_theta, sim_phi);
      const qtomo::CountRecord record =
          qtomo::simulate_counts_noisy(frame, psi, {sim_photons, sim_eps, sim_seed}, sim_state);
      const fs::path dir = prepare_output_dir(sim_out);
      qtomo::write_count_record(record, dir / "counts.csv");
      std::cout << "wrote " << (dir / "counts.csv").string() << '\n';
      return 0;
    }
    if (*estimate_cmd) {
      const qtomo::Frame frame = resolve_frame(est_frame);
      const qtomo::CountRecord record = qtomo::read_count_record(est_counts);
      const qtomo::EstimateResult r = qtomo::estimate(frame, record, est_cfg);
      if (r.warning) spdlog::warn("{}", *r.warning);
      ordered_json j;
      j["frame_id"] = frame.id();
      j["params"] = r.params.t;
      j["rho"] = matrix_json(r.rho.entries());
      j["purity"] = qtomo::purity(r.rho);
      if (est_theta && est_phi) {
        j["fidelity"] = qtomo::fidelity(qtomo::ket_from_angles(*est_theta, *est_phi), r.rho);
      }
      j["objective_value"] = r.objective_value;
      j["iterations_used"] = r.iterations_used;
      j["starts_tried"] = r.starts_tried;
      j["converged"] = r.converged;
      j["estimator"] = estimator_json(est_cfg);
      if (r.warning) j["warning"] = *r.warning;
      write_text(prepare_output_dir(est_out) / "estimate.json", j.dump(2) + "\n");
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    for (ExperimentCommand* cmd : {&table1, &table2, &sweep}) {
      if (!*cmd->app) continue;
      apply_config_file(*cmd);
      if (cmd == &table1 && qtomo::parse_number_list(cmd->s.epsilons) != std::vector<double>{0.0}) {
        throw qtomo::DomainError("table1 runs with Poisson noise only; use table2 or sweep-eps for eps > 0");
      }
      return run_experiment(cmd->app->get_name(), cmd->s);
    }
  } catch (const qtomo::DomainError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const qtomo::FileFormatError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
