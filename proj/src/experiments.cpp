/* Copyright 2026 The Spinprobe Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "spinprobe/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "json.hpp"

#include "spinprobe/rng.hpp"

namespace spinprobe {

using nlohmann::json;

std::string format_g17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::ofstream open_output(const std::string& dir, const char* name) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  return out;
}

void write_json(const std::string& dir, const char* name, const json& doc) {
  std::ofstream out = open_output(dir, name);
  out << doc.dump(2) << '\n';
}

json optimizer_json(const OptimizerConfig& c) {
  return json{{"slots", c.slots},
              {"restarts", c.restarts},
              {"max_iterations", c.max_iterations},
              {"gradient_tolerance", c.gradient_tolerance},
              {"init_amplitude", c.init_amplitude},
              {"amplitude_bound", c.amplitude_bound},
              {"rng_seed", c.rng_seed},
              {"lbfgs_memory", c.lbfgs_memory}};
}

json pulse_json(const ControlPulse& pulse) {
  return json{{"duration", pulse.duration}, {"amplitudes", pulse.amplitudes}};
}

}  // namespace

// ---- QFI sweep over pulse durations ----------------------------------------

std::vector<SweepRow> run_qfi_sweep(const SweepSettings& settings, Exec exec) {
  validate(settings.spec);
  if (settings.time_grid.empty())
    throw std::invalid_argument("time grid is empty");
  for (double t : settings.time_grid)
    if (!(t > 0.0) || !std::isfinite(t))
      throw std::invalid_argument("durations must be positive and finite");
  if (!settings.controlled && !settings.uncontrolled)
    throw std::invalid_argument("nothing to sweep");

  const Eigen::VectorXcd psi0 = probe_excitation(settings.spec);
  std::vector<SweepRow> rows(settings.time_grid.size());
  for (std::size_t i = 0; i < settings.time_grid.size(); ++i) {
    SweepRow& row = rows[i];
    row.duration = settings.time_grid[i];
    const double t2 = row.duration * row.duration;
    if (settings.controlled) {
      OptimizerConfig oc = settings.optimizer;
      oc.rng_seed = mix_seed(settings.seed, static_cast<std::uint64_t>(i));
      const OptimizationResult opt = maximize_qfi(
          settings.spec, row.duration, settings.target_field, psi0, oc, exec);
      row.controlled_ok = opt.best_restart >= 0;
      if (row.controlled_ok) {
        row.controlled_qfi = opt.best_qfi;
        row.controlled_rate = opt.best_qfi / t2;
        row.best_pulse = opt.best_pulse;
      }
    }
    if (settings.uncontrolled) {
      const UncontrolledOptimum unc = optimize_uncontrolled_state(
          settings.spec, row.duration, settings.target_field, exec);
      row.uncontrolled_ok = true;
      row.uncontrolled_qfi = unc.qfi;
      row.uncontrolled_rate = unc.qfi / t2;
      row.theta = unc.theta;
      row.phi = unc.phi;
    }
  }
  return rows;
}

void write_sweep_outputs(const std::string& dir, const SweepSettings& settings,
                         const std::vector<SweepRow>& rows) {
  std::ofstream csv = open_output(dir, "qfi_sweep.csv");
  csv << "duration,controlled_qfi,controlled_rate,controlled_ok,"
         "uncontrolled_qfi,uncontrolled_rate,uncontrolled_ok,theta,phi\n";
  for (const SweepRow& r : rows) {
    csv << format_g17(r.duration) << ',' << format_g17(r.controlled_qfi) << ','
        << format_g17(r.controlled_rate) << ',' << (r.controlled_ok ? 1 : 0)
        << ',' << format_g17(r.uncontrolled_qfi) << ','
        << format_g17(r.uncontrolled_rate) << ',' << (r.uncontrolled_ok ? 1 : 0)
        << ',' << format_g17(r.theta) << ',' << format_g17(r.phi) << '\n';
  }

  json doc;
  doc["settings"] = {{"spins", settings.spec.spins},
                     {"coupling", settings.spec.coupling},
                     {"time_grid", settings.time_grid},
                     {"optimizer", optimizer_json(settings.optimizer)},
                     {"target_field", settings.target_field},
                     {"seed", settings.seed},
                     {"controlled", settings.controlled},
                     {"uncontrolled", settings.uncontrolled}};
  json jrows = json::array();
  for (const SweepRow& r : rows) {
    json jr = {{"duration", r.duration},
               {"controlled_qfi", r.controlled_qfi},
               {"controlled_ok", r.controlled_ok},
               {"uncontrolled_qfi", r.uncontrolled_qfi},
               {"uncontrolled_ok", r.uncontrolled_ok},
               {"theta", r.theta},
               {"phi", r.phi}};
    if (r.controlled_ok) jr["best_pulse"] = pulse_json(r.best_pulse);
    jrows.push_back(std::move(jr));
  }
  doc["rows"] = std::move(jrows);
  write_json(dir, "qfi_sweep.json", doc);
}

// ---- Site populations along one evolution ----------------------------------

PopulationTrace run_population_trace(const TraceSettings& settings) {
  validate(settings.spec);
  validate(settings.pulse);
  if (settings.samples_per_slot < 1)
    throw std::invalid_argument("samples_per_slot must be >= 1");
  const int dim = sector_dimension(settings.spec);
  if (settings.psi0.size() != dim)
    throw std::invalid_argument("initial state has the wrong dimension");
  if (std::abs(settings.psi0.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("initial state is not normalized");

  const Generators gen = sector_generators(settings.spec, settings.target_field);
  const int sub = settings.samples_per_slot;
  const double dt = settings.pulse.slot_dt();
  const double step = dt / sub;

  PopulationTrace trace;
  const int total = settings.pulse.slots() * sub + 1;
  trace.times.reserve(total);
  trace.amplitudes.reserve(total);
  trace.populations.reserve(total);

  Eigen::VectorXcd psi = settings.psi0;
  auto record = [&](double t, double amp) {
    trace.times.push_back(t);
    trace.amplitudes.push_back(amp);
    std::vector<double> pops(dim);
    for (int j = 0; j < dim; ++j) pops[j] = std::norm(psi(j));
    trace.populations.push_back(std::move(pops));
  };

  record(0.0, settings.pulse.amplitudes.front());
  for (int i = 0; i < settings.pulse.slots(); ++i) {
    const double amp = settings.pulse.amplitudes[i];
    const Eigen::MatrixXcd h = gen.drift + amp * gen.control;
    const Eigen::MatrixXcd u =
        (Eigen::MatrixXcd(std::complex<double>(0.0, -step) * h)).exp();
    for (int k = 1; k <= sub; ++k) {
      psi = u * psi;
      record(i * dt + k * step, amp);
    }
  }
  return trace;
}

void write_trace_outputs(const std::string& dir, const TraceSettings& settings,
                         const PopulationTrace& trace) {
  const int dim = sector_dimension(settings.spec);
  std::ofstream csv = open_output(dir, "populations.csv");
  csv << "time,amplitude";
  for (int j = 0; j < dim; ++j) csv << ",p" << j;
  csv << '\n';
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    csv << format_g17(trace.times[i]) << ',' << format_g17(trace.amplitudes[i]);
    for (int j = 0; j < dim; ++j)
      csv << ',' << format_g17(trace.populations[i][j]);
    csv << '\n';
  }

  json psi0 = json::array();
  for (Eigen::Index j = 0; j < settings.psi0.size(); ++j)
    psi0.push_back({settings.psi0(j).real(), settings.psi0(j).imag()});
  json doc;
  doc["settings"] = {{"spins", settings.spec.spins},
                     {"coupling", settings.spec.coupling},
                     {"pulse", pulse_json(settings.pulse)},
                     {"psi0", std::move(psi0)},
                     {"target_field", settings.target_field},
                     {"samples_per_slot", settings.samples_per_slot},
                     {"seed", settings.seed}};
  doc["samples"] = trace.times.size();
  write_json(dir, "populations.json", doc);
}

// ---- Repeated estimation runs ----------------------------------------------

ExperimentResult run_estimation_experiment(const ExperimentSettings& settings,
                                           Exec exec) {
  validate(settings.spec);
  if (settings.runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (!(settings.duration > 0.0) || !std::isfinite(settings.duration))
    throw std::invalid_argument("duration must be positive and finite");

  ExperimentResult result;
  result.traces.resize(settings.runs);
  result.runs.resize(settings.runs);

#pragma omp parallel for schedule(dynamic) if (omp_active(exec))
  for (int run = 0; run < settings.runs; ++run) {
    ProtocolConfig pc = settings.protocol;
    pc.seed = mix_seed(settings.seed, static_cast<std::uint64_t>(run));
    EstimationTrace trace =
        run_protocol(settings.spec, settings.duration, settings.true_field,
                     settings.initial_guess, settings.use_control, pc, exec);
    RunSummary& summary = result.runs[run];
    summary.run = run;
    summary.seed = pc.seed;
    summary.rounds = static_cast<int>(trace.rounds.size());
    summary.total_shots = trace.total_shots;
    summary.converged = trace.converged;
    summary.failed = trace.failed;
    summary.final_estimate = trace.final_estimate;
    result.traces[run] = std::move(trace);
  }

  double sum = 0.0, sum_err = 0.0;
  int live = 0;
  for (const RunSummary& s : result.runs) {
    if (s.failed) {
      ++result.failed_count;
      continue;
    }
    ++live;
    sum += static_cast<double>(s.total_shots);
    sum_err += std::abs(s.final_estimate - settings.true_field);
    if (s.converged) ++result.converged_count;
  }
  if (live > 0) {
    result.mean_shots = sum / live;
    result.mean_abs_error = sum_err / live;
    double ss = 0.0;
    for (const RunSummary& s : result.runs) {
      if (s.failed) continue;
      const double d = static_cast<double>(s.total_shots) - result.mean_shots;
      ss += d * d;
    }
    result.stddev_shots = live > 1 ? std::sqrt(ss / (live - 1)) : 0.0;
  }
  return result;
}

void write_estimate_outputs(const std::string& dir,
                            const ExperimentSettings& settings,
                            const ExperimentResult& result) {
  std::ofstream runs_csv = open_output(dir, "estimate_runs.csv");
  runs_csv << "run,seed,rounds,total_shots,converged,failed,final_estimate,"
              "abs_error\n";
  for (const RunSummary& s : result.runs) {
    runs_csv << s.run << ',' << s.seed << ',' << s.rounds << ','
             << s.total_shots << ',' << (s.converged ? 1 : 0) << ','
             << (s.failed ? 1 : 0) << ',' << format_g17(s.final_estimate)
             << ','
             << format_g17(std::abs(s.final_estimate - settings.true_field))
             << '\n';
  }

  std::ofstream rounds_csv = open_output(dir, "estimate_rounds.csv");
  rounds_csv << "run,round,guess,qfi,shots,plus_count,next_guess,fold_stderr\n";
  for (std::size_t run = 0; run < result.traces.size(); ++run) {
    for (const RoundRecord& r : result.traces[run].rounds) {
      rounds_csv << run << ',' << r.round << ',' << format_g17(r.guess) << ','
                 << format_g17(r.qfi) << ',' << r.shots << ',' << r.plus_count
                 << ',' << format_g17(r.next_guess) << ','
                 << format_g17(r.fold_stderr) << '\n';
    }
  }

  json doc;
  doc["settings"] = {{"spins", settings.spec.spins},
                     {"coupling", settings.spec.coupling},
                     {"duration", settings.duration},
                     {"true_field", settings.true_field},
                     {"initial_guess", settings.initial_guess},
                     {"use_control", settings.use_control},
                     {"runs", settings.runs},
                     {"seed", settings.seed},
                     {"protocol",
                      {{"epsilon", settings.protocol.epsilon},
                       {"max_rounds", settings.protocol.max_rounds},
                       {"folds", settings.protocol.folds},
                       {"warm_restarts", settings.protocol.warm_restarts},
                       {"degenerate_retries", settings.protocol.degenerate_retries},
                       {"optimizer", optimizer_json(settings.protocol.optimizer)}}}};
  doc["aggregate"] = {{"mean_shots", result.mean_shots},
                      {"stddev_shots", result.stddev_shots},
                      {"mean_abs_error", result.mean_abs_error},
                      {"converged_count", result.converged_count},
                      {"failed_count", result.failed_count}};
  json failures = json::array();
  for (std::size_t run = 0; run < result.traces.size(); ++run)
    if (result.traces[run].failed)
      failures.push_back({{"run", run}, {"reason", result.traces[run].failure}});
  doc["failures"] = std::move(failures);
  write_json(dir, "estimate.json", doc);
}

// ---- Random-pulse information bound check ----------------------------------

BoundCheckResult run_bound_check(const BoundCheckSettings& settings, Exec exec) {
  validate(settings.spec);
  if (settings.samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (!(settings.min_duration > 0.0) ||
      !(settings.max_duration >= settings.min_duration))
    throw std::invalid_argument("bad duration range");
  if (settings.max_slots < 1)
    throw std::invalid_argument("max_slots must be >= 1");
  if (!(settings.amplitude_scale > 0.0))
    throw std::invalid_argument("amplitude_scale must be positive");

  const int dim = sector_dimension(settings.spec);
  BoundCheckResult result;
  result.samples.resize(settings.samples);

#pragma omp parallel for schedule(dynamic) if (omp_active(exec))
  for (int k = 0; k < settings.samples; ++k) {
    std::mt19937_64 rng = make_stream(settings.seed, k);
    std::uniform_real_distribution<double> udur(settings.min_duration,
                                                settings.max_duration);
    std::uniform_int_distribution<int> uslots(1, settings.max_slots);
    const double bound = settings.amplitude_scale * settings.spec.coupling;
    std::uniform_real_distribution<double> uamp(-bound, bound);
    std::uniform_real_distribution<double> ufield(-settings.spec.coupling,
                                                  settings.spec.coupling);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ControlPulse pulse;
    pulse.duration = udur(rng);
    pulse.amplitudes.resize(uslots(rng));
    for (double& a : pulse.amplitudes) a = uamp(rng);
    const double field = ufield(rng);

    Eigen::VectorXcd psi0(dim);
    for (int j = 0; j < dim; ++j)
      psi0(j) = std::complex<double>(gauss(rng), gauss(rng));
    psi0.normalize();

    const QfiResult qfi = qfi_of_pulse(settings.spec, pulse, field, psi0,
                                       false, Exec::serial);
    BoundSample& sample = result.samples[k];
    sample.index = k;
    sample.duration = pulse.duration;
    sample.slots = pulse.slots();
    sample.qfi = qfi.value.value;
    sample.ratio = qfi.value.value / qfi_bound(pulse.duration);
  }

  for (const BoundSample& s : result.samples) {
    result.max_ratio = std::max(result.max_ratio, s.ratio);
    if (s.ratio > 1.0 + 1e-9) ++result.violations;
  }
  return result;
}

void write_bound_outputs(const std::string& dir,
                         const BoundCheckSettings& settings,
                         const BoundCheckResult& result) {
  std::ofstream csv = open_output(dir, "bound_check.csv");
  csv << "index,duration,slots,qfi,ratio\n";
  for (const BoundSample& s : result.samples) {
    csv << s.index << ',' << format_g17(s.duration) << ',' << s.slots << ','
        << format_g17(s.qfi) << ',' << format_g17(s.ratio) << '\n';
  }

  json doc;
  doc["settings"] = {{"spins", settings.spec.spins},
                     {"coupling", settings.spec.coupling},
                     {"samples", settings.samples},
                     {"seed", settings.seed},
                     {"min_duration", settings.min_duration},
                     {"max_duration", settings.max_duration},
                     {"max_slots", settings.max_slots},
                     {"amplitude_scale", settings.amplitude_scale}};
  doc["max_ratio"] = result.max_ratio;
  doc["violations"] = result.violations;
  write_json(dir, "bound_check.json", doc);
}

}  // namespace spinprobe
