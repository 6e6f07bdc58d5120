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

// Command-line front end.  Every subcommand writes its artifacts (CSV +
// JSON sidecar) into --output-dir and prints a one-line JSON summary to
// stdout.  Failures print {"error": {...}} to stderr; exit codes: 0 ok,
// 1 runtime failure, 2 usage.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spinprobe/experiments.hpp"

namespace {

using nlohmann::json;
using namespace spinprobe;

struct CommonOpts {
  bool serial = false;
  bool extended = false;
  std::string output_dir = "out";
};

void add_common(CLI::App* sub, CommonOpts& c) {
  sub->add_flag("--serial", c.serial, "Run every kernel single-threaded");
  sub->add_flag("--extended", c.extended,
                "Allow long runs (required for chains of 10+ spins)");
  sub->add_option("--output-dir", c.output_dir, "Artifact directory")
      ->envname("SPINPROBE_OUTPUT_DIR");
  sub->set_config("--config", "", "Read options from a config file");
}

Exec exec_of(const CommonOpts& c) {
  return c.serial ? Exec::serial : Exec::parallel;
}

void require_extended(int spins, const CommonOpts& c) {
  if (spins >= 10 && !c.extended)
    throw CLI::ValidationError(
        "chain-length",
        "chains of 10+ spins need --extended; dense kernels scale as "
        "(N+1)^3 per slot and such runs take minutes to hours");
}

void emit(const json& summary) { std::cout << summary.dump() << '\n'; }

// ---- qfi-sweep --------------------------------------------------------------

struct SweepOpts {
  CommonOpts common;
  int spins = 2;
  double coupling = 1.0;
  std::vector<double> grid;
  double lambda = 0.0;
  int slots = 20;
  int restarts = 20;
  int max_iterations = 500;
  double amplitude_bound = 0.0;
  std::uint64_t seed = 0;
  bool no_controlled = false;
  bool no_uncontrolled = false;
};

void run_sweep_cmd(const SweepOpts& o) {
  require_extended(o.spins, o.common);
  SweepSettings s;
  s.spec = ChainSpec{o.spins, o.coupling};
  s.time_grid = o.grid.empty() ? std::vector<double>{5.0, 10.0, 15.0, 20.0}
                               : o.grid;
  s.optimizer.slots = o.slots;
  s.optimizer.restarts = o.restarts;
  s.optimizer.max_iterations = o.max_iterations;
  s.optimizer.amplitude_bound = o.amplitude_bound;
  s.target_field = o.lambda;
  s.seed = o.seed;
  s.controlled = !o.no_controlled;
  s.uncontrolled = !o.no_uncontrolled;

  const std::vector<SweepRow> rows = run_qfi_sweep(s, exec_of(o.common));
  write_sweep_outputs(o.common.output_dir, s, rows);
  emit({{"artifact", o.common.output_dir + "/qfi_sweep.csv"},
        {"rows", rows.size()}});
}

void register_sweep(CLI::App& app) {
  auto o = std::make_shared<SweepOpts>();
  CLI::App* sub = app.add_subcommand(
      "qfi-sweep", "Optimized QFI versus pulse duration, with the drive-free "
                   "baseline alongside");
  sub->add_option("-N,--chain-length", o->spins, "Number of spins")
      ->check(CLI::Range(2, 64));
  sub->add_option("-J,--coupling", o->coupling, "Exchange constant");
  sub->add_option("--time-grid", o->grid, "Durations to sweep")
      ->delimiter(',');
  sub->add_option("--lambda", o->lambda, "Field value optimized against");
  sub->add_option("--slots", o->slots, "Pulse slots");
  sub->add_option("--restarts", o->restarts, "Optimizer restarts");
  sub->add_option("--max-iterations", o->max_iterations, "Ascent iteration cap");
  sub->add_option("--amplitude-bound", o->amplitude_bound,
                  "Box |c| <= bound (0 = unbounded)");
  sub->add_option("--seed", o->seed, "Base RNG seed");
  sub->add_flag("--no-controlled", o->no_controlled, "Skip the optimizer");
  sub->add_flag("--no-uncontrolled", o->no_uncontrolled, "Skip the baseline");
  add_common(sub, o->common);
  sub->callback([o] { run_sweep_cmd(*o); });
}

// ---- populations ------------------------------------------------------------

struct TraceOpts {
  CommonOpts common;
  int spins = 2;
  double coupling = 1.0;
  double lambda = 0.0;
  std::string pulse_file;
  int row = 0;
  double time = 0.0;
  double amplitude = 0.0;
  double theta = std::nan("");
  double phi = 0.0;
  int samples_per_slot = 10;
};

ControlPulse load_pulse(const std::string& path, int row) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pulse file " + path);
  const json doc = json::parse(in);
  const json* node = nullptr;
  if (doc.contains("amplitudes")) {
    node = &doc;
  } else if (doc.contains("rows")) {
    const json& rows = doc.at("rows");
    if (row < 0 || row >= static_cast<int>(rows.size()))
      throw std::runtime_error("row " + std::to_string(row) +
                               " out of range for " + path);
    if (!rows[row].contains("best_pulse"))
      throw std::runtime_error("selected row carries no pulse");
    node = &rows[row].at("best_pulse");
  } else {
    throw std::runtime_error("pulse file needs 'amplitudes' or sweep 'rows'");
  }
  ControlPulse pulse;
  pulse.duration = node->at("duration").get<double>();
  pulse.amplitudes = node->at("amplitudes").get<std::vector<double>>();
  return pulse;
}

void run_trace_cmd(const TraceOpts& o) {
  require_extended(o.spins, o.common);
  TraceSettings s;
  s.spec = ChainSpec{o.spins, o.coupling};
  if (!o.pulse_file.empty()) {
    s.pulse = load_pulse(o.pulse_file, o.row);
  } else {
    if (!(o.time > 0.0))
      throw CLI::ValidationError("time",
                                 "--time is required without --pulse-file");
    s.pulse.duration = o.time;
    s.pulse.amplitudes = {o.amplitude};
  }
  s.psi0 = std::isnan(o.theta) ? probe_excitation(s.spec)
                               : probe_superposition(s.spec, o.theta, o.phi);
  s.target_field = o.lambda;
  s.samples_per_slot = o.samples_per_slot;

  const PopulationTrace trace = run_population_trace(s);
  write_trace_outputs(o.common.output_dir, s, trace);
  emit({{"artifact", o.common.output_dir + "/populations.csv"},
        {"samples", trace.times.size()}});
}

void register_trace(CLI::App& app) {
  auto o = std::make_shared<TraceOpts>();
  CLI::App* sub = app.add_subcommand(
      "populations", "Site populations along one piecewise-constant evolution");
  sub->add_option("-N,--chain-length", o->spins, "Number of spins")
      ->check(CLI::Range(2, 64));
  sub->add_option("-J,--coupling", o->coupling, "Exchange constant");
  sub->add_option("--lambda", o->lambda, "Target field during the evolution");
  sub->add_option("--pulse-file", o->pulse_file,
                  "Pulse JSON ({duration, amplitudes} or a sweep sidecar)");
  sub->add_option("--row", o->row, "Sweep sidecar row to take the pulse from");
  sub->add_option("--time", o->time, "Duration for a constant drive");
  sub->add_option("--amplitude", o->amplitude, "Constant drive amplitude");
  sub->add_option("--theta", o->theta,
                  "Probe preparation polar angle (default: excitation)");
  sub->add_option("--phi", o->phi, "Probe preparation azimuth");
  sub->add_option("--samples-per-slot", o->samples_per_slot,
                  "Trace samples inside each slot");
  add_common(sub, o->common);
  sub->callback([o] { run_trace_cmd(*o); });
}

// ---- estimate ---------------------------------------------------------------

struct EstimateOpts {
  CommonOpts common;
  int spins = 2;
  double coupling = 1.0;
  double time = 10.0;
  double lambda_true = 0.0;
  double lambda_init = 0.1;
  double epsilon = 0.01;
  int runs = 1;
  bool uncontrolled = false;
  int slots = 20;
  int restarts = 20;
  int warm_restarts = 5;
  int max_rounds = 50;
  int max_iterations = 500;
  int folds = 10;
  std::uint64_t seed = 0;
};

void run_estimate_cmd(const EstimateOpts& o) {
  require_extended(o.spins, o.common);
  ExperimentSettings s;
  s.spec = ChainSpec{o.spins, o.coupling};
  s.duration = o.time;
  s.true_field = o.lambda_true;
  s.initial_guess = o.lambda_init;
  s.use_control = !o.uncontrolled;
  s.runs = o.runs;
  s.protocol.epsilon = o.epsilon;
  s.protocol.max_rounds = o.max_rounds;
  s.protocol.folds = o.folds;
  s.protocol.warm_restarts = o.warm_restarts;
  s.protocol.optimizer.slots = o.slots;
  s.protocol.optimizer.restarts = o.restarts;
  s.protocol.optimizer.max_iterations = o.max_iterations;
  s.seed = o.seed;

  const ExperimentResult result =
      run_estimation_experiment(s, exec_of(o.common));
  write_estimate_outputs(o.common.output_dir, s, result);
  emit({{"artifact", o.common.output_dir + "/estimate_runs.csv"},
        {"mean_shots", result.mean_shots},
        {"mean_abs_error", result.mean_abs_error},
        {"converged", result.converged_count},
        {"failed", result.failed_count}});
}

void register_estimate(CLI::App& app) {
  auto o = std::make_shared<EstimateOpts>();
  CLI::App* sub = app.add_subcommand(
      "estimate", "Adaptive estimation of the remote field, repeated over "
                  "independent noise streams");
  sub->add_option("-N,--chain-length", o->spins, "Number of spins")
      ->check(CLI::Range(2, 64));
  sub->add_option("-J,--coupling", o->coupling, "Exchange constant");
  sub->add_option("--time", o->time, "Pulse duration per round");
  sub->add_option("--lambda-true", o->lambda_true, "Field being estimated");
  sub->add_option("--lambda-init", o->lambda_init, "Initial guess");
  sub->add_option("--epsilon", o->epsilon, "Target accuracy");
  sub->add_option("--runs", o->runs, "Independent repetitions");
  sub->add_flag("--uncontrolled", o->uncontrolled,
                "Use the drive-free probe instead of optimized pulses");
  sub->add_option("--slots", o->slots, "Pulse slots");
  sub->add_option("--restarts", o->restarts, "Optimizer restarts (round 0)");
  sub->add_option("--warm-restarts", o->warm_restarts,
                  "Optimizer restarts after round 0");
  sub->add_option("--max-rounds", o->max_rounds, "Adaptive round cap");
  sub->add_option("--max-iterations", o->max_iterations, "Ascent iteration cap");
  sub->add_option("--folds", o->folds, "Subsampling folds for early stop");
  sub->add_option("--seed", o->seed, "Base RNG seed");
  add_common(sub, o->common);
  sub->callback([o] { run_estimate_cmd(*o); });
}

// ---- oracle -----------------------------------------------------------------

struct OracleOpts {
  CommonOpts common;
  double coupling = 1.0;
  double time = 10.0;
  double lambda = 0.0;
  double guess = 0.0;
  bool simulate = false;
  int slots = 10000;
  double strong = 0.0;
};

void run_oracle_cmd(const OracleOpts& o) {
  json out;
  out["bound"] = qfi_bound(o.time);
  out["asymptotic_uncontrolled_qfi"] =
      uncontrolled_asymptotic_qfi(o.lambda, o.coupling, o.time);
  const double threshold = (M_PI / 2.0 - 1.0) / o.coupling;
  out["threshold_time"] = threshold;
  if (o.time > threshold)
    out["three_step_qfi"] = three_step_qfi(o.time, o.coupling);
  else
    out["three_step_qfi"] = nullptr;

  if (o.simulate) {
    const ChainSpec spec{2, o.coupling};
    const ThreeStepPulse drive =
        three_step_pulse(o.time, o.guess, o.coupling, o.strong, o.slots);
    const QfiResult sim =
        qfi_of_pulse(spec, drive.pulse, o.guess, probe_excitation(spec), false,
                     exec_of(o.common));
    const double closed = three_step_qfi(o.time, o.coupling);
    out["simulated"] = {{"qfi", sim.value.value},
                        {"slots", drive.pulse.slots()},
                        {"strong_amplitude", drive.strong_amplitude},
                        {"relative_gap", sim.value.value / closed - 1.0}};
  }
  emit(out);
}

void register_oracle(CLI::App& app) {
  auto o = std::make_shared<OracleOpts>();
  CLI::App* sub = app.add_subcommand(
      "oracle", "Two-spin closed forms, optionally cross-checked against the "
                "simulated three-step drive");
  sub->add_option("-J,--coupling", o->coupling, "Exchange constant");
  sub->add_option("--time", o->time, "Duration");
  sub->add_option("--lambda", o->lambda, "Field for the asymptotic formula");
  sub->add_option("--guess", o->guess, "Field guess the drive is built at");
  sub->add_flag("--simulate", o->simulate, "Also evolve the three-step drive");
  sub->add_option("--slots", o->slots, "Slots for the simulated drive");
  sub->add_option("--strong", o->strong, "Hold amplitude (0 = 200 J)");
  add_common(sub, o->common);
  sub->callback([o] { run_oracle_cmd(*o); });
}

// ---- bound-check ------------------------------------------------------------

struct BoundOpts {
  CommonOpts common;
  int spins = 2;
  double coupling = 1.0;
  int samples = 100;
  std::uint64_t seed = 0;
  double min_duration = 0.2;
  double max_duration = 5.0;
  int max_slots = 30;
  double amplitude_scale = 3.0;
};

void run_bound_cmd(const BoundOpts& o) {
  require_extended(o.spins, o.common);
  BoundCheckSettings s;
  s.spec = ChainSpec{o.spins, o.coupling};
  s.samples = o.samples;
  s.seed = o.seed;
  s.min_duration = o.min_duration;
  s.max_duration = o.max_duration;
  s.max_slots = o.max_slots;
  s.amplitude_scale = o.amplitude_scale;

  const BoundCheckResult result = run_bound_check(s, exec_of(o.common));
  write_bound_outputs(o.common.output_dir, s, result);
  emit({{"artifact", o.common.output_dir + "/bound_check.csv"},
        {"max_ratio", result.max_ratio},
        {"violations", result.violations}});
}

void register_bound(CLI::App& app) {
  auto o = std::make_shared<BoundOpts>();
  CLI::App* sub = app.add_subcommand(
      "bound-check", "Random drives against the 4 T^2 information ceiling");
  sub->add_option("-N,--chain-length", o->spins, "Number of spins")
      ->check(CLI::Range(2, 64));
  sub->add_option("-J,--coupling", o->coupling, "Exchange constant");
  sub->add_option("--samples", o->samples, "Random drives to draw");
  sub->add_option("--seed", o->seed, "Base RNG seed");
  sub->add_option("--min-duration", o->min_duration, "Shortest duration");
  sub->add_option("--max-duration", o->max_duration, "Longest duration");
  sub->add_option("--max-slots", o->max_slots, "Largest slot count");
  sub->add_option("--amplitude-scale", o->amplitude_scale,
                  "Amplitudes drawn from [-s J, s J]");
  add_common(sub, o->common);
  sub->callback([o] { run_bound_cmd(*o); });
}

const char* error_type(const std::exception& e) {
  if (dynamic_cast<const DegenerateMeasurement*>(&e))
    return "degenerate_measurement";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
  if (dynamic_cast<const std::domain_error*>(&e)) return "domain_error";
  if (dynamic_cast<const std::length_error*>(&e)) return "length_error";
  if (dynamic_cast<const json::parse_error*>(&e)) return "parse_error";
  if (dynamic_cast<const std::runtime_error*>(&e)) return "runtime_error";
  return "error";
}

int emit_error(const char* type, const std::string& message, int code) {
  const json err = {{"error", {{"type", type}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-chain probe: QFI optimization and field estimation"};
  app.set_version_flag("--version", "spinprobe 0.1.0");
  app.require_subcommand(1);
  register_sweep(app);
  register_trace(app);
  register_estimate(app);
  register_oracle(app);
  register_bound(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("usage", e.what(), 2);
  } catch (const std::exception& e) {
    return emit_error(error_type(e), e.what(), 1);
  }
  return 0;
}
