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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinprobe/estimation.hpp"
#include "spinprobe/two_spin.hpp"

namespace spinprobe {

// Experiment drivers shared by the CLI and the test suite.  Every artifact
// is written as a CSV table (17 significant digits) plus a JSON sidecar
// embedding the fully resolved settings and seed, so a fixed seed gives
// byte-identical files across invocations.

std::string format_g17(double value);

// ---- QFI sweep over pulse durations ---------------------------------------

struct SweepSettings {
  ChainSpec spec;
  std::vector<double> time_grid;
  OptimizerConfig optimizer;
  double target_field = 0.0;  // field value the pulses are optimized at
  std::uint64_t seed = 0;
  bool controlled = true;
  bool uncontrolled = true;
};

struct SweepRow {
  double duration = 0.0;
  double controlled_qfi = 0.0;
  double controlled_rate = 0.0;  // F / T^2
  bool controlled_ok = false;
  double uncontrolled_qfi = 0.0;
  double uncontrolled_rate = 0.0;
  bool uncontrolled_ok = false;
  double theta = 0.0;  // best uncontrolled preparation
  double phi = 0.0;
  ControlPulse best_pulse;  // stored in the sidecar
};

std::vector<SweepRow> run_qfi_sweep(const SweepSettings& settings,
                                    Exec exec = Exec::parallel);

void write_sweep_outputs(const std::string& dir, const SweepSettings& settings,
                         const std::vector<SweepRow>& rows);

// ---- Site populations along one evolution ---------------------------------

struct TraceSettings {
  ChainSpec spec;
  ControlPulse pulse;
  Eigen::VectorXcd psi0;
  double target_field = 0.0;
  int samples_per_slot = 10;
  std::uint64_t seed = 0;  // recorded in the sidecar only
};

struct PopulationTrace {
  std::vector<double> times;       // starts at t = 0
  std::vector<double> amplitudes;  // drive amplitude of the containing slot
  // row per sample, column per sector amplitude |a_j|^2, j = 0..N
  std::vector<std::vector<double>> populations;
};

PopulationTrace run_population_trace(const TraceSettings& settings);

void write_trace_outputs(const std::string& dir, const TraceSettings& settings,
                         const PopulationTrace& trace);

// ---- Repeated estimation runs ---------------------------------------------

struct ExperimentSettings {
  ChainSpec spec;
  double duration = 10.0;
  double true_field = 0.0;
  double initial_guess = 0.1;
  bool use_control = true;
  int runs = 1;
  ProtocolConfig protocol;
  std::uint64_t seed = 0;  // per-run seeds are derived from this
};

struct RunSummary {
  int run = 0;
  std::uint64_t seed = 0;
  int rounds = 0;
  long long total_shots = 0;
  bool converged = false;
  bool failed = false;
  double final_estimate = 0.0;
};

struct ExperimentResult {
  std::vector<RunSummary> runs;
  std::vector<EstimationTrace> traces;
  double mean_shots = 0.0;
  double stddev_shots = 0.0;
  double mean_abs_error = 0.0;
  int converged_count = 0;
  int failed_count = 0;
};

ExperimentResult run_estimation_experiment(const ExperimentSettings& settings,
                                           Exec exec = Exec::parallel);

void write_estimate_outputs(const std::string& dir,
                            const ExperimentSettings& settings,
                            const ExperimentResult& result);

// ---- Random-pulse information bound check ---------------------------------

struct BoundCheckSettings {
  ChainSpec spec;
  int samples = 100;
  std::uint64_t seed = 0;
  double min_duration = 0.2;
  double max_duration = 5.0;
  int max_slots = 30;
  double amplitude_scale = 3.0;  // amplitudes drawn from [-s J, s J]
};

struct BoundSample {
  int index = 0;
  double duration = 0.0;
  int slots = 0;
  double qfi = 0.0;
  double ratio = 0.0;  // F / (4 T^2)
};

struct BoundCheckResult {
  std::vector<BoundSample> samples;
  double max_ratio = 0.0;
  int violations = 0;  // ratio > 1 + 1e-9
};

BoundCheckResult run_bound_check(const BoundCheckSettings& settings,
                                 Exec exec = Exec::parallel);

void write_bound_outputs(const std::string& dir,
                         const BoundCheckSettings& settings,
                         const BoundCheckResult& result);

}  // namespace spinprobe
