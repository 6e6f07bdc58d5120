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
#include <vector>

#include <Eigen/Dense>

#include "spinprobe/qfi.hpp"

namespace spinprobe {

struct OptimizerConfig {
  int slots = 20;
  int restarts = 20;
  int max_iterations = 500;
  // Convergence when |grad|_2 <= gradient_tolerance * max(1, F).
  double gradient_tolerance = 1e-6;
  // Half-width of the uniform initial amplitude range; 0 means use the
  // exchange constant J.
  double init_amplitude = 0.0;
  // Box |c_i| <= amplitude_bound applied by projection when > 0.
  double amplitude_bound = 0.0;
  std::uint64_t rng_seed = 0;
  // Quasi-Newton history length; the line search stays monotone in F, so
  // this only changes the search direction, never the acceptance rule.
  int lbfgs_memory = 8;
};

struct RestartOutcome {
  double qfi = 0.0;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
};

struct OptimizationResult {
  ControlPulse best_pulse;
  double best_qfi = 0.0;
  int best_restart = -1;  // -1 when every restart failed
  std::vector<RestartOutcome> restarts;
};

// Gradient ascent on the pulse QFI with backtracking (Armijo) line search.
// Restart r draws its initial amplitudes from a stream derived from
// (rng_seed, r), so parallel and serial runs produce identical results and
// ties are broken toward the lowest restart index.  When warm_start is
// given it replaces the random draw of restart 0.
OptimizationResult maximize_qfi(const ChainSpec& spec, double duration,
                                double target_guess, const Eigen::VectorXcd& psi0,
                                const OptimizerConfig& config,
                                Exec exec = Exec::parallel,
                                const ControlPulse* warm_start = nullptr);

struct UncontrolledOptimum {
  double theta = 0.0;
  double phi = 0.0;
  double qfi = 0.0;
};

// Drive-free baseline: scan the probe preparation angles on a pi/60 grid
// and refine the best cell by nested grids.  Deterministic.
UncontrolledOptimum optimize_uncontrolled_state(const ChainSpec& spec,
                                                double duration,
                                                double target_guess,
                                                Exec exec = Exec::parallel);

// QFI of the uncontrolled evolution for one preparation.
double uncontrolled_qfi_at(const ChainSpec& spec, double duration,
                           double target_guess, double theta, double phi);

}  // namespace spinprobe
