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
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spinprobe/optimizer.hpp"

namespace spinprobe {

// Raised when the measurement direction collapses (|v| ~ 0) and no
// information can be extracted from a round.
struct DegenerateMeasurement : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Optimal local observable in Bloch form, L = alpha I + v . sigma, built
// from the model surface at the current guess.  Saturates the information
// bound: projective measurement along v/|v| with outcome values alpha +- |v|.
struct SldMeasurement {
  double alpha = 0.0;
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis = Eigen::Vector3d::Zero();  // v / |v|
  double outcome_plus = 0.0;                       // alpha + |v|
  double outcome_minus = 0.0;                      // alpha - |v|
};

SldMeasurement sld_measurement(const Eigen::Vector3d& u, const Eigen::Vector3d& du);

// P(+), P(-) when the true state u_true is measured along the axis.
std::pair<double, double> outcome_probabilities(const Eigen::Vector3d& u_true,
                                                const SldMeasurement& m);

// Binomial draw of the number of + outcomes among `shots` repetitions.
long long sample_plus_count(double p_plus, long long shots, std::mt19937_64& rng);

// One mean-value update: guess + (l+ k/S + l- (S-k)/S) / F.  Consistent
// frequencies leave the guess fixed; to first order the update lands on the
// true value.
double update_estimate(double guess, const SldMeasurement& m, long long plus_count,
                       long long shots, double qfi_value);

struct ProtocolConfig {
  double epsilon = 0.01;    // target accuracy, also sets the shot budget
  int max_rounds = 50;
  int folds = 10;           // subsampling folds for the early-stop rule
  int warm_restarts = 5;    // optimizer restarts after the first round
  int degenerate_retries = 3;
  OptimizerConfig optimizer;  // slots, restarts (round 0), iteration caps
  std::uint64_t seed = 0;     // drives measurement noise and optimizer sub-seeds
};

struct RoundRecord {
  int round = 0;
  double guess = 0.0;
  double qfi = 0.0;
  long long shots = 0;
  long long plus_count = 0;
  double next_guess = 0.0;
  double fold_stderr = 0.0;
};

struct EstimationTrace {
  std::vector<RoundRecord> rounds;
  double final_estimate = 0.0;
  long long total_shots = 0;
  bool converged = false;
  bool failed = false;
  std::string failure;
};

// Adaptive estimation loop.  Each round re-optimizes the drive at the
// current guess (warm-started with fewer restarts after round 0), measures
// S_n = ceil(1 / (eps^2 F_n)) shots of the guess-point observable against
// the true-field state, and feeds the empirical mean back into the guess.
// Stops when the update falls below eps or the 10-fold subsampling standard
// error drops below eps/2; gives up after max_rounds.  A degenerate
// measurement aborts the round and retries with a re-randomized drive.
// Fully reproducible for a fixed config.seed, including optimizer sub-seeds.
EstimationTrace run_protocol(const ChainSpec& spec, double duration,
                             double true_field, double initial_guess,
                             bool use_control, const ProtocolConfig& config,
                             Exec exec = Exec::parallel);

}  // namespace spinprobe
