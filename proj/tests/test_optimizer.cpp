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

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "spinprobe/optimizer.hpp"
#include "spinprobe/two_spin.hpp"

using namespace spinprobe;

namespace {

OptimizerConfig small_config() {
  OptimizerConfig config;
  config.slots = 8;
  config.restarts = 3;
  config.max_iterations = 60;
  config.rng_seed = 42;
  return config;
}

}  // namespace

TEST_CASE("optimizer runs are reproducible and exec-invariant") {
  const ChainSpec spec{3, 1.0};
  const Eigen::VectorXcd psi0 = probe_excitation(spec);
  const OptimizerConfig config = small_config();

  const OptimizationResult a =
      maximize_qfi(spec, 4.0, 0.0, psi0, config, Exec::serial);
  const OptimizationResult b =
      maximize_qfi(spec, 4.0, 0.0, psi0, config, Exec::serial);
  const OptimizationResult c =
      maximize_qfi(spec, 4.0, 0.0, psi0, config, Exec::parallel);

  REQUIRE(a.best_restart >= 0);
  CHECK(a.best_qfi == b.best_qfi);
  CHECK(a.best_restart == b.best_restart);
  CHECK(a.best_pulse.amplitudes == b.best_pulse.amplitudes);
  CHECK(a.best_qfi == c.best_qfi);
  CHECK(a.best_restart == c.best_restart);
  CHECK(a.best_pulse.amplitudes == c.best_pulse.amplitudes);
}

TEST_CASE("more iterations never hurt") {
  const ChainSpec spec{2, 1.0};
  const Eigen::VectorXcd psi0 = probe_excitation(spec);
  OptimizerConfig coarse = small_config();
  coarse.max_iterations = 5;
  OptimizerConfig fine = small_config();
  fine.max_iterations = 80;

  const double f_coarse =
      maximize_qfi(spec, 5.0, 0.0, psi0, coarse, Exec::serial).best_qfi;
  const double f_fine =
      maximize_qfi(spec, 5.0, 0.0, psi0, fine, Exec::serial).best_qfi;
  CHECK(f_fine >= f_coarse - 1e-12);
}

TEST_CASE("control beats the drive-free baseline on a short two-spin chain") {
  const ChainSpec spec{2, 1.0};
  const double duration = 6.0;
  OptimizerConfig config = small_config();
  config.slots = 12;
  config.restarts = 4;
  config.max_iterations = 120;

  const OptimizationResult controlled = maximize_qfi(
      spec, duration, 0.0, probe_excitation(spec), config, Exec::serial);
  const UncontrolledOptimum baseline =
      optimize_uncontrolled_state(spec, duration, 0.0, Exec::serial);

  REQUIRE(controlled.best_restart >= 0);
  CHECK(controlled.best_qfi > 1.2 * baseline.qfi);
  CHECK(controlled.best_qfi <= qfi_bound(duration) * (1.0 + 1e-9));
}

TEST_CASE("warm start is honored and never loses ground") {
  const ChainSpec spec{2, 1.0};
  const Eigen::VectorXcd psi0 = probe_excitation(spec);
  OptimizerConfig config = small_config();

  const OptimizationResult first =
      maximize_qfi(spec, 4.0, 0.0, psi0, config, Exec::serial);
  REQUIRE(first.best_restart >= 0);

  OptimizerConfig warm_config = config;
  warm_config.restarts = 1;
  const OptimizationResult warmed = maximize_qfi(
      spec, 4.0, 0.0, psi0, warm_config, Exec::serial, &first.best_pulse);
  CHECK(warmed.best_qfi >= first.best_qfi - 1e-12);

  ControlPulse wrong;
  wrong.duration = 4.0;
  wrong.amplitudes.assign(3, 0.0);  // slot count mismatch
  CHECK_THROWS_AS(
      maximize_qfi(spec, 4.0, 0.0, psi0, warm_config, Exec::serial, &wrong),
      std::invalid_argument);
}

TEST_CASE("amplitude box is enforced") {
  const ChainSpec spec{2, 1.0};
  OptimizerConfig config = small_config();
  config.amplitude_bound = 0.8;
  const OptimizationResult result = maximize_qfi(
      spec, 3.0, 0.0, probe_excitation(spec), config, Exec::serial);
  REQUIRE(result.best_restart >= 0);
  for (double a : result.best_pulse.amplitudes) CHECK(std::abs(a) <= 0.8 + 1e-12);
}

TEST_CASE("uncontrolled baseline approaches the asymptotic law") {
  const ChainSpec spec{2, 1.0};
  // The optimized rate oscillates with the exchange revivals (exactly
  // cos^2(J T) at zero field to leading order), so the asymptotic law is the
  // revival-peak envelope; test at an exact revival J T = 10 pi.
  const double duration = 10.0 * M_PI;
  const UncontrolledOptimum best =
      optimize_uncontrolled_state(spec, duration, 0.0, Exec::serial);
  const double reference = uncontrolled_asymptotic_qfi(0.0, 1.0, duration);
  CHECK(best.qfi == doctest::Approx(reference).epsilon(0.01));
  CHECK(best.theta >= 0.0);
  CHECK(best.theta <= M_PI);
  CHECK(best.phi >= 0.0);
  CHECK(best.phi < 2.0 * M_PI);
  CHECK(best.qfi ==
        doctest::Approx(
            uncontrolled_qfi_at(spec, duration, 0.0, best.theta, best.phi))
            .epsilon(1e-12));

  const UncontrolledOptimum serial =
      optimize_uncontrolled_state(spec, duration, 0.0, Exec::serial);
  const UncontrolledOptimum parallel =
      optimize_uncontrolled_state(spec, duration, 0.0, Exec::parallel);
  CHECK(serial.theta == parallel.theta);
  CHECK(serial.phi == parallel.phi);
  CHECK(serial.qfi == parallel.qfi);
}

TEST_CASE("optimizer configuration is validated") {
  const ChainSpec spec{2, 1.0};
  const Eigen::VectorXcd psi0 = probe_excitation(spec);
  OptimizerConfig config = small_config();
  config.slots = 0;
  CHECK_THROWS_AS(maximize_qfi(spec, 2.0, 0.0, psi0, config, Exec::serial),
                  std::invalid_argument);
  config = small_config();
  config.restarts = 0;
  CHECK_THROWS_AS(maximize_qfi(spec, 2.0, 0.0, psi0, config, Exec::serial),
                  std::invalid_argument);
  config = small_config();
  CHECK_THROWS_AS(maximize_qfi(spec, -1.0, 0.0, psi0, config, Exec::serial),
                  std::invalid_argument);
}
