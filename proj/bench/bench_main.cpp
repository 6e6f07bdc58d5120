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

// Serial versus OpenMP timings of the data-parallel kernels.  Each kernel
// runs once per mode (these are coarse comparisons, not a precision
// harness); pass a repeat count to average.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>

#include "spinprobe/experiments.hpp"
#include "spinprobe/rng.hpp"

namespace {

using namespace spinprobe;

double time_ms(int repeats, const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() /
         repeats;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 1;
  std::printf("threads: %d, repeats: %d\n", thread_count(), repeats);
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp",
              "speedup");

  const ChainSpec chain{5, 1.0};

  {
    std::mt19937_64 rng = make_stream(7, 0);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    ControlPulse pulse;
    pulse.duration = 8.0;
    pulse.amplitudes.resize(64);
    for (double& a : pulse.amplitudes) a = amp(rng);
    const Generators gen = sector_generators(chain, 0.0);
    const auto run = [&](Exec exec) {
      (void)compose_pulse(gen, pulse, true, exec);
    };
    report("slot bundles (64 slots)",
           time_ms(repeats, [&] { run(Exec::serial); }),
           time_ms(repeats, [&] { run(Exec::parallel); }));
  }

  {
    OptimizerConfig config;
    config.slots = 12;
    config.restarts = 8;
    config.max_iterations = 30;
    config.rng_seed = 11;
    const Eigen::VectorXcd psi0 = probe_excitation(chain);
    const auto run = [&](Exec exec) {
      (void)maximize_qfi(chain, 6.0, 0.0, psi0, config, exec);
    };
    report("optimizer restarts (8)",
           time_ms(repeats, [&] { run(Exec::serial); }),
           time_ms(repeats, [&] { run(Exec::parallel); }));
  }

  {
    const auto run = [&](Exec exec) {
      (void)optimize_uncontrolled_state(chain, 10.0, 0.0, exec);
    };
    report("preparation grid scan",
           time_ms(repeats, [&] { run(Exec::serial); }),
           time_ms(repeats, [&] { run(Exec::parallel); }));
  }

  {
    BoundCheckSettings settings;
    settings.spec = ChainSpec{3, 1.0};
    settings.samples = 48;
    settings.seed = 23;
    const auto run = [&](Exec exec) { (void)run_bound_check(settings, exec); };
    report("random drives (48)",
           time_ms(repeats, [&] { run(Exec::serial); }),
           time_ms(repeats, [&] { run(Exec::parallel); }));
  }

  return 0;
}
