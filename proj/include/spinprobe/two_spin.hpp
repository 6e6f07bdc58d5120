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

#include "spinprobe/propagator.hpp"

namespace spinprobe {

// Closed forms for the two-spin chain.  They anchor the simulator and the
// optimizer in tests and are exposed through the CLI for manual inspection.

// Best uncontrolled QFI at large T.  The branch is selected by the
// dimensionless ratio r = (target_field / coupling)^2 with threshold 1/2
// (the two expressions meet there):
//   r <  1/2 :  T^2 / ((1 - r)(1 + r)^2)
//   r >= 1/2 :  4 T^2 r / (1 + r)^2
double uncontrolled_asymptotic_qfi(double target_field, double coupling,
                                   double duration);

// QFI reached by the explicit three-step drive: 4 (T - (pi/2 - 1)/J)^2.
double three_step_qfi(double duration, double coupling);

struct ThreeStepPulse {
  ControlPulse pulse;
  int prep_slots = 0;      // c = guess for ~pi/(4J): prepare the coherence
  int hold_slots = 0;      // c = strong: freeze the exchange, accumulate phase
  int rotation_slot = 0;   // index of the single-slot z correction
  int map_slots = 0;       // c = guess for ~pi/(4J): map phase to population
  double strong_amplitude = 0.0;
  double rotation_amplitude = 0.0;
};

// Piecewise-constant realization on a uniform grid.  The slot count is
// raised until every stage spans at least one slot; stage borders land on
// the nearest slot boundary.  The nominally instantaneous z rotation
// becomes one short slot whose amplitude times duration equals the angle
// that cancels the known part of the phase accumulated over the quantized
// hold stage, so the construction stays exact at the guess.  Residual error
// scales with coupling x slot duration; slots ~ 1e4 keeps it well inside
// the 2% band around the closed form.
ThreeStepPulse three_step_pulse(double duration, double target_guess,
                                double coupling,
                                double strong_amplitude = 0.0,  // 0 -> 200 J
                                int slots = 10000);

}  // namespace spinprobe
