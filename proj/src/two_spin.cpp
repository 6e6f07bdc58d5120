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

#include "spinprobe/two_spin.hpp"

#include <cmath>
#include <stdexcept>

namespace spinprobe {

double uncontrolled_asymptotic_qfi(double target_field, double coupling,
                                   double duration) {
  if (!(coupling > 0.0) || !std::isfinite(coupling))
    throw std::invalid_argument("coupling must be positive and finite");
  if (!(duration >= 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("duration must be nonnegative and finite");

  const double r = (target_field / coupling) * (target_field / coupling);
  const double t2 = duration * duration;
  if (r < 0.5) return t2 / ((1.0 - r) * (1.0 + r) * (1.0 + r));
  return 4.0 * t2 * r / ((1.0 + r) * (1.0 + r));
}

double three_step_qfi(double duration, double coupling) {
  if (!(coupling > 0.0) || !std::isfinite(coupling))
    throw std::invalid_argument("coupling must be positive and finite");
  const double threshold = (M_PI / 2.0 - 1.0) / coupling;
  if (!(duration > threshold))
    throw std::domain_error("duration too short for the three-step drive");
  const double eff = duration - threshold;
  return 4.0 * eff * eff;
}

ThreeStepPulse three_step_pulse(double duration, double target_guess,
                                double coupling, double strong_amplitude,
                                int slots) {
  if (!(coupling > 0.0) || !std::isfinite(coupling))
    throw std::invalid_argument("coupling must be positive and finite");
  if (!std::isfinite(target_guess))
    throw std::invalid_argument("guess must be finite");
  if (!(duration > M_PI / (2.0 * coupling)))
    throw std::domain_error(
        "duration must exceed pi/(2J) to fit the preparation stages");
  if (strong_amplitude == 0.0) strong_amplitude = 200.0 * coupling;
  if (!(strong_amplitude > 0.0) || !std::isfinite(strong_amplitude))
    throw std::invalid_argument("strong amplitude must be positive and finite");

  // Round the quarter-swap stages to whole slots, raising the slot count
  // until the hold stage keeps at least one slot.
  int m = std::max(slots, 16);
  const double quarter_swap = M_PI / (4.0 * coupling);
  int prep = 0;
  for (;;) {
    const double dt = duration / m;
    prep = std::max<int>(1, static_cast<int>(std::llround(quarter_swap / dt)));
    if (2 * prep + 2 <= m) break;
    m *= 2;
  }
  const double dt = duration / m;
  const int hold = m - 2 * prep - 1;

  // The z correction must undo the guess-predictable part of the relative
  // phase collected over the quantized hold stage; the leftover, target
  // dependent part is the signal.  remainder() keeps the slot amplitude at
  // the smallest equivalent angle.
  const double hold_phase =
      -2.0 * (strong_amplitude - target_guess) * (hold * dt);
  const double rotation_amplitude =
      target_guess + std::remainder(hold_phase, 2.0 * M_PI) / (2.0 * dt);

  ThreeStepPulse out;
  out.prep_slots = prep;
  out.hold_slots = hold;
  out.rotation_slot = prep + hold;
  out.map_slots = prep;
  out.strong_amplitude = strong_amplitude;
  out.rotation_amplitude = rotation_amplitude;

  out.pulse.duration = duration;
  out.pulse.amplitudes.assign(m, target_guess);
  for (int i = prep; i < prep + hold; ++i)
    out.pulse.amplitudes[i] = strong_amplitude;
  out.pulse.amplitudes[out.rotation_slot] = rotation_amplitude;
  return out;
}

}  // namespace spinprobe
