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

#include <vector>

#include <Eigen/Dense>

#include "spinprobe/chain_model.hpp"
#include "spinprobe/parallel.hpp"

namespace spinprobe {

// Piecewise-constant drive: slots() equal slots spanning [0, duration].
struct ControlPulse {
  double duration = 1.0;
  std::vector<double> amplitudes;

  int slots() const { return static_cast<int>(amplitudes.size()); }
  double slot_dt() const { return duration / slots(); }
};

void validate(const ControlPulse& pulse);

// Propagator of a single slot together with its exact parameter
// derivatives.  All four matrices come out of one exponential of the
// 4n x 4n block-triangular embedding
//
//     M = [ H   .   .   . ]          exp(-i M dt) carries, in its first
//         [ H'  H   .   . ]          block column, U, dU/dtarget,
//         [ Hc  .   H   . ]          dU/damplitude and the mixed second
//         [ .   Hc  H'  H ]          derivative (H' = dH/dtarget).
//
// M is not normal, so the exponential is evaluated by scaling-and-squaring
// rather than spectrally.  A first-order -i dt H' U approximation is not
// good enough for the downstream gradient checks; this route is exact.
struct SlotBundle {
  Eigen::MatrixXcd propagator;     // U
  Eigen::MatrixXcd target_deriv;   // dU/d(target_field)
  Eigen::MatrixXcd control_deriv;  // dU/d(amplitude)
  Eigen::MatrixXcd mixed_deriv;    // d2U/d(amplitude)d(target_field)
};

SlotBundle slot_bundle(const Generators& gen, double amplitude, double dt);

// U and dU/dtarget only, from the 2n x 2n sub-embedding.  Cheaper; used in
// line searches and anywhere no drive gradient is needed.
struct SlotValue {
  Eigen::MatrixXcd propagator;
  Eigen::MatrixXcd target_deriv;
};

SlotValue slot_value(const Generators& gen, double amplitude, double dt);

// Whole-pulse propagator U = U_m ... U_1 (slot 1 acts first), its target
// derivative, and optionally the per-slot derivatives dU/dc_i and the mixed
// d2U/dc_i dtarget.  Slots sharing an amplitude reuse one bundle, which
// makes constant and few-level pulses cheap.
struct PulseBundle {
  Eigen::MatrixXcd propagator;
  Eigen::MatrixXcd target_deriv;
  std::vector<Eigen::MatrixXcd> control_derivs;  // empty unless requested
  std::vector<Eigen::MatrixXcd> mixed_derivs;
};

PulseBundle compose_pulse(const Generators& gen, const ControlPulse& pulse,
                          bool with_slot_derivs = false,
                          Exec exec = Exec::parallel);

struct EvolvedState {
  Eigen::VectorXcd psi;
  Eigen::VectorXcd target_deriv;
  std::vector<Eigen::VectorXcd> control_derivs;
  std::vector<Eigen::VectorXcd> mixed_derivs;
};

// Applies a composed bundle to a normalized initial state.
EvolvedState evolve_state(const PulseBundle& bundle, const Eigen::VectorXcd& psi0);

// Slot-by-slot propagation of (psi, dpsi/dtarget); avoids the 4n embedding
// entirely when only the value surface is needed.
struct ValueState {
  Eigen::VectorXcd psi;
  Eigen::VectorXcd target_deriv;
};

ValueState evolve_value(const Generators& gen, const ControlPulse& pulse,
                        const Eigen::VectorXcd& psi0, Exec exec = Exec::parallel);

}  // namespace spinprobe
