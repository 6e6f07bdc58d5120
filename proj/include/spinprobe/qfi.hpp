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

#include "spinprobe/propagator.hpp"

namespace spinprobe {

// Probe Bloch vector, its derivative along the estimated field, and
// (optionally) the per-slot drive derivatives of both.
struct BlochSurface {
  Eigen::Vector3d u = Eigen::Vector3d::Zero();
  Eigen::Vector3d du = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> slot_du;     // d u / d c_i
  std::vector<Eigen::Vector3d> slot_mixed;  // d2 u / d c_i d target
};

// Bloch vector of the probe reduced state.  Amplitudes a_0 and a_1 carry
// the full probe coherence; every other sector amplitude only populates the
// probe-down level, so u = (2 Re a_1 a_0*, 2 Im a_1 a_0*, 2|a_1|^2 - 1).
Eigen::Vector3d bloch_vector(const Eigen::VectorXcd& psi);

// d u = 2 Re <dpsi| sigma |psi> with the embedded probe Paulis.
Eigen::Vector3d bloch_derivative(const Eigen::VectorXcd& dpsi,
                                 const Eigen::VectorXcd& psi);

BlochSurface bloch_surface(const EvolvedState& state);

struct QfiValue {
  double value = 0.0;
  // (u . du) / (1 - |u|^2), guarded near purity; reused by the measurement
  // construction and by the gradient.
  double overlap_ratio = 0.0;
};

// Purity guard: the smallest 1 - |u|^2 the ratio may divide by, and the
// |u . du| level below which the radial term counts as roundoff noise (a
// pure state moving on the sphere has u . du = 0 identically).
inline constexpr double kPureStateFloor = 1e-10;
inline constexpr double kOverlapNoiseFloor = 1e-8;

// F = |du|^2 + (u . du)^2 / (1 - |u|^2).  Near a pure state the ratio is
// guarded: the denominator is floored at kPureStateFloor, and when |u . du|
// is below kOverlapNoiseFloor the whole second term is dropped.
QfiValue qfi(const Eigen::Vector3d& u, const Eigen::Vector3d& du);

// dF/dc_i from the slot derivatives of the Bloch surface.
std::vector<double> qfi_gradient(const BlochSurface& surface);

struct QfiResult {
  QfiValue value;
  std::vector<double> gradient;  // empty unless requested
  BlochSurface surface;
};

QfiResult qfi_of_pulse(const ChainSpec& spec, const ControlPulse& pulse,
                       double target_field, const Eigen::VectorXcd& psi0,
                       bool with_gradient = false, Exec exec = Exec::parallel);

// Information ceiling 4 T^2 for any drive of the given duration.
inline double qfi_bound(double duration) { return 4.0 * duration * duration; }

}  // namespace spinprobe
