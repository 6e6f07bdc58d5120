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

#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "spinprobe/chain_model.hpp"
#include "spinprobe/propagator.hpp"

namespace testutil {

// Independent single-exponential reference; never routed through the block
// embedding the library uses.
inline Eigen::MatrixXcd expm_prop(const Eigen::MatrixXcd& h, double dt) {
  const Eigen::MatrixXcd scaled = std::complex<double>(0.0, -dt) * h;
  return scaled.exp();
}

inline Eigen::MatrixXcd slot_ref(const spinprobe::ChainSpec& spec,
                                 double amplitude, double target_field,
                                 double dt) {
  return expm_prop(spinprobe::sector_hamiltonian(spec, amplitude, target_field),
                   dt);
}

// Central difference of the slot propagator in the target field.
inline Eigen::MatrixXcd fd_target_deriv(const spinprobe::ChainSpec& spec,
                                        double amplitude, double target_field,
                                        double dt, double h = 1e-5) {
  const Eigen::MatrixXcd up = slot_ref(spec, amplitude, target_field + h, dt);
  const Eigen::MatrixXcd dn = slot_ref(spec, amplitude, target_field - h, dt);
  return (up - dn) / (2.0 * h);
}

inline Eigen::MatrixXcd fd_control_deriv(const spinprobe::ChainSpec& spec,
                                         double amplitude, double target_field,
                                         double dt, double h = 1e-5) {
  const Eigen::MatrixXcd up = slot_ref(spec, amplitude + h, target_field, dt);
  const Eigen::MatrixXcd dn = slot_ref(spec, amplitude - h, target_field, dt);
  return (up - dn) / (2.0 * h);
}

inline Eigen::MatrixXcd fd_mixed_deriv(const spinprobe::ChainSpec& spec,
                                       double amplitude, double target_field,
                                       double dt, double h = 1e-4) {
  const Eigen::MatrixXcd pp = slot_ref(spec, amplitude + h, target_field + h, dt);
  const Eigen::MatrixXcd pm = slot_ref(spec, amplitude + h, target_field - h, dt);
  const Eigen::MatrixXcd mp = slot_ref(spec, amplitude - h, target_field + h, dt);
  const Eigen::MatrixXcd mm = slot_ref(spec, amplitude - h, target_field - h, dt);
  return (pp - pm - mp + mm) / (4.0 * h * h);
}

inline double rel_gap(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const double scale = std::max(1.0, b.norm());
  return (a - b).norm() / scale;
}

inline Eigen::VectorXcd random_state(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd psi(dim);
  for (int j = 0; j < dim; ++j)
    psi(j) = std::complex<double>(gauss(rng), gauss(rng));
  psi.normalize();
  return psi;
}

inline spinprobe::ControlPulse random_pulse(int slots, double duration,
                                            double amp_scale,
                                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-amp_scale, amp_scale);
  spinprobe::ControlPulse pulse;
  pulse.duration = duration;
  pulse.amplitudes.resize(slots);
  for (double& a : pulse.amplitudes) a = amp(rng);
  return pulse;
}

}  // namespace testutil
