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

#include "spinprobe/qfi.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace spinprobe {

using cplx = std::complex<double>;

namespace {

// <chi| sigma_k |psi> for the probe Paulis embedded in the sector basis;
// written out on the amplitudes instead of forming the matrices.
Eigen::Vector3d pauli_bilinear_2re(const Eigen::VectorXcd& chi,
                                   const Eigen::VectorXcd& psi) {
  const cplx x = std::conj(chi(0)) * psi(1) + std::conj(chi(1)) * psi(0);
  const cplx y = cplx(0.0, 1.0) * (std::conj(chi(1)) * psi(0) -
                                   std::conj(chi(0)) * psi(1));
  const cplx z = 2.0 * std::conj(chi(1)) * psi(1) - chi.dot(psi);
  return {2.0 * x.real(), 2.0 * y.real(), 2.0 * z.real()};
}

}  // namespace

Eigen::Vector3d bloch_vector(const Eigen::VectorXcd& psi) {
  if (psi.size() < 2) throw std::invalid_argument("state too small");
  const cplx coh = psi(1) * std::conj(psi(0));
  return {2.0 * coh.real(), 2.0 * coh.imag(), 2.0 * std::norm(psi(1)) - 1.0};
}

Eigen::Vector3d bloch_derivative(const Eigen::VectorXcd& dpsi,
                                 const Eigen::VectorXcd& psi) {
  if (psi.size() < 2 || dpsi.size() != psi.size())
    throw std::invalid_argument("state dimensions disagree");
  return pauli_bilinear_2re(dpsi, psi);
}

BlochSurface bloch_surface(const EvolvedState& state) {
  BlochSurface s;
  s.u = bloch_vector(state.psi);
  s.du = bloch_derivative(state.target_deriv, state.psi);

  const int m = static_cast<int>(state.control_derivs.size());
  s.slot_du.resize(m);
  s.slot_mixed.resize(m);
  for (int i = 0; i < m; ++i) {
    s.slot_du[i] = pauli_bilinear_2re(state.control_derivs[i], state.psi);
    // Second derivative of the expectation: one term with both parameter
    // hits on the same side, one with the hits split across the bilinear.
    s.slot_mixed[i] = pauli_bilinear_2re(state.mixed_derivs[i], state.psi) +
                      pauli_bilinear_2re(state.target_deriv,
                                         state.control_derivs[i]);
  }
  return s;
}

namespace {

// Guarded (u.du)/(1-|u|^2); also validates |u| <= 1.
double overlap_ratio_guarded(const Eigen::Vector3d& u, const Eigen::Vector3d& du) {
  const double gap = 1.0 - u.squaredNorm();
  if (gap < -1e-9)
    throw std::runtime_error("Bloch vector left the unit ball");
  const double overlap = u.dot(du);
  if (gap < kPureStateFloor) {
    if (std::abs(overlap) <= kOverlapNoiseFloor) return 0.0;
    return overlap / kPureStateFloor;
  }
  return overlap / gap;
}

}  // namespace

QfiValue qfi(const Eigen::Vector3d& u, const Eigen::Vector3d& du) {
  QfiValue out;
  out.overlap_ratio = overlap_ratio_guarded(u, du);
  out.value = du.squaredNorm() + out.overlap_ratio * u.dot(du);
  return out;
}

std::vector<double> qfi_gradient(const BlochSurface& surface) {
  if (surface.slot_du.empty() || surface.slot_du.size() != surface.slot_mixed.size())
    throw std::invalid_argument("surface lacks per-slot derivatives");

  const Eigen::Vector3d& u = surface.u;
  const Eigen::Vector3d& du = surface.du;
  const double g = overlap_ratio_guarded(u, du);

  const int m = static_cast<int>(surface.slot_du.size());
  std::vector<double> grad(m);
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector3d& di = surface.slot_du[i];
    const Eigen::Vector3d& mi = surface.slot_mixed[i];
    grad[i] = 2.0 * mi.dot(du) +
              2.0 * g * (mi.dot(u) + du.dot(di) + g * di.dot(u));
  }
  return grad;
}

QfiResult qfi_of_pulse(const ChainSpec& spec, const ControlPulse& pulse,
                       double target_field, const Eigen::VectorXcd& psi0,
                       bool with_gradient, Exec exec) {
  const Generators gen = sector_generators(spec, target_field);

  QfiResult out;
  if (with_gradient) {
    const PulseBundle bundle = compose_pulse(gen, pulse, true, exec);
    const EvolvedState state = evolve_state(bundle, psi0);
    out.surface = bloch_surface(state);
    out.value = qfi(out.surface.u, out.surface.du);
    out.gradient = qfi_gradient(out.surface);
  } else {
    const ValueState state = evolve_value(gen, pulse, psi0, exec);
    out.surface.u = bloch_vector(state.psi);
    out.surface.du = bloch_derivative(state.target_deriv, state.psi);
    out.value = qfi(out.surface.u, out.surface.du);
  }
  return out;
}

}  // namespace spinprobe
