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

#include <Eigen/Dense>

namespace spinprobe {

// Isotropic Heisenberg chain with a locally driven probe spin at site 1 and
// a static field of unknown strength on the last site.  The exchange term
// conserves the excitation number, so everything runs in the
// single-excitation sector: basis index 0 is the fully polarized state (no
// excitation), index j >= 1 puts the excitation at site j.
struct ChainSpec {
  int spins = 2;          // chain length N
  double coupling = 1.0;  // exchange constant J
};

void validate(const ChainSpec& spec);

inline int sector_dimension(const ChainSpec& spec) { return spec.spins + 1; }

// (N+1) x (N+1) sector Hamiltonian at the given probe drive amplitude and
// remote field value.  Tridiagonal: the polarized state decouples, hopping
// elements are -J, and the local fields enter only on the diagonal.
Eigen::MatrixXcd sector_hamiltonian(const ChainSpec& spec, double control_field,
                                    double target_field);

// Generators entering the slot propagators.  H(c) = drift + c * control,
// target_deriv = dH/d(target_field).  The drift absorbs the target field.
struct Generators {
  Eigen::MatrixXcd drift;
  Eigen::MatrixXcd control;
  Eigen::MatrixXcd target_deriv;
};

Generators sector_generators(const ChainSpec& spec, double target_field);

// Pauli operators of the probe site embedded in the sector basis.  Only the
// span of {|0>, |1>} carries coherence; the remaining states all map to the
// probe-down level.  Orientation fixed by <1| y |0> = +i.
struct ProbePaulis {
  Eigen::MatrixXcd x, y, z;
};
ProbePaulis probe_paulis(int dim);

// Dense 2^N construction of the same Hamiltonian, used to cross-check the
// sector restriction.  Dimension guard at N <= 12.
Eigen::MatrixXcd full_hamiltonian(const ChainSpec& spec, double control_field,
                                  double target_field);

// Rows/columns of the 2^N matrix restricted to the single-excitation
// sector, ordered like the sector basis.
Eigen::MatrixXcd project_full_to_sector(const ChainSpec& spec,
                                        const Eigen::MatrixXcd& full);

// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, the probe preparation used by
// the uncontrolled baseline.
Eigen::VectorXcd probe_superposition(const ChainSpec& spec, double theta, double phi);

// Excitation parked on the probe site, the standard controlled-run input.
Eigen::VectorXcd probe_excitation(const ChainSpec& spec);

}  // namespace spinprobe
