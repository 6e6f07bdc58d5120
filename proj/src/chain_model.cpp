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

#include "spinprobe/chain_model.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace spinprobe {

using cplx = std::complex<double>;

void validate(const ChainSpec& spec) {
  if (spec.spins < 2)
    throw std::invalid_argument("chain needs at least 2 spins, got " +
                                std::to_string(spec.spins));
  if (!(spec.coupling > 0.0) || !std::isfinite(spec.coupling))
    throw std::invalid_argument("coupling must be positive and finite");
}

Eigen::MatrixXcd sector_hamiltonian(const ChainSpec& spec, double control_field,
                                    double target_field) {
  validate(spec);
  if (!std::isfinite(control_field) || !std::isfinite(target_field))
    throw std::invalid_argument("fields must be finite");

  const int n = spec.spins;
  const double j = spec.coupling;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n + 1, n + 1);

  // Exchange contribution to the diagonal: each of the N-1 bonds scores +1
  // when its two spins agree and -1 otherwise; moving the excitation into
  // the bulk flips two bonds, at either end only one.
  h(0, 0) = -0.5 * j * (n - 1) + control_field + target_field;
  h(1, 1) = -0.5 * j * (n - 3) - control_field + target_field;
  for (int k = 2; k <= n - 1; ++k)
    h(k, k) = -0.5 * j * (n - 5) + control_field + target_field;
  h(n, n) = -0.5 * j * (n - 3) + control_field - target_field;

  // Flip-flop part of each bond hops the excitation with weight -J.  The
  // polarized state |0> stays decoupled.
  for (int k = 1; k <= n - 1; ++k) {
    h(k, k + 1) = -j;
    h(k + 1, k) = -j;
  }
  return h;
}

Generators sector_generators(const ChainSpec& spec, double target_field) {
  Generators gen;
  gen.drift = sector_hamiltonian(spec, 0.0, target_field);

  const int dim = sector_dimension(spec);
  gen.control = Eigen::MatrixXcd::Identity(dim, dim);
  gen.control(1, 1) = -1.0;  // -sigma_z of the probe embedding

  gen.target_deriv = Eigen::MatrixXcd::Identity(dim, dim);
  gen.target_deriv(spec.spins, spec.spins) = -1.0;
  return gen;
}

ProbePaulis probe_paulis(int dim) {
  if (dim < 2) throw std::invalid_argument("probe operators need dim >= 2");
  ProbePaulis p;
  p.x = Eigen::MatrixXcd::Zero(dim, dim);
  p.x(0, 1) = 1.0;
  p.x(1, 0) = 1.0;
  p.y = Eigen::MatrixXcd::Zero(dim, dim);
  p.y(0, 1) = cplx(0.0, -1.0);
  p.y(1, 0) = cplx(0.0, 1.0);
  p.z = -Eigen::MatrixXcd::Identity(dim, dim);
  p.z(1, 1) = 1.0;
  return p;
}

namespace {

Eigen::MatrixXcd site_operator(int n_spins, int site, const Eigen::Matrix2cd& op) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int s = 1; s <= n_spins; ++s) {
    const Eigen::MatrixXcd factor =
        (s == site) ? Eigen::MatrixXcd(op)
                    : Eigen::MatrixXcd(Eigen::Matrix2cd::Identity());
    out = Eigen::kroneckerProduct(out, factor).eval();
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd full_hamiltonian(const ChainSpec& spec, double control_field,
                                  double target_field) {
  validate(spec);
  if (spec.spins > 12)
    throw std::length_error("dense 2^N construction capped at N = 12");

  const int n = spec.spins;
  const double j = spec.coupling;

  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  sz << 1, 0, 0, -1;

  const int dim = 1 << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int b = 1; b <= n - 1; ++b) {
    h -= 0.5 * j * (site_operator(n, b, sx) * site_operator(n, b + 1, sx) +
                    site_operator(n, b, sy) * site_operator(n, b + 1, sy) +
                    site_operator(n, b, sz) * site_operator(n, b + 1, sz));
  }
  h -= control_field * site_operator(n, 1, sz);
  h -= target_field * site_operator(n, n, sz);
  return h;
}

Eigen::MatrixXcd project_full_to_sector(const ChainSpec& spec,
                                        const Eigen::MatrixXcd& full) {
  validate(spec);
  const int n = spec.spins;
  const int dim = 1 << n;
  if (full.rows() != dim || full.cols() != dim)
    throw std::invalid_argument("full matrix has wrong dimension");

  // Basis index in the kron ordering (site 1 = most significant bit,
  // bit 0 = spin up): all-down is 2^N - 1, exciting site j clears one bit.
  std::vector<int> idx(n + 1);
  idx[0] = dim - 1;
  for (int j = 1; j <= n; ++j) idx[j] = (dim - 1) - (1 << (n - j));

  Eigen::MatrixXcd out(n + 1, n + 1);
  for (int r = 0; r <= n; ++r)
    for (int c = 0; c <= n; ++c) out(r, c) = full(idx[r], idx[c]);
  return out;
}

Eigen::VectorXcd probe_superposition(const ChainSpec& spec, double theta, double phi) {
  validate(spec);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(sector_dimension(spec));
  psi(0) = std::cos(0.5 * theta);
  psi(1) = std::polar(std::sin(0.5 * theta), phi);
  return psi;
}

Eigen::VectorXcd probe_excitation(const ChainSpec& spec) {
  validate(spec);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(sector_dimension(spec));
  psi(1) = 1.0;
  return psi;
}

}  // namespace spinprobe
