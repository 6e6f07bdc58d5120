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

#include "spinprobe/propagator.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace spinprobe {

using cplx = std::complex<double>;

namespace {

constexpr cplx kMinusI{0.0, -1.0};

void check_generators(const Generators& gen) {
  const auto n = gen.drift.rows();
  if (n < 2 || gen.drift.cols() != n)
    throw std::invalid_argument("drift generator must be square, dim >= 2");
  if (gen.control.rows() != n || gen.control.cols() != n ||
      gen.target_deriv.rows() != n || gen.target_deriv.cols() != n)
    throw std::invalid_argument("generator dimensions disagree");
}

void check_finite(const Eigen::MatrixXcd& m, const char* what) {
  if (!m.allFinite())
    throw std::runtime_error(std::string("non-finite entries in ") + what);
}

}  // namespace

void validate(const ControlPulse& pulse) {
  if (pulse.amplitudes.empty())
    throw std::invalid_argument("pulse needs at least one slot");
  if (!(pulse.duration > 0.0) || !std::isfinite(pulse.duration))
    throw std::invalid_argument("pulse duration must be positive and finite");
  for (double a : pulse.amplitudes)
    if (!std::isfinite(a))
      throw std::invalid_argument("pulse amplitudes must be finite");
}

SlotBundle slot_bundle(const Generators& gen, double amplitude, double dt) {
  check_generators(gen);
  if (!std::isfinite(amplitude) || !std::isfinite(dt) || dt < 0.0)
    throw std::invalid_argument("slot amplitude/duration out of range");

  const int n = static_cast<int>(gen.drift.rows());
  SlotBundle out;
  if (dt == 0.0) {
    out.propagator = Eigen::MatrixXcd::Identity(n, n);
    out.target_deriv = Eigen::MatrixXcd::Zero(n, n);
    out.control_deriv = Eigen::MatrixXcd::Zero(n, n);
    out.mixed_deriv = Eigen::MatrixXcd::Zero(n, n);
    return out;
  }

  const Eigen::MatrixXcd h = gen.drift + amplitude * gen.control;

  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(4 * n, 4 * n);
  for (int d = 0; d < 4; ++d) block.block(d * n, d * n, n, n) = h;
  block.block(n, 0, n, n) = gen.target_deriv;
  block.block(2 * n, 0, n, n) = gen.control;
  block.block(3 * n, n, n, n) = gen.control;
  block.block(3 * n, 2 * n, n, n) = gen.target_deriv;

  const Eigen::MatrixXcd scaled = kMinusI * dt * block;
  const Eigen::MatrixXcd expm = scaled.exp();
  check_finite(expm, "slot propagator");

  // The -i dt prefactor scales the generator insertions along with H, so
  // the off-diagonal blocks of the exponential are the parameter
  // derivatives themselves (first block column: U, dU/dtarget,
  // dU/damplitude, mixed second derivative).
  out.propagator = expm.block(0, 0, n, n);
  out.target_deriv = expm.block(n, 0, n, n);
  out.control_deriv = expm.block(2 * n, 0, n, n);
  out.mixed_deriv = expm.block(3 * n, 0, n, n);
  return out;
}

SlotValue slot_value(const Generators& gen, double amplitude, double dt) {
  check_generators(gen);
  if (!std::isfinite(amplitude) || !std::isfinite(dt) || dt < 0.0)
    throw std::invalid_argument("slot amplitude/duration out of range");

  const int n = static_cast<int>(gen.drift.rows());
  SlotValue out;
  if (dt == 0.0) {
    out.propagator = Eigen::MatrixXcd::Identity(n, n);
    out.target_deriv = Eigen::MatrixXcd::Zero(n, n);
    return out;
  }

  const Eigen::MatrixXcd h = gen.drift + amplitude * gen.control;
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  block.block(0, 0, n, n) = h;
  block.block(n, n, n, n) = h;
  block.block(n, 0, n, n) = gen.target_deriv;

  const Eigen::MatrixXcd scaled = kMinusI * dt * block;
  const Eigen::MatrixXcd expm = scaled.exp();
  check_finite(expm, "slot propagator");

  out.propagator = expm.block(0, 0, n, n);
  out.target_deriv = expm.block(n, 0, n, n);
  return out;
}

namespace {

// Bundles for the distinct amplitudes of a pulse.  Keyed by exact value:
// optimizer iterates rarely repeat amplitudes, but constant and staged
// pulses collapse to a handful of exponentials.
template <typename Bundle, typename Fn>
std::pair<std::vector<Bundle>, std::vector<int>> unique_bundles(
    const ControlPulse& pulse, Exec exec, Fn&& make) {
  const int m = pulse.slots();
  std::vector<double> uniq;
  std::vector<int> slot_of(m);
  for (int i = 0; i < m; ++i) {
    int found = -1;
    for (int k = 0; k < static_cast<int>(uniq.size()); ++k)
      if (uniq[k] == pulse.amplitudes[i]) {
        found = k;
        break;
      }
    if (found < 0) {
      uniq.push_back(pulse.amplitudes[i]);
      found = static_cast<int>(uniq.size()) - 1;
    }
    slot_of[i] = found;
  }

  std::vector<Bundle> bundles(uniq.size());
  const int nu = static_cast<int>(uniq.size());
#pragma omp parallel for schedule(dynamic) if (omp_active(exec))
  for (int k = 0; k < nu; ++k) bundles[k] = make(uniq[k]);
  return {std::move(bundles), std::move(slot_of)};
}

}  // namespace

PulseBundle compose_pulse(const Generators& gen, const ControlPulse& pulse,
                          bool with_slot_derivs, Exec exec) {
  check_generators(gen);
  validate(pulse);

  const int n = static_cast<int>(gen.drift.rows());
  const int m = pulse.slots();
  const double dt = pulse.slot_dt();

  auto [bundles, slot_of] = unique_bundles<SlotBundle>(
      pulse, exec, [&](double a) { return slot_bundle(gen, a, dt); });

  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(n, n);

  // prefix[i] = U_i ... U_1 and its target derivative by the product rule;
  // suffix mirrors from the other end.
  std::vector<Eigen::MatrixXcd> prefix(m + 1), dprefix(m + 1);
  prefix[0] = eye;
  dprefix[0] = zero;
  for (int i = 1; i <= m; ++i) {
    const SlotBundle& b = bundles[slot_of[i - 1]];
    prefix[i] = b.propagator * prefix[i - 1];
    dprefix[i] = b.target_deriv * prefix[i - 1] + b.propagator * dprefix[i - 1];
  }

  PulseBundle out;
  out.propagator = prefix[m];
  out.target_deriv = dprefix[m];

  if (!with_slot_derivs) return out;

  std::vector<Eigen::MatrixXcd> suffix(m + 2), dsuffix(m + 2);
  suffix[m + 1] = eye;
  dsuffix[m + 1] = zero;
  for (int i = m; i >= 1; --i) {
    const SlotBundle& b = bundles[slot_of[i - 1]];
    suffix[i] = suffix[i + 1] * b.propagator;
    dsuffix[i] = dsuffix[i + 1] * b.propagator + suffix[i + 1] * b.target_deriv;
  }

  out.control_derivs.resize(m);
  out.mixed_derivs.resize(m);
  // Product rule across the chain: the mixed derivative picks up one term
  // with both hits in slot i and two where the target hit lands in the
  // prefix or suffix.
  for (int i = 1; i <= m; ++i) {
    const SlotBundle& b = bundles[slot_of[i - 1]];
    out.control_derivs[i - 1] = suffix[i + 1] * b.control_deriv * prefix[i - 1];
    out.mixed_derivs[i - 1] = suffix[i + 1] * b.mixed_deriv * prefix[i - 1] +
                              dsuffix[i + 1] * b.control_deriv * prefix[i - 1] +
                              suffix[i + 1] * b.control_deriv * dprefix[i - 1];
  }
  return out;
}

namespace {

void check_normalized(const Eigen::VectorXcd& psi0, Eigen::Index n) {
  if (psi0.size() != n)
    throw std::invalid_argument("initial state has wrong dimension");
  if (std::abs(psi0.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("initial state must be normalized");
}

}  // namespace

EvolvedState evolve_state(const PulseBundle& bundle, const Eigen::VectorXcd& psi0) {
  check_normalized(psi0, bundle.propagator.rows());

  EvolvedState out;
  out.psi = bundle.propagator * psi0;
  out.target_deriv = bundle.target_deriv * psi0;
  out.control_derivs.reserve(bundle.control_derivs.size());
  out.mixed_derivs.reserve(bundle.mixed_derivs.size());
  for (const auto& d : bundle.control_derivs) out.control_derivs.push_back(d * psi0);
  for (const auto& d : bundle.mixed_derivs) out.mixed_derivs.push_back(d * psi0);
  return out;
}

ValueState evolve_value(const Generators& gen, const ControlPulse& pulse,
                        const Eigen::VectorXcd& psi0, Exec exec) {
  check_generators(gen);
  validate(pulse);
  check_normalized(psi0, gen.drift.rows());

  const double dt = pulse.slot_dt();
  auto [bundles, slot_of] = unique_bundles<SlotValue>(
      pulse, exec, [&](double a) { return slot_value(gen, a, dt); });

  ValueState s{psi0, Eigen::VectorXcd::Zero(psi0.size())};
  for (int i = 0; i < pulse.slots(); ++i) {
    const SlotValue& b = bundles[slot_of[i]];
    Eigen::VectorXcd next = b.propagator * s.psi;
    s.target_deriv = (b.propagator * s.target_deriv + b.target_deriv * s.psi).eval();
    s.psi = std::move(next);
  }
  return s;
}

}  // namespace spinprobe
