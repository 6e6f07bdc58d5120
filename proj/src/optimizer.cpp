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

#include "spinprobe/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinprobe/rng.hpp"

namespace spinprobe {

namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kMaxBacktracks = 40;

struct Objective {
  const Generators& gen;
  double duration;
  const Eigen::VectorXcd& psi0;
  Exec exec;

  ControlPulse pulse_of(const Eigen::VectorXd& c) const {
    return {duration, std::vector<double>(c.data(), c.data() + c.size())};
  }

  double value(const Eigen::VectorXd& c) const {
    const ValueState s = evolve_value(gen, pulse_of(c), psi0, exec);
    return qfi(bloch_vector(s.psi), bloch_derivative(s.target_deriv, s.psi)).value;
  }

  double value_and_grad(const Eigen::VectorXd& c, Eigen::VectorXd& grad) const {
    const PulseBundle bundle = compose_pulse(gen, pulse_of(c), true, exec);
    const EvolvedState state = evolve_state(bundle, psi0);
    const BlochSurface surface = bloch_surface(state);
    const std::vector<double> g = qfi_gradient(surface);
    grad = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
    return qfi(surface.u, surface.du).value;
  }
};

Eigen::VectorXd clamp_box(const Eigen::VectorXd& c, double bound) {
  if (bound <= 0.0) return c;
  return c.cwiseMax(-bound).cwiseMin(bound);
}

// Two-loop recursion for the quasi-Newton ascent direction.  History pairs
// are (step, gradient difference); maximization flips the usual signs, so
// the curvature condition is step . dgrad < 0.
Eigen::VectorXd ascent_direction(
    const std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& history,
    const Eigen::VectorXd& grad) {
  if (history.empty()) return grad;

  Eigen::VectorXd q = grad;
  std::vector<double> alpha(history.size());
  for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
    const auto& [s, y] = history[i];
    const double rho = -1.0 / s.dot(y);
    alpha[i] = rho * s.dot(q);
    q += alpha[i] * y;
  }
  const auto& [sn, yn] = history.back();
  q *= -sn.dot(yn) / yn.squaredNorm();
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& [s, y] = history[i];
    const double rho = -1.0 / s.dot(y);
    const double beta = rho * y.dot(q);
    q += (alpha[i] + beta) * s;
  }
  return q;
}

struct AscentResult {
  Eigen::VectorXd amplitudes;
  RestartOutcome outcome;
};

AscentResult ascend(const Objective& obj, Eigen::VectorXd c,
                    const OptimizerConfig& config) {
  AscentResult res;
  res.amplitudes = clamp_box(c, config.amplitude_bound);
  c = res.amplitudes;

  Eigen::VectorXd grad;
  double f;
  try {
    f = obj.value_and_grad(c, grad);
  } catch (const std::runtime_error&) {
    res.outcome.failed = true;
    return res;
  }
  if (!std::isfinite(f) || !grad.allFinite()) {
    res.outcome.failed = true;
    return res;
  }

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;

  int iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    if (grad.norm() <= config.gradient_tolerance * std::max(1.0, f)) {
      res.outcome.converged = true;
      break;
    }

    Eigen::VectorXd dir = ascent_direction(history, grad);
    if (!dir.allFinite() || dir.dot(grad) <= 1e-12 * dir.norm() * grad.norm()) {
      history.clear();
      dir = grad;
    }

    // Backtracking line search; accepted steps never decrease F.
    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd c_new;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, step *= kBacktrack) {
      c_new = clamp_box(c + step * dir, config.amplitude_bound);
      const double predicted = grad.dot(c_new - c);
      if (predicted <= 0.0) continue;  // projection swallowed the step
      double trial;
      try {
        trial = obj.value(c_new);
      } catch (const std::runtime_error&) {
        continue;
      }
      if (!std::isfinite(trial)) continue;
      if (trial >= f + kArmijoSlope * predicted) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // stalled: no ascent step left at this scale

    Eigen::VectorXd grad_new;
    double f_check;
    try {
      f_check = obj.value_and_grad(c_new, grad_new);
    } catch (const std::runtime_error&) {
      res.outcome.failed = true;
      return res;
    }
    if (!std::isfinite(f_check) || !grad_new.allFinite()) {
      res.outcome.failed = true;
      return res;
    }

    const Eigen::VectorXd s = c_new - c;
    const Eigen::VectorXd y = grad_new - grad;
    if (s.dot(y) < -1e-12 * s.norm() * y.norm())
      history.emplace_back(s, y);
    while (static_cast<int>(history.size()) > config.lbfgs_memory)
      history.pop_front();

    c = std::move(c_new);
    f = f_check;
    grad = std::move(grad_new);
  }

  if (iter == config.max_iterations &&
      grad.norm() <= config.gradient_tolerance * std::max(1.0, f))
    res.outcome.converged = true;

  res.amplitudes = c;
  res.outcome.qfi = f;
  res.outcome.iterations = iter;
  return res;
}

void check_config(const OptimizerConfig& config) {
  if (config.slots < 1) throw std::invalid_argument("need at least one slot");
  if (config.restarts < 1) throw std::invalid_argument("need at least one restart");
  if (config.max_iterations < 0)
    throw std::invalid_argument("negative iteration cap");
  if (!(config.gradient_tolerance > 0.0))
    throw std::invalid_argument("gradient tolerance must be positive");
  if (config.lbfgs_memory < 0) throw std::invalid_argument("negative history");
}

}  // namespace

OptimizationResult maximize_qfi(const ChainSpec& spec, double duration,
                                double target_guess, const Eigen::VectorXcd& psi0,
                                const OptimizerConfig& config, Exec exec,
                                const ControlPulse* warm_start) {
  validate(spec);
  check_config(config);
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("duration must be positive and finite");
  if (warm_start && warm_start->slots() != config.slots)
    throw std::invalid_argument("warm start slot count disagrees with config");

  const Generators gen = sector_generators(spec, target_guess);
  if (psi0.size() != gen.drift.rows())
    throw std::invalid_argument("initial state has wrong dimension");

  const double init_half_width =
      config.init_amplitude > 0.0 ? config.init_amplitude : spec.coupling;
  const int m = config.slots;
  const int r = config.restarts;

  std::vector<AscentResult> results(r);
#pragma omp parallel for schedule(dynamic) if (omp_active(exec))
  for (int k = 0; k < r; ++k) {
    const Objective obj{gen, duration, psi0, exec};
    Eigen::VectorXd c0(m);
    if (k == 0 && warm_start) {
      c0 = Eigen::Map<const Eigen::VectorXd>(warm_start->amplitudes.data(), m);
    } else {
      std::mt19937_64 rng = make_stream(config.rng_seed, k);
      std::uniform_real_distribution<double> dist(-init_half_width,
                                                  init_half_width);
      for (int i = 0; i < m; ++i) c0(i) = dist(rng);
    }
    results[k] = ascend(obj, std::move(c0), config);
  }

  OptimizationResult out;
  out.best_qfi = -std::numeric_limits<double>::infinity();
  out.restarts.reserve(r);
  for (int k = 0; k < r; ++k) {
    out.restarts.push_back(results[k].outcome);
    if (results[k].outcome.failed) continue;
    if (results[k].outcome.qfi > out.best_qfi) {  // ties keep the lower index
      out.best_qfi = results[k].outcome.qfi;
      out.best_restart = k;
    }
  }
  if (out.best_restart < 0) {
    out.best_qfi = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  const Eigen::VectorXd& best = results[out.best_restart].amplitudes;
  out.best_pulse.duration = duration;
  out.best_pulse.amplitudes.assign(best.data(), best.data() + best.size());
  return out;
}

namespace {

struct UncontrolledEvaluator {
  Eigen::MatrixXcd u_cols;   // propagator columns 0 and 1
  Eigen::MatrixXcd du_cols;  // target-derivative columns 0 and 1

  double operator()(double theta, double phi) const {
    const std::complex<double> a0(std::cos(0.5 * theta), 0.0);
    const std::complex<double> a1 = std::polar(std::sin(0.5 * theta), phi);
    const Eigen::VectorXcd psi = u_cols.col(0) * a0 + u_cols.col(1) * a1;
    const Eigen::VectorXcd dpsi = du_cols.col(0) * a0 + du_cols.col(1) * a1;
    return qfi(bloch_vector(psi), bloch_derivative(dpsi, psi)).value;
  }
};

UncontrolledEvaluator uncontrolled_evaluator(const ChainSpec& spec,
                                             double duration,
                                             double target_guess) {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("duration must be positive and finite");
  const Generators gen = sector_generators(spec, target_guess);
  const SlotValue sv = slot_value(gen, 0.0, duration);
  UncontrolledEvaluator ev;
  ev.u_cols = sv.propagator.leftCols(2);
  ev.du_cols = sv.target_deriv.leftCols(2);
  return ev;
}

}  // namespace

UncontrolledOptimum optimize_uncontrolled_state(const ChainSpec& spec,
                                                double duration,
                                                double target_guess, Exec exec) {
  const UncontrolledEvaluator ev = uncontrolled_evaluator(spec, duration,
                                                          target_guess);

  // Coarse pi/60 scan of the preparation sphere.
  const double step = M_PI / 60.0;
  const int n_theta = 61;
  const int n_phi = 120;
  std::vector<double> values(n_theta * n_phi);
#pragma omp parallel for schedule(static) if (omp_active(exec))
  for (int idx = 0; idx < n_theta * n_phi; ++idx) {
    const int it = idx / n_phi;
    const int ip = idx % n_phi;
    values[idx] = ev(it * step, ip * step);
  }
  int best_idx = 0;
  for (int idx = 1; idx < n_theta * n_phi; ++idx)
    if (values[idx] > values[best_idx]) best_idx = idx;

  double theta = (best_idx / n_phi) * step;
  double phi = (best_idx % n_phi) * step;
  double best = values[best_idx];

  // Nested 9x9 refinements around the best cell.
  double half = step;
  for (int level = 0; level < 8; ++level) {
    double lt = theta, lp = phi, lb = best;
    for (int it = -4; it <= 4; ++it) {
      const double t = std::clamp(theta + it * half / 4.0, 0.0, M_PI);
      for (int ip = -4; ip <= 4; ++ip) {
        const double p = phi + ip * half / 4.0;
        const double v = ev(t, p);
        if (v > lb) {
          lb = v;
          lt = t;
          lp = p;
        }
      }
    }
    theta = lt;
    phi = lp;
    best = lb;
    half *= 0.25;
  }

  UncontrolledOptimum out;
  out.theta = theta;
  out.phi = std::fmod(std::fmod(phi, 2.0 * M_PI) + 2.0 * M_PI, 2.0 * M_PI);
  out.qfi = best;
  return out;
}

double uncontrolled_qfi_at(const ChainSpec& spec, double duration,
                           double target_guess, double theta, double phi) {
  return uncontrolled_evaluator(spec, duration, target_guess)(theta, phi);
}

}  // namespace spinprobe
