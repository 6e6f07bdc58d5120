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

#include "spinprobe/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "spinprobe/rng.hpp"

namespace spinprobe {

SldMeasurement sld_measurement(const Eigen::Vector3d& u, const Eigen::Vector3d& du) {
  const QfiValue qv = qfi(u, du);  // also validates |u| <= 1 and guards the ratio

  SldMeasurement m;
  m.alpha = -qv.overlap_ratio;
  m.v = du + qv.overlap_ratio * u;

  const double vn = m.v.norm();
  if (vn < 1e-12)
    throw DegenerateMeasurement("measurement direction collapsed (|v| < 1e-12)");

  // Zero-mean identity tr[rho L] = alpha + u.v = 0; exact whenever the
  // purity guard did not fire.
  const double gap = 1.0 - u.squaredNorm();
  if (gap >= kPureStateFloor &&
      std::abs(m.alpha + u.dot(m.v)) > 1e-9 * std::max(1.0, vn))
    throw std::runtime_error("SLD zero-mean identity violated");

  m.axis = m.v / vn;
  m.outcome_plus = m.alpha + vn;
  m.outcome_minus = m.alpha - vn;
  return m;
}

std::pair<double, double> outcome_probabilities(const Eigen::Vector3d& u_true,
                                                const SldMeasurement& m) {
  if (u_true.squaredNorm() > 1.0 + 1e-9)
    throw std::runtime_error("true Bloch vector left the unit ball");
  const double along = std::clamp(u_true.dot(m.axis), -1.0, 1.0);
  const double p_plus = 0.5 * (1.0 + along);
  return {p_plus, 1.0 - p_plus};
}

long long sample_plus_count(double p_plus, long long shots, std::mt19937_64& rng) {
  if (shots < 0) throw std::invalid_argument("negative shot count");
  if (!(p_plus >= 0.0 && p_plus <= 1.0))
    throw std::invalid_argument("probability out of range");
  if (shots == 0 || p_plus == 0.0) return 0;
  if (p_plus == 1.0) return shots;
  std::binomial_distribution<long long> dist(shots, p_plus);
  return dist(rng);
}

double update_estimate(double guess, const SldMeasurement& m, long long plus_count,
                       long long shots, double qfi_value) {
  if (shots <= 0) throw std::invalid_argument("need at least one shot");
  if (plus_count < 0 || plus_count > shots)
    throw std::invalid_argument("plus count out of range");
  if (!(qfi_value > 0.0) || !std::isfinite(qfi_value))
    throw std::runtime_error("update needs positive information");

  const double f_plus = static_cast<double>(plus_count) / shots;
  const double mean = m.outcome_plus * f_plus + m.outcome_minus * (1.0 - f_plus);
  return guess + mean / qfi_value;
}

namespace {

void check_protocol_config(const ProtocolConfig& config) {
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon))
    throw std::invalid_argument("epsilon must be positive and finite");
  if (config.max_rounds < 1) throw std::invalid_argument("need at least one round");
  if (config.folds < 2) throw std::invalid_argument("need at least two folds");
  if (config.warm_restarts < 1)
    throw std::invalid_argument("need at least one warm restart");
  if (config.degenerate_retries < 0)
    throw std::invalid_argument("negative retry count");
}

struct RoundModel {
  ControlPulse pulse;
  Eigen::VectorXcd psi0;
  double qfi = 0.0;
  Eigen::Vector3d u = Eigen::Vector3d::Zero();
  Eigen::Vector3d du = Eigen::Vector3d::Zero();
};

}  // namespace

EstimationTrace run_protocol(const ChainSpec& spec, double duration,
                             double true_field, double initial_guess,
                             bool use_control, const ProtocolConfig& config,
                             Exec exec) {
  validate(spec);
  check_protocol_config(config);
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("duration must be positive and finite");
  if (!std::isfinite(true_field) || !std::isfinite(initial_guess))
    throw std::invalid_argument("fields must be finite");

  EstimationTrace trace;
  std::mt19937_64 noise = make_stream(config.seed, 0);
  const Eigen::VectorXcd psi_controlled = probe_excitation(spec);

  double current = initial_guess;
  std::optional<ControlPulse> warm;

  for (int round = 0; round < config.max_rounds; ++round) {
    // Model at the guess; a collapsed measurement direction aborts the
    // attempt and retries with a re-randomized drive.
    RoundModel model;
    SldMeasurement meas;
    bool have_measurement = false;
    for (int attempt = 0; attempt <= config.degenerate_retries; ++attempt) {
      if (use_control) {
        OptimizerConfig oc = config.optimizer;
        oc.rng_seed = mix_seed(config.seed,
                               0x10000ULL + 64ULL * round + attempt);
        const bool reuse = warm.has_value() && attempt == 0;
        if (round > 0 && attempt == 0) oc.restarts = config.warm_restarts;
        const OptimizationResult res =
            maximize_qfi(spec, duration, current, psi_controlled, oc, exec,
                         reuse ? &*warm : nullptr);
        if (res.best_restart < 0) {
          warm.reset();
          continue;
        }
        model.pulse = res.best_pulse;
        model.psi0 = psi_controlled;
      } else {
        const UncontrolledOptimum unc =
            optimize_uncontrolled_state(spec, duration, current, exec);
        model.pulse = ControlPulse{duration, {0.0}};
        model.psi0 = probe_superposition(spec, unc.theta, unc.phi);
      }

      const QfiResult at_guess =
          qfi_of_pulse(spec, model.pulse, current, model.psi0, false, exec);
      model.qfi = at_guess.value.value;
      model.u = at_guess.surface.u;
      model.du = at_guess.surface.du;

      try {
        meas = sld_measurement(model.u, model.du);
        have_measurement = true;
        break;
      } catch (const DegenerateMeasurement&) {
        warm.reset();
        if (!use_control) break;  // deterministic baseline: retry is futile
      }
    }
    if (!have_measurement) {
      trace.failed = true;
      trace.failure = "degenerate measurement at guess " + std::to_string(current);
      break;
    }
    if (!(model.qfi > 0.0) || !std::isfinite(model.qfi)) {
      trace.failed = true;
      trace.failure = "non-positive information at guess " + std::to_string(current);
      break;
    }

    const double shots_needed =
        std::ceil(1.0 / (config.epsilon * config.epsilon * model.qfi));
    if (!(shots_needed < 9e15)) {
      trace.failed = true;
      trace.failure = "shot budget overflow";
      break;
    }
    const long long shots = static_cast<long long>(shots_needed);

    // Probabilities come from the true field, the observable from the guess.
    const QfiResult at_true =
        qfi_of_pulse(spec, model.pulse, true_field, model.psi0, false, exec);
    const auto [p_plus, p_minus] = outcome_probabilities(at_true.surface.u, meas);
    (void)p_minus;

    // Shots are drawn fold by fold; the fold spread powers the early stop.
    const int folds = static_cast<int>(std::min<long long>(config.folds, shots));
    long long plus_total = 0;
    std::vector<double> fold_estimates;
    fold_estimates.reserve(folds);
    for (int fold = 0; fold < folds; ++fold) {
      const long long size = shots / folds + (fold < shots % folds ? 1 : 0);
      const long long k = sample_plus_count(p_plus, size, noise);
      plus_total += k;
      fold_estimates.push_back(update_estimate(current, meas, k, size, model.qfi));
    }
    double fold_stderr = std::numeric_limits<double>::infinity();
    if (folds >= 2) {
      double mean = 0.0;
      for (double e : fold_estimates) mean += e;
      mean /= folds;
      double var = 0.0;
      for (double e : fold_estimates) var += (e - mean) * (e - mean);
      var /= (folds - 1);
      fold_stderr = std::sqrt(var / folds);
    }

    const double next = update_estimate(current, meas, plus_total, shots, model.qfi);

    RoundRecord rec;
    rec.round = round;
    rec.guess = current;
    rec.qfi = model.qfi;
    rec.shots = shots;
    rec.plus_count = plus_total;
    rec.next_guess = next;
    rec.fold_stderr = fold_stderr;
    trace.rounds.push_back(rec);
    trace.total_shots += shots;

    const bool small_step = std::abs(next - current) < config.epsilon;
    const bool fold_stop = fold_stderr < 0.5 * config.epsilon;
    current = next;
    if (use_control) warm = model.pulse;
    if (small_step || fold_stop) {
      trace.converged = true;
      break;
    }
  }

  trace.final_estimate = current;
  return trace;
}

}  // namespace spinprobe
