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

// End-to-end acceptance suite.  Each criterion prints one PASS/FAIL line
// with the measured quantity and its pinned tolerance; the exit status is
// the number of failed criteria.  Reference values are recomputed from
// independent constructions (dense 2^N projection, finite differences,
// closed forms), never from the code path under test.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "spinprobe/chain_model.hpp"
#include "spinprobe/estimation.hpp"
#include "spinprobe/experiments.hpp"
#include "spinprobe/optimizer.hpp"
#include "spinprobe/propagator.hpp"
#include "spinprobe/qfi.hpp"
#include "spinprobe/rng.hpp"
#include "spinprobe/two_spin.hpp"

namespace {

using namespace spinprobe;
using clock_type = std::chrono::steady_clock;

std::string fmt(const char* pattern, ...) {
  va_list args;
  va_start(args, pattern);
  char buffer[512];
  std::vsnprintf(buffer, sizeof buffer, pattern, args);
  va_end(args);
  return std::string(buffer);
}

Eigen::MatrixXcd plain_exp(const Eigen::MatrixXcd& h, double dt) {
  const Eigen::MatrixXcd gen = std::complex<double>(0.0, -dt) * h;
  return gen.exp();
}

Eigen::VectorXcd random_state(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd psi(dim);
  for (int i = 0; i < dim; ++i) psi(i) = std::complex<double>(normal(rng), normal(rng));
  psi.normalize();
  return psi;
}

// 1. Sector restriction against the dense 2^N construction.
bool sector_vs_full(std::string& detail) {
  std::mt19937_64 rng = make_stream(9001, 0);
  std::uniform_real_distribution<double> field(-3.0, 3.0);
  double worst = 0.0;
  for (int n = 2; n <= 5; ++n) {
    const ChainSpec spec{n, 1.0};
    for (int rep = 0; rep < 20; ++rep) {
      const double c = field(rng);
      const double lam = field(rng);
      const Eigen::MatrixXcd sector = sector_hamiltonian(spec, c, lam);
      const Eigen::MatrixXcd projected =
          project_full_to_sector(spec, full_hamiltonian(spec, c, lam));
      worst = std::max(worst, (sector - projected).cwiseAbs().maxCoeff());
    }
  }
  detail = fmt("max entry gap %.3e (tol 1e-12), N=2..5, 20 draws each", worst);
  return worst < 1e-12;
}

// 2. Slot-bundle derivatives against central finite differences.
bool derivative_engine(std::string& detail) {
  std::mt19937_64 rng = make_stream(9002, 0);
  std::uniform_real_distribution<double> amp_draw(-2.0, 2.0);
  std::uniform_real_distribution<double> lam_draw(-1.0, 1.0);
  std::uniform_real_distribution<double> dt_draw(0.05, 0.5);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const ChainSpec spec{2 + rep % 4, 1.0};
    const double amp = amp_draw(rng);
    const double lam = lam_draw(rng);
    const double dt = dt_draw(rng);
    const SlotBundle bundle = slot_bundle(sector_generators(spec, lam), amp, dt);

    const auto u_at = [&](double c, double l) {
      return plain_exp(sector_hamiltonian(spec, c, l), dt);
    };
    const double h1 = 1e-5;
    const Eigen::MatrixXcd fd_target =
        (u_at(amp, lam + h1) - u_at(amp, lam - h1)) / (2.0 * h1);
    const Eigen::MatrixXcd fd_control =
        (u_at(amp + h1, lam) - u_at(amp - h1, lam)) / (2.0 * h1);
    // Nested central difference; the wider step keeps the 1/(4h^2) roundoff
    // amplification below the comparison tolerance.
    const double h2 = 1e-3;
    const Eigen::MatrixXcd fd_mixed =
        (u_at(amp + h2, lam + h2) - u_at(amp + h2, lam - h2) -
         u_at(amp - h2, lam + h2) + u_at(amp - h2, lam - h2)) /
        (4.0 * h2 * h2);

    const auto rel = [](const Eigen::MatrixXcd& got, const Eigen::MatrixXcd& ref) {
      return (got - ref).norm() / std::max(1e-12, ref.norm());
    };
    worst = std::max(worst, rel(bundle.target_deriv, fd_target));
    worst = std::max(worst, rel(bundle.control_deriv, fd_control));
    worst = std::max(worst, rel(bundle.mixed_deriv, fd_mixed));
  }
  detail = fmt("max relative gap %.3e (tol 1e-6), 50 random slots", worst);
  return worst <= 1e-6;
}

// 3. Analytic QFI gradient against finite differences of the value.
bool qfi_gradient_check(std::string& detail) {
  std::mt19937_64 rng = make_stream(9003, 0);
  std::uniform_real_distribution<double> amp_draw(-2.0, 2.0);
  std::uniform_real_distribution<double> lam_draw(-1.0, 1.0);
  std::uniform_real_distribution<double> t_draw(0.5, 4.0);
  std::uniform_int_distribution<int> m_draw(4, 20);
  double worst = 0.0;
  for (int rep = 0; rep < 30; ++rep) {
    const ChainSpec spec{2 + rep % 4, 1.0};
    const double lam = lam_draw(rng);
    ControlPulse pulse;
    pulse.duration = t_draw(rng);
    pulse.amplitudes.resize(m_draw(rng));
    for (double& a : pulse.amplitudes) a = amp_draw(rng);
    const Eigen::VectorXcd psi0 = random_state(spec.spins + 1, rng);

    const QfiResult res = qfi_of_pulse(spec, pulse, lam, psi0, true, Exec::serial);
    Eigen::VectorXd fd(pulse.slots());
    const double h = 1e-5;
    for (int i = 0; i < pulse.slots(); ++i) {
      ControlPulse up = pulse, dn = pulse;
      up.amplitudes[i] += h;
      dn.amplitudes[i] -= h;
      const double f_up =
          qfi_of_pulse(spec, up, lam, psi0, false, Exec::serial).value.value;
      const double f_dn =
          qfi_of_pulse(spec, dn, lam, psi0, false, Exec::serial).value.value;
      fd(i) = (f_up - f_dn) / (2.0 * h);
    }
    const Eigen::Map<const Eigen::VectorXd> grad(
        res.gradient.data(), static_cast<Eigen::Index>(res.gradient.size()));
    worst = std::max(worst, (grad - fd).norm() / std::max(1.0, fd.norm()));
  }
  detail = fmt("max relative gap %.3e (tol 1e-5), 30 random pulses", worst);
  return worst <= 1e-5;
}

// 4. QFI never exceeds 4 T^2.
bool bound_property(std::string& detail) {
  std::mt19937_64 rng = make_stream(9004, 0);
  std::uniform_real_distribution<double> amp_draw(-3.0, 3.0);
  std::uniform_real_distribution<double> lam_draw(-1.0, 1.0);
  std::uniform_real_distribution<double> t_draw(0.2, 8.0);
  std::uniform_int_distribution<int> m_draw(1, 16);
  double worst_ratio = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const ChainSpec spec{2 + rep % 4, 1.0};
    ControlPulse pulse;
    pulse.duration = t_draw(rng);
    pulse.amplitudes.resize(m_draw(rng));
    for (double& a : pulse.amplitudes) a = amp_draw(rng);
    const Eigen::VectorXcd psi0 = random_state(spec.spins + 1, rng);
    const double f =
        qfi_of_pulse(spec, pulse, lam_draw(rng), psi0, false, Exec::serial)
            .value.value;
    worst_ratio = std::max(worst_ratio, f / qfi_bound(pulse.duration));
  }
  detail = fmt("max F / 4T^2 = %.12f (tol 1 + 1e-9), 100 random pulses", worst_ratio);
  return worst_ratio <= 1.0 + 1e-9;
}

// 5. Three-step two-spin drive against the closed form 4 (T - (pi/2-1)/J)^2.
// The drive is built at guess 0 and evaluated at a generic operating field:
// exactly at the guess the ideal protocol sits on a population zero, where
// any leftover discretization residual depresses the Fisher information (the
// informational at-guess figures below show the dip); away from the guess the
// closed form is recovered tightly.
bool three_step_oracle(std::string& detail) {
  const ChainSpec spec{2, 1.0};
  const double field = 0.05;
  bool ok = true;
  std::string parts;
  for (double t : {5.0, 10.0}) {
    const double closed = three_step_qfi(t, 1.0);
    const ThreeStepPulse drive = three_step_pulse(t, 0.0, 1.0, 200.0, 10000);
    const double f = qfi_of_pulse(spec, drive.pulse, field, probe_excitation(spec),
                                  false, Exec::serial)
                         .value.value;
    const double at_guess =
        qfi_of_pulse(spec, drive.pulse, 0.0, probe_excitation(spec), false,
                     Exec::serial)
            .value.value;
    const double gap = std::abs(f - closed) / closed;
    ok = ok && gap < 0.02;
    parts += fmt("T=%g: gap %.4f%% (at-guess dip %.2f%%)  ", t, 100.0 * gap,
                 100.0 * (at_guess / closed - 1.0));
  }
  detail = parts + "(tol 2%, c_strong=200J, m=10^4, eval field 0.05J)";
  return ok;
}

// 6. Uncontrolled two-spin optimum against the asymptotic branch rates.  The
// optimized rate oscillates with the exchange revivals (cos^2(J T) at zero
// field to leading order), so the branch laws are the revival-peak envelope;
// the check takes the peak rate over one revival window around T = 50.
bool uncontrolled_oracle(std::string& detail) {
  const ChainSpec spec{2, 1.0};
  bool ok = true;
  std::string parts;
  for (double lam : {0.0, 0.3, 0.9}) {
    const double branch = uncontrolled_asymptotic_qfi(lam, 1.0, 1.0);
    double peak = 0.0;
    for (int i = 0; i <= 240; ++i) {
      const double t = 44.0 + 0.05 * i;
      const UncontrolledOptimum u =
          optimize_uncontrolled_state(spec, t, lam, Exec::serial);
      peak = std::max(peak, u.qfi / (t * t));
    }
    const double at50 =
        optimize_uncontrolled_state(spec, 50.0, lam, Exec::serial).qfi / 2500.0;
    const double gap = std::abs(peak - branch) / branch;
    ok = ok && gap < 0.05;
    parts += fmt("lam=%.1f: peak rate %.5f vs %.5f, gap %.3f%% (T=50 point %.3f)  ",
                 lam, peak, branch, 100.0 * gap, at50);
  }
  detail = parts + "(tol 5%, peak over T in [44,56])";
  return ok;
}

// 7. Optimized rate for the five-spin chain at T = 20.
bool five_spin_rate(std::string& detail) {
  const ChainSpec spec{5, 1.0};
  OptimizerConfig config;
  config.slots = 20;
  config.restarts = 20;
  config.max_iterations = 500;
  config.rng_seed = 77001;
  const OptimizationResult res =
      maximize_qfi(spec, 20.0, 0.0, probe_excitation(spec), config, Exec::parallel);
  const double rate = res.best_qfi / (20.0 * 20.0);
  double spread_lo = 1e300, spread_hi = 0.0;
  for (const RestartOutcome& r : res.restarts) {
    if (r.failed) continue;
    spread_lo = std::min(spread_lo, r.qfi / 400.0);
    spread_hi = std::max(spread_hi, r.qfi / 400.0);
  }
  detail = fmt("best F/T^2 = %.4f (floor 0.5), restart spread [%.4f, %.4f]",
               rate, spread_lo, spread_hi);
  return res.best_restart >= 0 && rate >= 0.5;
}

// 8. Mean measurement budget: control must beat the uncontrolled baseline.
bool control_advantage(std::string& detail) {
  ExperimentSettings settings;
  settings.spec = ChainSpec{5, 1.0};
  settings.duration = 13.5;
  settings.true_field = 0.0;
  settings.initial_guess = 0.1;
  settings.runs = 100;
  settings.seed = 8101;
  settings.protocol.epsilon = 0.01;
  settings.protocol.optimizer.slots = 12;
  settings.protocol.optimizer.restarts = 6;
  settings.protocol.optimizer.max_iterations = 200;
  settings.protocol.warm_restarts = 2;

  settings.use_control = true;
  const ExperimentResult ctrl = run_estimation_experiment(settings, Exec::parallel);
  settings.use_control = false;
  const ExperimentResult unc = run_estimation_experiment(settings, Exec::parallel);

  detail = fmt(
      "mean shots %.1f (ctrl) vs %.1f (unc), stddev %.1f vs %.1f, "
      "failures %d/%d, 100 runs per arm",
      ctrl.mean_shots, unc.mean_shots, ctrl.stddev_shots, unc.stddev_shots,
      ctrl.failed_count, unc.failed_count);
  return ctrl.failed_count == 0 && unc.failed_count == 0 &&
         ctrl.mean_shots < unc.mean_shots;
}

// 9. Five-spin uncontrolled optimum is not below the published preparation.
bool uncontrolled_checkpoint(std::string& detail) {
  const ChainSpec spec{5, 1.0};
  const UncontrolledOptimum opt =
      optimize_uncontrolled_state(spec, 13.5, 0.0, Exec::parallel);
  const double reference = uncontrolled_qfi_at(spec, 13.5, 0.0, 1.57153, 2.41026);
  detail = fmt("optimum %.8f vs checkpoint %.8f, margin %+.3e (floor -1e-6)",
               opt.qfi, reference, opt.qfi - reference);
  return opt.qfi >= reference - 1e-6;
}

// 10. SLD trace identities and norm conservation along population traces.
bool identity_suite(std::string& detail) {
  std::mt19937_64 rng = make_stream(9010, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.0, 0.97);
  std::uniform_real_distribution<double> comp(-2.0, 2.0);
  double worst_mean = 0.0, worst_second = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::Vector3d u(normal(rng), normal(rng), normal(rng));
    u = radius(rng) * u.normalized();
    const Eigen::Vector3d du(comp(rng), comp(rng), comp(rng));
    const double f = qfi(u, du).value;
    const SldMeasurement m = sld_measurement(u, du);
    // tr[rho L] = alpha + u.v, tr[rho L^2] = alpha^2 + 2 alpha u.v + |v|^2.
    const double mean = m.alpha + u.dot(m.v);
    const double second =
        m.alpha * m.alpha + 2.0 * m.alpha * u.dot(m.v) + m.v.squaredNorm();
    worst_mean = std::max(worst_mean, std::abs(mean));
    worst_second = std::max(worst_second, std::abs(second - f) / std::max(1.0, f));
  }

  double worst_norm = 0.0;
  for (int n : {3, 5}) {
    TraceSettings settings;
    settings.spec = ChainSpec{n, 1.0};
    settings.pulse.duration = 4.0;
    settings.pulse.amplitudes.resize(8);
    for (double& a : settings.pulse.amplitudes) a = comp(rng);
    settings.psi0 = random_state(n + 1, rng);
    settings.target_field = 0.3;
    settings.samples_per_slot = 10;
    const PopulationTrace trace = run_population_trace(settings);
    for (const auto& row : trace.populations) {
      double total = 0.0;
      for (double p : row) total += p;
      worst_norm = std::max(worst_norm, std::abs(total - 1.0));
    }
  }
  detail = fmt(
      "max |tr[rho L]| %.3e, max |tr[rho L^2] - F| %.3e, max norm drift %.3e "
      "(tol 1e-9 each)",
      worst_mean, worst_second, worst_norm);
  return worst_mean <= 1e-9 && worst_second <= 1e-9 && worst_norm <= 1e-9;
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"sector-vs-full", sector_vs_full},
      {"derivative-engine", derivative_engine},
      {"qfi-gradient", qfi_gradient_check},
      {"bound-property", bound_property},
      {"three-step-oracle", three_step_oracle},
      {"uncontrolled-oracle", uncontrolled_oracle},
      {"five-spin-rate", five_spin_rate},
      {"control-advantage", control_advantage},
      {"uncontrolled-checkpoint", uncontrolled_checkpoint},
      {"identity-suite", identity_suite},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = clock_type::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = fmt("exception: %s", e.what());
    }
    const double seconds =
        std::chrono::duration<double>(clock_type::now() - start).count();
    std::printf("[%2zu/10] %s  %6.1fs  %s: %s\n", i + 1, ok ? "PASS" : "FAIL",
                seconds, criteria[i].label, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  std::printf("acceptance: %zu/10 passed\n", criteria.size() - failures);
  return failures;
}
