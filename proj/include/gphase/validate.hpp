#pragma once

// Cross-validation suite: every closed form against its independent solver,
// the analytic limit checks, and the positivity scans.  Used by the CLI
// `validate` subcommand.

#include "gphase/oracle.hpp"
#include "gphase/phase.hpp"
#include "gphase/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace gphase {

struct ValidationTolerances {
  Real markovian_dev = 1e-8;
  Real correlated_dev = 1e-8;
  Real memory_dev = 1e-6;
  Real volterra_dev = 1e-4;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  bool informational = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const {
    for (const CheckResult& c : checks) {
      if (!c.informational && !c.passed) return false;
    }
    return true;
  }
};

namespace detail {

inline std::string sci(Real v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

inline std::vector<Real> theta_grid_19() {
  std::vector<Real> grid;
  for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * static_cast<Real>(k) * kPi);
  return grid;
}

// Closed-form trajectory on the oracle's grid, mapped to the same picture.
inline Deviation closed_vs_oracle(const ModelParams& model, const BlochState& init,
                                  const Trajectory& oracle_interaction) {
  const Trajectory numeric = to_schroedinger(oracle_interaction, model.omega);
  Trajectory analytic;
  analytic.picture = Picture::Schroedinger;
  analytic.times = numeric.times;
  analytic.states.reserve(numeric.size());
  for (const Real t : numeric.times) analytic.states.push_back(evolve(model, init, t));
  return compare(analytic, numeric);
}

}  // namespace detail

/// Runs the full cross-validation battery.  Heavier checks reuse the figure
/// parameter grids; everything finishes at desk scale.
inline ValidationReport run_validation(const ValidationTolerances& tol = {}) {
  ValidationReport report;
  const std::vector<Real> thetas = detail::theta_grid_19();
  const Real period = 2.0 * kPi;  // omega = 1 throughout the figure sets

  // Markovian closed form vs RK4.
  {
    Real worst = 0.0;
    for (const Real g2 : kFigureRates) {
      for (const Real theta : thetas) {
        const BlochState init(theta, 0.0);
        SolverConfig cfg{1e-4, 3.0 * period, SolverMethod::RK4};
        const Deviation dev = detail::closed_vs_oracle(markovian(g2), init,
                                                       solve_markovian(g2, init, cfg));
        worst = std::max(worst, dev.max_abs);
      }
    }
    report.checks.push_back({"markovian closed form vs rk4 (gamma2 in {0.1,1})",
                             worst < tol.markovian_dev, false,
                             "max deviation " + detail::sci(worst)});
  }

  // Correlated-projection closed form vs coupled RK4.
  {
    Real worst = 0.0;
    for (const Real g : kFigureRates) {
      for (const Real theta : thetas) {
        const BlochState init(theta, 0.0);
        SolverConfig cfg{1e-4, 3.0 * period, SolverMethod::RK4};
        const Deviation dev = detail::closed_vs_oracle(correlated(g), init,
                                                       solve_correlated(g, g, init, cfg));
        worst = std::max(worst, dev.max_abs);
      }
    }
    report.checks.push_back({"correlated closed form vs coupled rk4 (gamma in {0.1,1})",
                             worst < tol.correlated_dev, false,
                             "max deviation " + detail::sci(worst)});
  }

  // RK4 order check: coarse step, halving must shrink deviation >= 8x.
  {
    const BlochState init(0.5 * kPi, 0.0);
    SolverConfig coarse{0.05, 5.0, SolverMethod::RK4};
    SolverConfig fine{0.025, 5.0, SolverMethod::RK4};
    const Real dev_coarse =
        detail::closed_vs_oracle(markovian(1.0), init, solve_markovian(1.0, init, coarse)).max_abs;
    const Real dev_fine =
        detail::closed_vs_oracle(markovian(1.0), init, solve_markovian(1.0, init, fine)).max_abs;
    const bool ok = dev_fine > 0.0 && dev_coarse / dev_fine >= 8.0;
    report.checks.push_back({"rk4 fourth-order convergence", ok, false,
                             "deviation ratio " + detail::sci(dev_coarse / dev_fine)});
  }

  // Memory kernel: xi_memory vs the exact augmented-ODE reduction.
  for (const Real R : {0.1, 0.25, 0.5, 2.5}) {
    const Real gamma = 1.0;
    const BlochState init(kPi / 3.0, 0.0);
    SolverConfig cfg{1e-3, 10.0, SolverMethod::RK4};
    const Trajectory numeric = solve_memory_kernel(R * gamma, gamma, init, cfg);
    Real worst = 0.0;
    const Real p0 = std::cos(kPi / 6.0) * std::cos(kPi / 6.0);
    const Real off0 = 0.5 * std::sin(kPi / 3.0);
    for (std::size_t k = 0; k < numeric.size(); ++k) {
      const Real tau = gamma * numeric.times[k];
      worst = std::max(worst, std::abs(numeric.states[k](0, 0).real() / p0 - xi_memory(R, tau)));
      worst = std::max(worst,
                       std::abs(std::abs(numeric.states[k](0, 1)) / off0 -
                                std::abs(xi_memory(0.5 * R, tau))));
    }
    report.checks.push_back({"memory kernel xi vs augmented ode (R=" + format_sig(R) + ")",
                             worst < tol.memory_dev, false,
                             "max deviation " + detail::sci(worst)});
  }

  // Post-Markovian: xi_post vs the Volterra solver, with a dt-halving check.
  for (const Real R : {0.1, 1.0, 10.0}) {
    const Real gamma = 1.0;
    const BlochState init(kPi / 3.0, 0.0);
    auto worst_dev = [&](Real dt) {
      SolverConfig cfg{dt, 10.0, SolverMethod::TrapezoidVolterra};
      const Trajectory numeric = solve_post_markovian(R * gamma, gamma, init, cfg);
      const Real p0 = std::cos(kPi / 6.0) * std::cos(kPi / 6.0);
      const Real off0 = 0.5 * std::sin(kPi / 3.0);
      Real worst = 0.0;
      for (std::size_t k = 0; k < numeric.size(); ++k) {
        const Real tau = gamma * numeric.times[k];
        worst = std::max(worst, std::abs(numeric.states[k](0, 0).real() / p0 - xi_post(R, tau)));
        worst = std::max(
            worst, std::abs(std::abs(numeric.states[k](0, 1)) / off0 - xi_post(0.5 * R, tau)));
      }
      return worst;
    };
    const Real dev = worst_dev(1e-3 / gamma);
    const Real dev_half = worst_dev(0.5e-3 / gamma);
    const bool ok = dev < tol.volterra_dev && dev_half < dev;
    report.checks.push_back({"post-markovian xi vs volterra (R=" + format_sig(R) + ")", ok, false,
                             "max deviation " + detail::sci(dev) + ", halved-dt deviation " +
                                 detail::sci(dev_half)});
  }

  // xi branch continuity across 4R = 1.
  {
    Real worst = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const Real tau = 0.1 * static_cast<Real>(k);
      const Real center = xi_memory(0.25, tau);
      worst = std::max(worst, std::abs(xi_memory(0.25 + 1e-6, tau) - center));
      worst = std::max(worst, std::abs(xi_memory(0.25 - 1e-6, tau) - center));
    }
    report.checks.push_back({"xi_memory branch continuity at 4R=1", worst <= 1e-4, false,
                             "max jump " + detail::sci(worst)});
  }

  // Markovian limit of both kernels at R = 0.01.
  {
    Real worst_mem = 0.0, worst_post = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const Real tau = 0.01 * static_cast<Real>(k);
      const Real markov = std::exp(-0.01 * tau);
      worst_mem = std::max(worst_mem, std::abs(xi_memory(0.01, tau) - markov));
      worst_post = std::max(worst_post, std::abs(xi_post(0.01, tau) - markov));
    }
    report.checks.push_back({"markovian limit of xi_memory (R=0.01)", worst_mem < 0.02, false,
                             "sup deviation " + detail::sci(worst_mem)});
    report.checks.push_back({"markovian limit of xi_post (R=0.01)", worst_post < 0.02, false,
                             "sup deviation " + detail::sci(worst_post)});
  }

  // Kernel-model kinship for weak dissipation.
  {
    Real worst = 0.0;
    for (const Real R : {0.01, 0.02, 0.05}) {
      for (int k = 0; k <= 1000; ++k) {
        const Real tau = 0.01 * static_cast<Real>(k);
        worst = std::max(worst, std::abs(xi_post(R, tau) - xi_memory(R, tau)));
      }
    }
    report.checks.push_back({"kernel kinship |xi_post - xi_memory| (R<=0.05)", worst <= 0.02,
                             false, "sup deviation " + detail::sci(worst)});
  }

  // Short-time equivalence of the two projection treatments.
  {
    bool ok = true;
    Real worst_ratio = 0.0;
    for (const Real theta : thetas) {
      const Real c2 = std::cos(0.5 * theta) * std::cos(0.5 * theta);
      for (int k = 1; k <= 100; ++k) {
        const Real x = 0.001 * static_cast<Real>(k);  // gamma*t in (0, 0.1]
        const Real diff = c2 * std::abs(std::exp(-x) - 0.5 * (1.0 + std::exp(-2.0 * x)));
        const Real bound = 2.0 * x * x;
        worst_ratio = std::max(worst_ratio, diff / bound);
        if (diff > bound) ok = false;
      }
    }
    report.checks.push_back({"short-time markovian/correlated equivalence", ok, false,
                             "worst |diff|/bound ratio " + detail::sci(worst_ratio)});
  }

  // eta against the numerical eigensolver on randomized inputs.
  {
    std::mt19937_64 rng(20260810);
    std::uniform_real_distribution<Real> utheta(0.0, kPi), ut(0.0, 3.0 * period);
    Real worst = 0.0;
    const std::vector<ModelParams> sets = figure_parameter_sets();
    for (int k = 0; k < 400; ++k) {
      const ModelParams& model = sets[k % sets.size()];
      const Real theta = utheta(rng);
      const Real t = ut(rng);
      const SpectralPair s = eigensystem(evolve(model, BlochState(theta, 0.3), t));
      worst = std::max(worst,
                       std::abs(eta(model, theta, t) - (s.lambda_plus - s.lambda_minus)));
    }
    report.checks.push_back({"eta equals eigensolver gap", worst <= 1e-10, false,
                             "max deviation " + detail::sci(worst)});
  }

  // Path agreement: the general evaluator against the closed form.
  {
    Real worst = 0.0;
    QuadratureConfig config;
    for (const ModelParams& model : figure_parameter_sets()) {
      for (const Real theta : thetas) {
        const BlochState init(theta, 0.0);
        const Trajectory traj = sample_evolution(model, init, period, 20001);
        const Real delta = std::abs(phase_general(traj, config).principal -
                                    phase_closed(model, theta, config).principal);
        worst = std::max(worst, delta);
      }
    }
    report.checks.push_back({"phase_general vs phase_closed (figure sets x 19 thetas)",
                             worst < 1e-6, false, "max |delta principal| " + detail::sci(worst)});
  }

  // Positivity scans.
  {
    std::vector<Real> theta_scan, t_scan;
    for (int k = 1; k <= 99; ++k) theta_scan.push_back(0.01 * static_cast<Real>(k) * kPi);
    for (int k = 0; k <= 300; ++k) t_scan.push_back(3.0 * period * static_cast<Real>(k) / 300.0);

    std::size_t bad = 0;
    for (const Real g : kFigureRates) {
      bad += positivity_scan(markovian(g), theta_scan, t_scan).size();
      bad += positivity_scan(correlated(g), theta_scan, t_scan).size();
    }
    for (const Real g0 : kKernelGamma0) {
      for (const Real g : kKernelGamma) {
        bad += positivity_scan(post_markovian(g0, g), theta_scan, t_scan).size();
      }
    }
    report.checks.push_back({"positivity scan (markovian, correlated, post)", bad == 0, false,
                             std::to_string(bad) + " violations"});

    std::size_t memory_bad = 0;
    Real worst_lambda = 0.0;
    for (const Real g0 : kKernelGamma0) {
      for (const Real g : kKernelGamma) {
        const auto found = positivity_scan(memory_kernel(g0, g), theta_scan, t_scan);
        memory_bad += found.size();
        for (const auto& v : found) worst_lambda = std::min(worst_lambda, v.lambda_min);
      }
    }
    report.checks.push_back({"positivity scan (memory kernel, informational)", true, true,
                             std::to_string(memory_bad) + " violations, most negative eigenvalue " +
                                 detail::sci(worst_lambda)});
  }

  return report;
}

inline void print_report(std::ostream& os, const ValidationReport& report) {
  for (const CheckResult& c : report.checks) {
    os << (c.informational ? "[INFO]" : (c.passed ? "[PASS]" : "[FAIL]")) << ' ' << c.name
       << ": " << c.detail << "\n";
  }
  os << (report.all_passed() ? "validation passed" : "validation FAILED") << "\n";
}

}  // namespace gphase
