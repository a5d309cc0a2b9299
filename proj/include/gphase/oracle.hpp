#pragma once

// Independent numerical solvers validating every closed form:
//   - RK4 on the Markovian master equation,
//   - RK4 on the coupled band-projected pair (general gamma1 != gamma2),
//   - RK4 on the exact augmented-ODE reduction of the exponential memory
//     kernel (the auxiliary variable u = K * L rho obeys a local equation),
//   - trapezoid discretization of the scalar Volterra equations of the
//     post-Markovian model.
// All solvers run in the interaction picture, as the equations are stated.

#include "gphase/evolutions.hpp"
#include "gphase/state.hpp"

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace gphase {

enum class SolverMethod { RK4, TrapezoidVolterra };

struct SolverConfig {
  Real dt = 1e-4;
  Real t_end = 1.0;
  SolverMethod method = SolverMethod::RK4;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be positive");
    if (!(t_end >= dt)) throw std::invalid_argument("SolverConfig: t_end must be >= dt");
  }
  // Step count snapped so the grid lands exactly on t_end.
  long steps() const { return std::max(1L, std::lround(t_end / dt)); }
};

struct SolverDivergedError : std::runtime_error {
  explicit SolverDivergedError(Real t)
      : std::runtime_error("solver diverged: trace drift exceeded 1e-9 at t = " +
                           std::to_string(t)) {}
};

struct GridMismatchError : std::runtime_error {
  GridMismatchError() : std::runtime_error("trajectories have different time grids or pictures") {}
};

/// Entrywise trajectory deviation.
struct Deviation {
  Real max_abs = 0.0;
  Real at_time = 0.0;
  std::array<Real, 4> per_entry{};  // (0,0), (0,1), (1,0), (1,1)
};

namespace detail {

inline const DensityMatrix2& sigma_plus() {
  static const DensityMatrix2 m = [] {
    DensityMatrix2 s;
    s << Complex(0, 0), Complex(1, 0), Complex(0, 0), Complex(0, 0);
    return s;
  }();
  return m;
}

inline const DensityMatrix2& sigma_minus() {
  static const DensityMatrix2 m = [] {
    DensityMatrix2 s;
    s << Complex(0, 0), Complex(0, 0), Complex(1, 0), Complex(0, 0);
    return s;
  }();
  return m;
}

/// Amplitude-damping Liouvillian L rho = (gamma0/2)(2 s- rho s+ - s+s- rho - rho s+s-).
inline DensityMatrix2 damping_liouvillian(Real gamma0, const DensityMatrix2& rho) {
  const DensityMatrix2& sp = sigma_plus();
  const DensityMatrix2& sm = sigma_minus();
  const DensityMatrix2 number = sp * sm;  // |1><1|
  return 0.5 * gamma0 *
         (2.0 * (sm * rho * sp) - number * rho - rho * number);
}

template <typename State, typename Deriv>
State rk4_step(const State& y, Real t, Real h, Deriv&& f) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, (y + (0.5 * h) * k1).eval());
  const State k3 = f(t + 0.5 * h, (y + (0.5 * h) * k2).eval());
  const State k4 = f(t + h, (y + h * k3).eval());
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void check_trace(const DensityMatrix2& rho, Real t) {
  if (std::abs(rho(0, 0).real() + rho(1, 1).real() - 1.0) > 1e-9) {
    throw SolverDivergedError(t);
  }
}

}  // namespace detail

/// RK4 on d rho/dt = gamma2 (s- rho s+ - (1/2){s+s-, rho}).
inline Trajectory solve_markovian(Real gamma2, const BlochState& init, const SolverConfig& cfg) {
  cfg.validate();
  const long n = cfg.steps();
  const Real h = cfg.t_end / static_cast<Real>(n);

  Trajectory traj;
  traj.picture = Picture::Interaction;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);

  DensityMatrix2 rho = pure_state(init);
  traj.times.push_back(0.0);
  traj.states.push_back(rho);
  auto deriv = [gamma2](Real, const DensityMatrix2& r) -> DensityMatrix2 {
    return detail::damping_liouvillian(gamma2, r);
  };
  for (long k = 0; k < n; ++k) {
    const Real t = static_cast<Real>(k) * h;
    rho = detail::rk4_step(rho, t, h, deriv);
    detail::check_trace(rho, t + h);
    traj.times.push_back(static_cast<Real>(k + 1) * h);
    traj.states.push_back(rho);
  }
  traj.validate();
  return traj;
}

/// RK4 on the coupled band-projected pair; returns rho = rho1 + rho2 with
/// rho2(0) = 0 (only the lower band populated initially).
inline Trajectory solve_correlated(Real gamma1, Real gamma2, const BlochState& init,
                                   const SolverConfig& cfg) {
  cfg.validate();
  const long n = cfg.steps();
  const Real h = cfg.t_end / static_cast<Real>(n);

  using PairState = Eigen::Matrix<Complex, 2, 4>;  // [rho1 | rho2]
  const DensityMatrix2& sp = detail::sigma_plus();
  const DensityMatrix2& sm = detail::sigma_minus();
  const DensityMatrix2 number_up = sp * sm;    // |1><1|
  const DensityMatrix2 number_down = sm * sp;  // |0><0|

  auto deriv = [&](Real, const PairState& y) -> PairState {
    const DensityMatrix2 rho1 = y.template leftCols<2>();
    const DensityMatrix2 rho2 = y.template rightCols<2>();
    PairState dy;
    dy.template leftCols<2>() =
        gamma1 * (sp * rho2 * sm) - 0.5 * gamma2 * (number_up * rho1 + rho1 * number_up);
    dy.template rightCols<2>() =
        gamma2 * (sm * rho1 * sp) - 0.5 * gamma1 * (number_down * rho2 + rho2 * number_down);
    return dy;
  };

  PairState y = PairState::Zero();
  y.leftCols<2>() = pure_state(init);

  Trajectory traj;
  traj.picture = Picture::Interaction;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(y.leftCols<2>() + y.rightCols<2>());
  for (long k = 0; k < n; ++k) {
    const Real t = static_cast<Real>(k) * h;
    y = detail::rk4_step(y, t, h, deriv);
    const DensityMatrix2 rho = y.leftCols<2>() + y.rightCols<2>();
    detail::check_trace(rho, t + h);
    traj.times.push_back(static_cast<Real>(k + 1) * h);
    traj.states.push_back(rho);
  }
  traj.validate();
  return traj;
}

/// Exact local reduction of the exponential-kernel integrodifferential
/// equation: with u(t) = int_0^t K(t-t') L rho(t') dt' and K = gamma e^{-gamma t},
/// du/dt = gamma (L rho - u), u(0) = 0, d rho/dt = u.  RK4 on (rho, u).
inline Trajectory solve_memory_kernel(Real gamma0, Real gamma, const BlochState& init,
                                      const SolverConfig& cfg) {
  cfg.validate();
  if (!(gamma > 0.0)) throw std::invalid_argument("solve_memory_kernel: gamma must be positive");
  const long n = cfg.steps();
  const Real h = cfg.t_end / static_cast<Real>(n);

  using AugState = Eigen::Matrix<Complex, 2, 4>;  // [rho | u]
  auto deriv = [gamma0, gamma](Real, const AugState& y) -> AugState {
    const DensityMatrix2 rho = y.template leftCols<2>();
    const DensityMatrix2 u = y.template rightCols<2>();
    AugState dy;
    dy.template leftCols<2>() = u;
    dy.template rightCols<2>() = gamma * (detail::damping_liouvillian(gamma0, rho) - u);
    return dy;
  };

  AugState y = AugState::Zero();
  y.leftCols<2>() = pure_state(init);

  Trajectory traj;
  traj.picture = Picture::Interaction;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(y.leftCols<2>());
  for (long k = 0; k < n; ++k) {
    const Real t = static_cast<Real>(k) * h;
    y = detail::rk4_step(y, t, h, deriv);
    const DensityMatrix2 rho = y.leftCols<2>();
    detail::check_trace(rho, t + h);
    traj.times.push_back(static_cast<Real>(k + 1) * h);
    traj.states.push_back(rho);
  }
  traj.validate();
  return traj;
}

namespace detail {

// Trapezoid scheme for the scalar Volterra equation
//   y'(t) = -c int_0^t gamma e^{-(gamma + c) s} y(t - s) ds,   y(0) = 1.
// The amplitude-damping Liouvillian acts triangularly, so each matrix element
// of the post-Markovian equation reduces to this with c = gamma0 (population)
// or c = gamma0/2 (coherence).  Full history is kept: O(n^2) total.
inline std::vector<Real> volterra_decay(Real gamma, Real c, long n, Real h) {
  std::vector<Real> g(n + 1), y(n + 1), f(n + 1);
  for (long j = 0; j <= n; ++j) {
    g[j] = gamma * std::exp(-(gamma + c) * static_cast<Real>(j) * h);
  }
  y[0] = 1.0;
  f[0] = 0.0;
  const Real denom = 1.0 + 0.25 * c * gamma * h * h;
  for (long m = 0; m + 1 <= n; ++m) {
    Real hist = 0.5 * g[m + 1] * y[0];
    for (long j = 1; j <= m; ++j) hist += g[j] * y[m + 1 - j];
    const Real known = -c * h * hist;
    y[m + 1] = (y[m] + 0.5 * h * (f[m] + known)) / denom;
    f[m + 1] = known - 0.5 * c * h * g[0] * y[m + 1];
  }
  return y;
}

}  // namespace detail

/// Scalar Volterra solution of the post-Markovian equation, element by
/// element; rho22 = 1 - rho11 by trace preservation.
inline Trajectory solve_post_markovian(Real gamma0, Real gamma, const BlochState& init,
                                       const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.method != SolverMethod::TrapezoidVolterra) {
    throw std::invalid_argument("solve_post_markovian: config must select TrapezoidVolterra");
  }
  if (!(gamma > 0.0)) throw std::invalid_argument("solve_post_markovian: gamma must be positive");
  const long n = cfg.steps();
  const Real h = cfg.t_end / static_cast<Real>(n);

  const std::vector<Real> pop = detail::volterra_decay(gamma, gamma0, n, h);
  const std::vector<Real> coh = detail::volterra_decay(gamma, 0.5 * gamma0, n, h);

  const Real p0 = std::cos(0.5 * init.theta) * std::cos(0.5 * init.theta);
  const Complex off0 = 0.5 * std::sin(init.theta) * std::polar(1.0, -init.phi);

  Trajectory traj;
  traj.picture = Picture::Interaction;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);
  for (long k = 0; k <= n; ++k) {
    const Real p = p0 * pop[k];
    const Complex off = off0 * coh[k];
    DensityMatrix2 rho;
    rho << Complex(p, 0.0), off, std::conj(off), Complex(1.0 - p, 0.0);
    traj.times.push_back(static_cast<Real>(k) * h);
    traj.states.push_back(rho);
  }
  traj.validate();
  return traj;
}

/// Entrywise max absolute deviation between trajectories on the same grid.
inline Deviation compare(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size() || a.picture != b.picture) throw GridMismatchError();
  const Real tol = 1e-12 * std::max(std::abs(a.t_end()), 1.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a.times[k] - b.times[k]) > tol) throw GridMismatchError();
  }
  Deviation dev;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const DensityMatrix2 diff = a.states[k] - b.states[k];
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        const Real d = std::abs(diff(r, c));
        const int entry = 2 * r + c;
        dev.per_entry[entry] = std::max(dev.per_entry[entry], d);
        if (d > dev.max_abs) {
          dev.max_abs = d;
          dev.at_time = a.times[k];
        }
      }
    }
  }
  return dev;
}

struct PositivityViolation {
  Real theta;
  Real t;
  Real lambda_min;
};

/// Scans the closed-form evolution for negative eigenvalues below -1e-12.
inline std::vector<PositivityViolation> positivity_scan(const ModelParams& model,
                                                        std::span<const Real> thetas,
                                                        std::span<const Real> times) {
  if (thetas.empty() || times.empty()) {
    throw std::invalid_argument("positivity_scan: grids must be nonempty");
  }
  std::vector<PositivityViolation> found;
  for (const Real theta : thetas) {
    const BlochState init(theta, 0.0);
    for (const Real t : times) {
      const Real lm = min_eigenvalue(evolve(model, init, t));
      if (lm < -1e-12) found.push_back({theta, t, lm});
    }
  }
  return found;
}

}  // namespace gphase
