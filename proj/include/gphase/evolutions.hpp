#pragma once

// Closed-form time evolution of a dissipative two-level atom under four
// open-system models, plus the spectral ingredients (eta, cos^2(theta_t/2))
// of the quasi-period geometric-phase formula.
//
// Every model shares the structure
//   rho11(t) = P(t) cos^2(theta/2)
//   rho12(t) = (1/2) sin(theta) e^{-i(phi + omega t)} Q(t)      (Schroedinger)
// with model-specific population factor P and coherence factor Q.

#include "gphase/state.hpp"

#include <cmath>
#include <stdexcept>
#include <variant>

namespace gphase {

struct MarkovianProjection {
  Real gamma2;  // decay rate, >= 0
};

struct CorrelatedProjection {
  Real gamma;  // common band rate gamma1 = gamma2 = gamma, >= 0
};

struct MemoryKernel {
  Real gamma0;  // dissipation constant, >= 0
  Real gamma;   // inverse memory time, > 0
};

struct PostMarkovian {
  Real gamma0;  // dissipation constant, >= 0
  Real gamma;   // inverse memory time, > 0
};

using ModelFamily =
    std::variant<MarkovianProjection, CorrelatedProjection, MemoryKernel, PostMarkovian>;

struct ModelParams {
  ModelFamily family;
  Real omega = 1.0;  // transition angular frequency, > 0

  void validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("ModelParams: omega must be positive");
    std::visit(
        [](const auto& f) {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, MarkovianProjection>) {
            if (!(f.gamma2 >= 0.0)) throw std::invalid_argument("gamma2 must be nonnegative");
          } else if constexpr (std::is_same_v<F, CorrelatedProjection>) {
            if (!(f.gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
          } else {
            if (!(f.gamma0 >= 0.0)) throw std::invalid_argument("gamma0 must be nonnegative");
            if (!(f.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
          }
        },
        family);
  }
};

inline ModelParams markovian(Real gamma2, Real omega = 1.0) {
  ModelParams p{MarkovianProjection{gamma2}, omega};
  p.validate();
  return p;
}

inline ModelParams correlated(Real gamma, Real omega = 1.0) {
  ModelParams p{CorrelatedProjection{gamma}, omega};
  p.validate();
  return p;
}

inline ModelParams memory_kernel(Real gamma0, Real gamma, Real omega = 1.0) {
  ModelParams p{MemoryKernel{gamma0, gamma}, omega};
  p.validate();
  return p;
}

inline ModelParams post_markovian(Real gamma0, Real gamma, Real omega = 1.0) {
  ModelParams p{PostMarkovian{gamma0, gamma}, omega};
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// xi solution functions of the two kernel models, R = gamma0/gamma, tau = gamma*t.

enum class XiBranch { Hyperbolic, Trigonometric, Critical };

inline constexpr Real kXiCriticalTol = 1e-8;

template <typename Scalar>
XiBranch xi_branch(Scalar R, Scalar tol = Scalar(kXiCriticalTol)) {
  const Scalar x = Scalar(1) - Scalar(4) * R;
  if (std::abs(x) < tol) return XiBranch::Critical;
  return x > Scalar(0) ? XiBranch::Hyperbolic : XiBranch::Trigonometric;
}

/// Memory-kernel decay function.  Hyperbolic branch for 4R < 1, the sin/cos
/// substitution for 4R > 1, series limit at the removable point 4R = 1.
template <typename Scalar>
Scalar xi_memory(Scalar R, Scalar tau) {
  if (!(R >= Scalar(0)) || !(tau >= Scalar(0))) {
    throw std::domain_error("xi_memory: R and tau must be nonnegative");
  }
  const Scalar damp = std::exp(-tau / Scalar(2));
  switch (xi_branch(R)) {
    case XiBranch::Critical:
      return damp * (Scalar(1) + tau / Scalar(2));
    case XiBranch::Hyperbolic: {
      const Scalar s = std::sqrt(Scalar(1) - Scalar(4) * R);
      return damp * (std::sinh(Scalar(0.5) * tau * s) / s + std::cosh(Scalar(0.5) * tau * s));
    }
    case XiBranch::Trigonometric:
    default: {
      const Scalar s = std::sqrt(Scalar(4) * R - Scalar(1));
      return damp * (std::sin(Scalar(0.5) * tau * s) / s + std::cos(Scalar(0.5) * tau * s));
    }
  }
}

/// Post-Markovian replacement for xi; the R = 1 singularity is removable.
template <typename Scalar>
Scalar xi_post(Scalar R, Scalar tau) {
  if (!(R >= Scalar(0)) || !(tau >= Scalar(0))) {
    throw std::domain_error("xi_post: R and tau must be nonnegative");
  }
  if (std::abs(Scalar(1) - R) < Scalar(kXiCriticalTol)) {
    return (Scalar(1) + tau) * std::exp(-tau);
  }
  return (std::exp(-R * tau) - R * std::exp(-tau)) / (Scalar(1) - R);
}

// ---------------------------------------------------------------------------
// Closed-form factors and the evolved state.

/// rho11(t) / rho11(0).
inline Real population_factor(const ModelParams& model, Real t) {
  return std::visit(
      [t](const auto& f) -> Real {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, MarkovianProjection>) {
          return std::exp(-f.gamma2 * t);
        } else if constexpr (std::is_same_v<F, CorrelatedProjection>) {
          return 0.5 * (1.0 + std::exp(-2.0 * f.gamma * t));
        } else if constexpr (std::is_same_v<F, MemoryKernel>) {
          return xi_memory(f.gamma0 / f.gamma, f.gamma * t);
        } else {
          return xi_post(f.gamma0 / f.gamma, f.gamma * t);
        }
      },
      model.family);
}

/// rho12(t) / rho12(0), interaction picture (the e^{-i omega t} factor aside).
inline Real coherence_factor(const ModelParams& model, Real t) {
  return std::visit(
      [t](const auto& f) -> Real {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, MarkovianProjection>) {
          return std::exp(-0.5 * f.gamma2 * t);
        } else if constexpr (std::is_same_v<F, CorrelatedProjection>) {
          return std::exp(-0.5 * f.gamma * t);
        } else if constexpr (std::is_same_v<F, MemoryKernel>) {
          // The off-diagonal channel obeys the same equation at half the rate,
          // so branch selection happens on R/2.
          return xi_memory(0.5 * f.gamma0 / f.gamma, f.gamma * t);
        } else {
          return xi_post(0.5 * f.gamma0 / f.gamma, f.gamma * t);
        }
      },
      model.family);
}

/// Closed-form evolved state in the Schroedinger picture.
inline DensityMatrix2 evolve(const ModelParams& model, const BlochState& init, Real t) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolve: t must be nonnegative");
  const Real c2 = std::cos(0.5 * init.theta) * std::cos(0.5 * init.theta);
  const Real p = population_factor(model, t) * c2;
  const Complex off =
      0.5 * std::sin(init.theta) * coherence_factor(model, t) *
      std::polar(1.0, -(init.phi + model.omega * t));
  DensityMatrix2 rho;
  rho << Complex(p, 0.0), off, std::conj(off), Complex(1.0 - p, 0.0);
  return rho;
}

/// Eigenvalue gap lambda_plus - lambda_minus of evolve(model, {theta, .}, t).
inline Real eta(const ModelParams& model, Real theta, Real t) {
  const Real c2 = std::cos(0.5 * theta) * std::cos(0.5 * theta);
  const Real p = population_factor(model, t) * c2;
  const Real qs = coherence_factor(model, t) * std::sin(theta);
  return std::hypot(1.0 - 2.0 * p, qs);
}

/// Squared ground-state amplitude of the lambda_plus eigenvector, i.e. the
/// integrand of the quasi-period phase formula.  theta = 0 makes both the
/// numerator and denominator vanish and is rejected; callers special-case it.
inline Real cos2_half_theta_t(const ModelParams& model, Real theta, Real t) {
  if (!(theta > 0.0 && theta <= kPi)) {
    throw std::invalid_argument("cos2_half_theta_t: theta must lie in (0, pi]");
  }
  if (!(t >= 0.0)) throw std::invalid_argument("cos2_half_theta_t: t must be nonnegative");
  const Real c2 = std::cos(0.5 * theta) * std::cos(0.5 * theta);
  const Real p = population_factor(model, t) * c2;
  const Real qs = coherence_factor(model, t) * std::sin(theta);
  const Real num = 1.0 + std::hypot(1.0 - 2.0 * p, qs) - 2.0 * p;
  const Real denom = num * num + qs * qs;
  if (denom == 0.0) {
    // Diagonal degenerate-direction limit.
    return p > 0.5 ? 0.0 : 1.0;
  }
  return num * num / denom;
}

/// Uniform closed-form sampling over [0, t_end], Schroedinger picture.
inline Trajectory sample_evolution(const ModelParams& model, const BlochState& init,
                                   Real t_end, int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("sample_evolution: need >= 2 samples");
  if (!(t_end > 0.0)) throw std::invalid_argument("sample_evolution: t_end must be positive");
  Trajectory traj;
  traj.picture = Picture::Schroedinger;
  traj.times.reserve(n_samples);
  traj.states.reserve(n_samples);
  const Real h = t_end / static_cast<Real>(n_samples - 1);
  for (int k = 0; k < n_samples; ++k) {
    const Real t = static_cast<Real>(k) * h;
    traj.times.push_back(t);
    traj.states.push_back(evolve(model, init, t));
  }
  traj.validate();
  return traj;
}

}  // namespace gphase
