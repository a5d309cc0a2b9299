#pragma once

// Geometric-phase evaluation for mixed states under nonunitary evolution.
//
// Two routes that check each other:
//   phase_closed  — the quasi-period formula -omega * int_0^T cos^2(theta_t/2) dt
//                   built from the closed-form eigensystem of each model;
//   phase_general — the kinematic sum over instantaneous eigenbranches
//                   Sum_i sqrt(lambda_i(0) lambda_i(tau)) <phi_i(0)|phi_i(tau)>
//                   exp(-int <phi_i|d/dt phi_i> dt)
//                   evaluated on an arbitrary sampled trajectory.

#include "gphase/evolutions.hpp"
#include "gphase/state.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace gphase {

struct PhaseResult {
  Real principal = 0.0;   // folded into (-pi, pi]
  Real unwrapped = 0.0;   // raw connection integral / holonomy angle, no folding
  Real visibility = 0.0;  // modulus of the complex sum whose Arg is the phase
};

enum class QuadratureScheme { Simpson, Trapezoid };

struct QuadratureConfig {
  int steps = 2000;
  QuadratureScheme scheme = QuadratureScheme::Simpson;
  Real degeneracy_tolerance = kDegeneracyTol;

  void validate() const {
    if (steps < 2) throw std::invalid_argument("QuadratureConfig: steps must be >= 2");
    if (scheme == QuadratureScheme::Simpson && steps % 2 != 0) {
      throw std::invalid_argument("QuadratureConfig: Simpson needs an even step count");
    }
  }
};

/// Raised when a trajectory is spectrally degenerate for too long to track
/// an eigenbranch through it; carries the offending time window.
struct DegeneracyError : std::runtime_error {
  Real t_begin;
  Real t_end;
  DegeneracyError(Real t0, Real t1)
      : std::runtime_error("degenerate trajectory segment in [" + std::to_string(t0) + ", " +
                           std::to_string(t1) + "]"),
        t_begin(t0),
        t_end(t1) {}
};

/// Raised by gauge_align when the two vectors are (numerically) orthogonal.
struct AlignmentError : std::runtime_error {
  AlignmentError() : std::runtime_error("gauge alignment impossible: orthogonal vectors") {}
};

/// Folds an angle into (-pi, pi].
inline Real fold_to_principal(Real angle) {
  Real p = std::remainder(angle, 2.0 * kPi);
  if (p <= -kPi) p += 2.0 * kPi;
  return p;
}

/// Multiplies `current` by a unit phase so that <previous|aligned> is real
/// and positive.  Norms are untouched.
template <typename Scalar>
StateVectorT<Scalar> gauge_align(const StateVectorT<Scalar>& previous,
                                 const StateVectorT<Scalar>& current) {
  const std::complex<Scalar> overlap = previous.dot(current);
  const Scalar mag = std::abs(overlap);
  if (mag < Scalar(1e-12)) throw AlignmentError();
  return current * (std::conj(overlap) / mag);
}

namespace detail {

// Composite quadrature on uniform samples.  Simpson falls back to a 3/8 tail
// when the interval count is odd, trapezoid on a single interval.
template <typename Value>
Value integrate_uniform(const std::vector<Value>& f, Real h, QuadratureScheme scheme) {
  const std::size_t n = f.size() - 1;  // interval count
  if (scheme == QuadratureScheme::Trapezoid || n == 1) {
    Value acc = 0.5 * (f.front() + f.back());
    for (std::size_t k = 1; k < n; ++k) acc += f[k];
    return h * acc;
  }
  std::size_t simpson_end = n;  // Simpson handles [0, simpson_end]
  Value tail{};
  if (n % 2 != 0) {
    if (n < 3) {
      Value acc = 0.5 * (f.front() + f.back());
      for (std::size_t k = 1; k < n; ++k) acc += f[k];
      return h * acc;
    }
    simpson_end = n - 3;
    tail = (3.0 * h / 8.0) * (f[n - 3] + 3.0 * f[n - 2] + 3.0 * f[n - 1] + f[n]);
  }
  Value acc{};
  if (simpson_end >= 2) {
    acc = f[0] + f[simpson_end];
    for (std::size_t k = 1; k < simpson_end; ++k) {
      acc += (k % 2 == 1 ? 4.0 : 2.0) * f[k];
    }
    acc *= h / 3.0;
  }
  return acc + tail;
}

// Chains gauge_align along the raw eigenvector sequence so the branch varies
// smoothly; re-throws alignment failures as degeneracy with the time window.
inline std::vector<StateVector> aligned_branch(const std::vector<Real>& times,
                                               const std::vector<StateVector>& raw) {
  std::vector<StateVector> out;
  out.reserve(raw.size());
  out.push_back(raw.front());
  for (std::size_t k = 1; k < raw.size(); ++k) {
    try {
      out.push_back(gauge_align(out.back(), raw[k]));
    } catch (const AlignmentError&) {
      throw DegeneracyError(times[k - 1], times[k]);
    }
  }
  return out;
}

// <phi|phi_dot> samples: central differences inside, one-sided second order
// at the endpoints.
inline std::vector<Complex> connection_samples(const std::vector<Real>& times,
                                               const std::vector<StateVector>& phi) {
  const std::size_t n = phi.size();
  const Real h = (times.back() - times.front()) / static_cast<Real>(n - 1);
  std::vector<Complex> conn(n);
  conn[0] = phi[0].dot(((-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * h)).eval());
  for (std::size_t k = 1; k + 1 < n; ++k) {
    conn[k] = phi[k].dot(((phi[k + 1] - phi[k - 1]) / (2.0 * h)).eval());
  }
  conn[n - 1] = phi[n - 1].dot(
      ((3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / (2.0 * h)).eval());
  return conn;
}

struct BranchTerm {
  Complex value{0.0, 0.0};
  Real unwrapped = 0.0;
};

inline BranchTerm branch_term(const std::vector<Real>& times,
                              const std::vector<StateVector>& raw, Real lambda_start,
                              Real lambda_end, const QuadratureConfig& config) {
  const Real weight2 = lambda_start * lambda_end;
  const std::vector<StateVector> phi = aligned_branch(times, raw);
  const std::vector<Complex> conn = connection_samples(times, phi);
  const Real h = (times.back() - times.front()) / static_cast<Real>(times.size() - 1);
  const Complex integral = integrate_uniform(conn, h, config.scheme);
  const Complex overlap = phi.front().dot(phi.back());
  BranchTerm term;
  term.value = std::sqrt(std::max(0.0, weight2)) * overlap * std::exp(-integral);
  term.unwrapped = -integral.imag() + (std::abs(overlap) > 0.0 ? std::arg(overlap) : 0.0);
  return term;
}

}  // namespace detail

/// Kinematic phase from precomputed per-sample spectral data.  Exposed so the
/// eigenvector gauge can be perturbed independently of the trajectory.
inline PhaseResult phase_from_spectra(const std::vector<Real>& times,
                                      const std::vector<SpectralPair>& spectra,
                                      const QuadratureConfig& config = {}) {
  config.validate();
  if (times.size() < 3 || times.size() != spectra.size()) {
    throw std::invalid_argument("phase_from_spectra: need >= 3 matching samples");
  }

  // A short brush with degeneracy is tolerated (the branch is carried through
  // by alignment); a longer stretch makes branch identity meaningless.
  std::size_t run_begin = 0, run_len = 0;
  for (std::size_t k = 0; k <= spectra.size(); ++k) {
    const bool deg = k < spectra.size() &&
                     (spectra[k].lambda_plus - spectra[k].lambda_minus) <
                         config.degeneracy_tolerance;
    if (deg) {
      if (run_len == 0) run_begin = k;
      ++run_len;
    } else {
      if (run_len > 2) throw DegeneracyError(times[run_begin], times[run_begin + run_len - 1]);
      run_len = 0;
    }
  }

  std::vector<StateVector> raw_plus(spectra.size()), raw_minus(spectra.size());
  for (std::size_t k = 0; k < spectra.size(); ++k) {
    raw_plus[k] = spectra[k].vec_plus;
    raw_minus[k] = spectra[k].vec_minus;
  }

  const detail::BranchTerm plus =
      detail::branch_term(times, raw_plus, spectra.front().lambda_plus,
                          spectra.back().lambda_plus, config);
  const detail::BranchTerm minus =
      detail::branch_term(times, raw_minus, spectra.front().lambda_minus,
                          spectra.back().lambda_minus, config);

  const Complex sum = plus.value + minus.value;
  PhaseResult out;
  out.visibility = std::abs(sum);
  out.principal = out.visibility > 0.0 ? fold_to_principal(std::arg(sum)) : 0.0;
  const bool plus_dominant = std::abs(plus.value) >= std::abs(minus.value);
  if (std::abs(plus.value) == 0.0 && std::abs(minus.value) == 0.0) {
    out.unwrapped = 0.0;
  } else {
    out.unwrapped = plus_dominant ? plus.unwrapped : minus.unwrapped;
  }
  return out;
}

/// Fully general evaluator over a sampled (Schroedinger-picture) trajectory.
inline PhaseResult phase_general(const Trajectory& traj, const QuadratureConfig& config = {}) {
  traj.validate();
  if (traj.size() < 3) {
    throw std::invalid_argument("phase_general: need >= 3 samples for the derivative scheme");
  }
  std::vector<SpectralPair> spectra;
  spectra.reserve(traj.size());
  for (const auto& rho : traj.states) {
    check_density(rho);
    spectra.push_back(eigensystem(rho));
  }
  return phase_from_spectra(traj.times, spectra, config);
}

/// Closed-form quasi-period phase over T = 2 pi / omega.  theta = 0 is the
/// degenerate direction: all spectral data stay real and the phase is zero.
inline PhaseResult phase_closed(const ModelParams& model, Real theta,
                                const QuadratureConfig& config = {}) {
  config.validate();
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw std::invalid_argument("phase_closed: theta must lie in [0, pi]");
  }
  if (theta == 0.0) return PhaseResult{0.0, 0.0, 1.0};

  const Real period = 2.0 * kPi / model.omega;
  const Real h = period / static_cast<Real>(config.steps);
  std::vector<Real> integrand(config.steps + 1);
  for (int k = 0; k <= config.steps; ++k) {
    integrand[k] = cos2_half_theta_t(model, theta, static_cast<Real>(k) * h);
  }

  PhaseResult out;
  out.unwrapped = -model.omega * detail::integrate_uniform(integrand, h, config.scheme);
  out.principal = fold_to_principal(out.unwrapped);

  // Visibility: modulus of sqrt(lambda_+(0) lambda_+(T)) <+(0)|+(T)> along the
  // surviving eigenbranch; exp of the connection integral is a pure phase.
  // A negative coherence factor at T flips the sign of the eigenvector's
  // ground component relative to the t = 0 one.
  const Real c0 = std::sqrt(integrand.front());
  const Real s0 = std::sqrt(std::max(0.0, 1.0 - integrand.front()));
  const Real cT = std::sqrt(integrand.back());
  const Real sT = std::sqrt(std::max(0.0, 1.0 - integrand.back()));
  const Real sign_T = coherence_factor(model, period) < 0.0 ? -1.0 : 1.0;
  const Real lambda_plus_0 = 0.5 * (1.0 + eta(model, theta, 0.0));
  const Real lambda_plus_T = 0.5 * (1.0 + eta(model, theta, period));
  out.visibility = std::sqrt(std::max(0.0, lambda_plus_0 * lambda_plus_T)) *
                   std::abs(s0 * sT + sign_T * c0 * cT);
  return out;
}

}  // namespace gphase
