#pragma once

// Two-level density matrices, Bloch-angle pure states, closed-form spectral
// decomposition with a deterministic gauge, and the interaction/Schroedinger
// picture transform.
//
// Basis convention: component 0 is the excited state |1>, component 1 is the
// ground state |0>, so rho(0,0) is the excited-state population.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gphase {

template <typename Scalar>
using DensityMatrixT = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
template <typename Scalar>
using StateVectorT = Eigen::Matrix<std::complex<Scalar>, 2, 1>;

using Real = double;
using Complex = std::complex<double>;
using DensityMatrix2 = DensityMatrixT<double>;
using StateVector = StateVectorT<double>;

inline constexpr Real kPi = std::numbers::pi_v<Real>;
inline constexpr Real kHermiticityTol = 1e-12;
inline constexpr Real kTraceTol = 1e-12;
inline constexpr Real kDegeneracyTol = 1e-9;
inline constexpr Real kGaugeTieTol = 1e-9;

/// Bloch-sphere angles of a pure qubit state:
/// |psi> = cos(theta/2)|1> + sin(theta/2) e^{i phi}|0>.
struct BlochState {
  Real theta;  // polar angle, [0, pi]
  Real phi;    // azimuthal angle, wrapped into [0, 2pi)

  explicit BlochState(Real theta_, Real phi_ = 0.0) : theta(theta_) {
    if (!(theta_ >= 0.0 && theta_ <= kPi)) {
      throw std::invalid_argument("BlochState: theta must lie in [0, pi]");
    }
    phi = std::fmod(phi_, 2.0 * kPi);
    if (phi < 0.0) phi += 2.0 * kPi;
  }
};

/// |psi><psi| for the Bloch state. Rank one, unit trace by construction.
inline DensityMatrix2 pure_state(const BlochState& b) {
  const Real c = std::cos(0.5 * b.theta);
  const Real s = std::sin(0.5 * b.theta);
  StateVector psi;
  psi << Complex(c, 0.0), std::polar(s, b.phi);
  return psi * psi.adjoint();
}

/// Throws unless rho is Hermitian and unit-trace within the type tolerances.
/// Positivity is deliberately not checked: some evolutions violate it.
template <typename Derived>
void check_density(const Eigen::MatrixBase<Derived>& rho_expr) {
  const DensityMatrix2 rho = rho_expr;
  if (std::abs(rho(1, 0) - std::conj(rho(0, 1))) > kHermiticityTol ||
      std::abs(rho(0, 0).imag()) > kHermiticityTol ||
      std::abs(rho(1, 1).imag()) > kHermiticityTol) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(rho(0, 0).real() + rho(1, 1).real() - 1.0) > kTraceTol) {
    throw std::invalid_argument("density matrix does not have unit trace");
  }
}

template <typename Derived>
bool is_density(const Eigen::MatrixBase<Derived>& rho_expr) {
  try {
    check_density(rho_expr);
  } catch (const std::invalid_argument&) {
    return false;
  }
  return true;
}

/// Eigenvalues (descending) and gauge-fixed eigenvectors of a Hermitian 2x2.
struct SpectralPair {
  Real lambda_plus = 0.0;
  Real lambda_minus = 0.0;
  StateVector vec_plus = StateVector::Zero();
  StateVector vec_minus = StateVector::Zero();
  bool degenerate = false;
};

namespace detail {

// Gauge rule: the largest-magnitude component is made real and nonnegative;
// a magnitude tie (within kGaugeTieTol) pins the first component instead.
inline StateVector fix_gauge(StateVector v) {
  const Real m0 = std::abs(v(0));
  const Real m1 = std::abs(v(1));
  const int pivot = (std::abs(m0 - m1) < kGaugeTieTol) ? 0 : (m0 >= m1 ? 0 : 1);
  const Real mag = std::abs(v(pivot));
  if (mag > 0.0) v *= std::conj(v(pivot)) / mag;
  return v;
}

}  // namespace detail

/// Closed-form (trace/determinant) eigensystem of a Hermitian 2x2 matrix.
template <typename Derived>
SpectralPair eigensystem(const Eigen::MatrixBase<Derived>& rho_expr) {
  const DensityMatrix2 rho = rho_expr;
  const Real a = rho(0, 0).real();
  const Real d = rho(1, 1).real();
  const Complex c = rho(0, 1);
  const Real mean = 0.5 * (a + d);
  const Real disc = std::hypot(0.5 * (a - d), std::abs(c));

  SpectralPair out;
  out.lambda_plus = mean + disc;
  out.lambda_minus = mean - disc;
  out.degenerate = (out.lambda_plus - out.lambda_minus) < kDegeneracyTol;

  // (rho - lambda I) annihilates both candidates; keep the better-conditioned.
  StateVector u, w;
  u << Complex(out.lambda_plus - d, 0.0), std::conj(c);
  w << c, Complex(out.lambda_plus - a, 0.0);
  StateVector vp = (u.squaredNorm() >= w.squaredNorm()) ? u : w;
  const Real n2 = vp.squaredNorm();
  if (n2 < 1e-30) {
    // Near multiple of the identity: any orthonormal pair diagonalizes.
    vp << Complex(1.0, 0.0), Complex(0.0, 0.0);
  } else {
    vp /= std::sqrt(n2);
  }
  StateVector vm;
  vm << -std::conj(vp(1)), std::conj(vp(0));

  out.vec_plus = detail::fix_gauge(vp);
  out.vec_minus = detail::fix_gauge(vm);
  return out;
}

/// Smaller eigenvalue; negative values diagnose positivity violations.
template <typename Derived>
Real min_eigenvalue(const Eigen::MatrixBase<Derived>& rho_expr) {
  const DensityMatrix2 rho = rho_expr;
  const Real a = rho(0, 0).real();
  const Real d = rho(1, 1).real();
  return 0.5 * (a + d) - std::hypot(0.5 * (a - d), std::abs(rho(0, 1)));
}

/// Conjugation by exp(-i H_S t), H_S = (omega/2) sigma_z: diagonal entries are
/// untouched and rho(0,1) picks up e^{-i omega t}.
template <typename Derived>
DensityMatrix2 to_schroedinger(const Eigen::MatrixBase<Derived>& rho_expr,
                               Real omega, Real t) {
  DensityMatrix2 rho = rho_expr;
  const Complex ph = std::polar(1.0, -omega * t);
  rho(0, 1) *= ph;
  rho(1, 0) *= std::conj(ph);
  return rho;
}

enum class Picture { Interaction, Schroedinger };

/// Uniformly sampled density-matrix history, times in units of 1/omega.
struct Trajectory {
  std::vector<Real> times;
  std::vector<DensityMatrix2> states;
  Picture picture = Picture::Schroedinger;

  std::size_t size() const { return times.size(); }
  Real t_end() const { return times.empty() ? 0.0 : times.back(); }

  void validate() const {
    if (times.size() < 2 || times.size() != states.size()) {
      throw std::invalid_argument("Trajectory: need >= 2 samples and matching state count");
    }
    if (times.front() != 0.0) {
      throw std::invalid_argument("Trajectory: times must start at 0");
    }
    const Real h = (times.back() - times.front()) / static_cast<Real>(times.size() - 1);
    // Uniformity tolerance scales with the span so that t_k = k*h grids
    // built in floating point pass.
    const Real tol = 1e-12 * std::max(std::abs(times.back()), 1.0);
    for (std::size_t k = 1; k < times.size(); ++k) {
      const Real dt = times[k] - times[k - 1];
      if (!(dt > 0.0) || std::abs(dt - h) > tol) {
        throw std::invalid_argument("Trajectory: times must be uniform and increasing");
      }
    }
  }
};

/// Applies the interaction->Schroedinger transform sample by sample.
inline Trajectory to_schroedinger(const Trajectory& traj, Real omega) {
  if (traj.picture != Picture::Interaction) {
    throw std::invalid_argument("to_schroedinger: trajectory is not in the interaction picture");
  }
  Trajectory out;
  out.times = traj.times;
  out.picture = Picture::Schroedinger;
  out.states.reserve(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out.states.push_back(to_schroedinger(traj.states[k], omega, traj.times[k]));
  }
  return out;
}

}  // namespace gphase
