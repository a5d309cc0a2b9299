#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gphase/phase.hpp"
#include "gphase/sweep.hpp"

#include <cmath>
#include <random>

using namespace gphase;

namespace {

constexpr Real kPeriod = 2.0 * kPi;  // omega = 1

std::vector<SpectralPair> spectra_of(const Trajectory& traj) {
  std::vector<SpectralPair> out;
  out.reserve(traj.size());
  for (const auto& rho : traj.states) out.push_back(eigensystem(rho));
  return out;
}

}  // namespace

TEST_CASE("fold_to_principal lands in (-pi, pi]") {
  CHECK(fold_to_principal(0.0) == 0.0);
  CHECK(fold_to_principal(kPi) == doctest::Approx(kPi));
  CHECK(fold_to_principal(-kPi) == doctest::Approx(kPi));
  CHECK(fold_to_principal(-1.5 * kPi) == doctest::Approx(0.5 * kPi));
  CHECK(fold_to_principal(-2.0 * kPi) == doctest::Approx(0.0));
  CHECK(fold_to_principal(7.0 * kPi) == doctest::Approx(kPi));
  for (const Real x : {-9.7, -3.2, 0.4, 5.9, 123.456}) {
    const Real p = fold_to_principal(x);
    CHECK(p > -kPi);
    CHECK(p <= kPi);
    CHECK(std::abs(std::remainder(p - x, 2.0 * kPi)) < 1e-12);
  }
}

TEST_CASE("quadrature config validation") {
  QuadratureConfig odd;
  odd.steps = 2001;
  CHECK_THROWS_AS(odd.validate(), std::invalid_argument);
  odd.scheme = QuadratureScheme::Trapezoid;
  CHECK_NOTHROW(odd.validate());
  QuadratureConfig tiny;
  tiny.steps = 1;
  CHECK_THROWS_AS(tiny.validate(), std::invalid_argument);
}

TEST_CASE("gauge_align removes a pure phase") {
  StateVector v;
  v << Complex(0.6, 0.0), Complex(0.0, 0.8);
  const StateVector same = gauge_align(v, v);
  CHECK((same - v).norm() < 1e-15);

  const StateVector rotated = v * std::polar(1.0, kPi / 7.0);
  const StateVector back = gauge_align(v, rotated);
  CHECK((back - v).norm() < 1e-14);
}

TEST_CASE("gauge_align general form and properties") {
  const Real alpha = 0.9, beta = 0.7, delta = -1.3;
  StateVector prev, cur;
  prev << Complex(1.0, 0.0), Complex(0.0, 0.0);
  cur << std::polar(std::cos(beta), alpha), std::polar(std::sin(beta), delta);
  const StateVector aligned = gauge_align(prev, cur);
  CHECK(std::abs(aligned(0) - Complex(std::cos(beta), 0.0)) < 1e-14);
  CHECK(std::abs(aligned(1) - std::polar(std::sin(beta), delta - alpha)) < 1e-14);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<Real> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    StateVector a, b;
    a << Complex(u(rng), u(rng)), Complex(u(rng), u(rng));
    b << Complex(u(rng), u(rng)), Complex(u(rng), u(rng));
    if (a.norm() < 1e-3 || b.norm() < 1e-3) continue;
    a.normalize();
    b.normalize();
    if (std::abs(a.dot(b)) < 1e-6) continue;
    const StateVector al = gauge_align(a, b);
    const Complex overlap = a.dot(al);
    CHECK(overlap.imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(overlap.real() > 0.0);
    CHECK(al.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("gauge_align rejects orthogonal vectors") {
  StateVector e0, e1;
  e0 << Complex(1, 0), Complex(0, 0);
  e1 << Complex(0, 0), Complex(1, 0);
  CHECK_THROWS_AS((void)gauge_align(e0, e1), AlignmentError);
}

TEST_CASE("phase_closed: theta = 0 short-circuit is exact for every model") {
  for (const ModelParams& model : figure_parameter_sets()) {
    const PhaseResult r = phase_closed(model, 0.0);
    CHECK(r.principal == 0.0);
    CHECK(r.unwrapped == 0.0);
    CHECK(r.visibility == 1.0);
  }
}

TEST_CASE("phase_closed rejects theta outside [0, pi]") {
  CHECK_THROWS_AS((void)phase_closed(markovian(1.0), -0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)phase_closed(markovian(1.0), kPi + 1e-6), std::invalid_argument);
}

TEST_CASE("phase_closed unitary limit reproduces the solid-angle value") {
  // gamma -> 0: theta_t = pi - theta stays constant and the quasi-period
  // integral gives -2 pi sin^2(theta/2) = -pi (1 - cos theta)
  const PhaseResult r = phase_closed(markovian(1e-12), kPi / 3.0);
  CHECK(std::abs(r.principal - (-0.5 * kPi)) < 1e-6);
  CHECK(std::abs(r.unwrapped - (-0.5 * kPi)) < 1e-6);
  CHECK(r.visibility == doctest::Approx(1.0).epsilon(1e-9));

  // circular distance: theta = pi/2 lands exactly on the +-pi fold boundary
  auto angular_gap = [](Real a, Real b) { return std::abs(std::remainder(a - b, 2.0 * kPi)); };
  for (const Real theta : {kPi / 6.0, kPi / 3.0, 0.5 * kPi, 2.0 * kPi / 3.0}) {
    const Real expected = fold_to_principal(-kPi * (1.0 - std::cos(theta)));
    CHECK(angular_gap(phase_closed(markovian(1e-12), theta).principal, expected) < 1e-5);
    CHECK(angular_gap(phase_closed(correlated(1e-12), theta).principal, expected) < 1e-5);
    CHECK(angular_gap(phase_closed(memory_kernel(1e-12, 1.0), theta).principal, expected) < 1e-5);
    CHECK(angular_gap(phase_closed(post_markovian(1e-12, 1.0), theta).principal, expected) < 1e-5);
  }
}

TEST_CASE("phase_closed tends to zero as theta approaches pi") {
  for (const ModelParams& model : figure_parameter_sets()) {
    CHECK(std::abs(phase_closed(model, 0.999 * kPi).principal) < 0.01 * kPi);
  }
}

TEST_CASE("phase_closed principal is the folded unwrapped value") {
  for (const ModelParams& model : figure_parameter_sets()) {
    for (const Real theta : {0.1 * kPi, 0.5 * kPi, 0.9 * kPi}) {
      const PhaseResult r = phase_closed(model, theta);
      CHECK(r.principal == doctest::Approx(fold_to_principal(r.unwrapped)).epsilon(1e-14));
      CHECK(r.principal > -kPi);
      CHECK(r.principal <= kPi);
    }
  }
}

TEST_CASE("phase_closed quadrature converges and schemes agree") {
  QuadratureConfig fine;
  fine.steps = 4000;
  QuadratureConfig trap;
  trap.scheme = QuadratureScheme::Trapezoid;
  trap.steps = 40000;
  for (const ModelParams& model : figure_parameter_sets()) {
    for (const Real theta : {0.05 * kPi, 0.5 * kPi, 0.95 * kPi}) {
      const Real base = phase_closed(model, theta).principal;
      CHECK(std::abs(phase_closed(model, theta, fine).principal - base) < 1e-8);
      CHECK(std::abs(phase_closed(model, theta, trap).principal - base) < 1e-6);
    }
  }
}

TEST_CASE("phase_closed visibility stays within [0, 1]") {
  for (const ModelParams& model : figure_parameter_sets()) {
    for (int k = 1; k <= 99; ++k) {
      const Real v = phase_closed(model, 0.01 * k * kPi).visibility;
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("phase_general on a constant trajectory") {
  Trajectory traj;
  traj.picture = Picture::Schroedinger;
  const DensityMatrix2 rho = pure_state(BlochState(0.4 * kPi, 0.9));
  for (int k = 0; k <= 100; ++k) {
    traj.times.push_back(0.01 * k);
    traj.states.push_back(rho);
  }
  const PhaseResult r = phase_general(traj);
  CHECK(std::abs(r.principal) < 1e-12);
  CHECK(r.visibility == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phase_general agrees with phase_closed on a markovian trajectory") {
  const ModelParams model = markovian(1.0);
  const Trajectory traj = sample_evolution(model, BlochState(0.5 * kPi, 0.0), kPeriod, 20001);
  const PhaseResult general = phase_general(traj);
  const PhaseResult closed = phase_closed(model, 0.5 * kPi);
  CHECK(std::abs(general.principal - closed.principal) < 1e-6);
  CHECK(std::abs(general.visibility - closed.visibility) < 1e-6);
}

TEST_CASE("phase_general unitary trajectory gives -pi(1 - cos theta)") {
  const Trajectory traj = sample_evolution(markovian(0.0), BlochState(kPi / 3.0), kPeriod, 20001);
  const PhaseResult r = phase_general(traj);
  CHECK(std::abs(r.principal - (-0.5 * kPi)) < 1e-6);
  CHECK(std::abs(r.visibility - 1.0) < 1e-9);
}

TEST_CASE("phase_general matches phase_closed across models and thetas") {
  for (const ModelParams& model : figure_parameter_sets()) {
    for (const Real theta : {0.05 * kPi, 0.35 * kPi, 0.7 * kPi, 0.95 * kPi}) {
      const Trajectory traj = sample_evolution(model, BlochState(theta, 0.0), kPeriod, 20001);
      const Real delta =
          std::abs(phase_general(traj).principal - phase_closed(model, theta).principal);
      CHECK(delta < 1e-6);
    }
  }
}

TEST_CASE("phase_general principal and unwrapped agree mod 2pi") {
  const ModelParams model = memory_kernel(1.0, 1.0);
  const Trajectory traj = sample_evolution(model, BlochState(0.3 * kPi, 0.0), kPeriod, 8001);
  const PhaseResult r = phase_general(traj);
  CHECK(std::abs(std::remainder(r.principal - r.unwrapped, 2.0 * kPi)) < 1e-9);
}

TEST_CASE("gauge invariance under smooth random phase profiles") {
  const ModelParams model = markovian(1.0);
  const Trajectory traj = sample_evolution(model, BlochState(0.5 * kPi, 0.2), kPeriod, 4001);
  const std::vector<SpectralPair> base = spectra_of(traj);
  const PhaseResult reference = phase_from_spectra(traj.times, base);

  std::mt19937_64 rng(20240229);
  std::uniform_real_distribution<Real> amp(-2.0, 2.0);
  for (int trial = 0; trial < 8; ++trial) {
    const Real a = amp(rng), b = amp(rng), c = amp(rng);
    std::vector<SpectralPair> perturbed = base;
    for (std::size_t k = 0; k < perturbed.size(); ++k) {
      const Real t = traj.times[k];
      const Real alpha =
          a * std::sin(2.0 * kPi * t / kPeriod) + b * std::cos(4.0 * kPi * t / kPeriod) +
          c * t / kPeriod;
      perturbed[k].vec_plus *= std::polar(1.0, alpha);
      perturbed[k].vec_minus *= std::polar(1.0, -0.5 * alpha);
    }
    const PhaseResult r = phase_from_spectra(traj.times, perturbed);
    CHECK(std::abs(r.principal - reference.principal) < 1e-8);
    CHECK(std::abs(r.visibility - reference.visibility) < 1e-8);
  }
}

TEST_CASE("the aligned connection is purely imaginary up to discretization") {
  const ModelParams model = markovian(1.0);
  const Trajectory traj = sample_evolution(model, BlochState(0.5 * kPi, 0.0), kPeriod, 20001);
  const std::vector<SpectralPair> spectra = spectra_of(traj);
  std::vector<StateVector> raw(spectra.size());
  for (std::size_t k = 0; k < spectra.size(); ++k) raw[k] = spectra[k].vec_plus;
  const std::vector<StateVector> aligned = detail::aligned_branch(traj.times, raw);
  const std::vector<Complex> conn = detail::connection_samples(traj.times, aligned);
  const Real h = traj.times[1] - traj.times[0];
  for (std::size_t k = 1; k + 1 < conn.size(); ++k) {
    const StateVector der = ((aligned[k + 1] - aligned[k - 1]) / (2.0 * h)).eval();
    CHECK(std::abs(conn[k].real()) <= 1e-6 * der.norm() + 1e-15);
  }
}

TEST_CASE("degenerate segments are rejected with their time window") {
  // a maximally mixed trajectory is degenerate at every sample
  Trajectory traj;
  traj.picture = Picture::Schroedinger;
  DensityMatrix2 mixed;
  mixed << Complex(0.5, 0), Complex(0, 0), Complex(0, 0), Complex(0.5, 0);
  for (int k = 0; k <= 50; ++k) {
    traj.times.push_back(0.1 * k);
    traj.states.push_back(mixed);
  }
  CHECK_THROWS_AS((void)phase_general(traj), DegeneracyError);
  try {
    (void)phase_general(traj);
  } catch (const DegeneracyError& e) {
    CHECK(e.t_begin == doctest::Approx(0.0));
    CHECK(e.t_end == doctest::Approx(5.0));
  }
}

TEST_CASE("theta = 0 markovian trajectory crossing the spectral swap is rejected") {
  // rho(t) stays diagonal; the eigenbranches swap at gamma2 t = ln 2 and the
  // branch vectors jump orthogonally, which alignment cannot follow.
  const Trajectory traj = sample_evolution(markovian(1.0), BlochState(0.0), kPeriod, 2001);
  CHECK_THROWS_AS((void)phase_general(traj), DegeneracyError);
}

TEST_CASE("phase_general input validation") {
  Trajectory traj;
  traj.picture = Picture::Schroedinger;
  traj.times = {0.0, 0.1};
  traj.states.assign(2, pure_state(BlochState(0.3)));
  CHECK_THROWS_AS((void)phase_general(traj), std::invalid_argument);

  QuadratureConfig bad;
  bad.steps = 3;
  const Trajectory ok = sample_evolution(markovian(1.0), BlochState(0.3), 1.0, 11);
  CHECK_THROWS_AS((void)phase_general(ok, bad), std::invalid_argument);
}

TEST_CASE("multi-period integration extends the quasi-period result") {
  // two quasi-periods: the unwrapped closed-path integral keeps growing
  const ModelParams model = markovian(0.2);
  QuadratureConfig config;
  const Real one = phase_closed(model, 0.4 * kPi, config).unwrapped;
  const Trajectory traj =
      sample_evolution(model, BlochState(0.4 * kPi, 0.0), 2.0 * kPeriod, 40001);
  const PhaseResult r = phase_general(traj);
  // the general path reports the folded holonomy; it must stay consistent
  // with its own principal
  CHECK(std::abs(std::remainder(r.principal - r.unwrapped, 2.0 * kPi)) < 1e-9);
  CHECK(std::abs(one) > 0.0);
}
