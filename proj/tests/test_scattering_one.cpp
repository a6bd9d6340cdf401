#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "giantwg/scattering_one.hpp"

using namespace giantwg;

namespace {
constexpr double pi = 3.14159265358979323846;

SystemParams resonant_params(double phi, double d, double k) {
  // place theta_R(k) at pi - phi
  SystemParams p;
  p.phi = phi;
  p.d = d;
  p.phase_k0d = normalize_angle(pi - phi - k * d);
  return p;
}
}  // namespace

TEST_SUITE("scattering_one") {

TEST_CASE("self-energy closed forms") {
  // cos(phi) = 0 leaves the bare two-point decay
  SystemParams p;
  p.phi = pi / 2;
  p.d = 1.3;
  p.phase_k0d = 0.7;
  for (double k : {-2.0, 0.0, 0.9}) {
    CHECK(std::abs(self_energy(p, k) - complexd(0.0, -2.0)) < 1e-14);
  }

  // constructive case
  p.phi = 0.0;
  p.d = 0.0;
  p.phase_k0d = 0.0;
  CHECK(std::abs(self_energy(p, 0.0) - complexd(0.0, -4.0)) < 1e-14);

  // near-dark point quoted to two significant figures
  const SystemParams q = resonant_params(0.015 * pi, 0.01, 0.09);
  const complexd s = self_energy(q, 0.09);
  CHECK(s.real() == doctest::Approx(0.094).epsilon(6e-3));
  CHECK(s.imag() == doctest::Approx(-0.0044).epsilon(0.1));
  // and exactly against the defining expression
  const double theta = mode_phases(q, Direction::R, 0.09).theta;
  const complexd direct =
      complexd(0.0, -2.0) * (1.0 + std::cos(q.phi) * std::exp(complexd(0.0, theta)));
  CHECK(std::abs(s - direct) < 1e-15);
}

TEST_CASE("green function and the dark-mode singularity") {
  SystemParams p;
  p.phi = pi / 2;
  p.d = 0.4;
  p.phase_k0d = 1.1;
  CHECK(std::abs(green(p, 0.0) - complexd(0.0, -0.5)) < 1e-14);

  // Sigma(0) = 0 at phi = 0, theta = pi: bound state in the continuum
  SystemParams bic;
  bic.phi = 0.0;
  bic.d = 1.0;
  bic.phase_k0d = pi;
  CHECK_THROWS_AS(green(bic, 0.0), SingularGreenFunction);
  try {
    green(bic, 0.0);
  } catch (const Error& e) {
    CHECK(e.code == "singular_green");
  }
  // nearby energies are fine
  CHECK_NOTHROW(green(bic, 0.05));
}

TEST_CASE("decoupled point transmits perfectly") {
  SystemParams p;
  p.phi = pi;
  p.d = 1.0;
  p.phase_k0d = -0.37;  // theta_R(0.37) = 0, eta_R = e^{i pi} + 1 = 0
  const ScatterAmplitudes a = scatter_single(p, 0.37, Direction::R);
  CHECK(std::abs(a.t - 1.0) < 1e-14);
  CHECK(std::abs(a.r) < 1e-14);
}

TEST_CASE("unitarity and reciprocity over random draws") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> uph(-pi, pi), ud(0.0, 3.0), uk(-8.0, 8.0);
  int kept = 0;
  while (kept < 1000) {
    SystemParams p;
    p.phi = uph(rng);
    p.d = ud(rng);
    p.phase_k0d = uph(rng);
    const double k = uk(rng);
    ScatterAmplitudes ar, al;
    try {
      ar = scatter_single(p, k, Direction::R);
      al = scatter_single(p, k, Direction::L);
    } catch (const SingularGreenFunction&) {
      continue;
    }
    ++kept;
    CHECK(std::abs(std::norm(ar.r) + std::norm(ar.t) - 1.0) < 1e-10);
    CHECK(std::abs(std::norm(al.r) + std::norm(al.t) - 1.0) < 1e-10);
    CHECK(std::abs(std::abs(ar.r) - std::abs(al.r)) < 1e-12);
    CHECK(std::abs(std::abs(ar.t) - std::abs(al.t)) < 1e-10);
  }
}

TEST_CASE("chiral phase gives unit transmission") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> uk(-5.0, 5.0), ud(0.0, 3.0), uph(-pi, pi);
  std::uniform_int_distribution<int> un(-1, 1);
  for (int i = 0; i < 200; ++i) {
    SystemParams p;
    p.d = ud(rng);
    p.phase_k0d = uph(rng);
    const double ki = uk(rng);
    p.phi = chiral_phase(ki, p, un(rng));
    const ScatterAmplitudes a = scatter_single(p, ki, Direction::R);
    CHECK(std::abs(a.r) < 1e-12);
    CHECK(std::abs(std::abs(a.t) - 1.0) < 1e-12);
  }
}

TEST_CASE("direction flip against phase flip") {
  // t is invariant under (L, phi) -> (R, -phi); r picks up exp(-2 i theta_R).
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uph(-pi, pi), ud(0.0, 3.0), uk(-6.0, 6.0);
  for (int i = 0; i < 300; ++i) {
    SystemParams p;
    p.phi = uph(rng);
    p.d = ud(rng);
    p.phase_k0d = uph(rng);
    SystemParams pm = p;
    pm.phi = -p.phi;
    const double k = uk(rng);
    ScatterAmplitudes al, ar;
    try {
      al = scatter_single(p, k, Direction::L);
      ar = scatter_single(pm, k, Direction::R);
    } catch (const SingularGreenFunction&) {
      continue;
    }
    CHECK(std::abs(al.t - ar.t) < 1e-12);
    CHECK(std::abs(al.sigma - ar.sigma) < 1e-13);
    CHECK(std::abs(std::abs(al.r) - std::abs(ar.r)) < 1e-12);
    const double theta = mode_phases(p, Direction::R, k).theta;
    CHECK(std::abs(al.r - std::exp(complexd(0.0, -2.0 * theta)) * ar.r) < 1e-12);
  }
}

TEST_CASE("amplitudes carry the self-energy they were built from") {
  const SystemParams p = resonant_params(0.3, 1.2, 0.5);
  const ScatterAmplitudes a = scatter_single(p, 0.5, Direction::R);
  CHECK(std::abs(a.sigma - self_energy(p, 0.5)) < 1e-15);
  CHECK(std::abs(a.green - green(p, 0.5)) < 1e-15);
  CHECK(std::abs(a.green * (0.5 - a.sigma) - 1.0) < 1e-13);
}

}  // TEST_SUITE
