#include "giantwg/scattering_one.hpp"

#include <cmath>

namespace giantwg {

complexd self_energy(const SystemParams& params, double k) {
  const double theta = mode_phases(params, Direction::R, k).theta;
  return complexd(0.0, -2.0 * params.gamma) *
         (1.0 + std::cos(params.phi) * std::exp(complexd(0.0, theta)));
}

complexd green(const SystemParams& params, double k) {
  const complexd den = k - self_energy(params, k);
  if (std::abs(den) < 1e-12 * params.gamma)
    throw SingularGreenFunction(
        "bound state in the continuum: |k - Sigma(k)| < 1e-12*gamma");
  return 1.0 / den;
}

ScatterAmplitudes scatter_single(const SystemParams& params, double k,
                                 Direction input) {
  const complexd sigma = self_energy(params, k);
  const complexd G = green(params, k);
  const complexd eta_r = mode_phases(params, Direction::R, k).eta;
  const complexd eta_l = mode_phases(params, Direction::L, -k).eta;
  const complexd ig = complexd(0.0, params.gamma);
  ScatterAmplitudes out;
  out.sigma = sigma;
  out.green = G;
  out.direction = input;
  if (input == Direction::R) {
    out.t = 1.0 - ig * std::norm(eta_r) * G;
    out.r = -ig * std::conj(eta_l) * G * eta_r;
  } else {
    out.t = 1.0 - ig * std::norm(eta_l) * G;
    out.r = -ig * std::conj(eta_r) * G * eta_l;
  }
  return out;
}

}  // namespace giantwg
