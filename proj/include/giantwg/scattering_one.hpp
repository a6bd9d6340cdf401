#pragma once
#include "giantwg/model.hpp"

namespace giantwg {

// Monochromatic single-photon response at one energy.
struct ScatterAmplitudes {
  complexd r;       // reflection amplitude
  complexd t;       // transmission amplitude
  complexd sigma;   // self-energy at the photon energy
  complexd green;   // cavity propagator 1/(k - sigma)
  Direction direction;
};

// Sigma(k) = -i*2*gamma*(1 + cos(phi)*exp(i*theta_Rk)).
complexd self_energy(const SystemParams& params, double k);

// 1/(k - Sigma(k)); throws SingularGreenFunction within 1e-12*gamma of a
// bound state in the continuum.
complexd green(const SystemParams& params, double k);

ScatterAmplitudes scatter_single(const SystemParams& params, double k,
                                 Direction input);

}  // namespace giantwg
