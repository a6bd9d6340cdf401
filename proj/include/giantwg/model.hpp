#pragma once
#include <complex>

#include "giantwg/errors.hpp"

namespace giantwg {

using complexd = std::complex<double>;

enum class Direction { R, L };

inline constexpr double direction_sign(Direction dir) {
  return dir == Direction::R ? 1.0 : -1.0;
}

// Map an angle to the canonical branch (-pi, pi].
double normalize_angle(double a);

// Physical constants of the cavity-waveguide system. All frequencies are in
// units of gamma and lengths in 1/gamma; k0 enters only through k0*d, which
// is stored directly as phase_k0d to avoid carrying the optically large k0.
struct SystemParams {
  double gamma = 1.0;      // waveguide-induced decay unit, 2*pi*V0^2
  double U = 0.0;          // Kerr nonlinearity
  double phi = 0.0;        // coupling phase, canonical branch (-pi, pi]
  double d = 0.0;          // coupling-point separation
  double phase_k0d = 0.0;  // k0*d mod 2*pi

  double v0() const;       // single-point coupling, sqrt(gamma / (2*pi))
  void validate() const;   // throws ValidationError naming the field
};

struct DriveConfig {
  Direction direction = Direction::R;
  double k_i = 0.0;     // drive momentum relative to k0
  double omega0 = 0.0;  // bare Rabi strength
  void validate() const;
};

struct NumericalControls {
  double series_rel_tol = 1e-10;
  int series_max_order = 200;  // cap on m+n
  int fock_cutoff = 0;         // 0 selects the semiclassical rule
  double quadrature_abs_tol = 1e-10;
  double ode_rel_tol = 1e-10;
  void validate() const;
};

struct ModePhases {
  double theta;   // propagation phase (sigma*k0 + k)*d, canonical branch
  complexd eta;   // exp(i*phi) + exp(i*theta)
  complexd V;     // V0 * eta
};

ModePhases mode_phases(const SystemParams& params, Direction dir, double k);

// Coupling phase that closes the left-moving emission channel at drive
// momentum k_i: phi = (2n+1)*pi - (k0 + k_i)*d, canonical branch.
double chiral_phase(double k_i, const SystemParams& params, int n);

// Mode-basis coupling strength 2*V0*sqrt(1 + cos(phi)*cos((k0+k)*d)).
double effective_coupling(const SystemParams& params, double k);

}  // namespace giantwg
