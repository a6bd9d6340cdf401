#include "giantwg/model.hpp"

#include <cmath>
#include <numbers>

namespace giantwg {

namespace {
constexpr double kPi = std::numbers::pi;
}

double normalize_angle(double a) {
  double r = std::fmod(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  if (r > kPi) r -= 2.0 * kPi;
  return r;
}

double SystemParams::v0() const { return std::sqrt(gamma / (2.0 * kPi)); }

void SystemParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ValidationError("gamma: must be positive and finite");
  if (!std::isfinite(U)) throw ValidationError("U: must be finite");
  if (!(d >= 0.0) || !std::isfinite(d))
    throw ValidationError("d: must be nonnegative and finite");
  if (!std::isfinite(phi)) throw ValidationError("phi: must be finite");
  if (!std::isfinite(phase_k0d))
    throw ValidationError("phase_k0d: must be finite");
}

void DriveConfig::validate() const {
  if (!(omega0 >= 0.0) || !std::isfinite(omega0))
    throw ValidationError("omega0: must be nonnegative and finite");
  if (!std::isfinite(k_i)) throw ValidationError("k_i: must be finite");
}

void NumericalControls::validate() const {
  if (!(series_rel_tol > 0.0))
    throw ValidationError("series_rel_tol: must be positive");
  if (series_max_order < 1)
    throw ValidationError("series_max_order: must be at least 1");
  if (fock_cutoff != 0 && fock_cutoff < 2)
    throw ValidationError("fock_cutoff: must be >= 2 (or 0 for automatic)");
  if (!(quadrature_abs_tol > 0.0))
    throw ValidationError("quadrature_abs_tol: must be positive");
  if (!(ode_rel_tol > 0.0))
    throw ValidationError("ode_rel_tol: must be positive");
}

ModePhases mode_phases(const SystemParams& params, Direction dir, double k) {
  const double theta =
      normalize_angle(direction_sign(dir) * params.phase_k0d + k * params.d);
  const complexd eta =
      std::exp(complexd(0.0, params.phi)) + std::exp(complexd(0.0, theta));
  return {theta, eta, params.v0() * eta};
}

double chiral_phase(double k_i, const SystemParams& params, int n) {
  return normalize_angle((2.0 * n + 1.0) * kPi -
                         (params.phase_k0d + k_i * params.d));
}

double effective_coupling(const SystemParams& params, double k) {
  const double arg = 1.0 + std::cos(params.phi) *
                               std::cos(params.phase_k0d + k * params.d);
  return 2.0 * params.v0() * std::sqrt(std::max(arg, 0.0));
}

}  // namespace giantwg
