#pragma once
#include <Eigen/Dense>
#include <vector>

#include "giantwg/model.hpp"

namespace giantwg {

// Truncated Fock-space lowering operator, (cutoff+1) x (cutoff+1).
Eigen::MatrixXcd annihilation(int cutoff);

// Real nonnegative roots of the mean-field photon-number equation, ascending.
std::vector<double> semiclassical_branches(const SystemParams& params,
                                           const DriveConfig& drive);

// Cutoff heuristic: three times the highest mean-field branch plus headroom,
// clamped to [20, 60].
int default_fock_cutoff(const SystemParams& params, const DriveConfig& drive);

struct FockOperator {
  Eigen::MatrixXcd m;
  int cutoff = 0;
};

// Rotating-frame cavity Hamiltonian with the drive folded in.
FockOperator build_hamiltonian(const SystemParams& params, const DriveConfig& drive,
                               const NumericalControls& controls = {});

struct LiouvillianMatrix {
  Eigen::MatrixXcd m;  // acts on column-major vectorized density matrices
  int cutoff = 0;
};

LiouvillianMatrix build_liouvillian(const SystemParams& params,
                                    const DriveConfig& drive,
                                    const NumericalControls& controls = {});

struct SteadyState {
  Eigen::MatrixXcd rho;
  double residual = 0.0;        // max norm of L applied to the result
  double top_population = 0.0;  // occupation of the highest Fock level
  int cutoff = 0;
};

// Null vector of the Liouvillian by direct elimination with a trace row.
SteadyState steady_state(const LiouvillianMatrix& liouville);

// Same fixed point reached by implicit time stepping from vacuum; kept as an
// independent route for cross checks.
SteadyState steady_state_ode(const LiouvillianMatrix& liouville,
                             double t_final = 1e6,
                             const NumericalControls& controls = {});

struct CavityObservables {
  double n = 0.0;
  double g2 = 0.0;
  complexd b_mean;
};

CavityObservables cavity_observables(const Eigen::MatrixXcd& rho);

struct SpectrumResult {
  std::vector<complexd> eigenvalues;  // sorted by descending real part
  double gap = 0.0;                   // -Re of the slowest nonstationary mode
};

SpectrumResult liouvillian_spectrum(const LiouvillianMatrix& liouville,
                                    int count = 0);

// e^{L tau} applied to a vectorized operator; adaptive integration for short
// times, full spectral decomposition for long ones.
Eigen::MatrixXcd evolve_operator(const LiouvillianMatrix& liouville,
                                 const Eigen::MatrixXcd& op0, double tau,
                                 const NumericalControls& controls = {});

// Lab-frame steady-state correlator <b^dag(tau) b(0)>.
complexd two_time_correlation(const SystemParams& params, const DriveConfig& drive,
                              double tau, const NumericalControls& controls = {});

// Photon density emitted into the counterpropagating channel, for each
// separation in d_values with all other parameters held fixed.
std::vector<double> reflected_density(const SystemParams& params,
                                      const DriveConfig& drive,
                                      const std::vector<double>& d_values,
                                      const NumericalControls& controls = {});

// Equal-time degree of second-order coherence of the transmitted output
// field, assembled from the two retarded coupling-point channels.
double transmitted_g2_output(const SystemParams& params, const DriveConfig& drive,
                             double tau = 0.0,
                             const NumericalControls& controls = {});

}  // namespace giantwg
