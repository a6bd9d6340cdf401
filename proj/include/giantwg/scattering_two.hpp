#pragma once
#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "giantwg/scattering_one.hpp"

namespace giantwg {

struct SeriesDiagnostics {
  int orders_used = 0;
  double truncation_error_estimate = 0.0;
  bool converged = false;
  std::string backend;  // "series", "quadrature" or "fft"
};

// Coefficient of the l-sum in the pair-propagator expansion.
complexd c_mnl(const SystemParams& params, double k, int m, int n, int l,
               const NumericalControls& controls = {});

// One term of the pair-propagator series over coupling-point round trips.
complexd f_mn(const SystemParams& params, double k, int m, int n,
              const NumericalControls& controls = {});

struct ConvolutionResult {
  complexd value;
  SeriesDiagnostics diag;
};

// integral dw G(w) G(2*k_bar - w) summed as round-trip shells.
ConvolutionResult green_convolution(const SystemParams& params, double k_bar,
                                    const NumericalControls& controls = {});

// Same integral by segmented adaptive quadrature; independent of the series.
complexd green_convolution_quadrature(const SystemParams& params, double k_bar,
                                      const NumericalControls& controls = {});

enum class ConvBackend { Auto, Series, Quadrature };

struct TMatrixResult {
  complexd T_S;
  SeriesDiagnostics diag;
};

// Nonlinear pair vertex T_S = U / (1 - i U/(2*pi) * conv(k_bar)).
TMatrixResult t_matrix(const SystemParams& params, double k1, double k2,
                       const NumericalControls& controls = {},
                       ConvBackend backend = ConvBackend::Auto);

// Structured pair output: elastic coefficient plus the inelastic density on
// the energy-conserving line p2 = k1 + k2 - p1.
struct TwoPhotonAmplitude {
  complexd elastic_coeff;                        // 2 t(k1) t(k2)
  std::function<complexd(double)> fluorescence;  // p1 -> density
  double k1 = 0.0;
  double k2 = 0.0;
};

TwoPhotonAmplitude two_photon_s(const SystemParams& params, double k1,
                                double k2,
                                const NumericalControls& controls = {});

// Position-space pair amplitude; series route with automatic quadrature/FFT
// fallback outside the series radius. diag_out, when given, reports the
// backend actually used.
complexd wavefunction_t(const SystemParams& params, double k1, double k2,
                        double X1, double X2,
                        const NumericalControls& controls = {},
                        SeriesDiagnostics* diag_out = nullptr);

struct WavefunctionGrid {
  Eigen::MatrixXcd values;       // [i][j] = w(X_grid[i], X_grid[j])
  double error_estimate = 0.0;   // from window/resolution refinement
};

// FFT route: numerically Fourier transforms the inelastic density along the
// energy-conserving line and adds the elastic part analytically.
WavefunctionGrid wavefunction_fft(const SystemParams& params, double k1,
                                  double k2,
                                  const std::vector<double>& X_grid,
                                  const NumericalControls& controls = {});

// |w(tau, 0)|^2 / |w_inf|^2 for equal input momenta k_i; tau is the position
// offset at unit group velocity.
double g2_transmitted(const SystemParams& params, double k_i, double tau,
                      const NumericalControls& controls = {},
                      SeriesDiagnostics* diag_out = nullptr);

}  // namespace giantwg
