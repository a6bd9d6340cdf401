#pragma once
// Shared numerical helpers across backend translation units. Not installed.
#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "giantwg/model.hpp"

namespace giantwg::detail {

inline constexpr double kPi = 3.14159265358979323846;

// Convergence rate of the round-trip shell series: 4*|q|^2 with
// q = gamma*cos(phi)/(k_bar + 2i*gamma). Values >= 1 diverge.
double shell_series_rate(const SystemParams& params, double k_bar);

// integral dp [eta factors] G(p) G(2*k_bar - p) over the real line by
// segmented Gauss-Kronrod with breakpoints at the propagator comb peaks and
// 1/p tail transforms. with_eta multiplies conj(eta_R(p)) conj(eta_R(2k_bar-p)).
complexd pair_propagator_integral(const SystemParams& params, double k_bar,
                                  double abs_tol, bool with_eta);

// One row of the position-space correlated amplitude by FFT:
// F(X) = (1/pi) * integral dp e^{ipX} e^{i(2k_bar-p)X2} etac(p) etac(2k_bar-p)
//        G(p) G(2k_bar-p),
// sampled on the FFT output grid; query() interpolates linearly.
struct FtRow {
  double dX = 0.0;
  long n = 0;
  std::vector<complexd> values;  // index m corresponds to X = (m - n/2)*dX
  complexd query(double X) const;
};

FtRow ft_fft_row(const SystemParams& params, double k_bar, double X2,
                 double dp, long npoints);

// Resolution/window requirements for the FFT route.
double narrowest_comb_width(const SystemParams& params);

// e^{A tau} v through the full eigendecomposition of A. Used for evolution
// times where step-by-step integration would be slower than one dense solve.
Eigen::VectorXcd spectral_propagate(const Eigen::MatrixXcd& a,
                                    const Eigen::VectorXcd& v, double tau);

}  // namespace giantwg::detail
