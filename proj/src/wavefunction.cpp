#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <fftw3.h>

#include "giantwg/errors.hpp"
#include "giantwg/scattering_one.hpp"
#include "giantwg/scattering_two.hpp"
#include "internal.hpp"

namespace giantwg {

using detail::kPi;

namespace {

constexpr complexd kI(0.0, 1.0);

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

struct HalfSum {
  complexd value{0.0, 0.0};
  int orders = 0;
  double last_shell = 0.0;
};

// Inner double sum of the correlated position amplitude for one ordering of
// the positions. Every term is assembled from a single complex-log exponent;
// step functions at exactly zero argument carry weight 1/2.
HalfSum ft_half(const SystemParams& params, double k_bar, double xa, double xb,
                const NumericalControls& controls) {
  const double g = params.gamma;
  const double L = params.d;
  const double dX = xa - xb;
  const complexd kc(k_bar, 2.0 * g);
  const complexd a_fac = -kI * g * std::cos(params.phi) / kc *
                         std::exp(kI * (params.phase_k0d + k_bar * L));
  const complexd b_coef = std::exp(complexd(0.0, -2.0 * params.phi)) +
                          std::exp(complexd(0.0, -2.0 * (params.phase_k0d + k_bar * L)));
  const complexd c_coef =
      std::exp(complexd(0.0, -(params.phase_k0d + k_bar * L) - params.phi));
  const complexd cfac(-2.0 * g, k_bar);        // exponent rate in the position
  const complexd brfac(4.0 * g, -2.0 * k_bar);  // -2i*(k_bar + 2i*gamma)
  const double amag = std::abs(a_fac);
  const complexd log_a = (amag > 0.0) ? std::log(a_fac) : complexd(0.0, 0.0);
  const complexd log_b = (std::abs(b_coef) > 0.0) ? std::log(b_coef) : complexd(0.0, 0.0);
  const complexd log_c = std::log(c_coef);
  const double theta_tol = 1e-12;

  auto group = [&](const complexd& log_coef, int m, int n, double x) -> complexd {
    if (x < -theta_tol) return complexd(0.0, 0.0);
    const double w = (x <= theta_tol) ? 0.5 : 1.0;
    const complexd base = log_coef + cfac * x - log_factorial(m) +
                          ((m + n == 0) ? complexd(0.0, 0.0)
                                        : static_cast<double>(m + n) * log_a);
    complexd sum(0.0, 0.0);
    if (x <= theta_tol) {
      const complexd e = base + log_factorial(m + n) - log_factorial(n);
      if (e.real() > 690.0) throw OrderOverflow("ft_half: term exceeds double range");
      sum = std::exp(e);
    } else {
      const complexd log_br = std::log(brfac * x);
      for (int l = 0; l <= n; ++l) {
        const complexd e = base + log_factorial(m + n - l) - log_factorial(n - l) -
                           log_factorial(l) + static_cast<double>(l) * log_br;
        if (e.real() > 690.0) throw OrderOverflow("ft_half: term exceeds double range");
        sum += std::exp(e);
      }
    }
    return w * sum;
  };

  // Shells below s_gate have every step function closed; do not count them
  // toward convergence.
  const int s_gate = (L > 0.0 && dX < -L)
                         ? static_cast<int>(std::ceil(-dX / L)) - 1
                         : 0;
  HalfSum out;
  int quiet = 0;
  for (int s = 0; s <= controls.series_max_order; ++s) {
    complexd shell(0.0, 0.0);
    for (int m = 0; m <= s; ++m) {
      const int n = s - m;
      const double x0 = dX + static_cast<double>(m - n) * L;
      if (std::abs(b_coef) > 0.0) shell += group(log_b, m, n, x0);
      shell += group(log_c, m, n, x0 + L);
      shell += group(log_c, m, n, x0 - L);
    }
    out.value += shell;
    out.last_shell = std::abs(shell);
    out.orders = s;
    if (amag == 0.0) return out;  // only the zeroth shell survives
    if (s >= s_gate &&
        out.last_shell <= controls.series_rel_tol * std::max(std::abs(out.value), 1e-300)) {
      if (++quiet >= 3) return out;
    } else {
      quiet = 0;
    }
  }
  throw SeriesDiverged("ft_half: not converged by order " +
                       std::to_string(controls.series_max_order));
}

complexd ft_series(const SystemParams& params, double k_bar, double x1, double x2,
                   const NumericalControls& controls, SeriesDiagnostics* diag) {
  const double rate = detail::shell_series_rate(params, k_bar);
  if (rate >= 0.999)
    throw SeriesDiverged("ft_series: shell series rate " + std::to_string(rate) +
                         " is at or beyond 1");
  const HalfSum h1 = ft_half(params, k_bar, x1, x2, controls);
  const HalfSum h2 = ft_half(params, k_bar, x2, x1, controls);
  const complexd pref = -kI * std::exp(kI * k_bar * (x1 + x2)) /
                        complexd(k_bar, 2.0 * params.gamma);
  const complexd value = pref * (h1.value + h2.value);
  if (diag) {
    diag->orders_used = std::max(h1.orders, h2.orders);
    const double tot = std::max(std::abs(h1.value + h2.value), 1e-300);
    diag->truncation_error_estimate =
        (h1.last_shell + h2.last_shell) / tot * rate / (1.0 - rate);
    diag->converged = true;
    diag->backend = "series";
  }
  return value;
}

struct FftSettings {
  double dp = 0.0;
  long npoints = 0;
};

FftSettings fft_settings(const SystemParams& params) {
  FftSettings s;
  s.dp = std::min(0.005 * params.gamma, detail::narrowest_comb_width(params) / 8.0);
  const double target = 2.0e4 * params.gamma / s.dp;  // window of +-1e4 gamma
  long n = 1L << 20;
  while (n < target && n < (1L << 24)) n <<= 1;
  s.npoints = n;
  if (0.5 * n * s.dp < 2000.0 * params.gamma)
    throw GridTooCoarse("fft route: propagator comb too narrow for the window");
  return s;
}

}  // namespace

namespace detail {

complexd FtRow::query(double X) const {
  const double u = X / dX + 0.5 * static_cast<double>(n);
  const long i0 = static_cast<long>(std::floor(u));
  if (i0 < 0 || i0 + 1 >= n)
    throw GridTooCoarse("fft route: position outside the transform window");
  const double f = u - static_cast<double>(i0);
  return (1.0 - f) * values[i0] + f * values[i0 + 1];
}

FtRow ft_fft_row(const SystemParams& params, double k_bar, double X2, double dp,
                 long npoints) {
  const long N = npoints;
  const double g = params.gamma;
  const double cphi = std::cos(params.phi);
  const complexd e_phi = std::exp(-kI * params.phi);
  const complexd e_k0 = std::exp(kI * params.phase_k0d);
  const complexd e_mirror = std::exp(kI * (params.phase_k0d + 2.0 * k_bar * params.d));
  const complexd step_z = std::exp(kI * dp * params.d);
  const complexd step_w = std::exp(-kI * dp * X2);

  std::vector<complexd> buf(N);
  complexd z(1.0, 0.0), w(1.0, 0.0);
  for (long j = 0; j < N; ++j) {
    const double p = (static_cast<double>(j) - 0.5 * N) * dp;
    if (j % 4096 == 0) {
      z = std::polar(1.0, p * params.d);
      w = std::polar(1.0, (2.0 * k_bar - p) * X2);
    }
    const complexd e_th = e_k0 * z;
    const complexd e_thm = e_mirror * std::conj(z);
    const complexd g1 = 1.0 / (p + complexd(0.0, 2.0 * g) * (1.0 + cphi * e_th));
    const complexd g2 =
        1.0 / ((2.0 * k_bar - p) + complexd(0.0, 2.0 * g) * (1.0 + cphi * e_thm));
    const complexd etac1 = e_phi + std::conj(e_th);
    const complexd etac2 = e_phi + std::conj(e_thm);
    const complexd val = w * etac1 * etac2 * g1 * g2;
    buf[j] = (j & 1) ? -val : val;
    z *= step_z;
    w *= step_w;
  }

  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(N),
                                    reinterpret_cast<fftw_complex*>(buf.data()),
                                    reinterpret_cast<fftw_complex*>(buf.data()),
                                    FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plan) throw NotConverged("fft route: planner failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  FtRow row;
  row.dX = 2.0 * kPi / (static_cast<double>(N) * dp);
  row.n = N;
  row.values.resize(N);
  const double scale = dp / kPi;
  for (long m = 0; m < N; ++m)
    row.values[m] = ((m & 1) ? -scale : scale) * buf[m];
  return row;
}

}  // namespace detail

TMatrixResult t_matrix(const SystemParams& params, double k1, double k2,
                       const NumericalControls& controls, ConvBackend backend) {
  params.validate();
  controls.validate();
  TMatrixResult out;
  if (params.U == 0.0) {
    out.T_S = 0.0;
    out.diag.converged = true;
    out.diag.backend = "series";
    return out;
  }
  const double k_bar = 0.5 * (k1 + k2);
  complexd conv;
  switch (backend) {
    case ConvBackend::Series: {
      const ConvolutionResult r = green_convolution(params, k_bar, controls);
      conv = r.value;
      out.diag = r.diag;
      break;
    }
    case ConvBackend::Quadrature: {
      conv = green_convolution_quadrature(params, k_bar, controls);
      out.diag.converged = true;
      out.diag.truncation_error_estimate = controls.quadrature_abs_tol;
      out.diag.backend = "quadrature";
      break;
    }
    case ConvBackend::Auto: {
      bool series_ok = detail::shell_series_rate(params, k_bar) < 0.999;
      if (series_ok) {
        try {
          const ConvolutionResult r = green_convolution(params, k_bar, controls);
          conv = r.value;
          out.diag = r.diag;
        } catch (const SeriesDiverged&) {
          series_ok = false;
        }
      }
      if (!series_ok) {
        conv = green_convolution_quadrature(params, k_bar, controls);
        out.diag.converged = true;
        out.diag.truncation_error_estimate = controls.quadrature_abs_tol;
        out.diag.backend = "quadrature";
      }
      break;
    }
  }
  const complexd denom = 1.0 - kI * params.U / (2.0 * kPi) * conv;
  out.T_S = params.U / denom;
  if (!std::isfinite(out.T_S.real()) || !std::isfinite(out.T_S.imag()))
    throw NotConverged("t_matrix: pair vertex pole at this energy");
  return out;
}

TwoPhotonAmplitude two_photon_s(const SystemParams& params, double k1, double k2,
                                const NumericalControls& controls) {
  params.validate();
  controls.validate();
  const ScatterAmplitudes a1 = scatter_single(params, k1, Direction::R);
  const ScatterAmplitudes a2 = scatter_single(params, k2, Direction::R);
  const TMatrixResult tm = t_matrix(params, k1, k2, controls);
  const complexd eta1 = mode_phases(params, Direction::R, k1).eta;
  const complexd eta2 = mode_phases(params, Direction::R, k2).eta;
  const complexd pref = params.gamma * params.gamma / kPi * tm.T_S * a1.green *
                        a2.green * eta1 * eta2;
  TwoPhotonAmplitude amp;
  amp.elastic_coeff = 2.0 * a1.t * a2.t;
  amp.k1 = k1;
  amp.k2 = k2;
  amp.fluorescence = [params, pref, k1, k2](double p1) -> complexd {
    const double p2 = k1 + k2 - p1;
    const complexd ec1 = std::conj(mode_phases(params, Direction::R, p1).eta);
    const complexd ec2 = std::conj(mode_phases(params, Direction::R, p2).eta);
    return pref * ec1 * ec2 * green(params, p1) * green(params, p2);
  };
  return amp;
}

complexd wavefunction_t(const SystemParams& params, double k1, double k2,
                        double X1, double X2, const NumericalControls& controls,
                        SeriesDiagnostics* diag_out) {
  params.validate();
  controls.validate();
  const ScatterAmplitudes a1 = scatter_single(params, k1, Direction::R);
  const ScatterAmplitudes a2 = scatter_single(params, k2, Direction::R);
  const complexd plane =
      (a1.t * a2.t / (2.0 * kPi)) *
      (std::exp(kI * (k1 * X1 + k2 * X2)) + std::exp(kI * (k1 * X2 + k2 * X1)));
  if (params.U == 0.0) {
    if (diag_out) {
      *diag_out = SeriesDiagnostics{};
      diag_out->converged = true;
      diag_out->backend = "series";
    }
    return plane;
  }

  const double k_bar = 0.5 * (k1 + k2);
  const TMatrixResult tm = t_matrix(params, k1, k2, controls);
  SeriesDiagnostics fd;
  complexd ft;
  bool have_ft = false;
  if (detail::shell_series_rate(params, k_bar) < 0.999) {
    try {
      ft = ft_series(params, k_bar, X1, X2, controls, &fd);
      have_ft = true;
    } catch (const SeriesDiverged&) {
    }
  }
  if (!have_ft) {
    const double scale = std::max({1.0, std::abs(X1), std::abs(X2)});
    if (std::abs(X1 - X2) <= 1e-9 * scale) {
      // On the diagonal the transform reduces to a single p integral.
      const complexd i0 = detail::pair_propagator_integral(
          params, k_bar, controls.quadrature_abs_tol, true);
      ft = std::exp(kI * k_bar * (X1 + X2)) * i0 / kPi;
      fd.converged = true;
      fd.truncation_error_estimate = controls.quadrature_abs_tol;
      fd.backend = "quadrature";
    } else {
      const FftSettings s = fft_settings(params);
      const detail::FtRow row = detail::ft_fft_row(params, k_bar, X2, s.dp, s.npoints);
      ft = row.query(X1);
      fd.converged = true;
      fd.truncation_error_estimate = 1e-3;
      fd.backend = "fft";
    }
  }
  const complexd eta1 = mode_phases(params, Direction::R, k1).eta;
  const complexd eta2 = mode_phases(params, Direction::R, k2).eta;
  const complexd corr = -kI * params.gamma * params.gamma / (2.0 * kPi) * eta1 *
                        eta2 * tm.T_S * a1.green * a2.green * ft;
  if (diag_out) *diag_out = fd;
  return plane + corr;
}

WavefunctionGrid wavefunction_fft(const SystemParams& params, double k1, double k2,
                                  const std::vector<double>& X_grid,
                                  const NumericalControls& controls) {
  params.validate();
  controls.validate();
  if (X_grid.empty()) throw ValidationError("wavefunction_fft: empty grid");
  const long n = static_cast<long>(X_grid.size());
  const ScatterAmplitudes a1 = scatter_single(params, k1, Direction::R);
  const ScatterAmplitudes a2 = scatter_single(params, k2, Direction::R);
  WavefunctionGrid out;
  out.values.resize(n, n);
  auto plane = [&](double xa, double xb) {
    return (a1.t * a2.t / (2.0 * kPi)) *
           (std::exp(kI * (k1 * xa + k2 * xb)) + std::exp(kI * (k1 * xb + k2 * xa)));
  };
  if (params.U == 0.0) {
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) out.values(i, j) = plane(X_grid[i], X_grid[j]);
    return out;
  }

  const double k_bar = 0.5 * (k1 + k2);
  const TMatrixResult tm = t_matrix(params, k1, k2, controls);
  const complexd eta1 = mode_phases(params, Direction::R, k1).eta;
  const complexd eta2 = mode_phases(params, Direction::R, k2).eta;
  const complexd coef = -kI * params.gamma * params.gamma / (2.0 * kPi) * eta1 *
                        eta2 * tm.T_S * a1.green * a2.green;

  const FftSettings s = fft_settings(params);
  const double max_x = std::max(std::abs(*std::min_element(X_grid.begin(), X_grid.end())),
                                std::abs(*std::max_element(X_grid.begin(), X_grid.end())));
  if (max_x >= 0.9 * kPi / s.dp)
    throw GridTooCoarse("wavefunction_fft: grid extends beyond the transform window");

  Eigen::MatrixXcd ft(n, n), ft_half_window(n, n);
  for (long j = 0; j < n; ++j) {
    const detail::FtRow row = detail::ft_fft_row(params, k_bar, X_grid[j], s.dp, s.npoints);
    for (long i = 0; i < n; ++i) ft(i, j) = row.query(X_grid[i]);
    // Halved p window probes the truncation error of the transform.
    const detail::FtRow rh =
        detail::ft_fft_row(params, k_bar, X_grid[j], s.dp, s.npoints / 2);
    for (long i = 0; i < n; ++i) ft_half_window(i, j) = rh.query(X_grid[i]);
  }
  out.error_estimate = std::abs(coef) * (ft - ft_half_window).cwiseAbs().maxCoeff();
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      out.values(i, j) = plane(X_grid[i], X_grid[j]) + coef * ft(i, j);
  return out;
}

double g2_transmitted(const SystemParams& params, double k_i, double tau,
                      const NumericalControls& controls,
                      SeriesDiagnostics* diag_out) {
  params.validate();
  controls.validate();
  const ScatterAmplitudes a = scatter_single(params, k_i, Direction::R);
  const double tmag = std::abs(a.t);
  if (tmag < 1e-10)
    throw UndefinedG2("g2_transmitted: transmitted amplitude vanishes");
  const complexd w = wavefunction_t(params, k_i, k_i, tau, 0.0, controls, diag_out);
  const double w_inf = tmag * tmag / kPi;
  return std::norm(w) / (w_inf * w_inf);
}

}  // namespace giantwg
