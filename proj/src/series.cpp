#include <cmath>
#include <complex>

#include "giantwg/errors.hpp"
#include "giantwg/scattering_one.hpp"
#include "giantwg/scattering_two.hpp"
#include "internal.hpp"

namespace giantwg {

using detail::kPi;

namespace {

// Round-trip factor of the shell expansion. All powers of it are assembled in
// log space so high orders neither overflow nor lose the phase.
complexd round_trip_factor(const SystemParams& params, double k) {
  const complexd denom(k, 2.0 * params.gamma);
  const double theta = mode_phases(params, Direction::R, k).theta;
  return -complexd(0.0, 1.0) * params.gamma * std::cos(params.phi) *
         std::exp(complexd(0.0, theta)) / denom;
}

double log_factorial(long n) { return std::lgamma(static_cast<double>(n) + 1.0); }

}  // namespace

namespace detail {

double shell_series_rate(const SystemParams& params, double k_bar) {
  const double q = params.gamma * std::cos(params.phi) /
                   std::abs(complexd(k_bar, 2.0 * params.gamma));
  return 4.0 * q * q;
}

}  // namespace detail

complexd c_mnl(const SystemParams& params, double k, int m, int n, int l,
               const NumericalControls& controls) {
  params.validate();
  if (m < 0 || n < 0 || l < 0 || l > n)
    throw ValidationError("c_mnl: requires 0 <= l <= n and m >= 0");
  if (m + n > controls.series_max_order)
    throw OrderOverflow("c_mnl: order m+n exceeds series_max_order");
  double ratio;
  if (m + n <= 20) {
    ratio = 1.0;
    for (int j = n - l + 1; j <= m + n - l; ++j) ratio *= static_cast<double>(j);
    for (int j = 2; j <= l; ++j) ratio /= static_cast<double>(j);
  } else {
    ratio = std::exp(log_factorial(m + n - l) - log_factorial(n - l) -
                     log_factorial(l));
    if (!std::isfinite(ratio))
      throw OrderOverflow("c_mnl: factorial ratio exceeds double range");
  }
  const complexd base = complexd(0.0, -2.0) * static_cast<double>(m - n) *
                        complexd(k, 2.0 * params.gamma) * params.d;
  complexd power(1.0, 0.0);
  for (int j = 0; j < l; ++j) power *= base;
  return ratio * power;
}

complexd f_mn(const SystemParams& params, double k, int m, int n,
              const NumericalControls& controls) {
  params.validate();
  if (m < 0 || n < 0) throw ValidationError("f_mn: orders must be nonnegative");
  if (m + n > controls.series_max_order)
    throw OrderOverflow("f_mn: order m+n exceeds series_max_order");
  const complexd q = round_trip_factor(params, k);
  if (std::abs(q) == 0.0) return (m == 0 && n == 0) ? complexd(1.0, 0.0) : complexd(0.0, 0.0);

  const complexd kc(k, 2.0 * params.gamma);
  const complexd pref = complexd(0.0, 1.0) * static_cast<double>(m - n) * kc * params.d -
                        log_factorial(m) + static_cast<double>(m + n) * std::log(q);
  const complexd bracket = complexd(0.0, -2.0) * static_cast<double>(m - n) * kc * params.d;
  complexd sum(0.0, 0.0);
  if (std::abs(bracket) == 0.0) {
    const complexd e = pref + log_factorial(m + n) - log_factorial(n);
    if (e.real() > 690.0) throw OrderOverflow("f_mn: term exceeds double range");
    return std::exp(e);
  }
  const complexd log_bracket = std::log(bracket);
  for (int l = 0; l <= n; ++l) {
    const complexd e = pref + log_factorial(m + n - l) - log_factorial(n - l) -
                       log_factorial(l) + static_cast<double>(l) * log_bracket;
    if (e.real() > 690.0) throw OrderOverflow("f_mn: term exceeds double range");
    sum += std::exp(e);
  }
  return sum;
}

ConvolutionResult green_convolution(const SystemParams& params, double k_bar,
                                    const NumericalControls& controls) {
  params.validate();
  controls.validate();
  const double rate = detail::shell_series_rate(params, k_bar);
  if (rate >= 0.999)
    throw SeriesDiverged("green_convolution: shell series rate " +
                         std::to_string(rate) + " is at or beyond 1");

  complexd total(0.0, 0.0);
  double last_shell = 0.0;
  int quiet_shells = 0;
  int orders = 0;
  bool converged = false;
  for (int s = 0; s <= controls.series_max_order; ++s) {
    complexd shell(0.0, 0.0);
    for (int m = (s + 1) / 2; m <= s; ++m) {
      const int n = s - m;
      const double w = (m == n) ? 0.5 : 1.0;
      shell += w * f_mn(params, k_bar, m, n, controls);
    }
    total += shell;
    last_shell = std::abs(shell);
    orders = s;
    if (last_shell <= controls.series_rel_tol * std::max(std::abs(total), 1e-300)) {
      if (++quiet_shells >= 3) {
        converged = true;
        break;
      }
    } else {
      quiet_shells = 0;
    }
  }
  if (!converged)
    throw SeriesDiverged("green_convolution: not converged by order " +
                         std::to_string(controls.series_max_order) +
                         " (rate " + std::to_string(rate) + ")");

  const complexd pref = 2.0 * kPi / complexd(-2.0 * params.gamma, k_bar);
  ConvolutionResult out;
  out.value = pref * total;
  out.diag.orders_used = orders;
  out.diag.truncation_error_estimate =
      (std::abs(total) > 0.0 && rate < 1.0)
          ? (last_shell / std::abs(total)) * rate / (1.0 - rate)
          : 0.0;
  out.diag.converged = true;
  out.diag.backend = "series";
  return out;
}

}  // namespace giantwg
