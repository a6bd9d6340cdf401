#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "giantwg/errors.hpp"
#include "giantwg/scattering_one.hpp"
#include "giantwg/scattering_two.hpp"
#include "internal.hpp"

namespace giantwg {
namespace detail {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

complexd green_raw(const SystemParams& params, double p) {
  const double theta = params.phase_k0d + p * params.d;
  const complexd sigma = complexd(0.0, -2.0) * params.gamma *
                         (1.0 + std::cos(params.phi) * std::exp(complexd(0.0, theta)));
  return 1.0 / (p - sigma);
}

complexd eta_conj(const SystemParams& params, double p) {
  const double theta = params.phase_k0d + p * params.d;
  return std::exp(complexd(0.0, -params.phi)) + std::exp(complexd(0.0, -theta));
}

// Breakpoints where either propagator factor peaks, from a scan of |G|.
// Peaks need p = Re Sigma(p), so they live inside |p| <= 2*gamma*|cos phi|;
// the scan is confined there and its step resolves the slope-steepened
// resonance width 2*gamma*(1-|cos phi|)/(1+2*gamma*|cos phi|*d).
std::vector<double> comb_breakpoints(const SystemParams& params, double k_bar,
                                     double half_width, double forced) {
  const double g = params.gamma;
  const double cphi = std::abs(std::cos(params.phi));
  const double width_eff =
      std::max(2.0 * g * (1.0 - cphi), 1e-6 * g) / (1.0 + 2.0 * cphi * g * params.d);
  const double step =
      std::max(std::min(0.005 * g, width_eff / 8.0), 1e-6 * g);
  const double scan_half =
      std::min(half_width, 2.0 * std::abs(k_bar) + (2.0 * cphi + 1.0) * g);
  std::vector<double> pts;
  double prev2 = std::abs(green_raw(params, -scan_half));
  double prev1 = std::abs(green_raw(params, -scan_half + step));
  for (double p = -scan_half + 2.0 * step; p <= scan_half; p += step) {
    const double cur = std::abs(green_raw(params, p));
    if (prev1 > prev2 && prev1 >= cur) pts.push_back(p - step);
    prev2 = prev1;
    prev1 = cur;
  }
  std::vector<double> all;
  all.push_back(-half_width);
  all.push_back(half_width);
  all.push_back(-forced);
  all.push_back(forced);
  all.push_back(0.0);
  all.push_back(2.0 * k_bar);
  for (double b = 2.0 * scan_half; b < half_width; b *= 2.0) {
    all.push_back(b);
    all.push_back(-b);
  }
  for (double p : pts) {
    all.push_back(p);
    all.push_back(2.0 * k_bar - p);  // mirrored peaks of the second factor
  }
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  auto is_forced = [&](double p) {
    for (double f : {-half_width, half_width, -forced, forced})
      if (p == f) return true;
    return false;
  };
  for (double p : all) {
    if (p < -half_width || p > half_width) continue;
    if (!out.empty() && p - out.back() < 0.25 * step) {
      if (is_forced(p) && !is_forced(out.back())) out.back() = p;
      continue;
    }
    out.push_back(p);
  }
  return out;
}

template <class F>
complexd gk_complex(const F& f, double a, double b, unsigned depth, double tol,
                    double* err_acc) {
  double er = 0.0, ei = 0.0;
  const double re = GK::integrate([&](double x) { return f(x).real(); }, a, b,
                                  depth, tol, &er);
  const double im = GK::integrate([&](double x) { return f(x).imag(); }, a, b,
                                  depth, tol, &ei);
  *err_acc += er + ei;
  return complexd(re, im);
}

}  // namespace

double narrowest_comb_width(const SystemParams& params) {
  return std::max(2.0 * params.gamma * (1.0 - std::abs(std::cos(params.phi))),
                  1e-6 * params.gamma);
}

complexd pair_propagator_integral(const SystemParams& params, double k_bar,
                                  double abs_tol, bool with_eta) {
  const double g = params.gamma;
  const double w1 = std::max(60.0 * g, std::abs(2.0 * k_bar) + 60.0 * g);
  const double w2 = 2.0 * w1;
  auto integrand = [&](double p) -> complexd {
    complexd v = green_raw(params, p) * green_raw(params, 2.0 * k_bar - p);
    if (with_eta) v *= eta_conj(params, p) * eta_conj(params, 2.0 * k_bar - p);
    return v;
  };

  // Two passes with disjoint node sets: the second bisects every segment,
  // so agreement probes unresolved structure by value, not by the library's
  // per-interval estimate (which only accumulates roundoff with depth).
  double est_ignored = 0.0;
  complexd inner(0.0, 0.0), outer(0.0, 0.0), inner_a(0.0, 0.0), outer_a(0.0, 0.0);
  const std::vector<double> bp = comb_breakpoints(params, k_bar, w2, w1);
  for (size_t i = 0; i + 1 < bp.size(); ++i) {
    const double mid = 0.5 * (bp[i] + bp[i + 1]);
    const complexd coarse = gk_complex(integrand, bp[i], bp[i + 1], 15, 1e-10, &est_ignored);
    const complexd fine = gk_complex(integrand, bp[i], mid, 15, 1e-10, &est_ignored) +
                          gk_complex(integrand, mid, bp[i + 1], 15, 1e-10, &est_ignored);
    if (mid < -w1 || mid > w1) {
      outer_a += coarse;
      outer += fine;
    } else {
      inner_a += coarse;
      inner += fine;
    }
  }
  const double core_diff = std::abs(inner - inner_a) + std::abs(outer - outer_a);

  // Tails: the numerator splits exactly into the harmonics 1, e^{ipd} and
  // e^{-ipd} of the separation, while both propagators approach the smooth
  // g0(p) = 1/(p + 2i gamma). The constant harmonic of g0*g0 has a log
  // antiderivative, the oscillating ones are rotated onto contours where
  // exp(+-ipd) decays (the swept quarter-planes hold no poles, since the
  // window exceeds |2 k_bar|), and only the O(p^-3) propagator correction is
  // left to the u = 1/p quadrature, where its amplitude vanishes with u.
  const double kd = params.phase_k0d;
  const complexd a(0.0, 2.0 * g);
  const complexd b(2.0 * k_bar, 2.0 * g);
  const complexd apb = a + b;
  auto g0_pair = [&](complexd p) -> complexd {
    return 1.0 / ((p + a) * (b - p));
  };
  complexd c0(1.0, 0.0), cplus(0.0, 0.0), cminus(0.0, 0.0);
  if (with_eta) {
    c0 = std::exp(complexd(0.0, -2.0 * params.phi)) +
         std::exp(complexd(0.0, -(2.0 * kd + 2.0 * k_bar * params.d)));
    cplus = std::exp(complexd(0.0, -(params.phi + kd + 2.0 * k_bar * params.d)));
    cminus = std::exp(complexd(0.0, -(params.phi + kd)));
  }
  auto asymptote = [&](double p) -> complexd {
    const complexd osc = std::exp(complexd(0.0, p * params.d));
    return (c0 + cplus * osc + cminus / osc) * g0_pair(complexd(p, 0.0));
  };
  const double u0 = 1e-12;
  auto tail = [&](double cut) -> complexd {
    // constant harmonic, in closed form
    auto prim = [&](double p) -> complexd {
      return (std::log(p + a) - std::log(b - p)) / apb;
    };
    const complexd half_pi_jump = complexd(0.0, -kPi) / apb;
    complexd v = c0 * ((half_pi_jump - prim(cut)) + (prim(-cut) + half_pi_jump));
    // oscillating harmonics on vertical contours
    double ignored = 0.0;
    const complexd kI(0.0, 1.0);
    if (std::abs(cplus) > 0.0) {
      auto up_right = [&](double t) -> complexd {
        return std::exp(-t * params.d) * g0_pair(complexd(cut, t));
      };
      auto up_left = [&](double t) -> complexd {
        return std::exp(-t * params.d) * g0_pair(complexd(-cut, t));
      };
      const double inf = std::numeric_limits<double>::infinity();
      v += cplus * kI * std::exp(complexd(0.0, cut * params.d)) *
           gk_complex(up_right, 0.0, inf, 15, 1e-10, &ignored);
      v -= cplus * kI * std::exp(complexd(0.0, -cut * params.d)) *
           gk_complex(up_left, 0.0, inf, 15, 1e-10, &ignored);
    }
    if (std::abs(cminus) > 0.0) {
      auto down_right = [&](double t) -> complexd {
        return std::exp(-t * params.d) * g0_pair(complexd(cut, -t));
      };
      auto down_left = [&](double t) -> complexd {
        return std::exp(-t * params.d) * g0_pair(complexd(-cut, -t));
      };
      const double inf = std::numeric_limits<double>::infinity();
      v -= cminus * kI * std::exp(complexd(0.0, -cut * params.d)) *
           gk_complex(down_right, 0.0, inf, 15, 1e-10, &ignored);
      v += cminus * kI * std::exp(complexd(0.0, cut * params.d)) *
           gk_complex(down_left, 0.0, inf, 15, 1e-10, &ignored);
    }
    // propagator correction beyond the asymptote
    for (double sign : {1.0, -1.0}) {
      auto f = [&](double u) -> complexd {
        const double p = sign / u;
        return (integrand(p) - asymptote(p)) / (u * u);
      };
      v += gk_complex(f, u0, 1.0 / cut, 15, 1e-10, &ignored);
    }
    return v;
  };
  const complexd total_w1 = inner + tail(w1);
  const complexd total_w2 = inner + outer + tail(w2);

  if (!std::isfinite(total_w2.real()) || !std::isfinite(total_w2.imag()))
    throw QuadratureNotConverged(
        "pair propagator integral is not finite (pole on the real axis?)");
  const double scale = std::abs(total_w2);
  if (core_diff > 10.0 * abs_tol + 1e-7 * scale)
    throw QuadratureNotConverged("pair propagator segments did not converge (" +
                                 std::to_string(core_diff) + ")");
  const double tail_err = std::abs(total_w1 - total_w2);
  if (tail_err > 100.0 * abs_tol + 1e-6 * scale)
    throw QuadratureNotConverged("pair propagator tail estimate unstable (" +
                                 std::to_string(tail_err) + ")");
  return total_w2;
}

}  // namespace detail

complexd green_convolution_quadrature(const SystemParams& params, double k_bar,
                                      const NumericalControls& controls) {
  params.validate();
  controls.validate();
  return detail::pair_propagator_integral(params, k_bar,
                                          controls.quadrature_abs_tol, false);
}

}  // namespace giantwg
