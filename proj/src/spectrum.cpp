#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <lapacke.h>

#include "giantwg/errors.hpp"
#include "giantwg/lindblad.hpp"
#include "internal.hpp"

namespace giantwg {

namespace {

// Dense nonsymmetric eigendecomposition; vectors optional. std::complex and
// the LAPACK complex type are layout compatible.
lapack_complex_double* lp(complexd* p) {
  return reinterpret_cast<lapack_complex_double*>(p);
}

void zgeev_all(Eigen::MatrixXcd a, Eigen::VectorXcd& w, Eigen::MatrixXcd* vr) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  w.resize(n);
  if (vr) vr->resize(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', vr ? 'V' : 'N', n, lp(a.data()), n, lp(w.data()),
      nullptr, 1, vr ? lp(vr->data()) : nullptr, vr ? n : 1);
  if (info != 0)
    throw EigenSolverFailure("zgeev returned info = " + std::to_string(info));
}

}  // namespace

namespace detail {

Eigen::VectorXcd spectral_propagate(const Eigen::MatrixXcd& a,
                                    const Eigen::VectorXcd& v, double tau) {
  Eigen::VectorXcd w;
  Eigen::MatrixXcd vr;
  zgeev_all(a, w, &vr);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(vr);
  Eigen::VectorXcd y = lu.solve(v);
  for (long i = 0; i < y.size(); ++i) {
    // Decaying spectrum: clip small positive real parts from roundoff so the
    // exponential cannot blow up over very long horizons.
    const double re = std::min(w[i].real(), 0.0) * tau;
    y[i] *= std::exp(complexd(re, w[i].imag() * tau));
  }
  Eigen::VectorXcd out = vr * y;
  if (!out.allFinite())
    throw EigenSolverFailure("spectral propagation produced non-finite values");
  return out;
}

}  // namespace detail

SpectrumResult liouvillian_spectrum(const LiouvillianMatrix& liouville, int count) {
  Eigen::VectorXcd w;
  zgeev_all(liouville.m, w, nullptr);
  std::vector<complexd> ev(w.data(), w.data() + w.size());
  std::sort(ev.begin(), ev.end(), [](const complexd& x, const complexd& y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });

  int stationary = 0;
  double gap = 0.0;
  bool gap_set = false;
  for (const complexd& lambda : ev) {
    if (std::abs(lambda) < 1e-8) {
      ++stationary;
    } else if (!gap_set) {
      gap = -lambda.real();
      gap_set = true;
    }
  }
  if (stationary == 0)
    throw EigenSolverFailure("no stationary eigenvalue in the spectrum");
  if (stationary > 1)
    throw DegenerateSteadyState("multiple stationary eigenvalues (" +
                                std::to_string(stationary) + ")");

  SpectrumResult out;
  out.gap = gap;
  if (count <= 0 || count >= static_cast<int>(ev.size()))
    out.eigenvalues = std::move(ev);
  else
    out.eigenvalues.assign(ev.begin(), ev.begin() + count);
  return out;
}

}  // namespace giantwg
