#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "giantwg/errors.hpp"
#include "giantwg/lindblad.hpp"
#include "internal.hpp"

namespace giantwg {

namespace {

constexpr complexd kI(0.0, 1.0);

complexd drive_amplitude(const SystemParams& params, const DriveConfig& drive) {
  const double k = (drive.direction == Direction::R) ? drive.k_i : -drive.k_i;
  return drive.omega0 * mode_phases(params, drive.direction, k).eta;
}

Eigen::VectorXcd vec_of(const Eigen::MatrixXcd& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd mat_of(const Eigen::VectorXcd& v, int dim) {
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim);
}

complexd trace_of_vec(const Eigen::VectorXcd& v, int dim) {
  complexd tr(0.0, 0.0);
  for (int i = 0; i < dim; ++i) tr += v[i * (dim + 1)];
  return tr;
}

SteadyState finish_state(const LiouvillianMatrix& liouville, Eigen::VectorXcd v) {
  const int dim = liouville.cutoff + 1;
  Eigen::MatrixXcd rho = mat_of(v, dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double tr = rho.trace().real();
  if (!(tr > 0.0) || !rho.allFinite())
    throw DegenerateSteadyState("steady state has no positive trace");
  rho /= tr;
  SteadyState out;
  out.rho = rho;
  out.residual = (liouville.m * vec_of(rho)).lpNorm<Eigen::Infinity>();
  out.top_population = rho(dim - 1, dim - 1).real();
  out.cutoff = liouville.cutoff;
  if (out.top_population > 1e-8)
    throw CutoffTooSmall("steady state populates the highest Fock level (" +
                         std::to_string(out.top_population) + ")");
  return out;
}

struct LiouvilleRhs {
  const Eigen::MatrixXcd* m;
  void operator()(const std::vector<complexd>& x, std::vector<complexd>& dxdt,
                  double) const {
    const Eigen::Map<const Eigen::VectorXcd> xv(x.data(),
                                                static_cast<long>(x.size()));
    Eigen::Map<Eigen::VectorXcd> dv(dxdt.data(), static_cast<long>(dxdt.size()));
    dv.noalias() = (*m) * xv;
  }
};

}  // namespace

Eigen::MatrixXcd annihilation(int cutoff) {
  if (cutoff < 1) throw ValidationError("annihilation: cutoff must be >= 1");
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n)
    b(n - 1, n) = std::sqrt(static_cast<double>(n));
  return b;
}

std::vector<double> semiclassical_branches(const SystemParams& params,
                                           const DriveConfig& drive) {
  params.validate();
  drive.validate();
  const double om2 = std::norm(drive_amplitude(params, drive));
  const double k = drive.k_i;
  const double g2 = 4.0 * params.gamma * params.gamma;
  if (params.U == 0.0) return {om2 / (k * k + g2)};
  // U^2 n^3 - 2 U k n^2 + (k^2 + 4 gamma^2) n - |Omega|^2 = 0
  const double a = params.U * params.U;
  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(0, 2) = om2 / a;
  companion(1, 2) = -(k * k + g2) / a;
  companion(2, 2) = 2.0 * params.U * k / a;
  const Eigen::Vector3cd roots = companion.eigenvalues();
  std::vector<double> out;
  for (int i = 0; i < 3; ++i) {
    const complexd r = roots[i];
    if (std::abs(r.imag()) > 1e-8 * std::max(1.0, std::abs(r.real()))) continue;
    if (r.real() < -1e-10) continue;
    out.push_back(std::max(r.real(), 0.0));
  }
  std::sort(out.begin(), out.end());
  return out;
}

int default_fock_cutoff(const SystemParams& params, const DriveConfig& drive) {
  const std::vector<double> branches = semiclassical_branches(params, drive);
  const double top = branches.empty() ? 0.0 : branches.back();
  const int n = static_cast<int>(std::ceil(3.0 * top)) + 10;
  return std::clamp(n, 20, 60);
}

FockOperator build_hamiltonian(const SystemParams& params, const DriveConfig& drive,
                               const NumericalControls& controls) {
  params.validate();
  drive.validate();
  controls.validate();
  const int cutoff = controls.fock_cutoff > 0 ? controls.fock_cutoff
                                              : default_fock_cutoff(params, drive);
  const Eigen::MatrixXcd b = annihilation(cutoff);
  const Eigen::MatrixXcd bd = b.adjoint();
  const complexd om = drive_amplitude(params, drive);
  FockOperator h;
  h.cutoff = cutoff;
  h.m = -drive.k_i * (bd * b) + 0.5 * params.U * (bd * bd * b * b) + om * bd +
        std::conj(om) * b;
  return h;
}

LiouvillianMatrix build_liouvillian(const SystemParams& params,
                                    const DriveConfig& drive,
                                    const NumericalControls& controls) {
  const FockOperator h = build_hamiltonian(params, drive, controls);
  const int dim = h.cutoff + 1;
  const Eigen::MatrixXcd b = annihilation(h.cutoff);
  const Eigen::MatrixXcd bd = b.adjoint();
  const Eigen::MatrixXcd nop = bd * b;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  const double g = params.gamma;
  LiouvillianMatrix out;
  out.cutoff = h.cutoff;
  out.m = -kI * (Eigen::kroneckerProduct(id, h.m).eval() -
                 Eigen::kroneckerProduct(h.m.transpose(), id).eval()) +
          2.0 * g *
              (2.0 * Eigen::kroneckerProduct(bd.transpose(), b).eval() -
               Eigen::kroneckerProduct(id, nop).eval() -
               Eigen::kroneckerProduct(nop.transpose(), id).eval());
  return out;
}

SteadyState steady_state(const LiouvillianMatrix& liouville) {
  const int dim = liouville.cutoff + 1;
  const long size = static_cast<long>(dim) * dim;
  Eigen::MatrixXcd a = liouville.m;
  a.row(0).setZero();
  for (int i = 0; i < dim; ++i) a(0, i * (dim + 1)) = 1.0;  // trace row
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(size);
  rhs[0] = 1.0;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const Eigen::VectorXcd v = lu.solve(rhs);
  if (!v.allFinite())
    throw DegenerateSteadyState("stationary solve produced non-finite entries");
  const double check = (liouville.m * v).lpNorm<Eigen::Infinity>();
  const double scale =
      std::max(1.0, liouville.m.cwiseAbs().maxCoeff()) * v.lpNorm<Eigen::Infinity>();
  if (check > 1e-6 * scale)
    throw DegenerateSteadyState("stationary residual " + std::to_string(check) +
                                " indicates a non-unique null space");
  return finish_state(liouville, v);
}

SteadyState steady_state_ode(const LiouvillianMatrix& liouville, double t_final,
                             const NumericalControls& controls) {
  controls.validate();
  if (!(t_final > 0.0)) throw ValidationError("steady_state_ode: t_final must be > 0");
  const int dim = liouville.cutoff + 1;
  const long size = static_cast<long>(dim) * dim;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(size, size);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size);
  v[0] = 1.0;  // vacuum

  // Implicit Euler with a geometric step ladder: each step damps every decaying
  // mode and leaves the stationary one exactly in place.
  double h = 0.5;
  double elapsed = 0.0;
  double resid = (liouville.m * v).lpNorm<Eigen::Infinity>();
  while (resid > 1e-11 && elapsed < t_final) {
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(id - h * liouville.m);
    for (int step = 0; step < 20 && elapsed < t_final; ++step) {
      v = lu.solve(v);
      elapsed += h;
    }
    const complexd tr = trace_of_vec(v, dim);
    if (std::abs(tr) < 1e-300)
      throw NotConverged("steady_state_ode: trace collapsed");
    v /= tr;
    resid = (liouville.m * v).lpNorm<Eigen::Infinity>();
    h *= 10.0;
  }
  if (resid > 1e-10)
    throw NotConverged("steady_state_ode: residual " + std::to_string(resid) +
                       " after t = " + std::to_string(elapsed));
  return finish_state(liouville, v);
}

CavityObservables cavity_observables(const Eigen::MatrixXcd& rho) {
  const int dim = static_cast<int>(rho.rows());
  if (dim < 2 || rho.cols() != dim)
    throw ValidationError("cavity_observables: density matrix too small");
  const Eigen::MatrixXcd b = annihilation(dim - 1);
  const Eigen::MatrixXcd bd = b.adjoint();
  CavityObservables out;
  out.n = (bd * b * rho).trace().real();
  out.b_mean = (b * rho).trace();
  if (out.n <= 1e-14)
    throw UndefinedG2("cavity_observables: photon number is zero");
  out.g2 = (bd * bd * b * b * rho).trace().real() / (out.n * out.n);
  return out;
}

Eigen::MatrixXcd evolve_operator(const LiouvillianMatrix& liouville,
                                 const Eigen::MatrixXcd& op0, double tau,
                                 const NumericalControls& controls) {
  controls.validate();
  const int dim = liouville.cutoff + 1;
  if (op0.rows() != dim || op0.cols() != dim)
    throw ValidationError("evolve_operator: operator dimension mismatch");
  if (tau < 0.0) throw ValidationError("evolve_operator: tau must be >= 0");
  if (tau == 0.0) return op0;

  const double stiffness = liouville.m.diagonal().cwiseAbs().maxCoeff();
  if (tau > 100.0 || tau * stiffness > 5e4)
    return mat_of(detail::spectral_propagate(liouville.m, vec_of(op0), tau), dim);

  namespace ode = boost::numeric::odeint;
  std::vector<complexd> state(op0.data(), op0.data() + op0.size());
  const LiouvilleRhs rhs{&liouville.m};
  ode::integrate_adaptive(
      ode::make_controlled<ode::runge_kutta_dopri5<std::vector<complexd>>>(
          1e-12, controls.ode_rel_tol),
      rhs, state, 0.0, tau, std::min(0.1, tau));
  return Eigen::Map<const Eigen::MatrixXcd>(state.data(), dim, dim);
}

complexd two_time_correlation(const SystemParams& params, const DriveConfig& drive,
                              double tau, const NumericalControls& controls) {
  if (tau < 0.0) throw ValidationError("two_time_correlation: tau must be >= 0");
  const LiouvillianMatrix liouville = build_liouvillian(params, drive, controls);
  const SteadyState ss = steady_state(liouville);
  const Eigen::MatrixXcd b = annihilation(liouville.cutoff);
  const Eigen::MatrixXcd evolved =
      evolve_operator(liouville, b * ss.rho, tau, controls);
  const complexd c_rot = (b.adjoint() * evolved).trace();
  return std::exp(kI * drive.k_i * tau) * c_rot;
}

std::vector<double> reflected_density(const SystemParams& params,
                                      const DriveConfig& drive,
                                      const std::vector<double>& d_values,
                                      const NumericalControls& controls) {
  params.validate();
  drive.validate();
  std::vector<double> out;
  out.reserve(d_values.size());
  for (const double dv : d_values) {
    if (dv < 0.0) throw ValidationError("reflected_density: separation must be >= 0");
    SystemParams p = params;
    p.d = dv;  // the accumulated phase phase_k0d stays as configured
    const LiouvillianMatrix liouville = build_liouvillian(p, drive, controls);
    const SteadyState ss = steady_state(liouville);
    const Eigen::MatrixXcd b = annihilation(liouville.cutoff);
    const double n = (b.adjoint() * b * ss.rho).trace().real();
    const Eigen::MatrixXcd evolved =
        evolve_operator(liouville, b * ss.rho, dv, controls);
    const complexd corr = (b.adjoint() * evolved).trace();
    const complexd ph =
        std::exp(-kI * (p.phi + p.phase_k0d + drive.k_i * dv));
    out.push_back(2.0 * p.gamma * (n + (ph * std::conj(corr)).real()));
  }
  return out;
}

double transmitted_g2_output(const SystemParams& params, const DriveConfig& drive,
                             double tau, const NumericalControls& controls) {
  if (tau != 0.0)
    throw OrderingAssembly(
        "transmitted_g2_output: delayed-channel ordering is only assembled for "
        "tau = 0");
  const LiouvillianMatrix liouville = build_liouvillian(params, drive, controls);
  const SteadyState ss = steady_state(liouville);
  const int dim = liouville.cutoff + 1;
  const Eigen::MatrixXcd b = annihilation(liouville.cutoff);
  const Eigen::MatrixXcd bd = b.adjoint();
  const double sg = std::sqrt(params.gamma);

  // Output field: drive amplitude plus the prompt and retarded coupling-point
  // channels of the transmitted direction.
  const complexd alpha = drive.omega0 / sg;
  complexd c1, c2;
  if (drive.direction == Direction::R) {
    c1 = -kI * sg * std::exp(-kI * params.phi);
    c2 = -kI * sg * std::exp(-kI * (params.phase_k0d + drive.k_i * params.d));
  } else {
    c1 = -kI * sg * std::exp(kI * params.phase_k0d);
    c2 = -kI * sg * std::exp(-kI * (params.phi + drive.k_i * params.d));
  }

  // Weights of b(t)^early b(t+d)^late products in X and XX.
  struct Term {
    int early;
    int late;
    complexd w;
  };
  const std::vector<Term> w1 = {{0, 0, alpha}, {1, 0, c1}, {0, 1, c2}};
  const std::vector<Term> w2 = {{0, 0, alpha * alpha}, {1, 0, 2.0 * alpha * c1},
                                {0, 1, 2.0 * alpha * c2}, {2, 0, c1 * c1},
                                {0, 2, c2 * c2},          {1, 1, 2.0 * c1 * c2}};

  std::vector<Eigen::MatrixXcd> pow_b = {Eigen::MatrixXcd::Identity(dim, dim), b,
                                         b * b};
  Eigen::MatrixXcd evolved[3][3];
  for (int m = 0; m <= 2; ++m)
    for (int j = 0; j <= 2; ++j) {
      const Eigen::MatrixXcd seed = pow_b[m] * ss.rho * pow_b[j].adjoint();
      evolved[m][j] = (m == 0 && j == 0)
                          ? seed
                          : evolve_operator(liouville, seed, params.d, controls);
    }

  auto quadratic = [&](const std::vector<Term>& w) {
    complexd acc(0.0, 0.0);
    for (const Term& bra : w)
      for (const Term& ket : w) {
        const Eigen::MatrixXcd& e = evolved[ket.early][bra.early];
        acc += std::conj(bra.w) * ket.w *
               (pow_b[bra.late].adjoint() * pow_b[ket.late] * e).trace();
      }
    return acc.real();
  };

  const double den = quadratic(w1);
  if (den <= 1e-14)
    throw UndefinedG2("transmitted_g2_output: output intensity is zero");
  return quadratic(w2) / (den * den);
}

}  // namespace giantwg
