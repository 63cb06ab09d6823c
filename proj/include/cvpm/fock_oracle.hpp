// Copyright 2026 The cv-phase-metrology Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Brute-force truncated Fock-space engine used to certify the phase-space
// formulas. Everything here is built from ladder-operator matrix elements
// and exact Hermitian eigendecompositions; nothing reuses the Gaussian
// closed forms it is meant to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "cvpm/errors.hpp"
#include "cvpm/gaussian.hpp"

namespace cvpm::fock {

using cplx = std::complex<double>;
using Ket = Eigen::VectorXcd;
using Density = Eigen::MatrixXcd;

struct FockState {
  Density rho;

  int cutoff() const { return static_cast<int>(rho.rows()); }
  double trace() const { return rho.trace().real(); }
  double purity() const { return (rho * rho).trace().real(); }
  double population(int n) const { return rho(n, n).real(); }

  /// Population of the top `levels` number states.
  double top_population(int levels = 5) const {
    double p = 0.0;
    for (int n = std::max(0, cutoff() - levels); n < cutoff(); ++n) p += population(n);
    return p;
  }

  static FockState from_ket(const Ket& psi) { return {psi * psi.adjoint()}; }
};

/// Throws CutoffError when the top levels are populated above tol.
inline void check_adequacy(const FockState& s, double tol = 1e-8) {
  const double top = s.top_population();
  if (top >= tol) {
    std::ostringstream msg;
    msg << "Fock cutoff " << s.cutoff() << " too small: top-5 population " << top
        << " >= " << tol << "; increase N_c";
    throw CutoffError(msg.str());
  }
}

/// Default truncation max(40, ceil(12 n_out + 25)).
inline int cutoff_rule(double n_out) {
  return std::max(40, static_cast<int>(std::ceil(12.0 * n_out + 25.0)));
}

inline Density annihilation(int n) {
  Density a = Density::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

/// Hermitian tridiagonal generator: G(k,k) = diag[k], G(k+1,k) = sub[k], G(k,k+1) = conj(sub[k]).
struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXcd sub;
};

/// exp(-i G) for a Hermitian tridiagonal G. A diagonal phase gauge P makes
/// P^dag G P real symmetric, which is then diagonalised exactly.
class TridiagonalPropagator {
 public:
  explicit TridiagonalPropagator(const Tridiagonal& g) {
    const Eigen::Index n = g.diag.size();
    phases_.resize(n);
    Eigen::VectorXd offdiag(std::max<Eigen::Index>(n - 1, 0));
    phases_(0) = 1.0;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      const double mag = std::abs(g.sub(k));
      offdiag(k) = mag;
      phases_(k + 1) = mag > 0.0 ? phases_(k) * (g.sub(k) / mag) : phases_(k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(g.diag, offdiag, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw OracleError("tridiagonal eigensolver failed");
    vectors_ = solver.eigenvectors();
    eigenvalues_ = solver.eigenvalues();
  }

  Ket apply(const Ket& psi) const {
    // psi -> P V e^{-i L} V^T P^dag psi
    const Ket gauged = phases_.conjugate().cwiseProduct(psi);
    Ket coeffs = vectors_.transpose().cast<cplx>() * gauged;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
      coeffs(k) *= std::polar(1.0, -eigenvalues_(k));
    }
    return phases_.cwiseProduct(vectors_.cast<cplx>() * coeffs);
  }

 private:
  Eigen::VectorXcd phases_;
  Eigen::MatrixXd vectors_;
  Eigen::VectorXd eigenvalues_;
};

/// Generator phi a^dag a + zeta a^dag + conj(zeta) a on n levels.
inline Tridiagonal rotation_displacement_generator(int n, double phi, cplx zeta) {
  Tridiagonal g{Eigen::VectorXd(n), Eigen::VectorXcd(std::max(n - 1, 0))};
  for (int k = 0; k < n; ++k) g.diag(k) = phi * k;
  for (int k = 0; k + 1 < n; ++k) g.sub(k) = zeta * std::sqrt(static_cast<double>(k + 1));
  return g;
}

/// Fock expansion of D(alpha) S(r, theta)|0> on n levels, with
/// S = exp{r/2 (e^{i theta} a^2 - e^{-i theta} a^dag^2)} and real alpha.
/// Built on a padded workspace and truncated; throws if the discarded tail
/// population exceeds 1e-12.
inline Ket probe_ket(const ProbeSpec& spec, int n) {
  validate(spec);
  const int work = n + std::max(60, n / 2);
  const double r = spec.squeezing();
  const double alpha = spec.displacement();

  // Squeezing couples only even levels: exp(-i G_s) with
  // <2m+2|G_s|2m> = -(i r / 2) e^{-i theta} sqrt((2m+1)(2m+2)).
  const int half = (work + 1) / 2;
  Tridiagonal gs{Eigen::VectorXd::Zero(half), Eigen::VectorXcd(std::max(half - 1, 0))};
  const cplx sq_phase = cplx(0.0, -0.5 * r) * std::polar(1.0, -spec.theta);
  for (int m = 0; m + 1 < half; ++m) {
    gs.sub(m) = sq_phase * std::sqrt(static_cast<double>((2 * m + 1) * (2 * m + 2)));
  }
  Ket even = Ket::Zero(half);
  even(0) = 1.0;
  even = TridiagonalPropagator(gs).apply(even);
  Ket psi = Ket::Zero(work);
  for (int m = 0; m < half && 2 * m < work; ++m) psi(2 * m) = even(m);

  // D(alpha) = exp(-i G_d) with <k+1|G_d|k> = i alpha sqrt(k+1).
  Tridiagonal gd{Eigen::VectorXd::Zero(work), Eigen::VectorXcd(work - 1)};
  for (int k = 0; k + 1 < work; ++k) gd.sub(k) = cplx(0.0, alpha * std::sqrt(k + 1.0));
  psi = TridiagonalPropagator(gd).apply(psi);

  const double tail = psi.tail(work - n).squaredNorm();
  if (tail > 1e-12) {
    std::ostringstream msg;
    msg << "probe (n0=" << spec.n0 << ", beta=" << spec.beta << ") leaks population " << tail
        << " beyond cutoff " << n;
    throw CutoffError(msg.str());
  }
  Ket out = psi.head(n);
  return out / out.norm();
}

/// Smallest cutoff >= cutoff_rule(n_out) at which the probe's top-5 levels
/// carry less than 1e-12 population.
inline int recommended_cutoff(const ProbeSpec& spec, double n_out) {
  int n = cutoff_rule(n_out);
  for (;; n += 10) {
    try {
      const Ket psi = probe_ket(spec, n);
      if (psi.tail(5).squaredNorm() < 1e-12) return n;
    } catch (const CutoffError&) {
    }
    if (n > 2000) throw CutoffError("no adequate cutoff below 2000 levels");
  }
}

/// U = exp{-i(phi a^dag a + eta (a + a^dag))} applied to the probe.
inline FockState oracle_evolve_unitary(const ProbeSpec& spec, double phi, double eta, int cutoff) {
  const Ket psi = probe_ket(spec, cutoff);
  const TridiagonalPropagator u(rotation_displacement_generator(cutoff, phi, eta));
  FockState out = FockState::from_ket(u.apply(psi));
  check_adequacy(out);
  return out;
}

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Golub-Welsch: nodes are the Jacobi-matrix eigenvalues, weights mass * v0^2.
inline QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                                   double mass) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw OracleError("Golub-Welsch eigensolver failed");
  QuadratureRule rule;
  for (Eigen::Index k = 0; k < diag.size(); ++k) {
    const double v0 = solver.eigenvectors()(0, k);
    rule.nodes.push_back(solver.eigenvalues()(k));
    rule.weights.push_back(mass * v0 * v0);
  }
  return rule;
}

}  // namespace detail

/// Gauss-Laguerre rule for int_0^inf e^{-s} f(s) ds. Weights are returned as
/// logarithms: the far nodes have weights far below double precision, and the
/// radial average multiplies them by large factors.
struct LogQuadratureRule {
  std::vector<double> nodes;
  std::vector<double> log_weights;
};

inline LogQuadratureRule gauss_laguerre(int order) {
  if (order < 1) throw OracleError("quadrature order must be positive");
  Eigen::VectorXd diag(order);
  Eigen::VectorXd off(order - 1);
  for (int k = 0; k < order; ++k) diag(k) = 2.0 * k + 1.0;
  for (int k = 1; k < order; ++k) off(k - 1) = k;
  const QuadratureRule gw = detail::golub_welsch(diag, off, 1.0);
  // Laguerre polynomials are orthonormal for e^{-s}, so 1/w = sum_{k<n} L_k(s)^2.
  LogQuadratureRule rule;
  for (double x : gw.nodes) {
    double prev = 0.0, cur = 1.0, sumsq = 1.0, log_scale = 0.0;
    for (int k = 0; k + 1 < order; ++k) {
      const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
      prev = cur;
      cur = next;
      sumsq += cur * cur;
      if (std::abs(cur) > 1e100) {
        prev *= 1e-100;
        cur *= 1e-100;
        sumsq *= 1e-200;
        log_scale += 200.0 * std::log(10.0);
      }
    }
    rule.nodes.push_back(x);
    rule.log_weights.push_back(-(std::log(sumsq) + log_scale));
  }
  return rule;
}

/// Default radial order. Doubling it moves the certification moments by well
/// under 1e-7, see the convergence test.
inline int default_quad_order(int /*cutoff*/) { return 40; }

/// Noise average of U_{phi,(eta1,eta2)} rho U^dag with eta1, eta2 ~ N(0, delta^2).
///
/// In polar form zeta = eta1 + i eta2 = r e^{i chi}, U_zeta = E_chi U_r E_chi^dag with
/// E_chi = e^{i chi a^dag a}. The chi-average is then exact: it keeps only terms with
/// j - l = k - m in  sum_{k,m} U_r(j,k) psi_k conj(psi_m) conj(U_r(l,m)).
/// The radial average uses t = r^2 / (2 delta^2) (weight e^{-t}). Matrix elements of
/// U_r carry e^{-r^2/2}, so the rule is Gauss-Laguerre in s = (1 + 2 delta^2) t, which
/// makes the phi = 0 integrand polynomial.
inline FockState oracle_evolve_random(const ProbeSpec& spec, double phi, double delta, int cutoff,
                                      int quad_order) {
  if (quad_order < 20) throw OracleError("quadrature order must be >= 20");
  if (!(delta >= 0.0)) throw OracleError("delta must be >= 0");
  if (delta == 0.0) return oracle_evolve_unitary(spec, phi, 0.0, cutoff);
  const Ket psi = probe_ket(spec, cutoff);
  const int n = cutoff;
  const LogQuadratureRule rule = gauss_laguerre(quad_order);
  const double stretch = 1.0 + 2.0 * delta * delta;

  Density rho = Density::Zero(n, n);
  for (int q = 0; q < quad_order; ++q) {
    const double s = rule.nodes[q];
    const double r2 = 2.0 * delta * delta * s / stretch;
    // e^{-t} dt = e^{-s} e^{r^2} ds / stretch
    const double w = std::exp(rule.log_weights[q] + r2) / stretch;
    if (w < 1e-18) continue;
    const double r = std::sqrt(r2);
    // Full propagator U_r = exp{-i(phi a^dag a + r (a + a^dag))}.
    const TridiagonalPropagator prop(rotation_displacement_generator(n, phi, cplx(r, 0.0)));
    Density u(n, n);
    for (int k = 0; k < n; ++k) u.col(k) = prop.apply(Ket::Unit(n, k));
    for (int offset = -(n - 1); offset < n; ++offset) {
      const int k_lo = std::max(0, offset);
      const int k_hi = std::min(n, n + offset);
      for (int j = std::max(0, offset); j < std::min(n, n + offset); ++j) {
        const int l = j - offset;
        cplx acc = 0.0;
        for (int k = k_lo; k < k_hi; ++k) {
          acc += u(j, k) * psi(k) * std::conj(psi(k - offset) * u(l, k - offset));
        }
        rho(j, l) += w * acc;
      }
    }
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  FockState state{rho};
  const double defect = std::abs(state.trace() - 1.0);
  if (defect > 1e-6) {
    std::ostringstream msg;
    msg << "random-disturbance average has trace defect " << defect;
    throw OracleError(msg.str());
  }
  check_adequacy(state);
  return state;
}

inline FockState oracle_evolve_random(const ProbeSpec& spec, double phi, double delta,
                                      int cutoff) {
  return oracle_evolve_random(spec, phi, delta, cutoff, default_quad_order(cutoff));
}

/// Smallest cutoff, stepping by 10 from `start`, at which evolve(cutoff)
/// passes the adequacy check.
template <typename Evolve>
int grow_cutoff(int start, Evolve&& evolve) {
  for (int n = start; n <= 2000; n += 10) {
    try {
      evolve(n);
      return n;
    } catch (const CutoffError&) {
    }
  }
  throw CutoffError("no adequate cutoff below 2000 levels");
}

/// Output cutoffs for the two channels. Noise and displacement push population
/// above the probe's support, so these start from the photon-number rule at
/// n0 + 2 (eta^2 or delta^2) and grow until the output itself is adequate.
inline int unitary_channel_cutoff(const ProbeSpec& spec, double phi, double eta) {
  return grow_cutoff(recommended_cutoff(spec, spec.n0 + 2.0 * eta * eta),
                     [&](int n) { oracle_evolve_unitary(spec, phi, eta, n); });
}

inline int random_channel_cutoff(const ProbeSpec& spec, double phi, double delta) {
  return grow_cutoff(recommended_cutoff(spec, spec.n0 + 2.0 * delta * delta),
                     [&](int n) { oracle_evolve_random(spec, phi, delta, n); });
}

/// First and second quadrature moments of a truncated density matrix.
inline GaussianState quadrature_moments(const FockState& s) {
  const int n = s.cutoff();
  const Density a = annihilation(n);
  const Density ad = a.adjoint();
  const Density q = a + ad;
  const Density p = cplx(0.0, -1.0) * (a - ad);
  auto expect = [&](const Density& op) { return (s.rho * op).trace().real(); };
  GaussianState g;
  g.mean = Vec2(expect(q), expect(p));
  // Q^2 and P^2 from untruncated matrix elements: Q^2 = a^2 + a^dag^2 + 2 a^dag a + 1.
  const Density a2 = a * a;
  const Density num = ad * a;
  const Density id = Density::Identity(n, n);
  const Density qq = a2 + a2.adjoint() + 2.0 * num + id;
  const Density pp = -(a2 + a2.adjoint()) + 2.0 * num + id;
  const Density qp_sym = cplx(0.0, -1.0) * (a2 - a2.adjoint());  // (QP + PQ)/2
  g.cov(0, 0) = expect(qq) - g.mean(0) * g.mean(0);
  g.cov(1, 1) = expect(pp) - g.mean(1) * g.mean(1);
  g.cov(0, 1) = g.cov(1, 0) = expect(qp_sym) - g.mean(0) * g.mean(1);
  return g;
}

inline double mean_photon_number(const FockState& s) {
  double n = 0.0;
  for (int k = 0; k < s.cutoff(); ++k) n += k * s.population(k);
  return n;
}

using StateFamily = std::function<FockState(double)>;

/// QFI Tr[rho L^2] from the SLD equation 2 rho' = L rho + rho L, with rho'
/// from a central difference. Eigenpairs with lambda_i + lambda_j < 1e-12 are dropped.
inline double oracle_qfi(const StateFamily& family, double phi, double step) {
  if (!(step >= 1e-5 && step <= 1e-3)) throw OracleError("SLD step must lie in [1e-5, 1e-3]");
  const FockState centre = family(phi);
  const Density drho = (family(phi + step).rho - family(phi - step).rho) / (2.0 * step);

  Eigen::SelfAdjointEigenSolver<Density> solver(centre.rho);
  if (solver.info() != Eigen::Success) throw OracleError("density eigensolver failed");
  const Eigen::VectorXd lambda = solver.eigenvalues();
  if (lambda.minCoeff() < -1e-8) {
    std::ostringstream msg;
    msg << "density matrix has eigenvalue " << lambda.minCoeff() << " < -1e-8";
    throw InvalidDensity(msg.str());
  }
  const Density d = solver.eigenvectors().adjoint() * drho * solver.eigenvectors();
  double h = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      const double denom = lambda(i) + lambda(j);
      if (denom < 1e-12) continue;
      h += 2.0 * std::norm(d(i, j)) / denom;
    }
  }
  return h;
}

/// Uniform grid on [-half_width, half_width].
inline std::vector<double> homodyne_grid(double step = 0.01, double half_width = 20.0) {
  const int n = static_cast<int>(std::lround(2.0 * half_width / step));
  std::vector<double> x(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = -half_width + step * i;
  return x;
}

namespace detail {

// Number-state wavefunctions in the Q = a + a^dag representation (vacuum
// variance 1): psi_{n+1} = (x psi_n - sqrt(n) psi_{n-1}) / sqrt(n+1).
inline Eigen::MatrixXd number_wavefunctions(int levels, std::span<const double> x) {
  Eigen::MatrixXd psi(levels, static_cast<Eigen::Index>(x.size()));
  const double norm0 = std::pow(2.0 * kPi, -0.25);
  for (std::size_t c = 0; c < x.size(); ++c) {
    psi(0, c) = norm0 * std::exp(-0.25 * x[c] * x[c]);
    if (levels > 1) psi(1, c) = x[c] * psi(0, c);
    for (int n = 1; n + 1 < levels; ++n) {
      psi(n + 1, c) = (x[c] * psi(n, c) - std::sqrt(static_cast<double>(n)) * psi(n - 1, c)) /
                      std::sqrt(n + 1.0);
    }
  }
  return psi;
}

inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

}  // namespace detail

/// Outcome density of homodyne detection of X_w = a e^{iw} + h.c.
/// The grid must cover [-20, 20]; throws if the density misses unit mass by more than 1e-6.
inline std::vector<double> oracle_homodyne_pdf(const FockState& s, double omega,
                                               std::span<const double> x) {
  if (x.empty() || x.front() > -20.0 || x.back() < 20.0) {
    throw OracleError("homodyne grid must cover [-20, 20]");
  }
  const int n = s.cutoff();
  // X_w = R^dag Q R with R = e^{i w a^dag a}, so measure Q on R rho R^dag.
  Density rotated = s.rho;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) rotated(j, k) *= std::polar(1.0, omega * (j - k));
  }
  const Eigen::MatrixXd psi = detail::number_wavefunctions(n, x);
  const Eigen::MatrixXcd weighted = rotated * psi.cast<cplx>();
  std::vector<double> pdf(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    pdf[c] = std::max(0.0, (psi.col(c).cast<cplx>().transpose() * weighted.col(c))(0).real());
  }
  const double mass = detail::trapezoid(x, pdf);
  if (std::abs(mass - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "homodyne pdf integrates to " << mass;
    throw OracleError(msg.str());
  }
  return pdf;
}

/// Classical Fisher information of the homodyne pdf, by central differences in phi.
inline double oracle_homodyne_fi(const StateFamily& family, double phi, double omega, double step,
                                 std::span<const double> x) {
  const std::vector<double> p = oracle_homodyne_pdf(family(phi), omega, x);
  const std::vector<double> up = oracle_homodyne_pdf(family(phi + step), omega, x);
  const std::vector<double> dn = oracle_homodyne_pdf(family(phi - step), omega, x);
  std::vector<double> integrand(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (p[i] < 1e-14) continue;
    const double dp = (up[i] - dn[i]) / (2.0 * step);
    integrand[i] = dp * dp / p[i];
  }
  return detail::trapezoid(x, integrand);
}

}  // namespace cvpm::fock
