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

#include <cmath>
#include <complex>
#include <sstream>

#include "cvpm/channels.hpp"
#include "cvpm/errors.hpp"
#include "cvpm/gaussian.hpp"

namespace cvpm {

struct FisherResult {
  double value = 0.0;
  double phi = 0.0;
  GaussianState probe;
  ChannelModel model;
};

namespace detail {

inline double clamp_fisher(double value, const char* what) {
  if (value >= 0.0) return value;
  if (value >= -1e-9) return 0.0;
  std::ostringstream msg;
  msg << what << " evaluated to " << value << " < 0";
  throw NumericalSingularity(msg.str());
}

}  // namespace detail

/// Quantum Fisher information of the encoded Gaussian family at phi:
///
///   H = 1/2 Tr[(s^-1 s')^2] / (1 + mu^2) + 2 mu'^2 / (1 - mu^4) + X'^T s^-1 X'
///
/// The purity term is dropped when |mu'| < 1e-9; a pure output with a
/// non-vanishing mu' means the derivatives are inconsistent and throws.
inline FisherResult qfi_gaussian(const GaussianState& probe, const ChannelModel& model,
                                 double phi) {
  const GaussianState out = apply_channel(probe, model, phi);
  const StateDerivatives d = channel_derivatives(probe, model, phi);
  const Mat2 inv = out.cov.inverse();
  const double mu = purity(out);

  const Mat2 a = inv * d.dcov;
  const double cov_term = 0.5 * (a * a).trace() / (1.0 + mu * mu);

  double purity_term = 0.0;
  if (std::abs(d.dpurity) >= 1e-9) {
    const double gap = 1.0 - mu * mu * mu * mu;
    if (gap < 1e-12) {
      std::ostringstream msg;
      msg << "purity term singular: 1 - mu^4 = " << gap << " with dmu/dphi = " << d.dpurity;
      throw NumericalSingularity(msg.str());
    }
    purity_term = 2.0 * d.dpurity * d.dpurity / gap;
  }

  const double mean_term = d.dmean.dot(inv * d.dmean);
  return {detail::clamp_fisher(cov_term + purity_term + mean_term, "QFI"), phi, probe, model};
}

/// Optimal-probe (squeezed vacuum along Q) QFI at phi = 0 under unitary disturbance.
inline double qfi_unitary_closed_form(double n0, double eta) {
  return 8.0 * n0 * (n0 + 1.0) + (2.0 * n0 + 2.0 * std::sqrt(n0 * (n0 + 1.0)) + 1.0) * eta * eta;
}

/// Measured quadrature X_w = Q cos w - P sin w, i.e. a e^{iw} + h.c.
inline Vec2 homodyne_direction(double omega) { return Vec2(std::cos(omega), -std::sin(omega)); }

/// Fisher information of homodyne detection at angle omega. The outcome
/// distribution is Gaussian with mean m = u.X and variance v = u^T s u.
inline FisherResult fi_homodyne(const GaussianState& probe, const ChannelModel& model, double phi,
                                double omega) {
  const GaussianState out = apply_channel(probe, model, phi);
  const StateDerivatives d = channel_derivatives(probe, model, phi);
  const Vec2 u = homodyne_direction(omega);
  const double v = u.dot(out.cov * u);
  if (!(v > 0.0)) {
    std::ostringstream msg;
    msg << "invalid state: homodyne variance " << v << " is not positive";
    throw InvalidState(msg.str());
  }
  const double dm = u.dot(d.dmean);
  const double dv = u.dot(d.dcov * u);
  return {detail::clamp_fisher(dm * dm / v + dv * dv / (2.0 * v * v), "homodyne FI"), phi, probe,
          model};
}

namespace detail {

// Coefficient k of the linear part of Gbar = a^dag a + k a + conj(k) a^dag + const, where
// k = int_0^1 conj(c(t)) e^{-i phi t} dt and c(t) = -(eta/phi)(1 - e^{-i phi t}).
inline std::complex<double> gbar_linear_coefficient(double phi, double eta) {
  using namespace std::complex_literals;
  if (std::abs(phi) < kSeriesCut) {
    // k = -eta sum_{m>=1} (-i)^m phi^{m-1} / (m+1)!
    std::complex<double> sum = 0.0;
    std::complex<double> power = -1i;  // (-i)^m
    double phi_pow = 1.0;              // phi^{m-1}
    double fact = 2.0;                 // (m+1)!
    for (int m = 1; m <= 12; ++m) {
      sum += power * phi_pow / fact;
      power *= -1i;
      phi_pow *= phi;
      fact *= static_cast<double>(m + 2);
    }
    return -eta * sum;
  }
  const std::complex<double> e = std::exp(-1i * phi);
  return -(eta / phi) * ((1.0 - e) / (1i * phi) - 1.0);
}

}  // namespace detail

/// QFI of U_{phi,eta}|psi0> as 4 Var(Gbar), with Gbar the time-averaged
/// Heisenberg-picture photon number. Gbar is quadratic in (Q, P):
///
///   Gbar = (Q^2 + P^2)/4 + Re(k) Q - Im(k) P + const,
///
/// and for a symmetric quadratic form X^T A X + b^T X on a Gaussian state
///   Var = 2 Tr[(A s)^2] + 2 Tr[(A W)^2] + (2 A m + b)^T s (2 A m + b),
/// where W is the commutator matrix [X_j, X_k] = 2i W_jk.
inline FisherResult qfi_gbar_unitary(const GaussianState& probe, double phi, double eta) {
  const double mu = purity(probe);
  if (mu < 1.0 - 1e-9) {
    std::ostringstream msg;
    msg << "qfi_gbar_unitary needs a pure probe, purity is " << mu;
    throw UnsupportedInput(msg.str());
  }
  const std::complex<double> k = detail::gbar_linear_coefficient(phi, eta);
  const Vec2 b(k.real(), -k.imag());
  const Vec2 w = 0.5 * probe.mean + b;
  // A = I/4: 2 Tr[(A s)^2] = Tr[s^2]/8 and 2 Tr[(A W)^2] = -1/4.
  const double var = (probe.cov * probe.cov).trace() / 8.0 - 0.25 + w.dot(probe.cov * w);
  return {detail::clamp_fisher(4.0 * var, "Gbar QFI"), phi, probe, UnitaryDisturbance{eta}};
}

}  // namespace cvpm
