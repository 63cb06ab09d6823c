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

// Phase encoding with a linear Hamiltonian disturbance, in phase space.
//
// Unitary:  U = exp{-i(phi a^dag a + eta Q)} maps a -> e^{-i phi} a - (eta/phi)(1 - e^{-i phi}).
// Random:   U_{phi,(eta1,eta2)} with eta1, eta2 ~ N(0, delta^2), averaged over the noise;
//           the displacement magnitude carries kappa(phi) = 2 sin(phi/2) / phi.

#include <cmath>
#include <sstream>
#include <string>
#include <variant>

#include "cvpm/errors.hpp"
#include "cvpm/gaussian.hpp"

namespace cvpm {

struct UnitaryDisturbance {
  double eta = 0.0;
};

struct RandomDisturbance {
  double delta = 0.0;
};

using ChannelModel = std::variant<UnitaryDisturbance, RandomDisturbance>;

inline std::string describe(const ChannelModel& model) {
  std::ostringstream out;
  if (const auto* u = std::get_if<UnitaryDisturbance>(&model)) {
    out << "unitary(eta=" << u->eta << ")";
  } else {
    out << "random(delta=" << std::get<RandomDisturbance>(model).delta << ")";
  }
  return out.str();
}

inline void validate(const ChannelModel& model) {
  if (const auto* u = std::get_if<UnitaryDisturbance>(&model)) {
    if (!std::isfinite(u->eta)) throw InvalidChannel("invalid channel: eta must be finite");
    return;
  }
  const double delta = std::get<RandomDisturbance>(model).delta;
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    std::ostringstream msg;
    msg << "invalid channel: delta must be finite and >= 0, got " << delta;
    throw InvalidChannel(msg.str());
  }
}

namespace detail {

// Below this |phi| the trigonometric ratios switch to their Taylor series.
// Series are carried to phi^8 so the truncation error stays below 1e-26.
inline constexpr double kSeriesCut = 1e-2;

// (1 - cos phi) / phi
inline double one_minus_cos_over(double p) {
  if (std::abs(p) < kSeriesCut) {
    const double p2 = p * p;
    return p * (0.5 - p2 * (1.0 / 24 - p2 * (1.0 / 720 - p2 * (1.0 / 40320 - p2 / 3628800))));
  }
  const double s = std::sin(0.5 * p);
  return 2.0 * s * s / p;
}

inline double d_one_minus_cos_over(double p) {
  if (std::abs(p) < kSeriesCut) {
    const double p2 = p * p;
    return 0.5 - p2 * (1.0 / 8 - p2 * (1.0 / 144 - p2 * (1.0 / 5760 - p2 / 403200)));
  }
  const double s = std::sin(0.5 * p);
  return std::sin(p) / p - 2.0 * s * s / (p * p);
}

// sin phi / phi
inline double sinc(double p) {
  if (std::abs(p) < kSeriesCut) {
    const double p2 = p * p;
    return 1.0 - p2 * (1.0 / 6 - p2 * (1.0 / 120 - p2 * (1.0 / 5040 - p2 / 362880)));
  }
  return std::sin(p) / p;
}

inline double d_sinc(double p) {
  if (std::abs(p) < kSeriesCut) {
    const double p2 = p * p;
    return -p * (1.0 / 3 - p2 * (1.0 / 30 - p2 * (1.0 / 840 - p2 / 45360)));
  }
  return (p * std::cos(p) - std::sin(p)) / (p * p);
}

// kappa(phi)^2 = (2 sin(phi/2) / phi)^2
inline double kappa_sq(double p) {
  if (std::abs(p) < kSeriesCut) {
    const double p2 = p * p;
    return 1.0 - p2 * (1.0 / 12 - p2 * (1.0 / 360 - p2 * (1.0 / 20160 - p2 / 1814400)));
  }
  const double k = 2.0 * std::sin(0.5 * p) / p;
  return k * k;
}

inline double d_kappa_sq(double p) {
  if (std::abs(p) < kSeriesCut) {
    const double p2 = p * p;
    return -p * (1.0 / 6 - p2 * (1.0 / 90 - p2 * (1.0 / 3360 - p2 / 226800)));
  }
  const double s = std::sin(0.5 * p);
  return 2.0 * std::sin(p) / (p * p) - 8.0 * s * s / (p * p * p);
}

inline Mat2 symmetrized(const Mat2& m) { return 0.5 * (m + m.transpose()); }

}  // namespace detail

/// Displacement added by the unitary disturbance, in quadrature units.
inline Vec2 unitary_displacement(double phi, double eta) {
  return Vec2(-2.0 * eta * detail::one_minus_cos_over(phi), -2.0 * eta * detail::sinc(phi));
}

inline GaussianState apply_unitary_disturbance(const GaussianState& s, double phi, double eta) {
  GaussianState out = rotate(s, phi);
  out.mean += unitary_displacement(phi, eta);
  return out;
}

inline GaussianState apply_random_disturbance(const GaussianState& s, double phi, double delta) {
  validate(ChannelModel{RandomDisturbance{delta}});
  GaussianState out = rotate(s, phi);
  const double added = 4.0 * delta * delta * detail::kappa_sq(phi);
  out.cov(0, 0) += added;
  out.cov(1, 1) += added;
  return out;
}

inline GaussianState apply_channel(const GaussianState& s, const ChannelModel& model, double phi) {
  validate(model);
  if (const auto* u = std::get_if<UnitaryDisturbance>(&model)) {
    return apply_unitary_disturbance(s, phi, u->eta);
  }
  return apply_random_disturbance(s, phi, std::get<RandomDisturbance>(model).delta);
}

/// Analytic d/dphi of the encoded mean, covariance and purity.
inline StateDerivatives channel_derivatives(const GaussianState& probe, const ChannelModel& model,
                                            double phi) {
  validate(model);
  const Mat2 j = symplectic_j();
  const Mat2 rot = rotation(phi);
  const Mat2 cov_rot = rot * probe.cov * rot.transpose();

  StateDerivatives d;
  d.dmean = j * rot * probe.mean;
  d.dcov = j * cov_rot - cov_rot * j;

  if (const auto* u = std::get_if<UnitaryDisturbance>(&model)) {
    d.dmean += Vec2(-2.0 * u->eta * detail::d_one_minus_cos_over(phi),
                    -2.0 * u->eta * detail::d_sinc(phi));
  } else {
    const double delta = std::get<RandomDisturbance>(model).delta;
    const double dnoise = 4.0 * delta * delta * detail::d_kappa_sq(phi);
    d.dcov(0, 0) += dnoise;
    d.dcov(1, 1) += dnoise;
  }
  d.dcov = detail::symmetrized(d.dcov);

  const GaussianState out = apply_channel(probe, model, phi);
  const double mu = purity(out);
  d.dpurity = -0.5 * mu * (out.cov.inverse() * d.dcov).trace();
  return d;
}

}  // namespace cvpm
