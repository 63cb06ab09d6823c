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

// Single-mode Gaussian states in phase space.
//
// Quadratures are Q = a + a^dag and P = -i(a - a^dag), so the vacuum
// covariance is the identity and a coherent state |alpha> with real alpha
// has mean (2 alpha, 0).

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "cvpm/errors.hpp"

namespace cvpm {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Mean quadrature vector and symmetric covariance of a single mode.
struct GaussianState {
  Vec2 mean = Vec2::Zero();
  Mat2 cov = Mat2::Identity();

  static GaussianState vacuum() { return {}; }
};

/// Pure probe D(alpha) S(r, theta)|0> parametrised by energy and the share of
/// that energy spent on squeezing.
struct ProbeSpec {
  double n0 = 0.0;     ///< mean photon number
  double beta = 0.0;   ///< squeezing fraction, 0 = coherent, 1 = squeezed vacuum
  double theta = 0.0;  ///< squeezing angle; 0 squeezes Q, pi squeezes P

  double squeezing() const { return std::asinh(std::sqrt(beta * n0)); }
  double displacement() const { return std::sqrt((1.0 - beta) * n0); }
};

/// phi-derivatives of an encoded state family at a working point.
struct StateDerivatives {
  Vec2 dmean = Vec2::Zero();
  Mat2 dcov = Mat2::Zero();
  double dpurity = 0.0;
};

/// Phase-space rotation for a -> e^{-i phi} a.
inline Mat2 rotation(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Mat2 r;
  r << c, s, -s, c;
  return r;
}

/// Generator of rotation(): d/dphi rotation(phi) = symplectic_j() * rotation(phi).
inline Mat2 symplectic_j() {
  Mat2 j;
  j << 0.0, 1.0, -1.0, 0.0;
  return j;
}

inline bool is_symmetric(const Mat2& m, double tol = 1e-12) {
  return std::abs(m(0, 1) - m(1, 0)) <= tol;
}

/// Symmetric, positive definite and det >= 1 - tol (uncertainty principle).
inline bool is_physical(const GaussianState& s, double tol = 1e-9) {
  if (!s.mean.allFinite() || !s.cov.allFinite()) return false;
  if (!is_symmetric(s.cov)) return false;
  if (s.cov(0, 0) <= 0.0 || s.cov.determinant() <= 0.0) return false;
  return s.cov.determinant() >= 1.0 - tol;
}

inline void validate(const ProbeSpec& spec) {
  if (!(spec.n0 >= 0.0) || !std::isfinite(spec.n0)) {
    std::ostringstream msg;
    msg << "invalid probe: n0 must be finite and >= 0, got " << spec.n0;
    throw InvalidProbe(msg.str());
  }
  if (!(spec.beta >= 0.0 && spec.beta <= 1.0)) {
    std::ostringstream msg;
    msg << "invalid probe: beta must lie in [0, 1], got " << spec.beta;
    throw InvalidProbe(msg.str());
  }
  if (!std::isfinite(spec.theta)) throw InvalidProbe("invalid probe: theta must be finite");
}

inline GaussianState make_probe(const ProbeSpec& spec) {
  validate(spec);
  const double r = spec.squeezing();
  const Mat2 rot = rotation(0.5 * spec.theta);
  GaussianState s;
  s.mean = Vec2(2.0 * spec.displacement(), 0.0);
  s.cov = rot * Vec2(std::exp(-2.0 * r), std::exp(2.0 * r)).asDiagonal() * rot.transpose();
  // kill the rounding asymmetry of the triple product
  s.cov(1, 0) = s.cov(0, 1);
  return s;
}

inline double mean_photon_number(const GaussianState& s) {
  return (s.cov.trace() + s.mean.squaredNorm() - 2.0) / 4.0;
}

/// 1 / sqrt(det cov); equals Tr[rho^2] for a single-mode Gaussian state.
inline double purity(const GaussianState& s) {
  const double det = s.cov.determinant();
  if (!(det > 0.0)) {
    std::ostringstream msg;
    msg << "invalid state: covariance determinant " << det << " is not positive";
    throw InvalidState(msg.str());
  }
  return 1.0 / std::sqrt(det);
}

inline GaussianState rotate(const GaussianState& s, double phi) {
  const Mat2 r = rotation(phi);
  GaussianState out;
  out.mean = r * s.mean;
  out.cov = r * s.cov * r.transpose();
  out.cov(1, 0) = out.cov(0, 1);
  return out;
}

}  // namespace cvpm
