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

// Cross-checks of the phase-space engine against the Fock-space oracle on a
// grid of probes and channels.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cvpm/channels.hpp"
#include "cvpm/fock_oracle.hpp"
#include "cvpm/metrology.hpp"
#include "cvpm/optimize.hpp"
#include "cvpm/parallel.hpp"

namespace cvpm {

struct CertificationPoint {
  ProbeSpec probe;
  double phi = 0.0;
  ChannelModel model;
};

struct Tolerances {
  double unitary_moments = 1e-6;  ///< absolute, first and second moments
  double random_moments = 1e-5;
  double qfi = 1e-4;              ///< relative
  double homodyne_fi = 1e-3;      ///< relative
  double sld_step = 1e-4;
};

struct CertificationResult {
  CertificationPoint point;
  int cutoff = 0;
  double moment_error = 0.0;
  double qfi_oracle = 0.0, qfi_gaussian = 0.0, qfi_error = 0.0;
  double omega = 0.0;
  double fi_oracle = 0.0, fi_gaussian = 0.0, fi_error = 0.0;
  std::string failure;  ///< empty when every check passed

  bool passed() const { return failure.empty(); }
};

/// n0 in {0.25, 1, 2}, beta in {0, 0.5, 1}, theta in {0, pi}, phi in {0, 0.1},
/// and both channels at strengths {0, 0.5, 1}.
inline std::vector<CertificationPoint> certification_grid() {
  std::vector<CertificationPoint> grid;
  for (double n0 : {0.25, 1.0, 2.0}) {
    for (double beta : {0.0, 0.5, 1.0}) {
      for (double theta : {0.0, kPi}) {
        for (double phi : {0.0, 0.1}) {
          for (double eta : {0.0, 0.5, 1.0}) grid.push_back({{n0, beta, theta}, phi, UnitaryDisturbance{eta}});
          for (double delta : {0.0, 0.5, 1.0}) grid.push_back({{n0, beta, theta}, phi, RandomDisturbance{delta}});
        }
      }
    }
  }
  return grid;
}

inline std::string describe(const CertificationPoint& p) {
  std::ostringstream s;
  s << "n0=" << p.probe.n0 << " beta=" << p.probe.beta << " theta=" << p.probe.theta
    << " phi=" << p.phi << " " << describe(p.model);
  return s.str();
}

namespace detail {

inline double relative_error(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-12);
}

inline double max_moment_gap(const GaussianState& a, const GaussianState& b) {
  return std::max((a.mean - b.mean).cwiseAbs().maxCoeff(), (a.cov - b.cov).cwiseAbs().maxCoeff());
}

}  // namespace detail

/// Runs every check at one point. Oracle failures (inadequate cutoff,
/// normalisation defects) are reported as a failed result, not thrown.
inline CertificationResult certify_point(const CertificationPoint& p, const Tolerances& tol = {}) {
  CertificationResult r;
  r.point = p;
  try {
    const bool unitary = std::holds_alternative<UnitaryDisturbance>(p.model);
    const double strength = unitary ? std::get<UnitaryDisturbance>(p.model).eta
                                    : std::get<RandomDisturbance>(p.model).delta;
    r.cutoff = unitary ? fock::unitary_channel_cutoff(p.probe, p.phi, strength)
                       : fock::random_channel_cutoff(p.probe, p.phi, strength);
    // The SLD and homodyne checks both need the states at phi and phi +- step.
    std::map<double, fock::FockState> cache;
    const fock::StateFamily family = [&](double phi) {
      auto it = cache.find(phi);
      if (it == cache.end()) {
        it = cache.emplace(phi, unitary ? fock::oracle_evolve_unitary(p.probe, phi, strength, r.cutoff)
                                        : fock::oracle_evolve_random(p.probe, phi, strength, r.cutoff))
                 .first;
      }
      return it->second;
    };

    const GaussianState probe = make_probe(p.probe);
    r.moment_error =
        detail::max_moment_gap(fock::quadrature_moments(family(p.phi)), apply_channel(probe, p.model, p.phi));

    r.qfi_gaussian = qfi_gaussian(probe, p.model, p.phi).value;
    r.qfi_oracle = fock::oracle_qfi(family, p.phi, tol.sld_step);
    r.qfi_error = detail::relative_error(r.qfi_oracle, r.qfi_gaussian);

    r.omega = optimize_homodyne(probe, p.model, p.phi).omega;
    r.fi_gaussian = fi_homodyne(probe, p.model, p.phi, r.omega).value;
    r.fi_oracle = fock::oracle_homodyne_fi(family, p.phi, r.omega, tol.sld_step, fock::homodyne_grid());
    r.fi_error = detail::relative_error(r.fi_oracle, r.fi_gaussian);

    const double moment_tol = unitary ? tol.unitary_moments : tol.random_moments;
    std::ostringstream why;
    if (r.moment_error > moment_tol) why << "moment error " << r.moment_error << " > " << moment_tol;
    else if (r.qfi_error > tol.qfi) why << "QFI relative error " << r.qfi_error << " > " << tol.qfi;
    else if (r.fi_error > tol.homodyne_fi) why << "homodyne FI relative error " << r.fi_error << " > " << tol.homodyne_fi;
    r.failure = why.str();
  } catch (const Error& e) {
    r.failure = e.what();
  }
  return r;
}

inline std::vector<CertificationResult> certify(const std::vector<CertificationPoint>& grid,
                                                const Tolerances& tol = {}) {
  return parallel_map(grid.size(), [&](std::size_t i) { return certify_point(grid[i], tol); });
}

}  // namespace cvpm
