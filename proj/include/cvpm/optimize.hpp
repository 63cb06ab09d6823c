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

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cvpm/channels.hpp"
#include "cvpm/errors.hpp"
#include "cvpm/gaussian.hpp"
#include "cvpm/metrology.hpp"

namespace cvpm {

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi], stopping
/// once the bracket is narrower than tol. Returns the best interior probe.
template <typename F>
ScalarOptimum golden_section_max(F&& f, double lo, double hi, double tol = 1e-7,
                                 int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc >= fd ? ScalarOptimum{c, fc} : ScalarOptimum{d, fd};
}

inline double wrap_angle(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

struct ProbeOptimum {
  double beta_opt = 0.0;
  double theta_opt = 0.0;
  double qfi = 0.0;
  double n_out = 0.0;
};

namespace detail {

inline constexpr int kBetaGrid = 101;
inline constexpr int kThetaGrid = 64;
inline constexpr double kRefineTol = 1e-7;

// Relative QFI window inside which two probes count as equally good.
inline double tie_window(double best) { return 1e-9 * std::abs(best); }

}  // namespace detail

/// Maximises qfi_gaussian over the squeezing fraction and angle at fixed energy.
/// Coarse (beta, theta) grid, then two rounds of coordinate-wise golden section.
/// Among near-equal optima the smallest beta wins.
inline ProbeOptimum optimize_probe(double n0, const ChannelModel& model, double phi) {
  validate(ProbeSpec{n0, 0.0, 0.0});
  validate(model);
  auto objective = [&](double beta, double theta) {
    return qfi_gaussian(make_probe({n0, std::clamp(beta, 0.0, 1.0), theta}), model, phi).value;
  };

  std::vector<double> grid(detail::kBetaGrid * detail::kThetaGrid);
  double grid_max = -1.0;
  for (int i = 0; i < detail::kBetaGrid; ++i) {
    const double beta = static_cast<double>(i) / (detail::kBetaGrid - 1);
    for (int j = 0; j < detail::kThetaGrid; ++j) {
      const double theta = kTwoPi * j / detail::kThetaGrid;
      const double h = objective(beta, theta);
      grid[i * detail::kThetaGrid + j] = h;
      grid_max = std::max(grid_max, h);
    }
  }
  // Row-major scan visits smaller beta (then smaller theta) first.
  double beta = 0.0, theta = 0.0, best = grid_max;
  for (int idx = 0; idx < static_cast<int>(grid.size()); ++idx) {
    if (grid[idx] >= grid_max - detail::tie_window(grid_max)) {
      beta = static_cast<double>(idx / detail::kThetaGrid) / (detail::kBetaGrid - 1);
      theta = kTwoPi * (idx % detail::kThetaGrid) / detail::kThetaGrid;
      best = grid[idx];
      break;
    }
  }

  const double beta_step = 1.0 / (detail::kBetaGrid - 1);
  const double theta_step = kTwoPi / detail::kThetaGrid;
  for (int round = 0; round < 2; ++round) {
    {
      const double lo = std::max(0.0, beta - beta_step);
      const double hi = std::min(1.0, beta + beta_step);
      const ScalarOptimum g = golden_section_max([&](double b) { return objective(b, theta); }, lo,
                                                 hi, detail::kRefineTol);
      // Golden section never probes the bracket ends; beta = 0 and 1 are common optima.
      for (const ScalarOptimum cand : {ScalarOptimum{lo, objective(lo, theta)}, g,
                                       ScalarOptimum{hi, objective(hi, theta)}}) {
        const double window = detail::tie_window(std::max(best, cand.value));
        if (cand.value > best + window ||
            (std::abs(cand.value - best) <= window && cand.x < beta)) {
          beta = cand.x;
          best = cand.value;
        }
      }
    }
    {
      const ScalarOptimum g =
          golden_section_max([&](double t) { return objective(beta, t); }, theta - theta_step,
                             theta + theta_step, detail::kRefineTol);
      if (g.value > best) {
        theta = g.x;
        best = g.value;
      }
    }
  }

  ProbeOptimum out;
  out.beta_opt = beta;
  out.theta_opt = wrap_angle(theta, kTwoPi);
  // Refinement around theta = 0 can land just below 2 pi.
  if (kTwoPi - out.theta_opt < detail::kRefineTol) out.theta_opt = 0.0;
  const GaussianState probe = make_probe({n0, beta, out.theta_opt});
  out.qfi = qfi_gaussian(probe, model, phi).value;
  out.n_out = mean_photon_number(apply_channel(probe, model, phi));
  return out;
}

struct HomodyneOptimum {
  double omega = 0.0;
  double fi = 0.0;
};

/// Maximises homodyne Fisher information over the quadrature angle in [0, pi).
inline HomodyneOptimum optimize_homodyne(const GaussianState& probe, const ChannelModel& model,
                                         double phi) {
  constexpr int kGrid = 181;
  auto objective = [&](double w) { return fi_homodyne(probe, model, phi, w).value; };

  std::vector<double> values(kGrid);
  double grid_max = -1.0;
  for (int j = 0; j < kGrid; ++j) {
    values[j] = objective(kPi * j / kGrid);
    grid_max = std::max(grid_max, values[j]);
  }
  int pick = 0;
  while (values[pick] < grid_max - 1e-9 * std::max(1.0, grid_max)) ++pick;

  HomodyneOptimum out{kPi * pick / kGrid, values[pick]};
  const double step = kPi / kGrid;
  const ScalarOptimum g =
      golden_section_max(objective, out.omega - step, out.omega + step, detail::kRefineTol);
  if (g.value > out.fi) out = {g.x, g.value};
  out.omega = wrap_angle(out.omega, kPi);
  if (kPi - out.omega < detail::kRefineTol) out.omega = 0.0;
  return out;
}

/// Noise level above which a squeezed vacuum stops being the optimal probe
/// at energy n0 (phi = 0). Bisection on [0.1, 5] to 1e-4.
inline double threshold_delta(double n0) {
  constexpr double kLo = 0.1, kHi = 5.0, kTol = 1e-4;
  auto squeezed_optimal = [n0](double delta) {
    return optimize_probe(n0, RandomDisturbance{delta}, 0.0).beta_opt > 1.0 - 1e-3;
  };
  const bool at_lo = squeezed_optimal(kLo);
  const bool at_hi = squeezed_optimal(kHi);
  if (!at_lo || at_hi) {
    std::ostringstream msg;
    msg << "threshold_delta(n0=" << n0 << "): no transition in [" << kLo << ", " << kHi
        << "]; squeezed vacuum optimal at lo: " << (at_lo ? "yes" : "no")
        << ", at hi: " << (at_hi ? "yes" : "no");
    throw BracketFailure(msg.str());
  }
  double lo = kLo, hi = kHi;
  while (hi - lo > kTol) {
    const double mid = 0.5 * (lo + hi);
    (squeezed_optimal(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cvpm
