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

// Homodyne sampling and maximum-likelihood phase estimation, used to check
// that the estimator's mean squared error reaches 1 / (M F).

#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>

#include <Eigen/Dense>

#include "cvpm/channels.hpp"
#include "cvpm/errors.hpp"
#include "cvpm/gaussian.hpp"
#include "cvpm/metrology.hpp"
#include "cvpm/optimize.hpp"
#include "cvpm/parallel.hpp"
#include "cvpm/random.hpp"

namespace cvpm {

struct ExperimentConfig {
  ProbeSpec probe;
  ChannelModel model = UnitaryDisturbance{};
  double true_phase = 0.0;
  double omega = 0.0;
  int samples = 1;      ///< M, measurements per experiment
  int repetitions = 1;  ///< R, independent experiments
  std::uint64_t seed = 0;
};

inline void validate(const ExperimentConfig& c) {
  validate(c.probe);
  validate(c.model);
  if (c.samples < 1 || c.repetitions < 1) {
    std::ostringstream msg;
    msg << "experiment needs M >= 1 and R >= 1, got M=" << c.samples << " R=" << c.repetitions;
    throw Error(msg.str());
  }
}

/// Gaussian marginal of X_w on the encoded state.
struct HomodyneMarginal {
  double mean = 0.0;
  double variance = 1.0;
};

inline HomodyneMarginal homodyne_marginal(const GaussianState& probe, const ChannelModel& model,
                                          double phi, double omega) {
  const GaussianState out = apply_channel(probe, model, phi);
  const Vec2 u = homodyne_direction(omega);
  return {u.dot(out.mean), u.dot(out.cov * u)};
}

/// R x M homodyne outcomes; entry (r, m) depends only on (seed, r, m).
inline Eigen::MatrixXd sample_homodyne(const ExperimentConfig& c) {
  validate(c);
  const HomodyneMarginal marg =
      homodyne_marginal(make_probe(c.probe), c.model, c.true_phase, c.omega);
  const double sd = std::sqrt(marg.variance);
  Eigen::MatrixXd out(c.repetitions, c.samples);
  parallel_for(static_cast<std::size_t>(c.repetitions), [&](std::size_t r) {
    for (int m = 0; m < c.samples; ++m) {
      out(static_cast<Eigen::Index>(r), m) = marg.mean + sd * counter_normal(c.seed, r, m);
    }
  });
  return out;
}

enum class MleFlag { kOk, kBoundary, kDegenerate };

struct MleResult {
  double phi_hat = 0.0;
  MleFlag flag = MleFlag::kOk;
};

inline constexpr double kMleRange = 0.5;

/// Maximum-likelihood phase from homodyne outcomes on [-0.5, 0.5].
/// A 201-point scan picks the basin, golden section refines it to 1e-8.
inline MleResult mle_estimate(std::span<const double> outcomes, const GaussianState& probe,
                              const ChannelModel& model, double omega) {
  if (outcomes.empty()) throw Error("mle_estimate: no outcomes");
  double s1 = 0.0, s2 = 0.0;
  for (double x : outcomes) {
    s1 += x;
    s2 += x * x;
  }
  const double count = static_cast<double>(outcomes.size());
  bool all_equal = true;
  for (double x : outcomes) all_equal = all_equal && x == outcomes.front();

  // log L(phi) up to a constant, from sufficient statistics.
  auto log_likelihood = [&](double phi) {
    const HomodyneMarginal g = homodyne_marginal(probe, model, phi, omega);
    const double ss = s2 - 2.0 * g.mean * s1 + count * g.mean * g.mean;
    return -0.5 * (count * std::log(g.variance) + ss / g.variance);
  };

  constexpr int kScan = 201;
  const double step = 2.0 * kMleRange / (kScan - 1);
  double best_phi = -kMleRange;
  double best = log_likelihood(best_phi);
  for (int i = 1; i < kScan; ++i) {
    const double phi = -kMleRange + step * i;
    const double ll = log_likelihood(phi);
    if (ll > best) {
      best = ll;
      best_phi = phi;
    }
  }
  const double lo = std::max(-kMleRange, best_phi - step);
  const double hi = std::min(kMleRange, best_phi + step);
  const ScalarOptimum g = golden_section_max(log_likelihood, lo, hi, 1e-8);
  MleResult result{g.value >= best ? g.x : best_phi, MleFlag::kOk};

  if (all_equal) {
    result.flag = MleFlag::kDegenerate;
  } else if (std::abs(result.phi_hat) > kMleRange - 1e-6) {
    result.flag = MleFlag::kBoundary;
  }
  return result;
}

struct CrbReport {
  double mse = 0.0;
  double crb = 0.0;    ///< 1 / (M F)
  double ratio = 0.0;  ///< mse M F
  double qcrb = 0.0;   ///< 1 / (M H)
  double fi = 0.0;
  double qfi = 0.0;
  int flagged = 0;     ///< repetitions whose estimate hit the range edge or was degenerate
};

/// Runs R independent maximum-likelihood experiments of M homodyne shots each.
inline CrbReport crb_check(const ExperimentConfig& c) {
  validate(c);
  const GaussianState probe = make_probe(c.probe);
  const Eigen::MatrixXd outcomes = sample_homodyne(c);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = outcomes;

  const auto estimates = parallel_map(static_cast<std::size_t>(c.repetitions), [&](std::size_t r) {
    const std::span<const double> row(rows.data() + r * c.samples,
                                      static_cast<std::size_t>(c.samples));
    return mle_estimate(row, probe, c.model, c.omega);
  });

  CrbReport report;
  double sum_sq = 0.0;
  for (const MleResult& e : estimates) {
    const double err = e.phi_hat - c.true_phase;
    sum_sq += err * err;
    if (e.flag != MleFlag::kOk) ++report.flagged;
  }
  report.mse = sum_sq / c.repetitions;
  report.fi = fi_homodyne(probe, c.model, c.true_phase, c.omega).value;
  report.qfi = qfi_gaussian(probe, c.model, c.true_phase).value;
  report.crb = 1.0 / (c.samples * report.fi);
  report.qcrb = 1.0 / (c.samples * report.qfi);
  report.ratio = report.mse * c.samples * report.fi;
  return report;
}

}  // namespace cvpm
