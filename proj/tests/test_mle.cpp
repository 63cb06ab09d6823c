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

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "cvpm/mle.hpp"

using namespace cvpm;

namespace {

double sample_mean(const Eigen::MatrixXd& m) { return m.mean(); }

double sample_variance(const Eigen::MatrixXd& m) {
  const double mu = m.mean();
  return (m.array() - mu).square().sum() / (m.size() - 1);
}

ExperimentConfig coherent_demo() {
  ExperimentConfig c;
  c.probe = {1, 0, 0};
  c.model = UnitaryDisturbance{0};
  c.true_phase = 0.05;
  c.omega = kPi / 2;
  c.samples = 1000;
  c.repetitions = 1000;
  c.seed = 42;
  return c;
}

}  // namespace

TEST(Philox, KnownAnswer) {
  const Philox4x32::Counter out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(CounterNormal, DeterministicAndStandard) {
  EXPECT_EQ(counter_normal(7, 3, 11), counter_normal(7, 3, 11));
  EXPECT_NE(counter_normal(7, 3, 11), counter_normal(7, 4, 11));
  EXPECT_NE(counter_normal(7, 3, 11), counter_normal(8, 3, 11));
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = counter_normal(1, 0, i);
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  EXPECT_NEAR(s4 / n, 3.0, 0.05);
}

TEST(SampleHomodyne, VacuumMarginal) {
  ExperimentConfig c;
  c.probe = {0, 0, 0};
  c.samples = 100000;
  c.seed = 3;
  const Eigen::MatrixXd x = sample_homodyne(c);
  ASSERT_EQ(x.rows(), 1);
  ASSERT_EQ(x.cols(), 100000);
  EXPECT_NEAR(sample_mean(x), 0.0, 0.02);
  EXPECT_NEAR(sample_variance(x), 1.0, 0.02);
}

TEST(SampleHomodyne, NoisyCoherentMarginal) {
  ExperimentConfig c;
  c.probe = {1, 0, 0};
  c.model = RandomDisturbance{0.5};
  c.samples = 50000;
  c.repetitions = 2;
  c.seed = 5;
  const Eigen::MatrixXd x = sample_homodyne(c);
  EXPECT_NEAR(sample_variance(x), 2.0, 0.03);
  EXPECT_NEAR(sample_mean(x), 2.0, 0.02);
}

TEST(SampleHomodyne, BitIdenticalAndScheduleIndependent) {
  ExperimentConfig c = coherent_demo();
  c.samples = 64;
  c.repetitions = 50;
  const Eigen::MatrixXd a = sample_homodyne(c);
  const Eigen::MatrixXd b = sample_homodyne(c);
  EXPECT_TRUE((a.array() == b.array()).all());

  // Refill the matrix on four workers in an arbitrary order.
  const HomodyneMarginal g = homodyne_marginal(make_probe(c.probe), c.model, c.true_phase, c.omega);
  Eigen::MatrixXd d(c.repetitions, c.samples);
  parallel_for(
      static_cast<std::size_t>(c.repetitions * c.samples),
      [&](std::size_t k) {
        const std::size_t i = static_cast<std::size_t>(c.repetitions * c.samples) - 1 - k;
        const int r = static_cast<int>(i) / c.samples, m = static_cast<int>(i) % c.samples;
        d(r, m) = g.mean + std::sqrt(g.variance) * counter_normal(c.seed, r, m);
      },
      4);
  EXPECT_TRUE((a.array() == d.array()).all());

  c.seed = 43;
  EXPECT_FALSE((a.array() == sample_homodyne(c).array()).all());
}

TEST(SampleHomodyne, RejectsEmptyExperiments) {
  ExperimentConfig c = coherent_demo();
  c.samples = 0;
  EXPECT_THROW(sample_homodyne(c), Error);
  c.samples = 5;
  c.repetitions = 0;
  EXPECT_THROW(sample_homodyne(c), Error);
}

TEST(MleEstimate, ConsistentAtLargeM) {
  ExperimentConfig c = coherent_demo();
  c.true_phase = 0.0;
  c.samples = 200000;
  c.repetitions = 1;
  const Eigen::MatrixXd x = sample_homodyne(c);
  const MleResult r = mle_estimate(std::span<const double>(x.data(), x.size()),
                                   make_probe(c.probe), c.model, c.omega);
  EXPECT_EQ(r.flag, MleFlag::kOk);
  EXPECT_NEAR(r.phi_hat, 0.0, 5e-3);
}

TEST(MleEstimate, WithinThreeSigmaOfTruth) {
  ExperimentConfig c = coherent_demo();
  c.true_phase = 0.1;
  c.samples = 10000;
  c.repetitions = 1;
  const GaussianState probe = make_probe(c.probe);
  const double sigma = 1.0 / std::sqrt(c.samples * fi_homodyne(probe, c.model, 0.1, c.omega).value);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    c.seed = seed;
    const Eigen::MatrixXd x = sample_homodyne(c);
    const MleResult r =
        mle_estimate(std::span<const double>(x.data(), x.size()), probe, c.model, c.omega);
    EXPECT_NEAR(r.phi_hat, 0.1, 3 * sigma) << seed;
  }
}

TEST(MleEstimate, FlagsDegenerateAndBoundaryInputs) {
  const GaussianState probe = make_probe({1, 0, 0});
  const std::vector<double> flat(100, 0.7);
  EXPECT_EQ(mle_estimate(flat, probe, UnitaryDisturbance{0}, kPi / 2).flag, MleFlag::kDegenerate);

  // Outcomes centred far beyond anything reachable for |phi| <= 0.5.
  std::vector<double> far;
  for (int i = 0; i < 100; ++i) far.push_back(-5.0 + 0.01 * (i % 7));
  const MleResult r = mle_estimate(far, probe, UnitaryDisturbance{0}, kPi / 2);
  EXPECT_EQ(r.flag, MleFlag::kBoundary);
  EXPECT_NEAR(std::abs(r.phi_hat), kMleRange, 1e-6);

  EXPECT_THROW(mle_estimate(std::vector<double>{}, probe, UnitaryDisturbance{0}, 0), Error);
}

TEST(CrbCheck, CoherentProbeSaturatesBound) {
  const CrbReport r = crb_check(coherent_demo());
  EXPECT_GE(r.ratio, 0.9);
  EXPECT_LE(r.ratio, 1.2);
  EXPECT_EQ(r.flagged, 0);
  EXPECT_NEAR(r.crb, 1.0 / (1000 * r.fi), 1e-15);
}

TEST(CrbCheck, NeverBeatsQuantumBound) {
  ExperimentConfig c;
  c.probe = {1, 1, 0};
  c.model = UnitaryDisturbance{0.5};
  c.true_phase = 0.0;
  c.omega = optimize_homodyne(make_probe(c.probe), c.model, 0.0).omega;
  c.samples = 1000;
  c.repetitions = 1000;
  c.seed = 42;
  const CrbReport r = crb_check(c);
  EXPECT_GE(r.mse, r.qcrb * 0.95);
  EXPECT_GE(r.ratio, 0.9);
  EXPECT_LE(r.ratio, 1.2);
}

TEST(CrbCheck, SingleShotOnlyPositive) {
  ExperimentConfig c = coherent_demo();
  c.samples = 1;
  c.repetitions = 200;
  const CrbReport r = crb_check(c);
  EXPECT_GT(r.mse, 0.0);
  EXPECT_GT(r.ratio, 0.0);
}

TEST(Parallel, MapKeepsIndexOrderAndPropagatesErrors) {
  const std::vector<int> sq = parallel_map(100, [](std::size_t i) { return static_cast<int>(i * i); }, 4);
  for (std::size_t i = 0; i < sq.size(); ++i) EXPECT_EQ(sq[i], static_cast<int>(i * i));
  std::atomic<int> calls{0};
  EXPECT_THROW(parallel_for(
                   1000,
                   [&](std::size_t i) {
                     ++calls;
                     if (i == 10) throw std::runtime_error("boom");
                   },
                   3),
               std::runtime_error);
  EXPECT_LT(calls.load(), 1000);
}
