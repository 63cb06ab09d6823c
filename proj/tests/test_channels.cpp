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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "cvpm/channels.hpp"

using namespace cvpm;

namespace {

// Central differences of the channel maps; test-only oracle for channel_derivatives.
StateDerivatives finite_difference(const GaussianState& probe, const ChannelModel& model,
                                   double phi, double h = 1e-5) {
  const GaussianState up = apply_channel(probe, model, phi + h);
  const GaussianState dn = apply_channel(probe, model, phi - h);
  StateDerivatives d;
  d.dmean = (up.mean - dn.mean) / (2 * h);
  d.dcov = (up.cov - dn.cov) / (2 * h);
  d.dpurity = (purity(up) - purity(dn)) / (2 * h);
  return d;
}

void expect_close(double analytic, double numeric, const std::string& what) {
  const double tol = std::max(1e-9, 1e-6 * std::abs(analytic));
  EXPECT_NEAR(analytic, numeric, tol) << what;
}

const std::vector<ProbeSpec> kProbes = {
    {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, {2.0, 0.5, kPi}, {0.7, 0.3, 1.3}};

}  // namespace

TEST(UnitaryDisturbance, VacuumAtZeroPhase) {
  const GaussianState out = apply_unitary_disturbance(GaussianState::vacuum(), 0.0, 1.0);
  EXPECT_NEAR(out.mean(0), 0.0, 1e-15);
  EXPECT_NEAR(out.mean(1), -2.0, 1e-15);
  EXPECT_NEAR((out.cov - Mat2::Identity()).norm(), 0.0, 1e-15);
}

TEST(UnitaryDisturbance, ZeroEtaIsRotation) {
  const GaussianState s = make_probe({1.5, 0.4, 0.8});
  for (double phi : {-0.4, 0.0, 0.3, 2.0}) {
    const GaussianState a = apply_unitary_disturbance(s, phi, 0.0);
    const GaussianState b = rotate(s, phi);
    EXPECT_NEAR((a.mean - b.mean).norm(), 0.0, 1e-15);
    EXPECT_NEAR((a.cov - b.cov).norm(), 0.0, 1e-15);
  }
}

TEST(UnitaryDisturbance, OutputPhotonNumberAddsEtaSquared) {
  const GaussianState out = apply_unitary_disturbance(make_probe({1.0, 1.0, 0.0}), 0.0, 0.5);
  EXPECT_NEAR(mean_photon_number(out), 1.25, 1e-12);
}

TEST(UnitaryDisturbance, SmallPhaseBranchIsContinuous) {
  for (double eta : {0.3, 1.0}) {
    for (double phi : {9.99e-3, 1.001e-2, 1e-6, 1e-7}) {
      // direct evaluation with 2 sin^2(phi/2) is accurate in this range
      const double s = std::sin(0.5 * phi);
      const Vec2 exact(-2 * eta * 2 * s * s / phi, -2 * eta * std::sin(phi) / phi);
      EXPECT_NEAR((unitary_displacement(phi, eta) - exact).norm(), 0.0, 1e-14) << phi;
    }
  }
}

TEST(UnitaryDisturbance, PurityPreserved) {
  for (const ProbeSpec& p : kProbes) {
    for (double phi : {0.0, 0.2, -1.0}) {
      for (double eta : {0.0, 0.5, 1.5}) {
        const GaussianState out = apply_unitary_disturbance(make_probe(p), phi, eta);
        EXPECT_NEAR(purity(out), 1.0, 1e-12);
      }
    }
  }
}

TEST(RandomDisturbance, VacuumAtZeroPhase) {
  const GaussianState out = apply_random_disturbance(GaussianState::vacuum(), 0.0, 0.5);
  EXPECT_NEAR(out.mean.norm(), 0.0, 1e-15);
  EXPECT_NEAR((out.cov - 2.0 * Mat2::Identity()).norm(), 0.0, 1e-15);
}

TEST(RandomDisturbance, ZeroDeltaIsRotation) {
  const GaussianState s = make_probe({1.5, 0.4, 0.8});
  const GaussianState a = apply_random_disturbance(s, 0.7, 0.0);
  const GaussianState b = rotate(s, 0.7);
  EXPECT_NEAR((a.mean - b.mean).norm(), 0.0, 1e-15);
  EXPECT_NEAR((a.cov - b.cov).norm(), 0.0, 1e-15);
}

TEST(RandomDisturbance, OutputPhotonNumberAddsTwoDeltaSquared) {
  const GaussianState out = apply_random_disturbance(make_probe({1.0, 0.0, 0.0}), 0.0, 1.0);
  EXPECT_NEAR(mean_photon_number(out), 3.0, 1e-12);
  // away from phi = 0 the added energy carries kappa(phi)^2
  const double phi = 0.8;
  const double kappa = 2 * std::sin(phi / 2) / phi;
  const GaussianState away = apply_random_disturbance(make_probe({1.0, 0.0, 0.0}), phi, 1.0);
  EXPECT_NEAR(mean_photon_number(away), 1.0 + 2.0 * kappa * kappa, 1e-12);
}

TEST(RandomDisturbance, RejectsNegativeDelta) {
  EXPECT_THROW(apply_random_disturbance(GaussianState::vacuum(), 0.0, -0.1), InvalidChannel);
  EXPECT_THROW(channel_derivatives(GaussianState::vacuum(), RandomDisturbance{-1.0}, 0.0),
               InvalidChannel);
}

TEST(RandomDisturbance, NeverIncreasesPurity) {
  for (const ProbeSpec& p : kProbes) {
    const GaussianState in = make_probe(p);
    for (double phi : {0.0, 0.1, 1.0}) {
      for (double delta : {0.0, 0.3, 1.0, 2.5}) {
        const GaussianState out = apply_random_disturbance(in, phi, delta);
        EXPECT_LE(purity(out), purity(in) + 1e-15);
        EXPECT_GE(out.cov.determinant(), in.cov.determinant() - 1e-12);
      }
    }
  }
}

TEST(ChannelDerivatives, UnitaryVacuumExample) {
  const StateDerivatives d =
      channel_derivatives(GaussianState::vacuum(), UnitaryDisturbance{1.0}, 0.0);
  EXPECT_NEAR(d.dmean(0), -1.0, 1e-15);
  EXPECT_NEAR(d.dmean(1), 0.0, 1e-15);
  EXPECT_NEAR(d.dcov.norm(), 0.0, 1e-15);
  EXPECT_NEAR(d.dpurity, 0.0, 1e-15);
}

TEST(ChannelDerivatives, CoherentUnderRandomNoise) {
  const StateDerivatives d =
      channel_derivatives({Vec2(2.0, 0.0), Mat2::Identity()}, RandomDisturbance{0.7}, 0.0);
  EXPECT_NEAR(d.dmean(0), 0.0, 1e-15);
  EXPECT_NEAR(d.dmean(1), -2.0, 1e-15);
  EXPECT_NEAR(d.dcov.norm(), 0.0, 1e-15);
  EXPECT_NEAR(d.dpurity, 0.0, 1e-15);
}

TEST(ChannelDerivatives, SqueezedVacuumCommutator) {
  const double u = 0.3;
  GaussianState s;
  s.cov = Vec2(u, 1 / u).asDiagonal();
  const StateDerivatives d = channel_derivatives(s, RandomDisturbance{0.4}, 0.0);
  EXPECT_NEAR(d.dcov(0, 1), 1 / u - u, 1e-14);
  EXPECT_NEAR(d.dcov(1, 0), 1 / u - u, 1e-14);
  EXPECT_NEAR(d.dcov(0, 0), 0.0, 1e-14);
  EXPECT_NEAR(d.dcov(1, 1), 0.0, 1e-14);
  EXPECT_NEAR(d.dmean.norm(), 0.0, 1e-15);
  EXPECT_NEAR(d.dpurity, 0.0, 1e-14);
}

TEST(ChannelDerivatives, AgreeWithFiniteDifferences) {
  const std::vector<ChannelModel> models = {UnitaryDisturbance{0.0}, UnitaryDisturbance{0.7},
                                            UnitaryDisturbance{-1.3}, RandomDisturbance{0.0},
                                            RandomDisturbance{0.5}, RandomDisturbance{1.2}};
  for (const ProbeSpec& p : kProbes) {
    const GaussianState probe = make_probe(p);
    for (const ChannelModel& m : models) {
      for (double phi : {0.0, 3e-3, 0.05, 0.4, -1.1}) {
        const StateDerivatives a = channel_derivatives(probe, m, phi);
        const StateDerivatives n = finite_difference(probe, m, phi);
        const std::string tag = describe(m) + " phi=" + std::to_string(phi);
        for (int i = 0; i < 2; ++i) {
          expect_close(a.dmean(i), n.dmean(i), tag + " dmean");
          for (int j = 0; j < 2; ++j) expect_close(a.dcov(i, j), n.dcov(i, j), tag + " dcov");
        }
        expect_close(a.dpurity, n.dpurity, tag + " dpurity");
        EXPECT_TRUE(is_symmetric(a.dcov));
      }
    }
  }
}

TEST(ChannelDerivatives, PurityDerivativeConsistentWithCovariance) {
  const GaussianState probe = make_probe({1.3, 0.6, 0.4});
  for (double phi : {0.0, 0.2, 0.9}) {
    const ChannelModel m = RandomDisturbance{0.8};
    const StateDerivatives d = channel_derivatives(probe, m, phi);
    const GaussianState out = apply_channel(probe, m, phi);
    const double mu = purity(out);
    const double expected = -0.5 * mu * (out.cov.inverse() * d.dcov).trace();
    EXPECT_NEAR(d.dpurity, expected, 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST(ChannelDerivatives, RandomNoiseKeepsPurityStationaryAtZero) {
  for (double n0 : {0.0, 0.5, 1.0, 5.0, 20.0}) {
    for (double beta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      for (double theta : {0.0, kPi / 3, kPi}) {
        for (double delta : {0.3, 1.0}) {
          const StateDerivatives d =
              channel_derivatives(make_probe({n0, beta, theta}), RandomDisturbance{delta}, 0.0);
          EXPECT_LT(std::abs(d.dpurity), 1e-10);
        }
      }
    }
  }
}
