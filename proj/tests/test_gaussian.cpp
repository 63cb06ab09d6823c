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

#include "cvpm/gaussian.hpp"

using namespace cvpm;

namespace {

void expect_mat_near(const Mat2& a, const Mat2& b, double tol) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(a(i, j), b(i, j), tol) << "(" << i << "," << j << ")";
}

}  // namespace

TEST(MakeProbe, VacuumCoherentAndSqueezed) {
  const GaussianState vac = make_probe({0.0, 0.0, 0.0});
  EXPECT_NEAR(vac.mean.norm(), 0.0, 1e-15);
  expect_mat_near(vac.cov, Mat2::Identity(), 1e-15);

  const GaussianState coh = make_probe({1.0, 0.0, 0.0});
  EXPECT_NEAR(coh.mean(0), 2.0, 1e-15);
  EXPECT_NEAR(coh.mean(1), 0.0, 1e-15);
  expect_mat_near(coh.cov, Mat2::Identity(), 1e-15);

  // r = asinh(1): e^{-2r} = 3 - 2 sqrt 2, e^{2r} = 3 + 2 sqrt 2
  const GaussianState sq = make_probe({1.0, 1.0, 0.0});
  EXPECT_NEAR(sq.mean.norm(), 0.0, 1e-15);
  EXPECT_NEAR(sq.cov(0, 0), 3.0 - 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(sq.cov(1, 1), 3.0 + 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(sq.cov(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(sq.cov(0, 0), 0.17157, 1e-5);
}

TEST(MakeProbe, ThetaPiSqueezesP) {
  const GaussianState s = make_probe({1.0, 1.0, kPi});
  EXPECT_NEAR(s.cov(1, 1), 3.0 - 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(s.cov(0, 0), 3.0 + 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(MakeProbe, RejectsInvalidSpecs) {
  EXPECT_THROW(make_probe({-0.1, 0.0, 0.0}), InvalidProbe);
  EXPECT_THROW(make_probe({1.0, 1.5, 0.0}), InvalidProbe);
  EXPECT_THROW(make_probe({1.0, -1e-3, 0.0}), InvalidProbe);
  EXPECT_THROW(make_probe({std::nan(""), 0.5, 0.0}), InvalidProbe);
}

TEST(MakeProbe, GridIsPureWithRequestedEnergy) {
  for (double n0 : {0.0, 0.5, 1.0, 5.0, 20.0}) {
    for (double beta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      for (double theta : {0.0, kPi / 3, kPi}) {
        const GaussianState s = make_probe({n0, beta, theta});
        EXPECT_TRUE(is_physical(s));
        EXPECT_NEAR(s.cov.determinant(), 1.0, 1e-10) << n0 << " " << beta << " " << theta;
        EXPECT_NEAR(mean_photon_number(s), n0, 1e-10) << n0 << " " << beta << " " << theta;
      }
    }
  }
}

TEST(MeanPhotonNumber, Examples) {
  EXPECT_DOUBLE_EQ(mean_photon_number(GaussianState::vacuum()), 0.0);
  EXPECT_NEAR(mean_photon_number({Vec2(2.0, 0.0), Mat2::Identity()}), 1.0, 1e-15);
  GaussianState sq;
  sq.cov = Vec2(3.0 - 2.0 * std::sqrt(2.0), 3.0 + 2.0 * std::sqrt(2.0)).asDiagonal();
  EXPECT_NEAR(mean_photon_number(sq), 1.0, 1e-12);
}

TEST(Purity, Examples) {
  EXPECT_DOUBLE_EQ(purity(GaussianState::vacuum()), 1.0);
  EXPECT_DOUBLE_EQ(purity({Vec2::Zero(), 2.0 * Mat2::Identity()}), 0.5);
  EXPECT_NEAR(purity(make_probe({1.0, 1.0, 0.0})), 1.0, 1e-12);
  GaussianState bad;
  bad.cov << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(purity(bad), InvalidState);
}

TEST(Rotate, QuarterTurnAndIdentity) {
  const GaussianState coh{Vec2(2.0, 0.0), Mat2::Identity()};
  const GaussianState q = rotate(coh, kPi / 2);
  EXPECT_NEAR(q.mean(0), 0.0, 1e-15);
  EXPECT_NEAR(q.mean(1), -2.0, 1e-15);
  expect_mat_near(q.cov, Mat2::Identity(), 1e-15);

  const GaussianState s = make_probe({2.0, 0.4, 1.1});
  const GaussianState same = rotate(s, 0.0);
  EXPECT_EQ(same.mean, s.mean);
  expect_mat_near(same.cov, s.cov, 0.0);
}

TEST(Rotate, HalfTurnNegatesMean) {
  GaussianState s;
  s.mean = Vec2(0.3, -1.2);
  s.cov = Vec2(0.25, 4.0).asDiagonal();
  const GaussianState r = rotate(s, kPi);
  EXPECT_NEAR(r.mean(0), -0.3, 1e-15);
  EXPECT_NEAR(r.mean(1), 1.2, 1e-15);
  expect_mat_near(r.cov, s.cov, 1e-15);
}

TEST(Rotate, PreservesInvariantsAndComposes) {
  const std::vector<double> angles = {-2.0, -0.3, 0.0, 0.7, 1.9, 3.5};
  for (double n0 : {0.5, 3.0}) {
    for (double beta : {0.0, 0.6, 1.0}) {
      const GaussianState s = make_probe({n0, beta, 0.9});
      for (double a : angles) {
        const GaussianState r = rotate(s, a);
        EXPECT_NEAR(r.cov.determinant(), s.cov.determinant(), 1e-12);
        EXPECT_NEAR(mean_photon_number(r), mean_photon_number(s), 1e-12);
        EXPECT_NEAR(purity(r), purity(s), 1e-12);
        EXPECT_TRUE(is_symmetric(r.cov));
        for (double b : angles) {
          const GaussianState two = rotate(r, b);
          const GaussianState one = rotate(s, a + b);
          EXPECT_NEAR((two.mean - one.mean).cwiseAbs().maxCoeff(), 0.0, 1e-12);
          EXPECT_NEAR((two.cov - one.cov).cwiseAbs().maxCoeff(), 0.0, 1e-12);
        }
      }
    }
  }
}

TEST(IsPhysical, RejectsSubVacuumDeterminant) {
  GaussianState s;
  s.cov = 0.5 * Mat2::Identity();
  EXPECT_FALSE(is_physical(s));
  s.cov << 1.0, 0.1, 0.2, 1.0;
  EXPECT_FALSE(is_physical(s));
  EXPECT_TRUE(is_physical(GaussianState::vacuum()));
}
