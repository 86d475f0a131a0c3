/*
 * Copyright 2026 The beamshift Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "beamshift/error.hpp"
#include "beamshift/geometry.hpp"
#include "support.hpp"

namespace bs = beamshift;
using bs::cdouble;

namespace {

// Element-wise reimplementation with its own index bookkeeping.
std::vector<cdouble> reference_steering(int rows, int cols, double spacing_wl,
                                        double az, double el) {
  const double ux = std::cos(el) * std::cos(az);
  const double uy = std::cos(el) * std::sin(az);
  std::vector<cdouble> out;
  for (int m = 0; m < rows; ++m) {
    for (int n = 0; n < cols; ++n) {
      const double phase = 2.0 * bs::kPi * spacing_wl * (m * ux + n * uy);
      out.emplace_back(std::cos(phase) / std::sqrt(rows * cols),
                       std::sin(phase) / std::sqrt(rows * cols));
    }
  }
  return out;
}

} // namespace

TEST(Steering, BroadsideIsFlat) {
  const bs::ArrayConfig a(4, 4, 0.02);
  const bs::CVector v = bs::steering_vector(a, {0.0, bs::kPi / 2});
  for (int i = 0; i < 16; ++i) {
    EXPECT_NEAR(v(i).real(), 0.25, 1e-15);
    EXPECT_NEAR(v(i).imag(), 0.0, 1e-15);
  }
}

TEST(Steering, TwoElementPhases) {
  const double r = 1.0 / std::sqrt(2.0);
  // Elements along local y, direction along y: half a wavelength of delay.
  const bs::CVector row = bs::steering_vector(bs::ArrayConfig(1, 2, 1.0), {bs::kPi / 2, 0.0});
  EXPECT_NEAR(std::abs(row(0) - cdouble(r, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(row(1) - cdouble(-r, 0)), 0.0, 1e-12);
  // Elements along local x, direction along y: no phase progression.
  const bs::CVector col = bs::steering_vector(bs::ArrayConfig(2, 1, 1.0), {bs::kPi / 2, 0.0});
  EXPECT_NEAR(std::abs(col(0) - cdouble(r, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(col(1) - cdouble(r, 0)), 0.0, 1e-12);
  // Elements along local x, direction along x.
  const bs::CVector along = bs::steering_vector(bs::ArrayConfig(2, 1, 1.0), {0.0, 0.0});
  EXPECT_NEAR(std::abs(along(1) - cdouble(-r, 0)), 0.0, 1e-12);
}

TEST(Steering, MatchesReferenceOnRandomPairs) {
  std::mt19937_64 rng(11);
  const bs::ArrayConfig a(4, 4, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const bs::Direction d1 = bs::testing::random_hemisphere(rng);
    const bs::Direction d2 = bs::testing::random_hemisphere(rng);
    const auto r1 = reference_steering(4, 4, 0.5, d1.azimuth, d1.elevation);
    const auto r2 = reference_steering(4, 4, 0.5, d2.azimuth, d2.elevation);
    cdouble ref(0.0, 0.0);
    for (std::size_t i = 0; i < r1.size(); ++i) ref += std::conj(r1[i]) * r2[i];
    const cdouble got =
        bs::steering_vector(a, d1).adjoint() * bs::steering_vector(a, d2);
    EXPECT_NEAR(std::abs(got), std::abs(ref), 1e-10);
    EXPECT_NEAR(std::abs(bs::steering_vector(a, d1).squaredNorm()), 1.0, 1e-12);
  }
}

TEST(Steering, UnitNormProperty) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> spacing(0.1, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const bs::ArrayConfig a(size(rng), size(rng), 0.01, 0.01 * spacing(rng),
                            bs::Mat3::Identity(), bs::Vec3::Zero());
    const bs::CVector v = bs::steering_vector(a, bs::testing::random_hemisphere(rng));
    ASSERT_NEAR(v.norm(), 1.0, 1e-12);
  }
}

TEST(Steering, FloatInstantiation) {
  const bs::ArrayConfig a(4, 4, 1.0);
  const auto vf = bs::steering_vector<float>(a, {0.3, 0.9});
  const auto vd = bs::steering_vector<double>(a, {0.3, 0.9});
  EXPECT_NEAR((vf.cast<cdouble>() - vd).norm(), 0.0, 1e-5);
}

TEST(Direction, AzimuthPeriodicity) {
  const bs::Vec3 a = bs::unit_vector(bs::Direction{0.7, 0.2});
  const bs::Vec3 b = bs::unit_vector(bs::Direction{0.7 + 2 * bs::kPi, 0.2});
  EXPECT_LT((a - b).norm(), 1e-12);
}

TEST(Direction, RoundTripThroughUnitVector) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const bs::Direction d = bs::testing::random_hemisphere(rng);
    const bs::Direction back = bs::direction_of(bs::unit_vector(d));
    ASSERT_NEAR(back.azimuth, d.azimuth, 1e-9);
    ASSERT_NEAR(back.elevation, d.elevation, 1e-9);
  }
}

TEST(ArrayConfig, RejectsBadInput) {
  EXPECT_THROW(bs::ArrayConfig(0, 4, 0.02), bs::ContractViolation);
  EXPECT_THROW(bs::ArrayConfig(4, 4, -1.0), bs::ContractViolation);
  bs::Mat3 shear = bs::Mat3::Identity();
  shear(0, 1) = 0.5;
  EXPECT_THROW(bs::ArrayConfig(4, 4, 0.02, 0.01, shear, bs::Vec3::Zero()),
               bs::ContractViolation);
}

TEST(ArrayConfig, FacingDownSeesTheGround) {
  const bs::ArrayConfig a = bs::testing::bs_array();
  EXPECT_TRUE(bs::is_rotation(bs::facing_down()));
  const bs::Direction d = a.local_direction(bs::Vec3(0.0, 0.0, -1.0));
  EXPECT_NEAR(d.elevation, bs::kPi / 2, 1e-12);
}

TEST(ArrayConfig, LocalDirectionUndoesOrientation) {
  std::mt19937_64 rng(9);
  const bs::Mat3 r =
      Eigen::AngleAxisd(0.4, bs::Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const bs::ArrayConfig a = bs::ArrayConfig(4, 4, 0.02).rotated(r);
  for (int i = 0; i < 100; ++i) {
    const bs::Direction local = bs::testing::random_hemisphere(rng);
    const bs::Vec3 world = r * bs::unit_vector(local);
    const bs::Vec3 back = bs::unit_vector(a.local_direction(world));
    ASSERT_LT((back - bs::unit_vector(local)).norm(), 1e-12);
  }
}
