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

// Fixtures shared by the unit tests.

#ifndef BEAMSHIFT_TESTS_SUPPORT_HPP
#define BEAMSHIFT_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>

#include "beamshift/channel.hpp"
#include "beamshift/error.hpp"
#include "beamshift/geometry.hpp"
#include "beamshift/world.hpp"

namespace beamshift::testing {

inline constexpr double kLambda15GHz = kSpeedOfLight / 15e9;

inline ArrayConfig bs_array(int n = 8) {
  return ArrayConfig(n, n, kLambda15GHz, 0.5 * kLambda15GHz, facing_down(),
                     Vec3(0.0, 0.0, 15.0));
}

inline ArrayConfig ue_array(const Vec3 &position, int n = 4) {
  return ArrayConfig(n, n, kLambda15GHz, 0.5 * kLambda15GHz, Mat3::Identity(), position);
}

// Channel with caller-chosen paths between the default BS and a UE array.
inline ChannelRealization make_channel(std::vector<Path> paths, int bs_n = 8, int ue_n = 4,
                                       int subcarriers = 24) {
  return {std::move(paths), 15e9, subcarriers, 30e3, bs_array(bs_n),
          ue_array(Vec3(50.0, 50.0, 1.5), ue_n)};
}

inline Path single_path(cdouble gain, const Direction &aod, const Direction &aoa,
                        double delay = 0.0) {
  return {gain, delay, aod, aoa, PathKind::LOS};
}

// Uniform over the upper hemisphere of the array's local frame.
inline Direction random_hemisphere(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> az(-kPi, kPi);
  std::uniform_real_distribution<double> sin_el(0.0, 1.0);
  return {az(rng), std::asin(sin_el(rng))};
}

// A few paths with random directions, gains and delays.
inline ChannelRealization random_channel(std::mt19937_64 &rng, int bs_n = 8, int ue_n = 4) {
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_real_distribution<double> mag(1e-7, 1e-5), phase(0.0, 2.0 * kPi),
      delay(0.0, 1e-6);
  std::vector<Path> paths;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    paths.push_back(single_path(std::polar(mag(rng), phase(rng)), random_hemisphere(rng),
                                random_hemisphere(rng), delay(rng)));
  }
  return make_channel(std::move(paths), bs_n, ue_n);
}

inline WorldLayout open_world() { return WorldLayout{}; }

} // namespace beamshift::testing

#endif // BEAMSHIFT_TESTS_SUPPORT_HPP
