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

#ifndef BEAMSHIFT_TYPES_HPP
#define BEAMSHIFT_TYPES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace beamshift {

template <typename Scalar> using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar> using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using CVectorX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using CMatrixX =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using Vec3 = Vector3<double>;
using Mat3 = Matrix3<double>;
using CVector = CVectorX<double>;
using CMatrix = CMatrixX<double>;
using cdouble = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;

/*
 * Propagation direction in an array's local frame.
 *
 * Elevation is measured from the array plane: elevation = pi/2 is broadside
 * (local +z), elevation = 0 lies in the aperture plane. Azimuth is measured
 * in the local x-y plane from +x towards +y. Every module uses this
 * convention; unit_vector() and direction_of() are the only conversions.
 */
struct Direction {
  double azimuth = 0.0;
  double elevation = 0.0;

  friend bool operator==(const Direction &, const Direction &) = default;
};

template <typename Scalar = double>
Vector3<Scalar> unit_vector(const Direction &dir) {
  const Scalar ce = std::cos(Scalar(dir.elevation));
  return {ce * std::cos(Scalar(dir.azimuth)), ce * std::sin(Scalar(dir.azimuth)),
          std::sin(Scalar(dir.elevation))};
}

// Inverse of unit_vector(). The input does not have to be normalized.
template <typename Derived>
Direction direction_of(const Eigen::MatrixBase<Derived> &v) {
  const double norm = v.norm();
  const double z = std::clamp(double(v(2)) / norm, -1.0, 1.0);
  return {std::atan2(double(v(1)), double(v(0))), std::asin(z)};
}

inline double wavelength(double carrier_hz) { return kSpeedOfLight / carrier_hz; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

} // namespace beamshift

#endif // BEAMSHIFT_TYPES_HPP
