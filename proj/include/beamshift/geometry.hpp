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

#ifndef BEAMSHIFT_GEOMETRY_HPP
#define BEAMSHIFT_GEOMETRY_HPP

#include "beamshift/types.hpp"

namespace beamshift {

/*
 * Uniform planar array of rows x cols isotropic elements in the local x-y
 * plane. Element (m, n) sits at element_spacing * (m, n, 0) in the local
 * frame; orientation maps local coordinates to world coordinates.
 */
class ArrayConfig {
public:
  ArrayConfig(int rows, int cols, double wavelength_m);
  ArrayConfig(int rows, int cols, double wavelength_m, double element_spacing_m,
              const Mat3 &orientation, const Vec3 &position);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }
  double wavelength() const { return wavelength_; }
  double element_spacing() const { return element_spacing_; }
  const Mat3 &orientation() const { return orientation_; }
  const Vec3 &position() const { return position_; }

  ArrayConfig placed_at(const Vec3 &position) const;
  ArrayConfig rotated(const Mat3 &orientation) const;

  // World-frame vector expressed in the local frame, as a direction.
  Direction local_direction(const Vec3 &world_vector) const;

private:
  int rows_;
  int cols_;
  double wavelength_;
  double element_spacing_;
  Mat3 orientation_;
  Vec3 position_;
};

// Orientation whose broadside (local +z) points at world -z: a ceiling or
// mast mounted panel looking down.
Mat3 facing_down();

bool is_rotation(const Mat3 &m, double tol = 1e-9);

/*
 * Array response towards dir, row-major over elements (index m * cols + n),
 * normalized to unit Euclidean norm.
 */
template <typename Scalar = double>
CVectorX<Scalar> steering_vector(const ArrayConfig &array, const Direction &dir) {
  const Vector3<Scalar> u = unit_vector<Scalar>(dir);
  const Scalar k = Scalar(2.0 * kPi / array.wavelength()) *
                   Scalar(array.element_spacing());
  const Scalar amp = Scalar(1) / std::sqrt(Scalar(array.size()));
  CVectorX<Scalar> a(array.size());
  for (int m = 0; m < array.rows(); ++m) {
    for (int n = 0; n < array.cols(); ++n) {
      const Scalar phase = k * (Scalar(m) * u(0) + Scalar(n) * u(1));
      a(m * array.cols() + n) = std::polar(amp, phase);
    }
  }
  return a;
}

} // namespace beamshift

#endif // BEAMSHIFT_GEOMETRY_HPP
