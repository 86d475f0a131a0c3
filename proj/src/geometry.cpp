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

#include "beamshift/geometry.hpp"

#include "beamshift/error.hpp"

namespace beamshift {

ArrayConfig::ArrayConfig(int rows, int cols, double wavelength_m)
    : ArrayConfig(rows, cols, wavelength_m, 0.5 * wavelength_m,
                  Mat3::Identity(), Vec3::Zero()) {}

ArrayConfig::ArrayConfig(int rows, int cols, double wavelength_m,
                         double element_spacing_m, const Mat3 &orientation,
                         const Vec3 &position)
    : rows_(rows), cols_(cols), wavelength_(wavelength_m),
      element_spacing_(element_spacing_m), orientation_(orientation),
      position_(position) {
  expects(rows >= 1 && cols >= 1, "ArrayConfig: rows and cols must be >= 1");
  expects(wavelength_m > 0.0, "ArrayConfig: wavelength must be positive");
  expects(element_spacing_m > 0.0,
          "ArrayConfig: element spacing must be positive");
  expects(is_rotation(orientation),
          "ArrayConfig: orientation must be a proper rotation");
  expects(position.allFinite(), "ArrayConfig: position must be finite");
}

ArrayConfig ArrayConfig::placed_at(const Vec3 &position) const {
  return ArrayConfig(rows_, cols_, wavelength_, element_spacing_, orientation_,
                     position);
}

ArrayConfig ArrayConfig::rotated(const Mat3 &orientation) const {
  return ArrayConfig(rows_, cols_, wavelength_, element_spacing_, orientation,
                     position_);
}

Direction ArrayConfig::local_direction(const Vec3 &world_vector) const {
  return direction_of(orientation_.transpose() * world_vector);
}

Mat3 facing_down() {
  Mat3 r;
  r << 1.0, 0.0, 0.0, //
      0.0, -1.0, 0.0, //
      0.0, 0.0, -1.0;
  return r;
}

bool is_rotation(const Mat3 &m, double tol) {
  if (!m.allFinite()) {
    return false;
  }
  const double ortho = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

} // namespace beamshift
