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

#ifndef BEAMSHIFT_CODEBOOK_HPP
#define BEAMSHIFT_CODEBOOK_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "beamshift/types.hpp"

namespace beamshift {

enum class CodebookKind { DFT, OversampledSubset, CoarseLevel, ChildrenSet };

std::string_view to_string(CodebookKind kind);

struct Beam {
  CVector weights;
  Direction direction;          // mean pointing direction ("BD")
  std::optional<int> parent_id; // coarse beam index for hierarchy children
  int i1 = 0;                   // grid indices in the source DFT codebook
  int i2 = 0;
  bool visible = true; // false: spatial frequency outside the visible region
};

struct Codebook {
  std::vector<Beam> beams;
  int rows = 1;
  int cols = 1;
  int oversampling_rows = 1;
  int oversampling_cols = 1;
  CodebookKind kind = CodebookKind::DFT;

  std::size_t size() const { return beams.size(); }
  int array_size() const { return rows * cols; }
  // One beam per column.
  CMatrix weight_matrix() const;
  std::vector<Direction> directions() const;
  // Spatial frequencies (psi_rows, psi_cols) of beam b, wrapped to [-1/2, 1/2).
  std::pair<double, double> spatial_frequency(std::size_t b) const;
};

// Wraps a spatial frequency (cycles per element) into [-1/2, 1/2).
double wrap_spatial_frequency(double psi);

struct BeamPointing {
  Direction direction;
  bool visible;
};

/*
 * Direction whose steering phase progression matches spatial frequencies
 * (psi_rows, psi_cols): u_x = psi_rows / s, u_y = psi_cols / s with s the
 * element spacing in wavelengths. Points outside the unit disk are flagged
 * invisible and projected onto its rim.
 */
BeamPointing direction_from_spatial_frequency(double psi_rows, double psi_cols,
                                              double spacing_wavelengths = 0.5);

BeamPointing beam_direction(int i1, int i2, int rows, int cols,
                            int oversampling_rows, int oversampling_cols,
                            double spacing_wavelengths = 0.5);

template <typename Scalar = double>
CVectorX<Scalar> planar_dft_weights(int rows, int cols, Scalar psi_rows,
                                    Scalar psi_cols) {
  const Scalar amp = Scalar(1) / std::sqrt(Scalar(rows * cols));
  CVectorX<Scalar> w(rows * cols);
  for (int m = 0; m < rows; ++m) {
    for (int n = 0; n < cols; ++n) {
      w(m * cols + n) =
          std::polar(amp, Scalar(2 * kPi) * (Scalar(m) * psi_rows + Scalar(n) * psi_cols));
    }
  }
  return w;
}

// O1*rows x O2*cols beams in row-major (i1, i2) order.
Codebook dft_codebook(int rows, int cols, int oversampling_rows = 1,
                      int oversampling_cols = 1);

// Uniform sample without replacement among the visible beams, returned in
// canonical (i1, i2) order. Throws NotEnoughVisibleBeams.
Codebook random_subset(const Codebook &parent, std::size_t count,
                       std::uint64_t seed);

/*
 * Two-level codebook. The coarse level holds up to four wide beams formed on
 * the 2x2 top-left subarray (zero elsewhere); children[c] lists the indices
 * of the fine beams whose spatial-frequency cell belongs to coarse beam c.
 */
struct Hierarchy {
  Codebook coarse;
  Codebook fine;
  std::vector<std::vector<int>> children;
};

// Coarse level over the critically sampled rows x cols DFT codebook.
Hierarchy hierarchical_codebook(int rows, int cols);

// Groups an arbitrary DFT-derived fine codebook under the coarse beams.
// Coarse beams that would receive no child are dropped.
Hierarchy attach_to_coarse(Codebook fine);

nlohmann::json to_json(const Codebook &cb);
Codebook codebook_from_json(const nlohmann::json &doc);

} // namespace beamshift

#endif // BEAMSHIFT_CODEBOOK_HPP
