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

#include "beamshift/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "beamshift/error.hpp"

namespace beamshift {

std::string_view to_string(CodebookKind kind) {
  switch (kind) {
  case CodebookKind::DFT:
    return "DFT";
  case CodebookKind::OversampledSubset:
    return "OversampledSubset";
  case CodebookKind::CoarseLevel:
    return "CoarseLevel";
  case CodebookKind::ChildrenSet:
    return "ChildrenSet";
  }
  return "?";
}

namespace {

CodebookKind parse_kind(const std::string &text) {
  for (const auto kind : {CodebookKind::DFT, CodebookKind::OversampledSubset,
                          CodebookKind::CoarseLevel, CodebookKind::ChildrenSet}) {
    if (text == to_string(kind)) {
      return kind;
    }
  }
  throw DataError("codebook: unknown kind '" + text + "'");
}

} // namespace

CMatrix Codebook::weight_matrix() const {
  CMatrix w(array_size(), static_cast<Eigen::Index>(beams.size()));
  for (std::size_t b = 0; b < beams.size(); ++b) {
    w.col(static_cast<Eigen::Index>(b)) = beams[b].weights;
  }
  return w;
}

std::vector<Direction> Codebook::directions() const {
  std::vector<Direction> out;
  out.reserve(beams.size());
  for (const Beam &b : beams) {
    out.push_back(b.direction);
  }
  return out;
}

std::pair<double, double> Codebook::spatial_frequency(std::size_t b) const {
  const Beam &beam = beams.at(b);
  return {wrap_spatial_frequency(double(beam.i1) / (oversampling_rows * rows)),
          wrap_spatial_frequency(double(beam.i2) / (oversampling_cols * cols))};
}

double wrap_spatial_frequency(double psi) {
  double w = psi - std::floor(psi + 0.5);
  if (w >= 0.5) {
    w -= 1.0;
  }
  return w;
}

BeamPointing direction_from_spatial_frequency(double psi_rows, double psi_cols,
                                              double spacing_wavelengths) {
  double ux = psi_rows / spacing_wavelengths;
  double uy = psi_cols / spacing_wavelengths;
  const double r2 = ux * ux + uy * uy;
  if (r2 <= 1.0) {
    const double uz = std::sqrt(1.0 - r2);
    const double az = (ux == 0.0 && uy == 0.0) ? 0.0 : std::atan2(uy, ux);
    return {{az, std::asin(uz)}, true};
  }
  const double r = std::sqrt(r2);
  ux /= r;
  uy /= r;
  return {{std::atan2(uy, ux), 0.0}, false};
}

BeamPointing beam_direction(int i1, int i2, int rows, int cols,
                            int oversampling_rows, int oversampling_cols,
                            double spacing_wavelengths) {
  return direction_from_spatial_frequency(
      wrap_spatial_frequency(double(i1) / (oversampling_rows * rows)),
      wrap_spatial_frequency(double(i2) / (oversampling_cols * cols)),
      spacing_wavelengths);
}

Codebook dft_codebook(int rows, int cols, int oversampling_rows,
                      int oversampling_cols) {
  expects(rows >= 1 && cols >= 1 && oversampling_rows >= 1 &&
              oversampling_cols >= 1,
          "dft_codebook: sizes and oversampling must be >= 1");
  Codebook cb;
  cb.rows = rows;
  cb.cols = cols;
  cb.oversampling_rows = oversampling_rows;
  cb.oversampling_cols = oversampling_cols;
  cb.kind = CodebookKind::DFT;
  const int g1 = oversampling_rows * rows;
  const int g2 = oversampling_cols * cols;
  cb.beams.reserve(static_cast<std::size_t>(g1) * g2);
  for (int i1 = 0; i1 < g1; ++i1) {
    for (int i2 = 0; i2 < g2; ++i2) {
      const auto pointing =
          beam_direction(i1, i2, rows, cols, oversampling_rows, oversampling_cols);
      cb.beams.push_back({planar_dft_weights(rows, cols, double(i1) / g1,
                                             double(i2) / g2),
                          pointing.direction, std::nullopt, i1, i2,
                          pointing.visible});
    }
  }
  return cb;
}

Codebook random_subset(const Codebook &parent, std::size_t count,
                       std::uint64_t seed) {
  expects(count <= parent.size(), "random_subset: count exceeds codebook size");
  std::vector<std::size_t> eligible;
  for (std::size_t b = 0; b < parent.size(); ++b) {
    if (parent.beams[b].visible) {
      eligible.push_back(b);
    }
  }
  if (eligible.size() < count) {
    throw NotEnoughVisibleBeams("random_subset: " + std::to_string(count) +
                                " beams requested, " +
                                std::to_string(eligible.size()) + " visible");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> picked;
  picked.reserve(count);
  // std::sample keeps the relative order of the input.
  std::sample(eligible.begin(), eligible.end(), std::back_inserter(picked), count,
              rng);

  Codebook out = parent;
  out.beams.clear();
  for (const std::size_t b : picked) {
    out.beams.push_back(parent.beams[b]);
  }
  std::sort(out.beams.begin(), out.beams.end(), [](const Beam &a, const Beam &b) {
    return std::pair(a.i1, a.i2) < std::pair(b.i1, b.i2);
  });
  out.kind = CodebookKind::OversampledSubset;
  return out;
}

namespace {

// Centre of the coarse cell holding the lower half of the critical DFT grid
// around psi = 0, i.e. the mean spatial frequency of its children.
double coarse_center(int n) {
  return (-(n / 4) + 0.5 * (n / 2 - 1)) / n;
}

double circular_distance(double a, double b) {
  return std::abs(wrap_spatial_frequency(a - b));
}

int nearest_cell(double psi, double center0) {
  const double c1 = wrap_spatial_frequency(center0 + 0.5);
  return circular_distance(psi, c1) < circular_distance(psi, center0) ? 1 : 0;
}

} // namespace

Hierarchy attach_to_coarse(Codebook fine) {
  expects(fine.rows >= 2 && fine.cols >= 2 && fine.rows % 2 == 0 &&
              fine.cols % 2 == 0,
          "hierarchical codebook: rows and cols must be even and >= 2");
  const double c_rows = coarse_center(fine.rows);
  const double c_cols = coarse_center(fine.cols);

  std::vector<std::vector<int>> cells(4);
  for (std::size_t b = 0; b < fine.size(); ++b) {
    const auto [psi1, psi2] = fine.spatial_frequency(b);
    const int cell = nearest_cell(psi1, c_rows) * 2 + nearest_cell(psi2, c_cols);
    cells[cell].push_back(static_cast<int>(b));
  }

  Hierarchy h;
  h.coarse.rows = fine.rows;
  h.coarse.cols = fine.cols;
  h.coarse.kind = CodebookKind::CoarseLevel;
  const double spacing = 0.5;
  for (int cell = 0; cell < 4; ++cell) {
    if (cells[cell].empty()) {
      continue;
    }
    const int g1 = cell / 2;
    const int g2 = cell % 2;
    const double psi1 = wrap_spatial_frequency(c_rows + 0.5 * g1);
    const double psi2 = wrap_spatial_frequency(c_cols + 0.5 * g2);
    const CVector sub = planar_dft_weights(2, 2, psi1, psi2);
    CVector w = CVector::Zero(fine.rows * fine.cols);
    for (int m = 0; m < 2; ++m) {
      for (int n = 0; n < 2; ++n) {
        w(m * fine.cols + n) = sub(m * 2 + n);
      }
    }
    const auto pointing = direction_from_spatial_frequency(psi1, psi2, spacing);
    const int coarse_index = static_cast<int>(h.coarse.beams.size());
    h.coarse.beams.push_back(
        {std::move(w), pointing.direction, std::nullopt, g1, g2, pointing.visible});
    for (const int child : cells[cell]) {
      fine.beams[child].parent_id = coarse_index;
    }
    h.children.push_back(cells[cell]);
  }
  h.fine = std::move(fine);
  return h;
}

Hierarchy hierarchical_codebook(int rows, int cols) {
  expects(rows >= 2 && cols >= 2 && rows % 2 == 0 && cols % 2 == 0,
          "hierarchical_codebook: rows and cols must be even and >= 2");
  Hierarchy h = attach_to_coarse(dft_codebook(rows, cols));
  h.fine.kind = CodebookKind::ChildrenSet;
  return h;
}

nlohmann::json to_json(const Codebook &cb) {
  nlohmann::json beams = nlohmann::json::array();
  for (const Beam &b : cb.beams) {
    std::vector<double> re(b.weights.size());
    std::vector<double> im(b.weights.size());
    for (Eigen::Index i = 0; i < b.weights.size(); ++i) {
      re[i] = b.weights(i).real();
      im[i] = b.weights(i).imag();
    }
    nlohmann::json jb = {{"i1", b.i1},
                         {"i2", b.i2},
                         {"az", b.direction.azimuth},
                         {"el", b.direction.elevation},
                         {"visible", b.visible},
                         {"weights_re", re},
                         {"weights_im", im}};
    if (b.parent_id) {
      jb["parent"] = *b.parent_id;
    }
    beams.push_back(std::move(jb));
  }
  return {{"rows", cb.rows},
          {"cols", cb.cols},
          {"oversampling", {cb.oversampling_rows, cb.oversampling_cols}},
          {"kind", std::string(to_string(cb.kind))},
          {"beams", std::move(beams)}};
}

Codebook codebook_from_json(const nlohmann::json &doc) {
  try {
    Codebook cb;
    cb.rows = doc.at("rows").get<int>();
    cb.cols = doc.at("cols").get<int>();
    cb.oversampling_rows = doc.at("oversampling").at(0).get<int>();
    cb.oversampling_cols = doc.at("oversampling").at(1).get<int>();
    cb.kind = parse_kind(doc.at("kind").get<std::string>());
    if (cb.rows < 1 || cb.cols < 1) {
      throw DataError("codebook: invalid array size");
    }
    for (const auto &jb : doc.at("beams")) {
      Beam b;
      b.i1 = jb.at("i1").get<int>();
      b.i2 = jb.at("i2").get<int>();
      b.direction = {jb.at("az").get<double>(), jb.at("el").get<double>()};
      b.visible = jb.value("visible", true);
      if (jb.contains("parent")) {
        b.parent_id = jb.at("parent").get<int>();
      }
      const auto re = jb.at("weights_re").get<std::vector<double>>();
      const auto im = jb.at("weights_im").get<std::vector<double>>();
      if (re.size() != im.size() ||
          re.size() != static_cast<std::size_t>(cb.rows * cb.cols)) {
        throw DataError("codebook: weight vector length mismatch");
      }
      b.weights.resize(static_cast<Eigen::Index>(re.size()));
      for (std::size_t i = 0; i < re.size(); ++i) {
        b.weights(static_cast<Eigen::Index>(i)) = {re[i], im[i]};
      }
      cb.beams.push_back(std::move(b));
    }
    return cb;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("codebook: ") + e.what());
  }
}

} // namespace beamshift
