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

#include "beamshift/selectors.hpp"

#include <algorithm>

#include "beamshift/error.hpp"

namespace beamshift {

void OverheadModel::validate() const {
  expects(symbols_per_measurement >= 0, "OverheadModel: negative symbol count");
  expects(frame_symbols > 0, "OverheadModel: frame_symbols must be positive");
}

double OverheadModel::fraction(int measured_pairs) const {
  expects(measured_pairs >= 0, "OverheadModel: negative measurement count");
  return std::min(1.0, double(measured_pairs) * symbols_per_measurement /
                           double(frame_symbols));
}

double effective_se(double se_bps_hz, int measured_pairs, const OverheadModel &ovh) {
  expects(se_bps_hz >= 0.0, "effective_se: negative spectral efficiency");
  return (1.0 - ovh.fraction(measured_pairs)) * se_bps_hz;
}

namespace {

struct Best {
  int ue = 0;
  int bs = 0;
  double gain = -1.0;
};

// Scan order (bs outer, ue inner, strict >) gives the lowest (bs, ue) pair
// among equal maxima.
Best best_pair(const Eigen::MatrixXd &gains, std::span<const int> ue_rows) {
  Best best;
  for (Eigen::Index b = 0; b < gains.cols(); ++b) {
    for (const int u : ue_rows) {
      if (gains(u, b) > best.gain) {
        best = {u, static_cast<int>(b), gains(u, b)};
      }
    }
  }
  return best;
}

std::vector<int> all_rows(Eigen::Index n) {
  std::vector<int> rows(static_cast<std::size_t>(n));
  for (int i = 0; i < static_cast<int>(n); ++i) {
    rows[static_cast<std::size_t>(i)] = i;
  }
  return rows;
}

int best_bs_for(const Eigen::MatrixXd &gains, int ue) {
  Eigen::Index b;
  gains.row(ue).maxCoeff(&b); // first maximum
  return static_cast<int>(b);
}

void check_table(const Eigen::MatrixXd &gains) {
  expects(gains.rows() > 0 && gains.cols() > 0, "selector: empty codebook");
}

} // namespace

SelectionResult genie_select(const Eigen::MatrixXd &gains, const RadioConfig &radio) {
  check_table(gains);
  const Best b = best_pair(gains, all_rows(gains.rows()));
  if (b.gain <= 0.0) {
    return {};
  }
  return {b.ue, b.bs, 0, gain_to_rsrp_dbm(b.gain, radio)};
}

SelectionResult exhaustive_select(const Eigen::MatrixXd &gains,
                                  const RadioConfig &radio) {
  SelectionResult r = genie_select(gains, radio);
  if (!r.outage()) {
    r.measured_pairs = static_cast<int>(gains.rows());
  }
  return r;
}

SelectionResult hierarchical_select(const Eigen::MatrixXd &coarse_gains,
                                    const Eigen::MatrixXd &fine_gains,
                                    const std::vector<std::vector<int>> &children,
                                    const RadioConfig &radio) {
  check_table(coarse_gains);
  check_table(fine_gains);
  expects(static_cast<std::size_t>(coarse_gains.rows()) == children.size(),
          "hierarchical_select: children map does not match coarse codebook");
  const Best coarse = best_pair(coarse_gains, all_rows(coarse_gains.rows()));
  if (coarse.gain <= 0.0 && fine_gains.maxCoeff() <= 0.0) {
    return {};
  }
  const std::vector<int> &kids = children[static_cast<std::size_t>(coarse.ue)];
  expects(!kids.empty(), "hierarchical_select: coarse beam without children");
  const Best fine = best_pair(fine_gains, kids);
  return {fine.ue, fine.bs,
          static_cast<int>(coarse_gains.rows() + static_cast<Eigen::Index>(kids.size())),
          gain_to_rsrp_dbm(fine.gain, radio)};
}

SelectionResult predictor_select(std::span<const double> predicted,
                                 const Eigen::MatrixXd &gains,
                                 const RadioConfig &radio) {
  check_table(gains);
  expects(static_cast<Eigen::Index>(predicted.size()) == gains.rows(),
          "predictor_select: one prediction per UE beam required");
  int ue = 0;
  for (int u = 1; u < static_cast<int>(predicted.size()); ++u) {
    if (predicted[static_cast<std::size_t>(u)] > predicted[static_cast<std::size_t>(ue)]) {
      ue = u;
    }
  }
  const int bs = best_bs_for(gains, ue);
  return {ue, bs, 0, gain_to_rsrp_dbm(gains(ue, bs), radio)};
}

SelectionResult genie_select(const ChannelRealization &ch, const Codebook &bs_cb,
                             const Codebook &ue_cb, const RadioConfig &radio) {
  return genie_select(pair_gains(ch, bs_cb.weight_matrix(), ue_cb.weight_matrix()),
                      radio);
}

SelectionResult exhaustive_select(const ChannelRealization &ch,
                                  const Codebook &bs_cb, const Codebook &ue_cb,
                                  const RadioConfig &radio) {
  return exhaustive_select(
      pair_gains(ch, bs_cb.weight_matrix(), ue_cb.weight_matrix()), radio);
}

SelectionResult hierarchical_select(const ChannelRealization &ch,
                                    const Codebook &bs_cb, const Hierarchy &ue,
                                    const RadioConfig &radio) {
  const CMatrix bs_w = bs_cb.weight_matrix();
  return hierarchical_select(pair_gains(ch, bs_w, ue.coarse.weight_matrix()),
                             pair_gains(ch, bs_w, ue.fine.weight_matrix()),
                             ue.children, radio);
}

SelectionResult predictor_select(const SnapshotContext &ctx,
                                 const ChannelRealization &ch,
                                 const Codebook &bs_cb, const Codebook &ue_cb,
                                 const BeamPowerPredictor &model,
                                 const RadioConfig &radio) {
  const std::vector<Direction> dirs = ue_cb.directions();
  const std::vector<double> predicted = model.predict(ctx, dirs);
  return predictor_select(predicted,
                          pair_gains(ch, bs_cb.weight_matrix(), ue_cb.weight_matrix()),
                          radio);
}

} // namespace beamshift
