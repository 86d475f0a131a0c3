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

#ifndef BEAMSHIFT_SELECTORS_HPP
#define BEAMSHIFT_SELECTORS_HPP

#include <span>
#include <vector>

#include "beamshift/channel.hpp"
#include "beamshift/codebook.hpp"
#include "beamshift/predictor.hpp"

namespace beamshift {

struct SelectionResult {
  int ue_beam = 0;
  int bs_beam = 0;
  int measured_pairs = 0;
  double rsrp_dbm = kNoSignalDbm;

  bool outage() const { return rsrp_dbm == kNoSignalDbm; }
  friend bool operator==(const SelectionResult &, const SelectionResult &) = default;
};

/*
 * Sweep cost: every beam-pair measurement occupies symbols_per_measurement
 * of the frame_symbols available per selection epoch.
 */
struct OverheadModel {
  int symbols_per_measurement = 1;
  int frame_symbols = 560;

  void validate() const;
  double fraction(int measured_pairs) const;
};

// (1 - overhead fraction) * se.
double effective_se(double se_bps_hz, int measured_pairs, const OverheadModel &ovh);

/*
 * The selectors take a U x B table of subcarrier-averaged gains (rows: UE
 * beams, columns: BS beams; see pair_gains()). Everywhere, ties go to the
 * lexicographically lowest (bs, ue) index pair. The BS side is always set to
 * the best BS beam for the chosen UE beam, and only UE-side sweeps count as
 * measurements.
 */

// Exact argmax over all pairs, no measurement cost.
SelectionResult genie_select(const Eigen::MatrixXd &gains, const RadioConfig &radio);

// Same pair as the genie; pays one measurement per UE beam.
SelectionResult exhaustive_select(const Eigen::MatrixXd &gains,
                                  const RadioConfig &radio);

// Coarse sweep, then a sweep over the winning coarse beam's children.
SelectionResult hierarchical_select(const Eigen::MatrixXd &coarse_gains,
                                    const Eigen::MatrixXd &fine_gains,
                                    const std::vector<std::vector<int>> &children,
                                    const RadioConfig &radio);

// UE beam with the highest predicted power; pays nothing.
SelectionResult predictor_select(std::span<const double> predicted,
                                 const Eigen::MatrixXd &gains,
                                 const RadioConfig &radio);

// Channel-level entry points; an empty channel yields the outage result.
SelectionResult genie_select(const ChannelRealization &ch, const Codebook &bs_cb,
                             const Codebook &ue_cb, const RadioConfig &radio);
SelectionResult exhaustive_select(const ChannelRealization &ch,
                                  const Codebook &bs_cb, const Codebook &ue_cb,
                                  const RadioConfig &radio);
SelectionResult hierarchical_select(const ChannelRealization &ch,
                                    const Codebook &bs_cb, const Hierarchy &ue,
                                    const RadioConfig &radio);
SelectionResult predictor_select(const SnapshotContext &ctx,
                                 const ChannelRealization &ch,
                                 const Codebook &bs_cb, const Codebook &ue_cb,
                                 const BeamPowerPredictor &model,
                                 const RadioConfig &radio);

} // namespace beamshift

#endif // BEAMSHIFT_SELECTORS_HPP
