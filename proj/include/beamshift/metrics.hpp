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

#ifndef BEAMSHIFT_METRICS_HPP
#define BEAMSHIFT_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "beamshift/channel.hpp"

namespace beamshift {

// Thermal noise plus receiver noise figure over bandwidth_hz, in dBm.
double noise_power_dbm(const RadioConfig &radio, double bandwidth_hz);

/*
 * (1/K) sum_k log2(1 + SNR_k), with the noise integrated over one subcarrier
 * spacing. Beamformers must have unit norm.
 */
double spectral_efficiency(const ChannelRealization &ch, const CVector &f_tx,
                           const CVector &w_rx, const RadioConfig &radio);

// 100 * (se_genie - se_method) / se_genie, 0 when both are 0, clamped to
// [0, 100]. Negative inputs are a contract violation.
double relative_drop(double se_genie, double se_method);

// Nearest-rank 90th percentile: element ceil(0.9 n) - 1 of the sorted values.
double percentile_90(std::span<const double> values);

struct SnapshotScore {
  std::uint64_t snapshot_id = 0;
  std::string method;
  double se_bps_hz = 0.0;
  double rel_drop_pct = 0.0;
  bool outage = false;
};

struct MethodSummary {
  std::string method;
  double mean_drop_pct = 0.0;
  double p90_drop_pct = 0.0;
  std::size_t n_snapshots = 0;
  std::size_t outage_count = 0;
};

// One summary per method, in order of first appearance. Outage snapshots
// enter as 100% drop.
std::vector<MethodSummary> summarize(std::span<const SnapshotScore> scores);

// snapshot_id,method,se_bps_hz,rel_drop_pct with %.6f floats.
void write_scores_csv(std::ostream &out, std::span<const SnapshotScore> scores);
std::vector<SnapshotScore> read_scores_csv(std::istream &in);

nlohmann::json to_json(std::span<const MethodSummary> summaries);

// Fixed-point formatting used in every emitted report file.
std::string format_fixed(double value);

} // namespace beamshift

#endif // BEAMSHIFT_METRICS_HPP
