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

#include "beamshift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "beamshift/error.hpp"

namespace beamshift {

double noise_power_dbm(const RadioConfig &radio, double bandwidth_hz) {
  return radio.noise_psd_dbm_hz + linear_to_db(bandwidth_hz) + radio.noise_figure_db;
}

double spectral_efficiency(const ChannelRealization &ch, const CVector &f_tx,
                           const CVector &w_rx, const RadioConfig &radio) {
  if (std::abs(f_tx.norm() - 1.0) > 1e-9 || std::abs(w_rx.norm() - 1.0) > 1e-9) {
    throw ContractViolation("spectral_efficiency: beamformers must have unit norm");
  }
  if (ch.empty()) {
    return 0.0;
  }
  const double tx_mw = db_to_linear(radio.tx_power_dbm);
  const double noise_mw = db_to_linear(noise_power_dbm(radio, ch.subcarrier_spacing_hz));
  const CVector y = beamformed_response(ch, f_tx, w_rx);
  double se = 0.0;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    se += std::log2(1.0 + tx_mw * std::norm(y(k)) / noise_mw);
  }
  return se / double(y.size());
}

double relative_drop(double se_genie, double se_method) {
  expects(se_genie >= 0.0 && se_method >= 0.0,
          "relative_drop: spectral efficiencies must be non-negative");
  if (se_genie == 0.0) {
    return 0.0;
  }
  return std::clamp(100.0 * (se_genie - se_method) / se_genie, 0.0, 100.0);
}

double percentile_90(std::span<const double> values) {
  expects(!values.empty(), "percentile_90: empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // ceil(0.9 n) in integers, avoiding 0.9 * n rounding up past an integer.
  const std::size_t rank = (9 * sorted.size() + 9) / 10;
  return sorted[rank - 1];
}

std::vector<MethodSummary> summarize(std::span<const SnapshotScore> scores) {
  std::vector<std::string> methods;
  for (const SnapshotScore &s : scores) {
    if (std::find(methods.begin(), methods.end(), s.method) == methods.end()) {
      methods.push_back(s.method);
    }
  }
  expects(!methods.empty(), "summarize: no scores");
  std::vector<MethodSummary> out;
  for (const std::string &m : methods) {
    std::vector<double> drops;
    MethodSummary sum;
    sum.method = m;
    for (const SnapshotScore &s : scores) {
      if (s.method != m) {
        continue;
      }
      drops.push_back(s.outage ? 100.0 : s.rel_drop_pct);
      sum.outage_count += s.outage ? 1 : 0;
    }
    sum.n_snapshots = drops.size();
    double total = 0.0;
    for (const double d : drops) {
      total += d;
    }
    sum.mean_drop_pct = total / double(drops.size());
    sum.p90_drop_pct = percentile_90(drops);
    out.push_back(sum);
  }
  return out;
}

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

void write_scores_csv(std::ostream &out, std::span<const SnapshotScore> scores) {
  out << "snapshot_id,method,se_bps_hz,rel_drop_pct\n";
  for (const SnapshotScore &s : scores) {
    out << s.snapshot_id << ',' << s.method << ',' << format_fixed(s.se_bps_hz) << ','
        << format_fixed(s.outage ? 100.0 : s.rel_drop_pct) << '\n';
  }
}

std::vector<SnapshotScore> read_scores_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("scores csv: missing header");
  }
  std::vector<SnapshotScore> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    std::string id, method, se, drop;
    if (!std::getline(row, id, ',') || !std::getline(row, method, ',') ||
        !std::getline(row, se, ',') || !std::getline(row, drop)) {
      throw MalformedRow(line_no, "expected 4 fields");
    }
    try {
      SnapshotScore s;
      s.snapshot_id = std::stoull(id);
      s.method = method;
      s.se_bps_hz = std::stod(se);
      s.rel_drop_pct = std::stod(drop);
      out.push_back(std::move(s));
    } catch (const std::exception &) {
      throw MalformedRow(line_no, "bad number");
    }
  }
  return out;
}

nlohmann::json to_json(std::span<const MethodSummary> summaries) {
  nlohmann::json arr = nlohmann::json::array();
  for (const MethodSummary &s : summaries) {
    // Round to the precision used in the CSV files so the JSON is stable.
    arr.push_back({{"method", s.method},
                   {"mean_drop_pct", std::stod(format_fixed(s.mean_drop_pct))},
                   {"p90_drop_pct", std::stod(format_fixed(s.p90_drop_pct))},
                   {"n", s.n_snapshots},
                   {"outages", s.outage_count}});
  }
  return arr;
}

} // namespace beamshift
