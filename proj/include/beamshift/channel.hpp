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

#ifndef BEAMSHIFT_CHANNEL_HPP
#define BEAMSHIFT_CHANNEL_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "beamshift/geometry.hpp"
#include "beamshift/world.hpp"

namespace beamshift {

struct RadioConfig {
  double tx_power_dbm = 20.0;
  double noise_figure_db = 10.0;
  double noise_psd_dbm_hz = -174.0;

  void validate() const;
};

struct ChannelConfig {
  double carrier_hz = 15e9;
  int subcarriers = 24;
  double subcarrier_spacing_hz = 30e3;
  double reflection_coefficient = 0.3;
  int max_paths = 16;

  double wavelength() const { return beamshift::wavelength(carrier_hz); }
  void validate() const;
};

enum class PathKind { LOS, SingleBounce };

struct Path {
  cdouble gain;  // linear amplitude, path and reflection loss included
  double delay;  // seconds
  Direction aod; // BS local frame
  Direction aoa; // UE local frame
  PathKind kind;
};

/*
 * Sparse multipath channel between one transmit and one receive array. The
 * carrier phase is folded into the path gains; subcarrier frequencies are
 * baseband offsets around the carrier. An empty path list is an outage.
 */
struct ChannelRealization {
  std::vector<Path> paths;
  double carrier_hz;
  int subcarriers;
  double subcarrier_spacing_hz;
  ArrayConfig tx;
  ArrayConfig rx;

  bool empty() const { return paths.empty(); }
  bool has_los() const;
  double subcarrier_offset_hz(int k) const {
    return (k - 0.5 * (subcarriers - 1)) * subcarrier_spacing_hz;
  }
};

// RSRP value reported for a channel that delivers no power.
inline constexpr double kNoSignalDbm = -std::numeric_limits<double>::infinity();

/*
 * LOS plus single-bounce paths off the world's point scatterers. A path
 * exists only if every leg is clear of all blockers. Reflection phases are
 * drawn per scatterer from seed, so the result is a pure function of its
 * arguments.
 */
ChannelRealization generate_channel(const WorldLayout &world,
                                    const ArrayConfig &bs, const ArrayConfig &ue,
                                    const ChannelConfig &config,
                                    std::uint64_t seed);

// Full N_rx x N_tx response on subcarrier k.
CMatrix frequency_response(const ChannelRealization &ch, int k);

// w^H H_k f for all subcarriers, evaluated path by path.
CVector beamformed_response(const ChannelRealization &ch, const CVector &f_tx,
                            const CVector &w_rx);

// Subcarrier-averaged |w^H H_k f|^2 (linear, unitless).
double beamformed_gain(const ChannelRealization &ch, const CVector &f_tx,
                       const CVector &w_rx);

double rsrp_dbm(const ChannelRealization &ch, const CVector &f_tx,
                const CVector &w_rx, const RadioConfig &radio);

/*
 * Subcarrier-averaged gain for every (rx beam, tx beam) pair. rx_weights is
 * N_rx x U and tx_weights is N_tx x B, one beam per column; the result is
 * U x B.
 */
Eigen::MatrixXd pair_gains(const ChannelRealization &ch, const CMatrix &tx_weights,
                           const CMatrix &rx_weights);

inline double gain_to_rsrp_dbm(double gain, const RadioConfig &radio) {
  return gain > 0.0 ? radio.tx_power_dbm + linear_to_db(gain) : kNoSignalDbm;
}

} // namespace beamshift

#endif // BEAMSHIFT_CHANNEL_HPP
