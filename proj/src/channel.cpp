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

#include "beamshift/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beamshift/error.hpp"
#include "beamshift/seed.hpp"

namespace beamshift {

void RadioConfig::validate() const {
  expects(std::isfinite(tx_power_dbm), "RadioConfig: tx power must be finite");
  expects(std::isfinite(noise_figure_db) && noise_figure_db >= 0.0,
          "RadioConfig: noise figure must be >= 0 dB");
  expects(std::isfinite(noise_psd_dbm_hz),
          "RadioConfig: noise PSD must be finite");
}

void ChannelConfig::validate() const {
  expects(carrier_hz > 0.0, "ChannelConfig: carrier must be positive");
  expects(subcarriers >= 1, "ChannelConfig: need at least one subcarrier");
  expects(subcarrier_spacing_hz > 0.0,
          "ChannelConfig: subcarrier spacing must be positive");
  expects(reflection_coefficient >= 0.0 && reflection_coefficient <= 1.0,
          "ChannelConfig: reflection coefficient must be in [0, 1]");
  expects(max_paths >= 1, "ChannelConfig: max_paths must be >= 1");
}

bool ChannelRealization::has_los() const {
  return std::any_of(paths.begin(), paths.end(),
                     [](const Path &p) { return p.kind == PathKind::LOS; });
}

namespace {

double unit_uniform(std::uint64_t seed) {
  return static_cast<double>(splitmix64(seed) >> 11) * 0x1.0p-53;
}

// exp(-j 2 pi distance / lambda), reduced before the multiply for accuracy.
cdouble carrier_phasor(double distance, double lambda) {
  const double cycles = std::fmod(distance / lambda, 1.0);
  return std::polar(1.0, -2.0 * kPi * cycles);
}

} // namespace

ChannelRealization generate_channel(const WorldLayout &world,
                                    const ArrayConfig &bs, const ArrayConfig &ue,
                                    const ChannelConfig &config,
                                    std::uint64_t seed) {
  config.validate();
  expects(world.inside(bs.position()), "generate_channel: BS outside world");
  expects(world.inside(ue.position()), "generate_channel: UE outside world");

  const double lambda = config.wavelength();
  const Vec3 &tx = bs.position();
  const Vec3 &rx = ue.position();

  ChannelRealization ch{{},  config.carrier_hz, config.subcarriers,
                        config.subcarrier_spacing_hz, bs, ue};

  const double direct = (rx - tx).norm();
  if (direct > 1e-6 && world.line_of_sight(tx, rx)) {
    ch.paths.push_back({lambda / (4.0 * kPi * direct) * carrier_phasor(direct, lambda),
                        direct / kSpeedOfLight, bs.local_direction(rx - tx),
                        ue.local_direction(tx - rx), PathKind::LOS});
  }

  const double gamma = config.reflection_coefficient;
  if (gamma > 0.0) {
    for (std::size_t i = 0; i < world.scatterers.size(); ++i) {
      const Vec3 &s = world.scatterers[i];
      const double d1 = (s - tx).norm();
      const double d2 = (rx - s).norm();
      if (d1 < 1e-6 || d2 < 1e-6) {
        continue;
      }
      if (!world.line_of_sight(tx, s) || !world.line_of_sight(s, rx)) {
        continue;
      }
      const double total = d1 + d2;
      const double bounce_phase = 2.0 * kPi * unit_uniform(derive_seed(seed, i));
      const cdouble gain = gamma * lambda / (4.0 * kPi * total) *
                           carrier_phasor(total, lambda) *
                           std::polar(1.0, bounce_phase);
      ch.paths.push_back({gain, total / kSpeedOfLight, bs.local_direction(s - tx),
                          ue.local_direction(s - rx), PathKind::SingleBounce});
    }
  }

  std::stable_sort(ch.paths.begin(), ch.paths.end(),
                   [](const Path &a, const Path &b) {
                     return std::abs(a.gain) > std::abs(b.gain);
                   });
  if (ch.paths.size() > static_cast<std::size_t>(config.max_paths)) {
    ch.paths.resize(config.max_paths);
  }
  return ch;
}

CMatrix frequency_response(const ChannelRealization &ch, int k) {
  if (k < 0 || k >= ch.subcarriers) {
    throw std::out_of_range("frequency_response: subcarrier index out of range");
  }
  const double array_gain = std::sqrt(double(ch.tx.size()) * ch.rx.size());
  const double fk = ch.subcarrier_offset_hz(k);
  CMatrix h = CMatrix::Zero(ch.rx.size(), ch.tx.size());
  for (const Path &p : ch.paths) {
    const cdouble coeff =
        p.gain * std::polar(array_gain, -2.0 * kPi * fk * p.delay);
    h.noalias() += coeff * steering_vector(ch.rx, p.aoa) *
                   steering_vector(ch.tx, p.aod).adjoint();
  }
  return h;
}

CVector beamformed_response(const ChannelRealization &ch, const CVector &f_tx,
                            const CVector &w_rx) {
  expects(f_tx.size() == ch.tx.size() && w_rx.size() == ch.rx.size(),
          "beamformed_response: beamformer size mismatch");
  const double array_gain = std::sqrt(double(ch.tx.size()) * ch.rx.size());
  CVector y = CVector::Zero(ch.subcarriers);
  for (const Path &p : ch.paths) {
    const cdouble spatial = w_rx.dot(steering_vector(ch.rx, p.aoa)) *
                            steering_vector(ch.tx, p.aod).dot(f_tx);
    for (int k = 0; k < ch.subcarriers; ++k) {
      y(k) += p.gain * spatial *
              std::polar(array_gain,
                         -2.0 * kPi * ch.subcarrier_offset_hz(k) * p.delay);
    }
  }
  return y;
}

namespace {

void check_unit_norm(const CVector &v, const char *what) {
  if (std::abs(v.norm() - 1.0) > 1e-9) {
    throw ContractViolation(std::string(what) + " must have unit norm");
  }
}

} // namespace

double beamformed_gain(const ChannelRealization &ch, const CVector &f_tx,
                       const CVector &w_rx) {
  return beamformed_response(ch, f_tx, w_rx).squaredNorm() / ch.subcarriers;
}

double rsrp_dbm(const ChannelRealization &ch, const CVector &f_tx,
                const CVector &w_rx, const RadioConfig &radio) {
  check_unit_norm(f_tx, "rsrp: transmit beamformer");
  check_unit_norm(w_rx, "rsrp: receive combiner");
  if (ch.empty()) {
    return kNoSignalDbm;
  }
  return gain_to_rsrp_dbm(beamformed_gain(ch, f_tx, w_rx), radio);
}

Eigen::MatrixXd pair_gains(const ChannelRealization &ch, const CMatrix &tx_weights,
                           const CMatrix &rx_weights) {
  expects(tx_weights.rows() == ch.tx.size() && rx_weights.rows() == ch.rx.size(),
          "pair_gains: beamformer size mismatch");
  const Eigen::Index n_rx_beams = rx_weights.cols();
  const Eigen::Index n_tx_beams = tx_weights.cols();
  Eigen::MatrixXd gains = Eigen::MatrixXd::Zero(n_rx_beams, n_tx_beams);
  const auto n_paths = static_cast<Eigen::Index>(ch.paths.size());
  if (n_paths == 0) {
    return gains;
  }

  CMatrix rx_steer(ch.rx.size(), n_paths);
  CMatrix tx_steer(ch.tx.size(), n_paths);
  for (Eigen::Index l = 0; l < n_paths; ++l) {
    rx_steer.col(l) = steering_vector(ch.rx, ch.paths[l].aoa);
    tx_steer.col(l) = steering_vector(ch.tx, ch.paths[l].aod);
  }
  // (w^H a_rx) and (a_tx^H f) for every beam and path.
  const CMatrix rx_proj = rx_weights.adjoint() * rx_steer;
  const CMatrix tx_proj = tx_steer.adjoint() * tx_weights;

  const double array_gain = std::sqrt(double(ch.tx.size()) * ch.rx.size());
  CVector coeff(n_paths);
  CMatrix scaled(n_rx_beams, n_paths);
  CMatrix y(n_rx_beams, n_tx_beams);
  for (int k = 0; k < ch.subcarriers; ++k) {
    const double fk = ch.subcarrier_offset_hz(k);
    for (Eigen::Index l = 0; l < n_paths; ++l) {
      coeff(l) = ch.paths[l].gain *
                 std::polar(array_gain, -2.0 * kPi * fk * ch.paths[l].delay);
    }
    scaled.noalias() = rx_proj * coeff.asDiagonal();
    y.noalias() = scaled * tx_proj;
    gains += y.cwiseAbs2();
  }
  gains /= ch.subcarriers;
  return gains;
}

} // namespace beamshift
