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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "beamshift/metrics.hpp"
#include "support.hpp"

namespace bs = beamshift;
namespace bt = beamshift::testing;

namespace {

// Transmit power, path loss and array gain to SNR and SE, with no library
// help.
double scalar_se(double p_tx_dbm, double loss_db, double array_gain_db, double nf_db,
                 double n0_dbm_hz, double bandwidth_hz) {
  const double rx_dbm = p_tx_dbm - loss_db + array_gain_db;
  const double noise_dbm = n0_dbm_hz + 10.0 * std::log10(bandwidth_hz) + nf_db;
  return std::log2(1.0 + std::pow(10.0, (rx_dbm - noise_dbm) / 10.0));
}

std::vector<bs::SnapshotScore> scores_of(const std::vector<double> &drops,
                                         const std::string &method = "X") {
  std::vector<bs::SnapshotScore> out;
  for (std::size_t i = 0; i < drops.size(); ++i) out.push_back({i, method, 1.0, drops[i], false});
  return out;
}

} // namespace

TEST(NoiseFloor, ThirtyKilohertz) {
  EXPECT_NEAR(bs::noise_power_dbm({}, 30e3), -119.23, 0.005);
}

TEST(SpectralEfficiency, EmptyChannelIsZero) {
  const auto ch = bt::make_channel({});
  EXPECT_EQ(bs::spectral_efficiency(ch, bs::CVector::Constant(64, 1.0 / 8),
                                    bs::CVector::Constant(16, 0.25), {}),
            0.0);
}

TEST(SpectralEfficiency, UnitSnrGivesOneBit) {
  const bs::RadioConfig radio;
  const double noise_mw = std::pow(10.0, bs::noise_power_dbm(radio, 30e3) / 10.0);
  const double tx_mw = std::pow(10.0, radio.tx_power_dbm / 10.0);
  const double amp = std::sqrt(noise_mw / (tx_mw * 64 * 16));
  const bs::Direction aod{0.5, 0.9}, aoa{-2.0, 1.1};
  const auto ch = bt::make_channel({bt::single_path(amp, aod, aoa, 0.0)});
  const double se = bs::spectral_efficiency(ch, bs::steering_vector(ch.tx, aod),
                                            bs::steering_vector(ch.rx, aoa), radio);
  EXPECT_NEAR(se, 1.0, 1e-9);
}

TEST(SpectralEfficiency, LinkBudgetPipeline) {
  const double amp = std::pow(10.0, -96.0 / 20.0);
  const bs::Direction aod{0.1, 1.3}, aoa{2.2, 0.9};
  const auto ch = bt::make_channel({bt::single_path(amp, aod, aoa, 2e-7)});
  const double se = bs::spectral_efficiency(ch, bs::steering_vector(ch.tx, aod),
                                            bs::steering_vector(ch.rx, aoa), {});
  const double oracle = scalar_se(20.0, 96.0, 10.0 * std::log10(64.0 * 16.0), 10.0, -174.0, 30e3);
  EXPECT_NEAR(se, oracle, 0.01);
  EXPECT_NEAR(se, 24.36, 0.01);
}

TEST(SpectralEfficiency, RejectsUnnormalizedBeams) {
  const auto ch = bt::make_channel({});
  EXPECT_THROW(bs::spectral_efficiency(ch, bs::CVector::Constant(64, 1.0),
                                       bs::CVector::Constant(16, 0.25), {}),
               bs::ContractViolation);
}

TEST(RelativeDrop, Cases) {
  EXPECT_EQ(bs::relative_drop(7.5, 7.5), 0.0);
  EXPECT_EQ(bs::relative_drop(7.5, 0.0), 100.0);
  EXPECT_EQ(bs::relative_drop(0.0, 0.0), 0.0);
  EXPECT_EQ(bs::relative_drop(5.0, 6.0), 0.0);
  EXPECT_THROW(bs::relative_drop(-1.0, 0.0), bs::ContractViolation);
  // 100 (1 - 2159/2436) = 27700/2436
  EXPECT_NEAR(bs::relative_drop(24.36, 21.59), 27700.0 / 2436.0, 1e-9);
  EXPECT_NEAR(bs::relative_drop(24.36, 21.59), 11.37, 0.005);
}

TEST(Percentile, SmallLists) {
  const std::vector<double> one{5.0};
  EXPECT_EQ(bs::percentile_90(one), 5.0);
  const std::vector<double> ten{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
  EXPECT_EQ(bs::percentile_90(ten), 9.0);
  EXPECT_THROW(bs::percentile_90(std::vector<double>{}), bs::ContractViolation);
}

TEST(Percentile, UniformOrderStatistics) {
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<double> v(1000);
    for (double &x : v) x = u(rng);
    const double p = bs::percentile_90(v);
    inside += p >= 87.0 && p <= 93.0;
  }
  EXPECT_GE(inside, 198);
}

TEST(Summarize, Basics) {
  const auto zeros = bs::summarize(scores_of({0, 0, 0}));
  EXPECT_EQ(zeros[0].mean_drop_pct, 0.0);
  EXPECT_EQ(zeros[0].p90_drop_pct, 0.0);
  const auto mixed = bs::summarize(scores_of({0, 0, 0, 100}));
  EXPECT_EQ(mixed[0].mean_drop_pct, 25.0);
  EXPECT_EQ(mixed[0].p90_drop_pct, 100.0);
  EXPECT_EQ(mixed[0].n_snapshots, 4u);
}

TEST(Summarize, OutagesCountAsFullDrop) {
  auto s = scores_of({0, 0, 0, 0});
  s[3].outage = true;
  const auto sum = bs::summarize(s);
  EXPECT_EQ(sum[0].mean_drop_pct, 25.0);
  EXPECT_EQ(sum[0].outage_count, 1u);
}

TEST(Summarize, KeepsFirstAppearanceOrder) {
  auto s = scores_of({1, 2}, "DNN");
  const auto hs = scores_of({3}, "HS");
  const auto es = scores_of({4}, "ES");
  s.insert(s.begin() + 1, hs.begin(), hs.end());
  s.insert(s.end(), es.begin(), es.end());
  const auto sum = bs::summarize(s);
  ASSERT_EQ(sum.size(), 3u);
  EXPECT_EQ(sum[0].method, "DNN");
  EXPECT_EQ(sum[1].method, "HS");
  EXPECT_EQ(sum[2].method, "ES");
  EXPECT_EQ(sum[0].mean_drop_pct, 1.5);
}

TEST(ScoresCsv, RoundTripAndFormat) {
  std::vector<bs::SnapshotScore> s = {{42, "ES", 24.123456789, 2.857142857, false},
                                      {18446744073709551615ull, "DNN", 1.0, 0.0, true}};
  std::ostringstream out;
  bs::write_scores_csv(out, s);
  EXPECT_EQ(out.str(),
            "snapshot_id,method,se_bps_hz,rel_drop_pct\n"
            "42,ES,24.123457,2.857143\n"
            "18446744073709551615,DNN,1.000000,100.000000\n");
  std::istringstream in(out.str());
  const auto back = bs::read_scores_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].snapshot_id, 18446744073709551615ull);
  EXPECT_EQ(back[1].rel_drop_pct, 100.0);
  EXPECT_NEAR(back[0].se_bps_hz, 24.123457, 1e-12);
}

TEST(ScoresCsv, MalformedRow) {
  std::istringstream in("snapshot_id,method,se_bps_hz,rel_drop_pct\n1,ES,abc,2\n");
  try {
    bs::read_scores_csv(in);
    FAIL();
  } catch (const bs::MalformedRow &e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(SummaryJson, Rounded) {
  const auto sum = bs::summarize(scores_of({1.0 / 3.0, 2.0 / 3.0}));
  const auto j = bs::to_json(std::span<const bs::MethodSummary>(sum));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["method"], "X");
  EXPECT_EQ(j[0]["mean_drop_pct"].get<double>(), 0.5);
  EXPECT_EQ(j[0]["p90_drop_pct"].get<double>(), 0.666667);
  EXPECT_EQ(j[0]["n"].get<int>(), 2);
}
