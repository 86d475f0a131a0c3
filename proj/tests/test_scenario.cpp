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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "beamshift/scenario.hpp"
#include "support.hpp"

namespace bs = beamshift;
namespace bt = beamshift::testing;

namespace {

const char *kHeader = "time,id,x,y,speed,class\n";

bs::MobilityTrace ingest(const std::string &text, const bs::WorldLayout &w = {}) {
  std::istringstream in(text);
  return bs::ingest_trace(in, w);
}

std::size_t malformed_line(const std::string &text) {
  try {
    ingest(text);
  } catch (const bs::MalformedRow &e) {
    return e.line();
  }
  return 0;
}

} // namespace

TEST(World, DefaultCounts) {
  const bs::WorldLayout w = bs::build_world(1);
  EXPECT_EQ(w.scatterers.size(), 160u);
  EXPECT_EQ(w.blockers.size(), 24u);
}

TEST(World, SameSeedSameBytes) {
  EXPECT_EQ(bs::to_json(bs::build_world(5)).dump(), bs::to_json(bs::build_world(5)).dump());
  EXPECT_NE(bs::to_json(bs::build_world(5)).dump(), bs::to_json(bs::build_world(6)).dump());
}

TEST(World, QuadrantsDrawIndependentPoints) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const bs::WorldLayout w = bs::build_world(seed);
    std::set<std::pair<double, double>> seen;
    std::map<bs::Quadrant, int> per_quadrant;
    for (const auto &s : w.scatterers) {
      EXPECT_TRUE(seen.insert({std::abs(s.x()), std::abs(s.y())}).second);
      ++per_quadrant[w.quadrant_of(s.x(), s.y())];
    }
    for (bs::Quadrant q : bs::kAllQuadrants) EXPECT_EQ(per_quadrant[q], 40);
  }
}

TEST(World, LayoutRespectsStreetsAndFootprints) {
  const bs::WorldConfig cfg;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const bs::WorldLayout w = bs::build_world(seed, cfg);
    for (const auto &b : w.blockers) {
      EXPECT_TRUE(b.min.x() >= cfg.street_half_width || b.max.x() <= -cfg.street_half_width);
      EXPECT_TRUE(b.min.y() >= cfg.street_half_width || b.max.y() <= -cfg.street_half_width);
      EXPECT_LE(b.max.z(), cfg.blocker_max_height);
      EXPECT_GE(b.max.z(), cfg.blocker_min_height);
    }
    for (const auto &s : w.scatterers) {
      EXPECT_TRUE(w.inside(s));
      for (const auto &b : w.blockers) EXPECT_FALSE(b.contains(s));
    }
  }
}

TEST(World, JsonRoundTrip) {
  const bs::WorldLayout w = bs::build_world(3);
  const bs::WorldLayout back = bs::world_from_json(bs::to_json(w));
  EXPECT_EQ(bs::to_json(back).dump(), bs::to_json(w).dump());
  EXPECT_THROW(bs::world_from_json(nlohmann::json::object()), bs::DataError);
}

TEST(World, ConfigValidationNamesTheKey) {
  bs::WorldConfig cfg;
  cfg.width = -1.0;
  try {
    cfg.validate();
    FAIL();
  } catch (const bs::ConfigError &e) {
    EXPECT_EQ(e.key(), "world.extent");
  }
}

TEST(World, QuadrantNames) {
  for (bs::Quadrant q : bs::kAllQuadrants) EXPECT_EQ(bs::parse_quadrant(bs::to_string(q)), q);
  EXPECT_FALSE(bs::parse_quadrant("middle").has_value());
  const bs::WorldLayout w;
  EXPECT_EQ(w.quadrant_of(10, 10), bs::Quadrant::UpperRight);
  EXPECT_EQ(w.quadrant_of(-10, 10), bs::Quadrant::UpperLeft);
  EXPECT_EQ(w.quadrant_of(-10, -10), bs::Quadrant::LowerLeft);
  EXPECT_EQ(w.quadrant_of(10, -10), bs::Quadrant::LowerRight);
}

TEST(Trace, HeaderOnlyIsEmpty) {
  EXPECT_TRUE(ingest(kHeader).records.empty());
}

TEST(Trace, UnknownClassReportsItsLine) {
  const std::string text = std::string(kHeader) + "0,a,1,1,5,car\n1,a,2,1,5,truck\n";
  EXPECT_EQ(malformed_line(text), 3u);
}

TEST(Trace, MalformedInputs) {
  EXPECT_EQ(malformed_line(""), 1u);
  EXPECT_EQ(malformed_line("t,id,x,y,speed,class\n"), 1u);
  EXPECT_EQ(malformed_line(std::string(kHeader) + "0,a,1,1,5\n"), 2u);
  EXPECT_EQ(malformed_line(std::string(kHeader) + "0,a,1x,1,5,car\n"), 2u);
  EXPECT_EQ(malformed_line(std::string(kHeader) + "0;a;1;1;5;car\n"), 2u);
}

TEST(Trace, ClassHistogramThreeToSeven) {
  std::ostringstream text;
  text << kHeader;
  for (int i = 0; i < 1000; ++i) {
    text << i << ",v" << i << ",1.5,2.5,9.5," << (i % 10 < 3 ? "car" : "bus") << '\n';
  }
  const auto trace = ingest(text.str());
  int cars = 0, buses = 0;
  for (const auto &r : trace.records) (r.vehicle_class == bs::VehicleClass::Car ? cars : buses)++;
  EXPECT_EQ(cars, 300);
  EXPECT_EQ(buses, 700);
}

TEST(Trace, BoundsAndMonotonicTime) {
  EXPECT_THROW(ingest(std::string(kHeader) + "0,a,500,0,5,car\n"), bs::OutOfBounds);
  EXPECT_THROW(ingest(std::string(kHeader) + "2,a,1,1,5,car\n1,a,1,1,5,car\n"),
               bs::NonMonotonicTime);
  // Interleaved vehicles are fine; output is ordered by (time, id).
  const auto t = ingest(std::string(kHeader) + "1,b,1,1,5,car\n0,a,1,1,5,bus\n1,a,2,1,5,bus\n");
  ASSERT_EQ(t.records.size(), 3u);
  EXPECT_EQ(t.records[0].vehicle_id, "a");
  EXPECT_EQ(t.records[1].vehicle_id, "a");
  EXPECT_EQ(t.records[2].vehicle_id, "b");
}

TEST(Trace, WriteThenIngestRoundTrip) {
  const bs::WorldLayout w = bs::build_world(2);
  const auto trace = bs::synth_mobility(w, 5, 20, 7);
  std::ostringstream out;
  bs::write_trace(out, trace);
  const auto back = ingest(out.str(), w);
  ASSERT_EQ(back.records.size(), trace.records.size());
  for (std::size_t i = 0; i < back.records.size(); ++i) {
    EXPECT_EQ(back.records[i].x, trace.records[i].x);
    EXPECT_EQ(back.records[i].speed, trace.records[i].speed);
    EXPECT_EQ(back.records[i].vehicle_id, trace.records[i].vehicle_id);
  }
}

TEST(Mobility, FleetMeanSpeedAndMix) {
  const bs::WorldLayout w = bs::build_world(4);
  const auto trace = bs::synth_mobility(w, 100, 60, 9);
  std::map<std::string, std::pair<double, bs::VehicleClass>> vehicles;
  for (const auto &r : trace.records) vehicles[r.vehicle_id] = {r.speed, r.vehicle_class};
  ASSERT_EQ(vehicles.size(), 100u);
  double sum = 0.0;
  int cars = 0;
  for (const auto &[id, v] : vehicles) {
    sum += v.first;
    cars += v.second == bs::VehicleClass::Car;
  }
  EXPECT_NEAR(sum / 100.0, 9.5, 0.3);
  EXPECT_EQ(cars, 30);
}

TEST(Mobility, StaysOnOpenGround) {
  const bs::WorldLayout w = bs::build_world(4);
  const auto trace = bs::synth_mobility(w, 30, 300, 10);
  for (const auto &r : trace.records) {
    ASSERT_TRUE(w.inside(bs::Vec3(r.x, r.y, 0.0)));
    for (const auto &b : w.blockers) ASSERT_FALSE(b.footprint_contains(r.x, r.y, 0.0));
  }
}

TEST(Mobility, Deterministic) {
  const bs::WorldLayout w = bs::build_world(4);
  std::ostringstream a, b;
  bs::write_trace(a, bs::synth_mobility(w, 10, 50, 11));
  bs::write_trace(b, bs::synth_mobility(w, 10, 50, 11));
  EXPECT_EQ(a.str(), b.str());
}

class Snapshots : public ::testing::Test {
protected:
  bs::WorldLayout world = bs::build_world(8);
  bs::MobilityTrace trace = bs::synth_mobility(world, 20, 100, 12);
  bs::UeProfile profile;
  bs::ArrayConfig bs_array = bt::bs_array();
  bs::ChannelConfig channel;
};

TEST_F(Snapshots, QuadrantFilter) {
  const std::vector<bs::Quadrant> ur{bs::Quadrant::UpperRight};
  const auto set = bs::sample_snapshots(world, trace, profile, bs_array, channel, 200, ur, 1);
  ASSERT_EQ(set.snapshots.size(), 200u);
  for (const auto &s : set.snapshots) {
    EXPECT_GT(s.position.x(), 0.0);
    EXPECT_GT(s.position.y(), 0.0);
    EXPECT_EQ(s.quadrant, bs::Quadrant::UpperRight);
  }
}

TEST_F(Snapshots, ReplacementWhenPoolIsSmall) {
  const std::vector<bs::Quadrant> all(bs::kAllQuadrants.begin(), bs::kAllQuadrants.end());
  const auto set = bs::sample_snapshots(world, trace, profile, bs_array, channel,
                                        trace.records.size() + 10, all, 1);
  EXPECT_TRUE(set.with_replacement);
  EXPECT_EQ(set.snapshots.size(), trace.records.size() + 10);
  const auto exact = bs::sample_snapshots(world, trace, profile, bs_array, channel, 10, all, 1);
  EXPECT_FALSE(exact.with_replacement);
}

TEST_F(Snapshots, EmptyFilter) {
  const std::vector<bs::Quadrant> none;
  EXPECT_THROW(bs::sample_snapshots(world, trace, profile, bs_array, channel, 5, none, 1),
               bs::EmptyFilterResult);
}

TEST_F(Snapshots, DeterministicIdsAndChannels) {
  const std::vector<bs::Quadrant> all(bs::kAllQuadrants.begin(), bs::kAllQuadrants.end());
  const auto a = bs::sample_snapshots(world, trace, profile, bs_array, channel, 50, all, 3);
  const auto b = bs::sample_snapshots(world, trace, profile, bs_array, channel, 50, all, 3);
  std::ostringstream ja, jb;
  bs::write_snapshots_jsonl(ja, a.snapshots);
  bs::write_snapshots_jsonl(jb, b.snapshots);
  const std::string text = ja.str();
  EXPECT_EQ(text, jb.str());
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 50);
}

TEST_F(Snapshots, ContextIsNormalized) {
  const std::vector<bs::Quadrant> all(bs::kAllQuadrants.begin(), bs::kAllQuadrants.end());
  const auto set = bs::sample_snapshots(world, trace, profile, bs_array, channel, 100, all, 4);
  for (const auto &s : set.snapshots) {
    EXPECT_LE(s.context.position_rel.head<2>().cwiseAbs().maxCoeff(), 1.0);
    EXPECT_EQ(s.context.los, s.channel.has_los());
    EXPECT_EQ(s.channel.rx.size(), 16);
  }
}
