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

#ifndef BEAMSHIFT_SCENARIO_HPP
#define BEAMSHIFT_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "beamshift/channel.hpp"
#include "beamshift/predictor.hpp"
#include "beamshift/world.hpp"

namespace beamshift {

struct WorldConfig {
  double width = 400.0;
  double depth = 400.0;
  double bs_height = 15.0;
  int blockers_per_quadrant = 6;
  double blocker_min_size = 20.0;
  double blocker_max_size = 60.0;
  double blocker_min_height = 6.0;
  double blocker_max_height = 20.0;
  int scatterers_per_quadrant = 40;
  double scatterer_min_height = 1.0;
  double scatterer_max_height = 10.0;
  double street_half_width = 8.0; // clear strip along both axes

  // Throws ConfigError naming the offending field under "world.".
  void validate() const;
};

/*
 * Seeded synthetic city: per quadrant, blockers_per_quadrant buildings and
 * scatterers_per_quadrant point scatterers. Each quadrant draws from its own
 * sub-seed, so the four environments are statistically independent.
 */
WorldLayout build_world(std::uint64_t world_seed, const WorldConfig &config = {});

nlohmann::json to_json(const WorldLayout &world);
WorldLayout world_from_json(const nlohmann::json &doc);

enum class VehicleClass { Car, Bus };

std::string_view to_string(VehicleClass c);

struct TraceRecord {
  double time = 0.0;
  std::string vehicle_id;
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  VehicleClass vehicle_class = VehicleClass::Car;
};

// Records sorted by (time, vehicle_id).
struct MobilityTrace {
  std::vector<TraceRecord> records;
};

/*
 * CSV with header time,id,x,y,speed,class; '.' decimal point, ',' separator,
 * class in {car, bus}. Throws MalformedRow, OutOfBounds or NonMonotonicTime
 * (a vehicle's timestamps must not decrease in file order).
 */
MobilityTrace ingest_trace(std::istream &in, const WorldLayout &world);
MobilityTrace ingest_trace(const std::filesystem::path &path, const WorldLayout &world);
void write_trace(std::ostream &out, const MobilityTrace &trace);

struct MobilityConfig {
  int vehicles = 100;
  double duration_s = 600.0;
  double car_fraction = 0.3;
  double mean_speed = 9.5;
  double car_to_bus_speed_ratio = 1.5;

  void validate() const;
};

/*
 * Random-waypoint motion at 1 Hz. Legs never cross a blocker footprint.
 * Each vehicle keeps a constant speed; speeds are rescaled so the fleet mean
 * equals config.mean_speed exactly.
 */
MobilityTrace synth_mobility(const WorldLayout &world, int n_vehicles,
                             double duration_s, std::uint64_t seed,
                             const MobilityConfig &config = {});

struct UeProfile {
  int rows = 4;
  int cols = 4;
  std::string codebook_id = "dft";
  double car_height = 1.5;
  double bus_height = 3.0;

  double mount_height(VehicleClass c) const {
    return c == VehicleClass::Car ? car_height : bus_height;
  }
  // Broadside-up array at position.
  ArrayConfig array(double wavelength_m, const Vec3 &position) const;
};

struct Snapshot {
  std::uint64_t id = 0;
  VehicleClass vehicle_class = VehicleClass::Car;
  Vec3 position = Vec3::Zero();
  Quadrant quadrant = Quadrant::UpperRight;
  ChannelRealization channel;
  SnapshotContext context;
};

struct SnapshotSet {
  std::vector<Snapshot> snapshots;
  bool with_replacement = false;
};

// Stable identifier of a trace record.
std::uint64_t snapshot_id(const TraceRecord &record);

SnapshotContext make_context(const WorldLayout &world, const Vec3 &ue_position,
                             bool los);

/*
 * Draws n records of the trace lying in one of the given quadrants (without
 * replacement when possible) and generates the channel of each. Channel
 * seeds derive from (world.seed, snapshot id), so a record always sees the
 * same channel whichever sample it lands in.
 */
SnapshotSet sample_snapshots(const WorldLayout &world, const MobilityTrace &trace,
                             const UeProfile &profile, const ArrayConfig &bs,
                             const ChannelConfig &channel, std::size_t n,
                             std::span<const Quadrant> quadrants,
                             std::uint64_t seed);

// One JSON object per line, for audits.
void write_snapshots_jsonl(std::ostream &out, std::span<const Snapshot> snapshots);

} // namespace beamshift

#endif // BEAMSHIFT_SCENARIO_HPP
