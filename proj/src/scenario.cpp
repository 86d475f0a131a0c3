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

#include "beamshift/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "beamshift/error.hpp"
#include "beamshift/seed.hpp"

namespace beamshift {

void WorldConfig::validate() const {
  auto positive = [](double v, const char *key) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(key, "must be positive");
    }
  };
  positive(width, "world.extent");
  positive(depth, "world.extent");
  positive(bs_height, "world.bs_height");
  if (blockers_per_quadrant < 0) {
    throw ConfigError("world.blockers_per_quadrant", "must be >= 0");
  }
  if (scatterers_per_quadrant < 0) {
    throw ConfigError("world.scatterers_per_quadrant", "must be >= 0");
  }
  positive(blocker_min_size, "world.blocker_size");
  if (blocker_max_size < blocker_min_size) {
    throw ConfigError("world.blocker_size", "max below min");
  }
  positive(blocker_min_height, "world.blocker_height");
  if (blocker_max_height < blocker_min_height) {
    throw ConfigError("world.blocker_height", "max below min");
  }
  if (scatterer_min_height < 0.0 || scatterer_max_height < scatterer_min_height) {
    throw ConfigError("world.scatterer_height", "invalid range");
  }
  if (street_half_width < 0.0 || 2.0 * street_half_width >= std::min(width, depth)) {
    throw ConfigError("world.street_half_width", "must leave room for blocks");
  }
}

namespace {

double uniform(std::mt19937_64 &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::pair<double, double> quadrant_signs(Quadrant q) {
  switch (q) {
  case Quadrant::UpperRight:
    return {1.0, 1.0};
  case Quadrant::UpperLeft:
    return {-1.0, 1.0};
  case Quadrant::LowerLeft:
    return {-1.0, -1.0};
  case Quadrant::LowerRight:
    return {1.0, -1.0};
  }
  return {1.0, 1.0};
}

// Interval [offset, offset + size] mirrored onto the side given by sign.
std::pair<double, double> mirrored(double sign, double offset, double size) {
  return sign > 0 ? std::pair(offset, offset + size)
                  : std::pair(-offset - size, -offset);
}

bool in_any_footprint(const std::vector<Box> &boxes, double x, double y,
                      double margin) {
  return std::any_of(boxes.begin(), boxes.end(), [&](const Box &b) {
    return b.footprint_contains(x, y, margin);
  });
}

} // namespace

WorldLayout build_world(std::uint64_t world_seed, const WorldConfig &config) {
  config.validate();
  WorldLayout w;
  w.seed = world_seed;
  w.width = config.width;
  w.depth = config.depth;
  w.bs_position = {0.0, 0.0, config.bs_height};
  const double half_w = 0.5 * config.width;
  const double half_d = 0.5 * config.depth;
  const double street = config.street_half_width;

  for (const Quadrant q : kAllQuadrants) {
    std::mt19937_64 rng(
        derive_seed(world_seed, "quadrant/" + std::string(to_string(q))));
    const auto [sx, sy] = quadrant_signs(q);
    std::vector<Box> local;
    for (int i = 0; i < config.blockers_per_quadrant; ++i) {
      double size_x = uniform(rng, config.blocker_min_size, config.blocker_max_size);
      double size_y = uniform(rng, config.blocker_min_size, config.blocker_max_size);
      const double height =
          uniform(rng, config.blocker_min_height, config.blocker_max_height);
      size_x = std::min(size_x, half_w - street);
      size_y = std::min(size_y, half_d - street);
      const double off_x = street + uniform(rng, 0.0, half_w - street - size_x);
      const double off_y = street + uniform(rng, 0.0, half_d - street - size_y);
      const auto [x0, x1] = mirrored(sx, off_x, size_x);
      const auto [y0, y1] = mirrored(sy, off_y, size_y);
      local.push_back({Vec3(x0, y0, 0.0), Vec3(x1, y1, height)});
    }
    for (int i = 0; i < config.scatterers_per_quadrant; ++i) {
      Vec3 p;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        p = {sx * uniform(rng, 1.0, half_w), sy * uniform(rng, 1.0, half_d),
             uniform(rng, config.scatterer_min_height, config.scatterer_max_height)};
        if (!in_any_footprint(local, p(0), p(1), 0.5)) {
          break;
        }
      }
      w.scatterers.push_back(p);
    }
    w.blockers.insert(w.blockers.end(), local.begin(), local.end());
  }
  return w;
}

nlohmann::json to_json(const WorldLayout &world) {
  auto vec3 = [](const Vec3 &v) { return nlohmann::json::array({v(0), v(1), v(2)}); };
  nlohmann::json blockers = nlohmann::json::array();
  for (const Box &b : world.blockers) {
    blockers.push_back({{"min", vec3(b.min)}, {"max", vec3(b.max)}});
  }
  nlohmann::json scatterers = nlohmann::json::array();
  for (const Vec3 &s : world.scatterers) {
    scatterers.push_back(vec3(s));
  }
  return {{"seed", world.seed},
          {"extent", {world.width, world.depth}},
          {"bs_position", vec3(world.bs_position)},
          {"blockers", std::move(blockers)},
          {"scatterers", std::move(scatterers)}};
}

WorldLayout world_from_json(const nlohmann::json &doc) {
  auto vec3 = [](const nlohmann::json &j) {
    return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
  };
  try {
    WorldLayout w;
    w.seed = doc.at("seed").get<std::uint64_t>();
    w.width = doc.at("extent").at(0).get<double>();
    w.depth = doc.at("extent").at(1).get<double>();
    w.bs_position = vec3(doc.at("bs_position"));
    for (const auto &b : doc.at("blockers")) {
      w.blockers.push_back({vec3(b.at("min")), vec3(b.at("max"))});
    }
    for (const auto &s : doc.at("scatterers")) {
      w.scatterers.push_back(vec3(s));
    }
    return w;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("world json: ") + e.what());
  }
}

std::string_view to_string(VehicleClass c) {
  return c == VehicleClass::Car ? "car" : "bus";
}

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double &out) {
  if (text.empty()) {
    return false;
  }
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size() &&
         std::isfinite(out);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

} // namespace

MobilityTrace ingest_trace(std::istream &in, const WorldLayout &world) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw MalformedRow(1, "missing header");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  if (line != "time,id,x,y,speed,class") {
    throw MalformedRow(1, "header must be time,id,x,y,speed,class");
  }

  MobilityTrace trace;
  std::map<std::string, double, std::less<>> last_time;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line.find(';') != std::string::npos) {
      throw MalformedRow(line_no, "';' is not allowed");
    }
    const auto fields = split_fields(line);
    if (fields.size() != 6) {
      throw MalformedRow(line_no, "expected 6 fields");
    }
    TraceRecord r;
    if (!parse_double(fields[0], r.time)) {
      throw MalformedRow(line_no, "bad time");
    }
    if (fields[1].empty()) {
      throw MalformedRow(line_no, "empty vehicle id");
    }
    r.vehicle_id = std::string(fields[1]);
    if (!parse_double(fields[2], r.x) || !parse_double(fields[3], r.y)) {
      throw MalformedRow(line_no, "bad position");
    }
    if (!parse_double(fields[4], r.speed) || r.speed < 0.0) {
      throw MalformedRow(line_no, "bad speed");
    }
    if (fields[5] == "car") {
      r.vehicle_class = VehicleClass::Car;
    } else if (fields[5] == "bus") {
      r.vehicle_class = VehicleClass::Bus;
    } else {
      throw MalformedRow(line_no, "unknown class '" + std::string(fields[5]) + "'");
    }
    if (!world.inside(Vec3(r.x, r.y, 0.0))) {
      throw OutOfBounds("line " + std::to_string(line_no) + ": position outside world");
    }
    auto [it, inserted] = last_time.try_emplace(r.vehicle_id, r.time);
    if (!inserted) {
      if (r.time < it->second) {
        throw NonMonotonicTime("line " + std::to_string(line_no) + ": vehicle " +
                               r.vehicle_id + " goes back in time");
      }
      it->second = r.time;
    }
    trace.records.push_back(std::move(r));
  }
  std::stable_sort(trace.records.begin(), trace.records.end(),
                   [](const TraceRecord &a, const TraceRecord &b) {
                     if (a.time != b.time) return a.time < b.time;
                     return a.vehicle_id < b.vehicle_id;
                   });
  return trace;
}

MobilityTrace ingest_trace(const std::filesystem::path &path, const WorldLayout &world) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open trace " + path.string());
  }
  return ingest_trace(in, world);
}

void write_trace(std::ostream &out, const MobilityTrace &trace) {
  out << "time,id,x,y,speed,class\n";
  for (const TraceRecord &r : trace.records) {
    out << shortest(r.time) << ',' << r.vehicle_id << ',' << shortest(r.x) << ','
        << shortest(r.y) << ',' << shortest(r.speed) << ','
        << to_string(r.vehicle_class) << '\n';
  }
}

void MobilityConfig::validate() const {
  if (vehicles < 0) throw ConfigError("mobility.vehicles", "must be >= 0");
  if (!(duration_s >= 0.0)) throw ConfigError("mobility.duration_s", "must be >= 0");
  if (!(car_fraction >= 0.0 && car_fraction <= 1.0)) {
    throw ConfigError("mobility.car_fraction", "must be in [0, 1]");
  }
  if (!(mean_speed > 0.0)) throw ConfigError("mobility.mean_speed", "must be positive");
  if (!(car_to_bus_speed_ratio > 0.0)) {
    throw ConfigError("mobility.car_to_bus_speed_ratio", "must be positive");
  }
}

namespace {

class WaypointPlanner {
public:
  WaypointPlanner(const WorldLayout &world, std::mt19937_64 &rng)
      : world_(world), rng_(rng) {}

  Vec3 free_point() {
    const double hx = 0.5 * world_.width - 5.0;
    const double hy = 0.5 * world_.depth - 5.0;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const double x = world_.bs_position(0) + uniform(rng_, -hx, hx);
      const double y = world_.bs_position(1) + uniform(rng_, -hy, hy);
      if (!in_any_footprint(world_.blockers, x, y, 2.0)) {
        return {x, y, 0.0};
      }
    }
    throw DataError("synth_mobility: no free ground position found");
  }

  Vec3 next_target(const Vec3 &from) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      const Vec3 to = free_point();
      if (clear(from, to)) {
        return to;
      }
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
      const Vec3 to(from(0) + uniform(rng_, -20.0, 20.0),
                    from(1) + uniform(rng_, -20.0, 20.0), 0.0);
      if (world_.inside(to) && !in_any_footprint(world_.blockers, to(0), to(1), 2.0) &&
          clear(from, to)) {
        return to;
      }
    }
    return from;
  }

private:
  bool clear(const Vec3 &a, const Vec3 &b) const {
    return std::none_of(world_.blockers.begin(), world_.blockers.end(),
                        [&](const Box &box) {
                          return segment_hits_footprint(box, a(0), a(1), b(0), b(1),
                                                        1.0);
                        });
  }

  const WorldLayout &world_;
  std::mt19937_64 &rng_;
};

} // namespace

MobilityTrace synth_mobility(const WorldLayout &world, int n_vehicles,
                             double duration_s, std::uint64_t seed,
                             const MobilityConfig &config) {
  config.validate();
  expects(n_vehicles >= 0 && duration_s >= 0.0,
          "synth_mobility: negative fleet size or duration");
  if (double(n_vehicles) > world.width * world.depth / 10.0) {
    throw DataError("synth_mobility: infeasible density, more than one vehicle "
                    "per 10 m^2");
  }
  MobilityTrace trace;
  if (n_vehicles == 0) {
    return trace;
  }

  std::mt19937_64 fleet_rng(derive_seed(seed, "fleet"));
  const auto n_cars = static_cast<int>(std::llround(config.car_fraction * n_vehicles));
  std::vector<VehicleClass> classes(static_cast<std::size_t>(n_vehicles),
                                    VehicleClass::Bus);
  std::fill_n(classes.begin(), n_cars, VehicleClass::Car);
  std::shuffle(classes.begin(), classes.end(), fleet_rng);

  const double f = double(n_cars) / n_vehicles;
  const double r = config.car_to_bus_speed_ratio;
  const double car_speed = config.mean_speed * r / (f * r + (1.0 - f));
  const double bus_speed = car_speed / r;
  std::vector<double> speeds;
  double speed_sum = 0.0;
  for (const VehicleClass c : classes) {
    const double base = c == VehicleClass::Car ? car_speed : bus_speed;
    speeds.push_back(base * uniform(fleet_rng, 0.85, 1.15));
    speed_sum += speeds.back();
  }
  const double rescale = config.mean_speed * n_vehicles / speed_sum;
  for (double &s : speeds) {
    s *= rescale;
  }

  const int width = static_cast<int>(std::to_string(n_vehicles - 1).size());
  struct State {
    std::string id;
    std::mt19937_64 rng;
    Vec3 pos;
    Vec3 target;
  };
  std::vector<State> fleet;
  for (int v = 0; v < n_vehicles; ++v) {
    std::string num = std::to_string(v);
    State s{"veh" + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num,
            std::mt19937_64(derive_seed(seed, static_cast<std::uint64_t>(v))),
            Vec3::Zero(), Vec3::Zero()};
    WaypointPlanner planner(world, s.rng);
    s.pos = planner.free_point();
    s.target = planner.next_target(s.pos);
    fleet.push_back(std::move(s));
  }

  const auto steps = static_cast<int>(std::floor(duration_s));
  trace.records.reserve(static_cast<std::size_t>(steps) * fleet.size());
  for (int t = 0; t < steps; ++t) {
    for (std::size_t v = 0; v < fleet.size(); ++v) {
      State &s = fleet[v];
      trace.records.push_back(
          {double(t), s.id, s.pos(0), s.pos(1), speeds[v], classes[v]});
      WaypointPlanner planner(world, s.rng);
      double remaining = speeds[v];
      for (int hop = 0; hop < 8 && remaining > 0.0; ++hop) {
        const Vec3 delta = s.target - s.pos;
        const double dist = delta.norm();
        if (dist <= remaining) {
          s.pos = s.target;
          remaining -= dist;
          s.target = planner.next_target(s.pos);
        } else {
          s.pos += delta * (remaining / dist);
          remaining = 0.0;
        }
      }
    }
  }
  return trace;
}

ArrayConfig UeProfile::array(double wavelength_m, const Vec3 &position) const {
  return ArrayConfig(rows, cols, wavelength_m, 0.5 * wavelength_m, Mat3::Identity(),
                     position);
}

std::uint64_t snapshot_id(const TraceRecord &record) {
  return splitmix64(fnv1a64(record.vehicle_id + "@" + shortest(record.time)));
}

SnapshotContext make_context(const WorldLayout &world, const Vec3 &ue_position,
                             bool los) {
  const Vec3 rel = ue_position - world.bs_position;
  SnapshotContext ctx;
  ctx.position_rel = {rel(0) / (0.5 * world.width), rel(1) / (0.5 * world.depth),
                      rel(2) / world.half_extent()};
  ctx.los = los;
  return ctx;
}

SnapshotSet sample_snapshots(const WorldLayout &world, const MobilityTrace &trace,
                             const UeProfile &profile, const ArrayConfig &bs,
                             const ChannelConfig &channel, std::size_t n,
                             std::span<const Quadrant> quadrants,
                             std::uint64_t seed) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const TraceRecord &r = trace.records[i];
    const Quadrant q = world.quadrant_of(r.x, r.y);
    if (std::find(quadrants.begin(), quadrants.end(), q) != quadrants.end()) {
      pool.push_back(i);
    }
  }
  if (pool.empty()) {
    throw EmptyFilterResult("sample_snapshots: no trace record in the requested quadrants");
  }

  std::mt19937_64 rng(seed);
  SnapshotSet set;
  std::vector<std::size_t> picked;
  if (pool.size() >= n) {
    std::sample(pool.begin(), pool.end(), std::back_inserter(picked), n, rng);
  } else {
    set.with_replacement = true;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      picked.push_back(pool[pick(rng)]);
    }
  }

  const double lambda = channel.wavelength();
  set.snapshots.reserve(picked.size());
  for (const std::size_t idx : picked) {
    const TraceRecord &r = trace.records[idx];
    const std::uint64_t id = snapshot_id(r);
    const Vec3 position(r.x, r.y, profile.mount_height(r.vehicle_class));
    ChannelRealization ch =
        generate_channel(world, bs, profile.array(lambda, position), channel,
                         derive_seed(world.seed, id));
    SnapshotContext ctx = make_context(world, position, ch.has_los());
    set.snapshots.push_back({id, r.vehicle_class, position,
                             world.quadrant_of(r.x, r.y), std::move(ch),
                             std::move(ctx)});
  }
  return set;
}

void write_snapshots_jsonl(std::ostream &out, std::span<const Snapshot> snapshots) {
  for (const Snapshot &s : snapshots) {
    nlohmann::json paths = nlohmann::json::array();
    for (const Path &p : s.channel.paths) {
      paths.push_back({{"kind", p.kind == PathKind::LOS ? "LOS" : "SingleBounce"},
                       {"gain_re", p.gain.real()},
                       {"gain_im", p.gain.imag()},
                       {"delay", p.delay},
                       {"aod", {p.aod.azimuth, p.aod.elevation}},
                       {"aoa", {p.aoa.azimuth, p.aoa.elevation}}});
    }
    const nlohmann::json line = {
        {"id", s.id},
        {"class", std::string(to_string(s.vehicle_class))},
        {"position", {s.position(0), s.position(1), s.position(2)}},
        {"quadrant", std::string(to_string(s.quadrant))},
        {"los", s.context.los},
        {"paths", std::move(paths)}};
    out << line.dump() << '\n';
  }
}

} // namespace beamshift
