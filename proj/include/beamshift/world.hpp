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

#ifndef BEAMSHIFT_WORLD_HPP
#define BEAMSHIFT_WORLD_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "beamshift/types.hpp"

namespace beamshift {

// Axis-aligned box, used for buildings and other blockers.
struct Box {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3 &p) const;
  bool footprint_contains(double x, double y, double margin = 0.0) const;
};

// True iff the open segment (p, q) passes through the interior of box.
// Touching the box at an endpoint does not count.
bool segment_hits(const Box &box, const Vec3 &p, const Vec3 &q);

// Same test restricted to the ground-plane footprint of the box.
bool segment_hits_footprint(const Box &box, double x0, double y0, double x1,
                            double y1, double margin = 0.0);

/*
 * The ground plane is split by the two axes through the BS ground position.
 * Right means x > 0 and upper means y > 0 relative to the BS; points on an
 * axis fall to the left/lower side.
 */
enum class Quadrant { UpperRight = 0, UpperLeft = 1, LowerLeft = 2, LowerRight = 3 };

inline constexpr std::array<Quadrant, 4> kAllQuadrants = {
    Quadrant::UpperRight, Quadrant::UpperLeft, Quadrant::LowerLeft,
    Quadrant::LowerRight};

std::string_view to_string(Quadrant q);
std::optional<Quadrant> parse_quadrant(std::string_view text);

struct WorldLayout {
  std::uint64_t seed = 0;
  double width = 400.0; // x extent, meters
  double depth = 400.0; // y extent, meters
  Vec3 bs_position{0.0, 0.0, 15.0};
  std::vector<Box> blockers;
  std::vector<Vec3> scatterers;

  Quadrant quadrant_of(double x, double y) const;
  bool inside(const Vec3 &p) const;
  bool line_of_sight(const Vec3 &a, const Vec3 &b) const;
  double half_extent() const { return 0.5 * std::max(width, depth); }
};

} // namespace beamshift

#endif // BEAMSHIFT_WORLD_HPP
