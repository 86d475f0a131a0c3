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

#include "beamshift/world.hpp"

#include <algorithm>
#include <cmath>

namespace beamshift {

bool Box::contains(const Vec3 &p) const {
  return (p.array() > min.array()).all() && (p.array() < max.array()).all();
}

bool Box::footprint_contains(double x, double y, double margin) const {
  return x > min(0) - margin && x < max(0) + margin && y > min(1) - margin &&
         y < max(1) + margin;
}

namespace {

// Slab clipping of p + t * (q - p), t in (0, 1), against [lo, hi] per axis.
template <int Dims>
bool clip_segment(const double *lo, const double *hi, const double *p,
                  const double *q) {
  constexpr double kEps = 1e-9;
  double t0 = kEps;
  double t1 = 1.0 - kEps;
  for (int i = 0; i < Dims; ++i) {
    const double d = q[i] - p[i];
    if (std::abs(d) < 1e-15) {
      if (p[i] <= lo[i] || p[i] >= hi[i]) {
        return false;
      }
      continue;
    }
    double ta = (lo[i] - p[i]) / d;
    double tb = (hi[i] - p[i]) / d;
    if (ta > tb) {
      std::swap(ta, tb);
    }
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 >= t1) {
      return false;
    }
  }
  return true;
}

} // namespace

bool segment_hits(const Box &box, const Vec3 &p, const Vec3 &q) {
  return clip_segment<3>(box.min.data(), box.max.data(), p.data(), q.data());
}

bool segment_hits_footprint(const Box &box, double x0, double y0, double x1,
                            double y1, double margin) {
  const double lo[2] = {box.min(0) - margin, box.min(1) - margin};
  const double hi[2] = {box.max(0) + margin, box.max(1) + margin};
  const double p[2] = {x0, y0};
  const double q[2] = {x1, y1};
  return clip_segment<2>(lo, hi, p, q);
}

std::string_view to_string(Quadrant q) {
  switch (q) {
  case Quadrant::UpperRight:
    return "UR";
  case Quadrant::UpperLeft:
    return "UL";
  case Quadrant::LowerLeft:
    return "LL";
  case Quadrant::LowerRight:
    return "LR";
  }
  return "?";
}

std::optional<Quadrant> parse_quadrant(std::string_view text) {
  for (const Quadrant q : kAllQuadrants) {
    if (text == to_string(q)) {
      return q;
    }
  }
  if (text == "UpperRight") return Quadrant::UpperRight;
  if (text == "UpperLeft") return Quadrant::UpperLeft;
  if (text == "LowerLeft") return Quadrant::LowerLeft;
  if (text == "LowerRight") return Quadrant::LowerRight;
  return std::nullopt;
}

Quadrant WorldLayout::quadrant_of(double x, double y) const {
  const bool right = x - bs_position(0) > 0.0;
  const bool upper = y - bs_position(1) > 0.0;
  if (upper) {
    return right ? Quadrant::UpperRight : Quadrant::UpperLeft;
  }
  return right ? Quadrant::LowerRight : Quadrant::LowerLeft;
}

bool WorldLayout::inside(const Vec3 &p) const {
  return std::abs(p(0) - bs_position(0)) <= 0.5 * width &&
         std::abs(p(1) - bs_position(1)) <= 0.5 * depth;
}

bool WorldLayout::line_of_sight(const Vec3 &a, const Vec3 &b) const {
  return std::none_of(blockers.begin(), blockers.end(),
                      [&](const Box &box) { return segment_hits(box, a, b); });
}

} // namespace beamshift
