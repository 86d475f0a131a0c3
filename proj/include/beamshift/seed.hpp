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

#ifndef BEAMSHIFT_SEED_HPP
#define BEAMSHIFT_SEED_HPP

#include <cstdint>
#include <string_view>

namespace beamshift {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/*
 * Sub-seed derivation. Every random stream in the library is seeded as
 * derive_seed(parent, label) so that streams are independent of the order in
 * which components are built or evaluated.
 */
inline constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                           std::uint64_t label) {
  return splitmix64(splitmix64(seed) ^ splitmix64(label + 0x632be59bd9b4e019ULL));
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                           std::string_view label) {
  return derive_seed(seed, fnv1a64(label));
}

} // namespace beamshift

#endif // BEAMSHIFT_SEED_HPP
