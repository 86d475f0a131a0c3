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

#ifndef BEAMSHIFT_CONFIG_HPP
#define BEAMSHIFT_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "beamshift/experiments.hpp"

namespace beamshift {

// Fully populated default document. Every leaf can be overridden from a
// time (per-stream seeds, protocol-specific sizes and setups, the trace file).
// time (per-stream seeds, protocol-specific setups, the trace file).
nlohmann::json default_config();

// Recursively overlays `overlay` onto `base`. Keys absent from `base` are
// rejected; a null in `base` accepts any value.
void merge_config(nlohmann::json &base, const nlohmann::json &overlay,
                  const std::string &prefix = "");

// "a.b.c=value". The value is parsed as JSON when possible, otherwise taken
// as a string.
void apply_assignment(nlohmann::json &doc, std::string_view assignment);

nlohmann::json load_config_file(const std::filesystem::path &path);

struct CliConfig {
  std::uint64_t global_seed = 1;
  std::filesystem::path out = "out";
  int threads = 1;
  int verbosity = 1;
  std::optional<std::filesystem::path> trace;
  ExperimentSpec experiment;
  SetupSpec train_setup;
  std::size_t train_snapshots = 64;
};

// Validates and converts a merged document; errors are ConfigError naming
// the key path.
CliConfig resolve_config(const nlohmann::json &doc);

// One line listing every seed that feeds a run.
std::string seed_audit(const CliConfig &config);

} // namespace beamshift

#endif // BEAMSHIFT_CONFIG_HPP
