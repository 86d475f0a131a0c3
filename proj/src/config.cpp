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

#include "beamshift/config.hpp"

#include <fstream>
#include <sstream>

#include "beamshift/error.hpp"

namespace beamshift {

using nlohmann::json;

json default_config() {
  const ExperimentSpec e = default_experiment(Protocol::Antenna, 1);
  SetupSpec train_setup;
  return {{"global_seed", 1},
          {"out", "out"},
          {"threads", 1},
          {"verbosity", 1},
          {"trace", nullptr},
          {"world", to_json(e.world)},
          {"mobility", to_json(e.mobility)},
          {"channel", to_json(e.channel)},
          {"radio", to_json(e.radio)},
          {"overhead", to_json(e.overhead)},
          {"bs", {{"array", {e.bs_rows, e.bs_cols}}}},
          {"model", to_json(e.model)},
          {"training", to_json(e.training)},
          {"experiment",
           {{"protocol", "antenna"},
            {"n_train", nullptr},
            {"n_eval", nullptr},
            {"train_vehicle_fraction", e.train_vehicle_fraction},
            {"seeds", nullptr},
            {"train_setup", nullptr},
            {"test_setup", nullptr}}},
          {"train", {{"setup", to_json(train_setup)}, {"n_snapshots", 64}}}};
}

void merge_config(json &base, const json &overlay, const std::string &prefix) {
  if (!overlay.is_object()) {
    throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  }
  for (const auto &item : overlay.items()) {
    const std::string key = prefix.empty() ? item.key() : prefix + "." + item.key();
    const auto it = base.find(item.key());
    if (it == base.end()) {
      throw ConfigError(key, "unknown key");
    }
    if (it->is_object() && item.value().is_object()) {
      merge_config(*it, item.value(), key);
    } else {
      *it = item.value();
    }
  }
}

void apply_assignment(json &doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(std::string(assignment), "expected key=value");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) {
    value = text;
  }
  // Build the overlay {"a": {"b": value}} and merge it so that the same
  // unknown-key rules apply as for config files.
  json overlay = value;
  std::string_view rest(path);
  std::vector<std::string> parts;
  while (!rest.empty()) {
    const auto dot = rest.find('.');
    parts.emplace_back(rest.substr(0, dot));
    rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
  }
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (it->empty()) throw ConfigError(path, "empty path segment");
    overlay = json{{*it, std::move(overlay)}};
  }
  // Blocks that default to null (seeds, setups) are free-form: they may be
  // filled one field at a time and are validated at resolution.
  const json defaults = default_config();
  const json *node = &defaults;
  std::string pointer;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    pointer += "/" + parts[i];
    const auto found = node->find(parts[i]);
    if (found == node->end()) break;
    if (found->is_null()) {
      json::json_pointer target(pointer);
      if (!doc.contains(target) || !doc[target].is_object()) doc[target] = json::object();
      for (std::size_t j = i + 1; j < parts.size(); ++j) pointer += "/" + parts[j];
      doc[json::json_pointer(pointer)] = std::move(value);
      return;
    }
    node = &*found;
  }
  merge_config(doc, overlay);
}

json load_config_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("--config", "cannot open " + path.string());
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw ConfigError("--config", "not valid JSON: " + path.string());
  }
  return doc;
}

namespace {

template <typename T>
T leaf(const json &doc, const char *key, bool (json::*check)() const, const char *what) {
  const json &v = doc.at(key);
  if (!(v.*check)()) throw ConfigError(key, std::string("expected ") + what);
  return v.get<T>();
}

bool is_count(const json &v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

} // namespace

CliConfig resolve_config(const json &doc) {
  json full = default_config();
  merge_config(full, doc);

  CliConfig c;
  if (!is_count(full.at("global_seed"))) {
    throw ConfigError("global_seed", "expected a non-negative integer");
  }
  c.global_seed = full.at("global_seed").get<std::uint64_t>();
  c.out = leaf<std::string>(full, "out", &json::is_string, "a string");
  c.threads = leaf<int>(full, "threads", &json::is_number_integer, "an integer");
  if (c.threads < 1) throw ConfigError("threads", "must be >= 1");
  c.verbosity = leaf<int>(full, "verbosity", &json::is_number_integer, "an integer");
  if (!full.at("trace").is_null()) {
    c.trace = leaf<std::string>(full, "trace", &json::is_string, "a path string");
  }

  json exp = full.at("experiment");
  if (!exp.at("protocol").is_string()) {
    throw ConfigError("experiment.protocol", "expected a string");
  }
  const auto protocol = parse_protocol(exp.at("protocol").get<std::string>());
  if (!protocol) {
    throw ConfigError("experiment.protocol",
                      "unknown protocol '" + exp.at("protocol").get<std::string>() + "'");
  }
  // Start from the protocol defaults, then overlay everything the document
  // pins down explicitly.
  json spec = to_json(default_experiment(*protocol, c.global_seed));
  for (const char *section :
       {"world", "mobility", "channel", "radio", "overhead", "bs", "model", "training"}) {
    spec[section] = full.at(section);
  }
  spec["train_vehicle_fraction"] = exp.at("train_vehicle_fraction");
  for (const char *key : {"n_train", "n_eval"}) {
    if (!exp.at(key).is_null()) spec[key] = exp.at(key);
  }
  if (!exp.at("seeds").is_null()) merge_config(spec["seeds"], exp.at("seeds"), "experiment.seeds");
  for (const char *key : {"train_setup", "test_setup"}) {
    if (!exp.at(key).is_null()) spec[key] = exp.at(key);
  }
  c.experiment = experiment_from_json(spec);
  c.experiment.validate();

  const json &tr = full.at("train");
  if (!tr.is_object()) throw ConfigError("train", "expected an object");
  for (const auto &item : tr.items()) {
    if (item.key() != "setup" && item.key() != "n_snapshots") {
      throw ConfigError("train." + item.key(), "unknown key");
    }
  }
  c.train_setup = setup_from_json(tr.at("setup"), "train.setup");
  if (!is_count(tr.at("n_snapshots")) || tr.at("n_snapshots").get<std::size_t>() < 1) {
    throw ConfigError("train.n_snapshots", "must be a positive integer");
  }
  c.train_snapshots = tr.at("n_snapshots").get<std::size_t>();
  return c;
}

std::string seed_audit(const CliConfig &config) {
  const auto &s = config.experiment.seeds;
  std::ostringstream out;
  out << "seed-audit global_seed=" << config.global_seed << " world=" << s.world
      << " mobility=" << s.mobility << " train_sample=" << s.train_sample
      << " eval_sample=" << s.eval_sample << " model=" << s.model;
  return out.str();
}

} // namespace beamshift
