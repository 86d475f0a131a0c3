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

#ifndef BEAMSHIFT_EXPERIMENTS_HPP
#define BEAMSHIFT_EXPERIMENTS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beamshift/codebook.hpp"
#include "beamshift/metrics.hpp"
#include "beamshift/predictor.hpp"
#include "beamshift/scenario.hpp"
#include "beamshift/selectors.hpp"

namespace beamshift {

// Which axis differs between the training and the test setup.
enum class Protocol { Antenna, Codebook, Location };

std::string_view to_string(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view text);

struct CodebookSpec {
  std::string kind = "dft"; // "dft" or "subset"
  int oversampling_rows = 1;
  int oversampling_cols = 1;
  int subset_count = 16;
  std::uint64_t subset_seed = 0;

  friend bool operator==(const CodebookSpec &, const CodebookSpec &) = default;
};

Codebook make_codebook(const CodebookSpec &spec, int rows, int cols);

struct SetupSpec {
  int rows = 4;
  int cols = 4;
  CodebookSpec codebook;
  std::vector<Quadrant> quadrants{kAllQuadrants.begin(), kAllQuadrants.end()};

  friend bool operator==(const SetupSpec &, const SetupSpec &) = default;
};

struct ExperimentSeeds {
  std::uint64_t world = 0;
  std::uint64_t mobility = 0;
  std::uint64_t train_sample = 0;
  std::uint64_t eval_sample = 0;
  std::uint64_t model = 0;

  static ExperimentSeeds derived(std::uint64_t global_seed);
};

struct ExperimentSpec {
  Protocol protocol = Protocol::Antenna;
  SetupSpec train_setup;
  SetupSpec test_setup;
  std::size_t n_train_snapshots = 4000;
  std::size_t n_eval_snapshots = 2000;
  double train_vehicle_fraction = 0.5;
  ExperimentSeeds seeds;
  WorldConfig world;
  MobilityConfig mobility;
  ChannelConfig channel;
  RadioConfig radio;
  OverheadModel overhead;
  int bs_rows = 8;
  int bs_cols = 8;
  ModelSpec model;
  TrainConfig training;

  // Throws ConfigError when the setups differ in anything but the
  // protocol's axis, or when a field is out of range.
  void validate() const;
};

/*
 * Default setups per protocol:
 *   Antenna  : 4x4 / 16-beam DFT  vs 8x8 / 64-beam DFT, all quadrants
 *   Codebook : two 16-beam subsets of the x4 oversampled 4x4 DFT codebook
 *   Location : 8x8 / 64-beam DFT, UR quadrant vs the other three, with
 *              1000 training snapshots
 */
ExperimentSpec default_experiment(Protocol protocol, std::uint64_t global_seed);

std::uint64_t spec_hash(const ExperimentSpec &spec);

// The BS array and codebook plus the propagation environment.
struct Scene {
  WorldLayout world;
  ArrayConfig bs;
  Codebook bs_codebook;
  CMatrix bs_weights;
  ChannelConfig channel;
  RadioConfig radio;
};

Scene make_scene(WorldLayout world, int bs_rows, int bs_cols,
                 const ChannelConfig &channel, const RadioConfig &radio);

// One sample per (non-outage snapshot, UE beam): the RSRP of that UE beam
// paired with its best BS beam.
std::vector<TrainingSample> dataset_from_snapshots(const Scene &scene,
                                                   std::span<const Snapshot> snapshots,
                                                   const Codebook &ue_codebook);

std::vector<TrainingSample> collect_dataset(const Scene &scene,
                                            const MobilityTrace &trace,
                                            const UeProfile &profile,
                                            const Codebook &ue_codebook, std::size_t n,
                                            std::span<const Quadrant> quadrants,
                                            std::uint64_t seed);

struct SnapshotEvaluation {
  std::uint64_t snapshot_id = 0;
  bool outage = false;
  SelectionResult genie, dnn, hs, es;
  double se_genie = 0.0; // genie pays no overhead
  double se_dnn = 0.0;   // effective SE, overhead included
  double se_hs = 0.0;
  double se_es = 0.0;
};

SnapshotEvaluation evaluate_snapshot(const Scene &scene, const Snapshot &snapshot,
                                     const Codebook &ue_codebook,
                                     const Hierarchy &ue_hierarchy,
                                     const BeamPowerPredictor &model,
                                     const OverheadModel &overhead);

inline constexpr std::array<const char *, 3> kReportedMethods = {"DNN", "HS", "ES"};

// Per-snapshot scores for DNN, HS and ES, in snapshot order.
std::vector<SnapshotScore> score(std::span<const SnapshotEvaluation> evaluations);

struct SetupReport {
  std::string name; // "train" or "test"
  SetupSpec setup;
  std::size_t codebook_size = 0;
  bool with_replacement = false;
  std::vector<SnapshotEvaluation> evaluations;
  std::vector<SnapshotScore> scores;
  std::vector<MethodSummary> summaries;
};

struct ExperimentReport {
  ExperimentSpec spec;
  SetupReport train;
  SetupReport test;
  TrainingLog training_log;
  std::size_t training_samples = 0;
  std::size_t parameter_count = 0;
  std::vector<std::uint64_t> train_snapshot_ids;
  double wall_seconds = 0.0; // not written to any report file
};

struct RunOptions {
  int threads = 1;
  std::function<void(const std::string &)> log;
};

/*
 * Builds the world and fleet, splits vehicles into training and evaluation
 * pools, trains the predictor under the train setup and evaluates genie,
 * DNN, HS and ES on fresh snapshots of both setups. Output depends only on
 * the spec; the thread count changes nothing but speed.
 */
ExperimentReport run_experiment(const ExperimentSpec &spec,
                                const RunOptions &options = {});

// Writes summary.json, spec.json, scores_train.csv, scores_test.csv,
// plot.csv, training_log.csv and MANIFEST. Returns the paths written.
std::vector<std::filesystem::path> emit_report(const ExperimentReport &report,
                                               const std::filesystem::path &out_dir);

// JSON forms of every configuration block. Readers reject unknown keys and
// report errors as ConfigError("<prefix>.<key>", ...).
nlohmann::json to_json(const ExperimentSpec &spec);
ExperimentSpec experiment_from_json(const nlohmann::json &doc,
                                    const std::string &prefix = "experiment");
nlohmann::json to_json(const SetupSpec &setup);
SetupSpec setup_from_json(const nlohmann::json &doc, const std::string &prefix);
nlohmann::json to_json(const WorldConfig &c);
void update_from_json(WorldConfig &c, const nlohmann::json &doc, const std::string &prefix);
nlohmann::json to_json(const MobilityConfig &c);
void update_from_json(MobilityConfig &c, const nlohmann::json &doc, const std::string &prefix);
nlohmann::json to_json(const ChannelConfig &c);
void update_from_json(ChannelConfig &c, const nlohmann::json &doc, const std::string &prefix);
nlohmann::json to_json(const RadioConfig &c);
void update_from_json(RadioConfig &c, const nlohmann::json &doc, const std::string &prefix);
nlohmann::json to_json(const OverheadModel &c);
void update_from_json(OverheadModel &c, const nlohmann::json &doc, const std::string &prefix);
nlohmann::json to_json(const ModelSpec &c);
void update_from_json(ModelSpec &c, const nlohmann::json &doc, const std::string &prefix);
nlohmann::json to_json(const TrainConfig &c);
void update_from_json(TrainConfig &c, const nlohmann::json &doc, const std::string &prefix);

} // namespace beamshift

#endif // BEAMSHIFT_EXPERIMENTS_HPP
