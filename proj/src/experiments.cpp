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

#include "beamshift/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "beamshift/error.hpp"
#include "beamshift/seed.hpp"

namespace beamshift {

using nlohmann::json;

namespace {

// Runs f(i) for i in [0, n) on up to `threads` workers. Each index is
// processed exactly once, so callers writing to slot i stay deterministic.
template <typename F> void parallel_for(std::size_t n, int threads, F &&f) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += workers) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto &th : pool) th.join();
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

// Reads the members of one JSON object, tracking which keys were consumed
// so leftovers can be reported as unknown.
class Fields {
public:
  Fields(const json &doc, std::string prefix) : doc_(doc), prefix_(std::move(prefix)) {
    if (!doc_.is_object()) {
      throw ConfigError(prefix_, "expected an object");
    }
  }

  std::string path(std::string_view key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
  }

  const json *find(const char *key) {
    seen_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  template <typename T> void read(const char *key, T &out) {
    if (const json *v = find(key)) {
      out = as<T>(*v, path(key));
    }
  }

  template <typename T> void read_pair(const char *key, T &first, T &second) {
    if (const json *v = find(key)) {
      if (!v->is_array() || v->size() != 2) {
        throw ConfigError(path(key), "expected a two-element array");
      }
      first = as<T>((*v)[0], path(key));
      second = as<T>((*v)[1], path(key));
    }
  }

  void finish() const {
    for (const auto &item : doc_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError(path(item.key()), "unknown key");
      }
    }
  }

  template <typename T> static T as(const json &v, const std::string &where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned() == false && v.get<std::int64_t>() < 0) {
          throw ConfigError(where, "must be non-negative");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where, "expected a string");
    }
    return v.get<T>();
  }

private:
  const json &doc_;
  std::string prefix_;
  std::set<std::string, std::less<>> seen_;
};

// Library validators throw ContractViolation; configuration paths want the
// key that caused it.
template <typename C> void validate_as(const C &c, const std::string &key) {
  try {
    c.validate();
  } catch (const ContractViolation &e) {
    throw ConfigError(key, e.what());
  }
}

void validate_setup(const SetupSpec &s, const std::string &key) {
  if (s.rows < 2 || s.cols < 2 || s.rows % 2 != 0 || s.cols % 2 != 0) {
    throw ConfigError(key + ".array", "rows and cols must be even and >= 2");
  }
  const auto &cb = s.codebook;
  if (cb.kind != "dft" && cb.kind != "subset") {
    throw ConfigError(key + ".codebook.kind", "must be \"dft\" or \"subset\"");
  }
  if (cb.oversampling_rows < 1 || cb.oversampling_cols < 1) {
    throw ConfigError(key + ".codebook.oversampling", "must be >= 1");
  }
  if (cb.kind == "subset" && cb.subset_count < 1) {
    throw ConfigError(key + ".codebook.count", "must be >= 1");
  }
  if (s.quadrants.empty()) {
    throw ConfigError(key + ".quadrants", "must not be empty");
  }
  std::set<Quadrant> unique(s.quadrants.begin(), s.quadrants.end());
  if (unique.size() != s.quadrants.size()) {
    throw ConfigError(key + ".quadrants", "duplicate quadrant");
  }
}

std::pair<MobilityTrace, MobilityTrace>
split_by_vehicle(const MobilityTrace &trace, double train_fraction, std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto &r : trace.records) ids.push_back(r.vehicle_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(ids.size())));
  const std::unordered_set<std::string> train_ids(
      ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, ids.size())));
  std::pair<MobilityTrace, MobilityTrace> out;
  for (const auto &r : trace.records) {
    (train_ids.count(r.vehicle_id) ? out.first : out.second).records.push_back(r);
  }
  return out;
}

UeProfile profile_for(const SetupSpec &s) {
  UeProfile p;
  p.rows = s.rows;
  p.cols = s.cols;
  p.codebook_id = s.codebook.kind;
  return p;
}

SetupReport evaluate_setup(const std::string &name, const SetupSpec &setup,
                           const Scene &scene, const MobilityTrace &trace,
                           std::size_t n, std::uint64_t seed,
                           const BeamPowerPredictor &model,
                           const OverheadModel &overhead, int threads) {
  SetupReport rep;
  rep.name = name;
  rep.setup = setup;
  const Codebook cb = make_codebook(setup.codebook, setup.rows, setup.cols);
  const Hierarchy hier = attach_to_coarse(cb);
  rep.codebook_size = cb.size();
  SnapshotSet snaps = sample_snapshots(scene.world, trace, profile_for(setup), scene.bs,
                                       scene.channel, n, setup.quadrants, seed);
  rep.with_replacement = snaps.with_replacement;
  rep.evaluations.resize(snaps.snapshots.size());
  parallel_for(snaps.snapshots.size(), threads, [&](std::size_t i) {
    rep.evaluations[i] =
        evaluate_snapshot(scene, snaps.snapshots[i], cb, hier, model, overhead);
  });
  rep.scores = score(rep.evaluations);
  rep.summaries = summarize(rep.scores);
  return rep;
}

json setup_summary_json(const SetupReport &r) {
  return {{"setup", to_json(r.setup)},
          {"codebook_size", r.codebook_size},
          {"with_replacement", r.with_replacement},
          {"methods", to_json(std::span<const MethodSummary>(r.summaries))}};
}

std::uint64_t file_hash(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), {});
  return fnv1a64(bytes);
}

} // namespace

std::string_view to_string(Protocol p) {
  switch (p) {
  case Protocol::Antenna: return "antenna";
  case Protocol::Codebook: return "codebook";
  case Protocol::Location: return "location";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(std::string_view text) {
  for (Protocol p : {Protocol::Antenna, Protocol::Codebook, Protocol::Location}) {
    if (text == to_string(p)) return p;
  }
  return std::nullopt;
}

Codebook make_codebook(const CodebookSpec &spec, int rows, int cols) {
  Codebook full =
      dft_codebook(rows, cols, spec.oversampling_rows, spec.oversampling_cols);
  if (spec.kind == "dft") return full;
  expects(spec.kind == "subset", "make_codebook: unknown kind");
  return random_subset(full, static_cast<std::size_t>(spec.subset_count),
                       spec.subset_seed);
}

ExperimentSeeds ExperimentSeeds::derived(std::uint64_t global_seed) {
  return {derive_seed(global_seed, "world"), derive_seed(global_seed, "mobility"),
          derive_seed(global_seed, "train_sample"),
          derive_seed(global_seed, "eval_sample"), derive_seed(global_seed, "model")};
}

void ExperimentSpec::validate() const {
  validate_setup(train_setup, "experiment.train_setup");
  validate_setup(test_setup, "experiment.test_setup");
  const auto &a = train_setup;
  const auto &b = test_setup;
  const bool same_array = a.rows == b.rows && a.cols == b.cols;
  const bool same_codebook = a.codebook == b.codebook;
  const bool same_quadrants = a.quadrants == b.quadrants;
  const std::string key = "experiment.test_setup";
  switch (protocol) {
  case Protocol::Antenna:
    if (!same_quadrants) throw ConfigError(key + ".quadrants", "antenna protocol varies only the array");
    break;
  case Protocol::Codebook:
    if (!same_array) throw ConfigError(key + ".array", "codebook protocol varies only the codebook");
    if (!same_quadrants) throw ConfigError(key + ".quadrants", "codebook protocol varies only the codebook");
    break;
  case Protocol::Location:
    if (!same_array) throw ConfigError(key + ".array", "location protocol varies only the quadrants");
    if (!same_codebook) throw ConfigError(key + ".codebook", "location protocol varies only the quadrants");
    break;
  }
  if (n_train_snapshots < 1) throw ConfigError("experiment.n_train", "must be >= 1");
  if (n_eval_snapshots < 1) throw ConfigError("experiment.n_eval", "must be >= 1");
  if (!(train_vehicle_fraction > 0.0 && train_vehicle_fraction < 1.0)) {
    throw ConfigError("experiment.train_vehicle_fraction", "must be in (0, 1)");
  }
  world.validate();
  mobility.validate();
  validate_as(channel, "channel");
  validate_as(radio, "radio");
  validate_as(overhead, "overhead");
  validate_as(model, "model");
  validate_as(training, "training");
  if (bs_rows < 1 || bs_cols < 1) throw ConfigError("bs.array", "must be >= 1");
  if (model.input_dim != kBaseFeatureDim) {
    throw ConfigError("model.input_dim", "must equal the feature count (7)");
  }
}

ExperimentSpec default_experiment(Protocol protocol, std::uint64_t global_seed) {
  ExperimentSpec s;
  s.protocol = protocol;
  s.seeds = ExperimentSeeds::derived(global_seed);
  switch (protocol) {
  case Protocol::Antenna:
    s.train_setup.rows = s.train_setup.cols = 4;
    s.test_setup.rows = s.test_setup.cols = 8;
    break;
  case Protocol::Codebook:
    for (auto *setup : {&s.train_setup, &s.test_setup}) {
      setup->rows = setup->cols = 4;
      setup->codebook.kind = "subset";
      setup->codebook.oversampling_rows = setup->codebook.oversampling_cols = 4;
      setup->codebook.subset_count = 16;
    }
    s.train_setup.codebook.subset_seed = derive_seed(global_seed, "codebook/train");
    s.test_setup.codebook.subset_seed = derive_seed(global_seed, "codebook/test");
    break;
  case Protocol::Location:
    s.train_setup.rows = s.train_setup.cols = 8;
    s.test_setup.rows = s.test_setup.cols = 8;
    // 64 UE beams per snapshot: a quarter of the snapshots gives the same
    // number of training samples as the 16-beam protocols.
    s.n_train_snapshots = 1000;
    s.train_setup.quadrants = {Quadrant::UpperRight};
    s.test_setup.quadrants = {Quadrant::UpperLeft, Quadrant::LowerLeft,
                              Quadrant::LowerRight};
    break;
  }
  return s;
}

std::uint64_t spec_hash(const ExperimentSpec &spec) {
  return fnv1a64(to_json(spec).dump());
}

Scene make_scene(WorldLayout world, int bs_rows, int bs_cols,
                 const ChannelConfig &channel, const RadioConfig &radio) {
  ArrayConfig bs(bs_rows, bs_cols, channel.wavelength(), 0.5 * channel.wavelength(),
                 facing_down(), world.bs_position);
  Codebook cb = dft_codebook(bs_rows, bs_cols);
  CMatrix w = cb.weight_matrix();
  return {std::move(world), std::move(bs), std::move(cb), std::move(w), channel, radio};
}

std::vector<TrainingSample> dataset_from_snapshots(const Scene &scene,
                                                   std::span<const Snapshot> snapshots,
                                                   const Codebook &ue_codebook) {
  const CMatrix ue_w = ue_codebook.weight_matrix();
  std::vector<TrainingSample> out;
  out.reserve(snapshots.size() * ue_codebook.size());
  for (const Snapshot &s : snapshots) {
    if (s.channel.empty()) continue;
    const Eigen::MatrixXd gains = pair_gains(s.channel, scene.bs_weights, ue_w);
    for (Eigen::Index u = 0; u < gains.rows(); ++u) {
      Eigen::Index best = 0;
      gains.row(u).maxCoeff(&best);
      const auto &beam = ue_codebook.beams[static_cast<std::size_t>(u)];
      const double rsrp =
          rsrp_dbm(s.channel, scene.bs_codebook.beams[static_cast<std::size_t>(best)].weights,
                   beam.weights, scene.radio);
      out.push_back(make_sample(s.context, beam.direction, rsrp));
    }
  }
  return out;
}

std::vector<TrainingSample> collect_dataset(const Scene &scene,
                                            const MobilityTrace &trace,
                                            const UeProfile &profile,
                                            const Codebook &ue_codebook, std::size_t n,
                                            std::span<const Quadrant> quadrants,
                                            std::uint64_t seed) {
  const SnapshotSet set = sample_snapshots(scene.world, trace, profile, scene.bs,
                                           scene.channel, n, quadrants, seed);
  return dataset_from_snapshots(scene, set.snapshots, ue_codebook);
}

SnapshotEvaluation evaluate_snapshot(const Scene &scene, const Snapshot &snapshot,
                                     const Codebook &ue_codebook,
                                     const Hierarchy &ue_hierarchy,
                                     const BeamPowerPredictor &model,
                                     const OverheadModel &overhead) {
  expects(ue_hierarchy.fine.size() == ue_codebook.size(),
          "evaluate_snapshot: hierarchy does not match the UE codebook");
  const ChannelRealization &ch = snapshot.channel;
  const Eigen::MatrixXd fine = pair_gains(ch, scene.bs_weights, ue_codebook.weight_matrix());
  const Eigen::MatrixXd coarse =
      pair_gains(ch, scene.bs_weights, ue_hierarchy.coarse.weight_matrix());
  const std::vector<Direction> dirs = ue_codebook.directions();
  const std::vector<double> predicted = model.predict(snapshot.context, dirs);

  SnapshotEvaluation e;
  e.snapshot_id = snapshot.id;
  e.genie = genie_select(fine, scene.radio);
  e.dnn = predictor_select(predicted, fine, scene.radio);
  e.hs = hierarchical_select(coarse, fine, ue_hierarchy.children, scene.radio);
  e.es = exhaustive_select(fine, scene.radio);
  e.outage = ch.empty() || e.genie.outage();

  auto se_of = [&](const SelectionResult &r) {
    return spectral_efficiency(ch, scene.bs_codebook.beams[static_cast<std::size_t>(r.bs_beam)].weights,
                               ue_codebook.beams[static_cast<std::size_t>(r.ue_beam)].weights,
                               scene.radio);
  };
  e.se_genie = se_of(e.genie);
  e.se_dnn = effective_se(se_of(e.dnn), e.dnn.measured_pairs, overhead);
  e.se_hs = effective_se(se_of(e.hs), e.hs.measured_pairs, overhead);
  e.se_es = effective_se(se_of(e.es), e.es.measured_pairs, overhead);
  return e;
}

std::vector<SnapshotScore> score(std::span<const SnapshotEvaluation> evaluations) {
  std::vector<SnapshotScore> out;
  out.reserve(evaluations.size() * kReportedMethods.size());
  for (const auto &e : evaluations) {
    const double se[] = {e.se_dnn, e.se_hs, e.se_es};
    for (std::size_t m = 0; m < kReportedMethods.size(); ++m) {
      const double drop = e.outage ? 100.0 : relative_drop(e.se_genie, se[m]);
      out.push_back({e.snapshot_id, kReportedMethods[m], se[m], drop, e.outage});
    }
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentSpec &spec, const RunOptions &options) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  auto log = [&](const std::string &msg) {
    if (options.log) options.log(msg);
  };

  ExperimentReport rep;
  rep.spec = spec;
  Scene scene = make_scene(build_world(spec.seeds.world, spec.world), spec.bs_rows,
                           spec.bs_cols, spec.channel, spec.radio);
  const MobilityTrace trace =
      synth_mobility(scene.world, spec.mobility.vehicles, spec.mobility.duration_s,
                     spec.seeds.mobility, spec.mobility);
  const auto [train_trace, eval_trace] = split_by_vehicle(
      trace, spec.train_vehicle_fraction, derive_seed(spec.seeds.mobility, "split"));
  log("world and " + std::to_string(trace.records.size()) + " trace records ready");

  const SetupSpec &ts = spec.train_setup;
  const Codebook train_cb = make_codebook(ts.codebook, ts.rows, ts.cols);
  const SnapshotSet train_snaps =
      sample_snapshots(scene.world, train_trace, profile_for(ts), scene.bs, scene.channel,
                       spec.n_train_snapshots, ts.quadrants, spec.seeds.train_sample);
  for (const auto &s : train_snaps.snapshots) rep.train_snapshot_ids.push_back(s.id);

  std::vector<std::vector<TrainingSample>> parts(train_snaps.snapshots.size());
  parallel_for(parts.size(), options.threads, [&](std::size_t i) {
    parts[i] = dataset_from_snapshots(
        scene, std::span<const Snapshot>(&train_snaps.snapshots[i], 1), train_cb);
  });
  std::vector<TrainingSample> dataset;
  dataset.reserve(parts.size() * train_cb.size());
  for (auto &p : parts) {
    std::move(p.begin(), p.end(), std::back_inserter(dataset));
  }
  rep.training_samples = dataset.size();
  log("training on " + std::to_string(dataset.size()) + " samples");

  ModelSpec ms = spec.model;
  ms.seed = spec.seeds.model;
  TrainConfig tc = spec.training;
  tc.seed = derive_seed(spec.seeds.model, "batches");
  TrainingResult trained = train(dataset, ms, tc);
  rep.training_log = std::move(trained.log);
  rep.parameter_count = static_cast<std::size_t>(trained.model.parameters().size());
  log("training finished after " + std::to_string(rep.training_log.epochs.size()) +
      " epochs");

  rep.train = evaluate_setup("train", spec.train_setup, scene, eval_trace,
                             spec.n_eval_snapshots,
                             derive_seed(spec.seeds.eval_sample, "train"), trained.model,
                             spec.overhead, options.threads);
  rep.test = evaluate_setup("test", spec.test_setup, scene, eval_trace,
                            spec.n_eval_snapshots,
                            derive_seed(spec.seeds.eval_sample, "test"), trained.model,
                            spec.overhead, options.threads);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::vector<std::filesystem::path> emit_report(const ExperimentReport &report,
                                               const std::filesystem::path &out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::string &name, const auto &fill) {
    const auto path = out_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    fill(out);
    out.close();
    if (!out) throw DataError("write failed: " + path.string());
    written.push_back(path);
  };

  const ExperimentSpec &spec = report.spec;
  const std::uint64_t hash = spec_hash(spec);
  const TrainingLog &tl = report.training_log;

  json summary = {
      {"protocol", std::string(to_string(spec.protocol))},
      {"spec_hash", hex64(hash)},
      {"train", setup_summary_json(report.train)},
      {"test", setup_summary_json(report.test)},
      {"training",
       {{"samples", report.training_samples},
        {"parameters", report.parameter_count},
        {"epochs_run", tl.epochs.size()},
        {"best_epoch", tl.best_epoch},
        {"best_val_mse", tl.best_val_mse},
        {"early_stopped", tl.early_stopped}}}};
  write("summary.json", [&](std::ostream &o) { o << summary.dump(2) << '\n'; });
  write("spec.json", [&](std::ostream &o) { o << to_json(spec).dump(2) << '\n'; });
  write("scores_train.csv", [&](std::ostream &o) { write_scores_csv(o, report.train.scores); });
  write("scores_test.csv", [&](std::ostream &o) { write_scores_csv(o, report.test.scores); });
  write("plot.csv", [&](std::ostream &o) {
    o << "method,setup,mean_drop_pct,p90_drop_pct\n";
    for (const char *method : kReportedMethods) {
      for (const SetupReport *r : {&report.train, &report.test}) {
        for (const auto &s : r->summaries) {
          if (s.method == method) {
            o << method << ',' << r->name << ',' << format_fixed(s.mean_drop_pct) << ','
              << format_fixed(s.p90_drop_pct) << '\n';
          }
        }
      }
    }
  });
  write("training_log.csv", [&](std::ostream &o) { tl.write_csv(o); });

  std::vector<std::filesystem::path> hashed = written;
  write("MANIFEST", [&](std::ostream &o) {
    o << "protocol " << to_string(spec.protocol) << '\n';
    o << "spec_hash " << hex64(hash) << '\n';
    o << "seed.world " << spec.seeds.world << '\n';
    o << "seed.mobility " << spec.seeds.mobility << '\n';
    o << "seed.train_sample " << spec.seeds.train_sample << '\n';
    o << "seed.eval_sample " << spec.seeds.eval_sample << '\n';
    o << "seed.model " << spec.seeds.model << '\n';
    for (const auto &p : hashed) {
      o << "file " << p.filename().string() << ' ' << hex64(file_hash(p)) << '\n';
    }
  });
  return written;
}

// ---- JSON -------------------------------------------------------------

json to_json(const WorldConfig &c) {
  return {{"extent", {c.width, c.depth}},
          {"bs_height", c.bs_height},
          {"blockers_per_quadrant", c.blockers_per_quadrant},
          {"blocker_size", {c.blocker_min_size, c.blocker_max_size}},
          {"blocker_height", {c.blocker_min_height, c.blocker_max_height}},
          {"scatterers_per_quadrant", c.scatterers_per_quadrant},
          {"scatterer_height", {c.scatterer_min_height, c.scatterer_max_height}},
          {"street_half_width", c.street_half_width}};
}

void update_from_json(WorldConfig &c, const json &doc, const std::string &prefix) {
  Fields f(doc, prefix);
  f.read_pair("extent", c.width, c.depth);
  f.read("bs_height", c.bs_height);
  f.read("blockers_per_quadrant", c.blockers_per_quadrant);
  f.read_pair("blocker_size", c.blocker_min_size, c.blocker_max_size);
  f.read_pair("blocker_height", c.blocker_min_height, c.blocker_max_height);
  f.read("scatterers_per_quadrant", c.scatterers_per_quadrant);
  f.read_pair("scatterer_height", c.scatterer_min_height, c.scatterer_max_height);
  f.read("street_half_width", c.street_half_width);
  f.finish();
}

json to_json(const MobilityConfig &c) {
  return {{"vehicles", c.vehicles},
          {"duration_s", c.duration_s},
          {"car_fraction", c.car_fraction},
          {"mean_speed", c.mean_speed},
          {"car_to_bus_speed_ratio", c.car_to_bus_speed_ratio}};
}

void update_from_json(MobilityConfig &c, const json &doc, const std::string &prefix) {
  Fields f(doc, prefix);
  f.read("vehicles", c.vehicles);
  f.read("duration_s", c.duration_s);
  f.read("car_fraction", c.car_fraction);
  f.read("mean_speed", c.mean_speed);
  f.read("car_to_bus_speed_ratio", c.car_to_bus_speed_ratio);
  f.finish();
}

json to_json(const ChannelConfig &c) {
  return {{"carrier_hz", c.carrier_hz},
          {"subcarriers", c.subcarriers},
          {"subcarrier_spacing_hz", c.subcarrier_spacing_hz},
          {"reflection_coefficient", c.reflection_coefficient},
          {"max_paths", c.max_paths}};
}

void update_from_json(ChannelConfig &c, const json &doc, const std::string &prefix) {
  Fields f(doc, prefix);
  f.read("carrier_hz", c.carrier_hz);
  f.read("subcarriers", c.subcarriers);
  f.read("subcarrier_spacing_hz", c.subcarrier_spacing_hz);
  f.read("reflection_coefficient", c.reflection_coefficient);
  f.read("max_paths", c.max_paths);
  f.finish();
}

json to_json(const RadioConfig &c) {
  return {{"tx_power_dbm", c.tx_power_dbm},
          {"noise_figure_db", c.noise_figure_db},
          {"noise_psd_dbm_hz", c.noise_psd_dbm_hz}};
}

void update_from_json(RadioConfig &c, const json &doc, const std::string &prefix) {
  Fields f(doc, prefix);
  f.read("tx_power_dbm", c.tx_power_dbm);
  f.read("noise_figure_db", c.noise_figure_db);
  f.read("noise_psd_dbm_hz", c.noise_psd_dbm_hz);
  f.finish();
}

json to_json(const OverheadModel &c) {
  return {{"symbols_per_measurement", c.symbols_per_measurement},
          {"frame_symbols", c.frame_symbols}};
}

void update_from_json(OverheadModel &c, const json &doc, const std::string &prefix) {
  Fields f(doc, prefix);
  f.read("symbols_per_measurement", c.symbols_per_measurement);
  f.read("frame_symbols", c.frame_symbols);
  f.finish();
}

json to_json(const ModelSpec &c) {
  return {{"input_dim", c.input_dim},
          {"hidden_width", c.hidden_width},
          {"residual_blocks", c.residual_blocks},
          {"output_dim", c.output_dim},
          {"init_scheme", c.init_scheme}};
}

void update_from_json(ModelSpec &c, const json &doc, const std::string &prefix) {
  Fields f(doc, prefix);
  f.read("input_dim", c.input_dim);
  f.read("hidden_width", c.hidden_width);
  f.read("residual_blocks", c.residual_blocks);
  f.read("output_dim", c.output_dim);
  f.read("init_scheme", c.init_scheme);
  f.finish();
}

json to_json(const TrainConfig &c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"weight_decay", c.weight_decay},
          {"validation_fraction", c.validation_fraction},
          {"patience", c.patience}};
}

void update_from_json(TrainConfig &c, const json &doc, const std::string &prefix) {
  Fields f(doc, prefix);
  f.read("epochs", c.epochs);
  f.read("batch_size", c.batch_size);
  f.read("learning_rate", c.learning_rate);
  f.read("weight_decay", c.weight_decay);
  f.read("validation_fraction", c.validation_fraction);
  f.read("patience", c.patience);
  f.finish();
}

json to_json(const SetupSpec &s) {
  json quadrants = json::array();
  for (Quadrant q : s.quadrants) quadrants.push_back(std::string(to_string(q)));
  json cb = {{"kind", s.codebook.kind},
             {"oversampling", {s.codebook.oversampling_rows, s.codebook.oversampling_cols}}};
  if (s.codebook.kind == "subset") {
    cb["count"] = s.codebook.subset_count;
    cb["seed"] = s.codebook.subset_seed;
  }
  return {{"array", {s.rows, s.cols}}, {"codebook", cb}, {"quadrants", quadrants}};
}

SetupSpec setup_from_json(const json &doc, const std::string &prefix) {
  SetupSpec s;
  Fields f(doc, prefix);
  f.read_pair("array", s.rows, s.cols);
  if (const json *cb = f.find("codebook")) {
    Fields g(*cb, f.path("codebook"));
    g.read("kind", s.codebook.kind);
    g.read_pair("oversampling", s.codebook.oversampling_rows, s.codebook.oversampling_cols);
    g.read("count", s.codebook.subset_count);
    g.read("seed", s.codebook.subset_seed);
    g.finish();
  }
  if (const json *q = f.find("quadrants")) {
    if (!q->is_array()) throw ConfigError(f.path("quadrants"), "expected an array");
    s.quadrants.clear();
    for (const auto &item : *q) {
      const auto name = Fields::as<std::string>(item, f.path("quadrants"));
      const auto parsed = parse_quadrant(name);
      if (!parsed) throw ConfigError(f.path("quadrants"), "unknown quadrant '" + name + "'");
      s.quadrants.push_back(*parsed);
    }
  }
  f.finish();
  return s;
}

json to_json(const ExperimentSpec &spec) {
  return {{"protocol", std::string(to_string(spec.protocol))},
          {"n_train", spec.n_train_snapshots},
          {"n_eval", spec.n_eval_snapshots},
          {"train_vehicle_fraction", spec.train_vehicle_fraction},
          {"seeds",
           {{"world", spec.seeds.world},
            {"mobility", spec.seeds.mobility},
            {"train_sample", spec.seeds.train_sample},
            {"eval_sample", spec.seeds.eval_sample},
            {"model", spec.seeds.model}}},
          {"train_setup", to_json(spec.train_setup)},
          {"test_setup", to_json(spec.test_setup)},
          {"world", to_json(spec.world)},
          {"mobility", to_json(spec.mobility)},
          {"channel", to_json(spec.channel)},
          {"radio", to_json(spec.radio)},
          {"overhead", to_json(spec.overhead)},
          {"bs", {{"array", {spec.bs_rows, spec.bs_cols}}}},
          {"model", to_json(spec.model)},
          {"training", to_json(spec.training)}};
}

ExperimentSpec experiment_from_json(const json &doc, const std::string &prefix) {
  Fields f(doc, prefix);
  ExperimentSpec s;
  std::string protocol = "antenna";
  f.read("protocol", protocol);
  const auto p = parse_protocol(protocol);
  if (!p) throw ConfigError(f.path("protocol"), "unknown protocol '" + protocol + "'");
  s.protocol = *p;
  f.read("n_train", s.n_train_snapshots);
  f.read("n_eval", s.n_eval_snapshots);
  f.read("train_vehicle_fraction", s.train_vehicle_fraction);
  if (const json *seeds = f.find("seeds")) {
    Fields g(*seeds, f.path("seeds"));
    g.read("world", s.seeds.world);
    g.read("mobility", s.seeds.mobility);
    g.read("train_sample", s.seeds.train_sample);
    g.read("eval_sample", s.seeds.eval_sample);
    g.read("model", s.seeds.model);
    g.finish();
  }
  if (const json *v = f.find("train_setup")) s.train_setup = setup_from_json(*v, f.path("train_setup"));
  if (const json *v = f.find("test_setup")) s.test_setup = setup_from_json(*v, f.path("test_setup"));
  if (const json *v = f.find("world")) update_from_json(s.world, *v, "world");
  if (const json *v = f.find("mobility")) update_from_json(s.mobility, *v, "mobility");
  if (const json *v = f.find("channel")) update_from_json(s.channel, *v, "channel");
  if (const json *v = f.find("radio")) update_from_json(s.radio, *v, "radio");
  if (const json *v = f.find("overhead")) update_from_json(s.overhead, *v, "overhead");
  if (const json *v = f.find("bs")) {
    Fields g(*v, "bs");
    g.read_pair("array", s.bs_rows, s.bs_cols);
    g.finish();
  }
  if (const json *v = f.find("model")) update_from_json(s.model, *v, "model");
  if (const json *v = f.find("training")) update_from_json(s.training, *v, "training");
  f.finish();
  return s;
}

} // namespace beamshift
