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

// beamshift command-line driver.
//
// Exit codes: 0 success, 1 a validation check failed, 2 data error,
// 64 usage or configuration error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamshift/codebook.hpp"
#include "beamshift/config.hpp"
#include "beamshift/experiments.hpp"
#include "beamshift/geometry.hpp"
#include "beamshift/metrics.hpp"
#include "beamshift/predictor.hpp"
#include "beamshift/scenario.hpp"
#include "beamshift/seed.hpp"

namespace bs = beamshift;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitDataError = 2;
constexpr int kExitUsage = 64;

struct GlobalOptions {
  std::string config_path;
  std::vector<std::string> assignments;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  int verbose = 0;
};

bs::CliConfig load(const GlobalOptions &g, const std::vector<std::string> &extra = {}) {
  nlohmann::json doc = nlohmann::json::object();
  if (!g.config_path.empty()) {
    doc = bs::load_config_file(g.config_path);
  }
  nlohmann::json merged = bs::default_config();
  bs::merge_config(merged, doc);
  for (const auto &a : g.assignments) bs::apply_assignment(merged, a);
  for (const auto &a : extra) bs::apply_assignment(merged, a);
  if (g.seed) merged["global_seed"] = *g.seed;
  if (g.out) merged["out"] = *g.out;
  if (g.threads) merged["threads"] = *g.threads;
  if (g.verbose > 0) merged["verbosity"] = merged["verbosity"].get<int>() + g.verbose;
  bs::CliConfig c = bs::resolve_config(merged);
  std::cerr << bs::seed_audit(c) << '\n';
  return c;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw bs::DataError("cannot write " + path.string());
}

bs::MobilityTrace fleet(const bs::CliConfig &c, const bs::WorldLayout &world) {
  if (c.trace) return bs::ingest_trace(*c.trace, world);
  const auto &m = c.experiment.mobility;
  return bs::synth_mobility(world, m.vehicles, m.duration_s, c.experiment.seeds.mobility, m);
}

int cmd_world(const GlobalOptions &g) {
  const bs::CliConfig c = load(g);
  const bs::WorldLayout world = bs::build_world(c.experiment.seeds.world, c.experiment.world);
  const auto path = c.out / "world.json";
  write_text(path, bs::to_json(world).dump(2) + "\n");
  std::cerr << "world: " << world.scatterers.size() << " scatterers, "
            << world.blockers.size() << " blockers -> " << path.string() << '\n';
  return kExitOk;
}

int cmd_train(const GlobalOptions &g) {
  const bs::CliConfig c = load(g);
  const auto &e = c.experiment;
  bs::Scene scene = bs::make_scene(bs::build_world(e.seeds.world, e.world), e.bs_rows,
                                   e.bs_cols, e.channel, e.radio);
  const bs::MobilityTrace trace = fleet(c, scene.world);
  bs::UeProfile profile;
  profile.rows = c.train_setup.rows;
  profile.cols = c.train_setup.cols;
  profile.codebook_id = c.train_setup.codebook.kind;
  const bs::Codebook cb =
      bs::make_codebook(c.train_setup.codebook, c.train_setup.rows, c.train_setup.cols);
  const auto samples = bs::collect_dataset(scene, trace, profile, cb, c.train_snapshots,
                                           c.train_setup.quadrants, e.seeds.train_sample);
  std::cerr << "train: " << samples.size() << " samples from " << c.train_snapshots
            << " snapshots\n";
  bs::ModelSpec spec = e.model;
  spec.seed = e.seeds.model;
  bs::TrainConfig tc = e.training;
  tc.seed = bs::derive_seed(e.seeds.model, "batches");
  const bs::TrainingResult result = bs::train(samples, spec, tc);
  std::filesystem::create_directories(c.out);
  bs::save_model(result.model, c.out / "model.bin");
  std::ostringstream log;
  result.log.write_csv(log);
  write_text(c.out / "training_log.csv", log.str());
  std::cerr << "train: " << result.log.epochs.size() << " epochs, best val mse "
            << result.log.best_val_mse << " at epoch " << result.log.best_epoch << '\n';
  return kExitOk;
}

int cmd_experiment(const GlobalOptions &g, const std::string &protocol, bool dry_run) {
  std::vector<std::string> extra;
  if (!protocol.empty()) {
    if (!bs::parse_protocol(protocol)) {
      std::cerr << "error: unknown protocol '" << protocol
                << "' (expected antenna, codebook or location)\n";
      return kExitUsage;
    }
    extra.push_back("experiment.protocol=\"" + protocol + "\"");
  }
  const bs::CliConfig c = load(g, extra);
  if (dry_run) {
    std::cout << bs::to_json(c.experiment).dump(2) << '\n';
    return kExitOk;
  }
  bs::RunOptions opts;
  opts.threads = c.threads;
  if (c.verbosity > 0) {
    opts.log = [](const std::string &msg) { std::cerr << "experiment: " << msg << '\n'; };
  }
  const bs::ExperimentReport rep = bs::run_experiment(c.experiment, opts);
  bs::emit_report(rep, c.out);
  for (const bs::SetupReport *r : {&rep.train, &rep.test}) {
    for (const auto &s : r->summaries) {
      std::cerr << r->name << ' ' << s.method << " mean=" << bs::format_fixed(s.mean_drop_pct)
                << "% p90=" << bs::format_fixed(s.p90_drop_pct) << "%\n";
    }
  }
  std::cerr << "experiment: wall " << rep.wall_seconds << " s, report in "
            << c.out.string() << '\n';
  return kExitOk;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct CheckLine {
  bool pass;
  std::string name;
  std::string detail;
};

std::vector<CheckLine> fast_checks(const bs::CliConfig &c, const std::string &model_path) {
  std::vector<CheckLine> out;
  std::mt19937_64 rng(bs::derive_seed(c.global_seed, "validate"));
  std::uniform_real_distribution<double> az(-bs::kPi, bs::kPi), el(-0.5 * bs::kPi, 0.5 * bs::kPi);
  const double lambda = c.experiment.channel.wavelength();

  {
    double worst = 0.0;
    const bs::ArrayConfig array(8, 8, lambda);
    for (int i = 0; i < 200; ++i) {
      const bs::CVector a = bs::steering_vector(array, {az(rng), el(rng)});
      worst = std::max(worst, std::abs(a.norm() - 1.0));
    }
    out.push_back({worst < 1e-12, "steering_norm", "max |norm-1| = " + sci(worst)});
  }
  {
    double worst = 0.0;
    for (int n : {4, 8}) {
      const bs::CMatrix w = bs::dft_codebook(n, n).weight_matrix();
      const bs::CMatrix gram = w.adjoint() * w;
      worst = std::max(worst, (gram - bs::CMatrix::Identity(gram.rows(), gram.cols()))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    out.push_back({worst < 1e-12, "dft_orthogonality", "max |G-I| = " + sci(worst)});
  }
  {
    // Free space, matched beams on both ends: received power is transmit
    // power minus path loss plus the full array gain.
    bs::WorldLayout empty;
    const bs::ArrayConfig bs_array(8, 8, lambda, 0.5 * lambda, bs::facing_down(),
                                   empty.bs_position);
    const bs::Vec3 ue_pos(100.0, 40.0, 1.5);
    const bs::ArrayConfig ue_array(4, 4, lambda, 0.5 * lambda, bs::Mat3::Identity(), ue_pos);
    const auto ch = bs::generate_channel(empty, bs_array, ue_array, c.experiment.channel, 1);
    const bs::CVector f = bs::steering_vector(bs_array, ch.paths.at(0).aod);
    const bs::CVector w = bs::steering_vector(ue_array, ch.paths.at(0).aoa);
    const double got = bs::rsrp_dbm(ch, f, w, c.experiment.radio);
    const double d = (ue_pos - empty.bs_position).norm();
    const double expected = c.experiment.radio.tx_power_dbm +
                            20.0 * std::log10(lambda / (4.0 * bs::kPi * d)) +
                            10.0 * std::log10(64.0 * 16.0);
    const double err = std::abs(got - expected);
    out.push_back({err < 0.01, "link_budget", "|rsrp - oracle| = " + sci(err) + " dB"});
  }

  bs::ResidualMlp model;
  bool have_model = true;
  if (!model_path.empty()) {
    try {
      model = bs::load_model(model_path);
      out.push_back({true, "model_load", model_path});
    } catch (const bs::DataError &e) {
      out.push_back({false, "model_load", e.what()});
      have_model = false;
    }
  } else {
    bs::ModelSpec spec;
    spec.hidden_width = 16;
    spec.residual_blocks = 2;
    spec.seed = bs::derive_seed(c.global_seed, "validate/model");
    model = bs::ResidualMlp::initialized(spec);
  }
  if (have_model) {
    const int in = model.spec().input_dim;
    std::normal_distribution<double> nd;
    Eigen::MatrixXd x(in, 8), y(model.spec().output_dim, 8);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = nd(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = nd(rng);
    const auto g = bs::check_gradients(model, x, y);
    out.push_back({g.max_relative_error < 1e-4, "gradient_check",
                   "max rel err = " + sci(g.max_relative_error) + " at " +
                       model.parameter_name(g.worst_index) +
                       " (analytic " + sci(g.worst_analytic) + ", numeric " +
                       sci(g.worst_numeric) + ")"});
  }
  return out;
}

int cmd_validate(const GlobalOptions &g, const std::string &model_path) {
  const bs::CliConfig c = load(g);
  bool ok = true;
  for (const auto &line : fast_checks(c, model_path)) {
    std::cout << (line.pass ? "PASS " : "FAIL ") << line.name << ": " << line.detail << '\n';
    ok = ok && line.pass;
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_report(const GlobalOptions &g, const std::vector<std::string> &score_files) {
  const bs::CliConfig c = load(g);
  nlohmann::json doc = nlohmann::json::object();
  for (const auto &file : score_files) {
    std::ifstream in(file);
    if (!in) throw bs::DataError("cannot open " + file);
    const auto scores = bs::read_scores_csv(in);
    const auto summaries = bs::summarize(scores);
    doc[std::filesystem::path(file).filename().string()] =
        bs::to_json(std::span<const bs::MethodSummary>(summaries));
    for (const auto &s : summaries) {
      std::cerr << file << ' ' << s.method << " mean=" << bs::format_fixed(s.mean_drop_pct)
                << "% p90=" << bs::format_fixed(s.p90_drop_pct) << "% n=" << s.n_snapshots
                << '\n';
    }
  }
  write_text(c.out / "report.json", doc.dump(2) + "\n");
  return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"beamshift: beam selection under train/test mismatch"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON config file")->option_text("FILE");
  app.add_option("--set", g.assignments, "Override a config leaf: key.path=value")
      ->option_text("KEY=VALUE");
  app.add_option("--seed", g.seed, "Global seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", g.verbose, "More log output on stderr");

  auto *world = app.add_subcommand("world", "Build and serialize the world layout");
  auto *train = app.add_subcommand("train", "Collect a dataset and train the predictor");
  auto *experiment = app.add_subcommand("experiment", "Run one mismatch protocol");
  std::string protocol;
  bool dry_run = false;
  experiment->add_option("--protocol", protocol, "antenna | codebook | location");
  experiment->add_flag("--dry-run", dry_run, "Print the resolved spec and exit");
  auto *validate = app.add_subcommand("validate", "Run the fast invariant checks");
  std::string model_path;
  validate->add_option("--model", model_path, "Model file to load and gradient-check");
  auto *report = app.add_subcommand("report", "Summarize per-snapshot score files");
  std::vector<std::string> score_files;
  report->add_option("--scores", score_files, "Score CSV files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*world) return cmd_world(g);
    if (*train) return cmd_train(g);
    if (*experiment) return cmd_experiment(g, protocol, dry_run);
    if (*validate) return cmd_validate(g, model_path);
    if (*report) return cmd_report(g, score_files);
  } catch (const bs::ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const bs::DataError &e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}
