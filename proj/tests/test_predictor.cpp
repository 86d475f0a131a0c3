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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "beamshift/codebook.hpp"
#include "beamshift/predictor.hpp"
#include "beamshift/scenario.hpp"
#include "support.hpp"

namespace bs = beamshift;
namespace bt = beamshift::testing;

namespace {

bs::SnapshotContext random_context(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  bs::SnapshotContext c;
  c.position_rel = bs::Vec3(u(rng), u(rng), 0.5 * (u(rng) + 1.0) * 0.1);
  c.los = u(rng) > 0.0;
  return c;
}

Eigen::MatrixXd random_matrix(std::mt19937_64 &rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = n(rng);
  return m;
}

bs::ModelSpec small_spec(std::uint64_t seed = 1) {
  bs::ModelSpec s;
  s.hidden_width = 12;
  s.residual_blocks = 2;
  s.seed = seed;
  return s;
}

} // namespace

TEST(Features, BroadsideAtBasePosition) {
  bs::SnapshotContext ctx;
  ctx.los = true;
  const Eigen::VectorXd f = bs::encode_features(ctx, {0.0, bs::kPi / 2});
  const double want[] = {0, 0, 0, 1, 0, 0, 1};
  ASSERT_EQ(f.size(), 7);
  for (int i = 0; i < 7; ++i) EXPECT_NEAR(f(i), want[i], 1e-15);
}

TEST(Features, AzimuthWrapsAround) {
  const bs::SnapshotContext ctx;
  const auto a = bs::encode_features(ctx, {0.8, 0.3});
  const auto b = bs::encode_features(ctx, {0.8 + 2 * bs::kPi, 0.3});
  EXPECT_LT((a - b).norm(), 1e-12);
}

TEST(Features, DirectionRecoverable) {
  std::mt19937_64 rng(1);
  const bs::SnapshotContext ctx;
  for (int i = 0; i < 1000; ++i) {
    const bs::Direction d = bt::random_hemisphere(rng);
    const Eigen::VectorXd f = bs::encode_features(ctx, d);
    ASSERT_NEAR(std::atan2(f(5), f(4)), d.azimuth, 1e-9);
    ASSERT_NEAR(std::asin(f(6)), d.elevation, 1e-9);
  }
}

TEST(Labels, NormalizationRoundTripAndFloor) {
  EXPECT_EQ(bs::normalize_rsrp(-80.0), 0.0);
  EXPECT_NEAR(bs::denormalize_rsrp(bs::normalize_rsrp(-63.25)), -63.25, 1e-12);
  EXPECT_EQ(bs::normalize_rsrp(bs::kNoSignalDbm), bs::normalize_rsrp(-160.0));
}

TEST(Mlp, ParameterCountAtDefaults) {
  EXPECT_EQ(bs::parameter_count(bs::ModelSpec{}), 25537u);
  EXPECT_EQ(bs::ResidualMlp(bs::ModelSpec{}).parameters().size(), 25537);
}

TEST(Mlp, ZeroNetworkOutputsZero) {
  std::mt19937_64 rng(2);
  const bs::ResidualMlp m(bs::ModelSpec{});
  for (int i = 0; i < 10; ++i) EXPECT_EQ(m.forward(random_matrix(rng, 7, 1).col(0)), 0.0);
}

TEST(Mlp, HandComputedAffineHead) {
  bs::ModelSpec s;
  s.input_dim = 2;
  s.hidden_width = 3;
  s.residual_blocks = 1;
  bs::ResidualMlp m(s);
  Eigen::VectorXd &p = m.parameters();
  // Input weights, column-major 3x2: rows (1,0), (0,1), (1,1); biases zero.
  const double in_w[] = {1, 0, 1, 0, 1, 1};
  for (int i = 0; i < 6; ++i) p(i) = in_w[i];
  // Residual block stays zero; the head averages the hidden units.
  const Eigen::Index out_w = p.size() - 4;
  p.segment(out_w, 3).setConstant(1.0 / 3.0);
  p(p.size() - 1) = 0.5;
  Eigen::Vector2d x(1.0, -2.0);
  // silu(1) = 0.7310585786, silu(-2) = -0.2384058440, silu(-1) = -0.2689414214
  EXPECT_NEAR(m.forward(x), 0.5 + (0.7310585786 - 0.2384058440 - 0.2689414214) / 3.0, 1e-9);
}

TEST(Mlp, BatchMatchesSingleSample) {
  std::mt19937_64 rng(3);
  const auto m = bs::ResidualMlp::initialized(small_spec());
  const Eigen::MatrixXd x = random_matrix(rng, 7, 20);
  const Eigen::MatrixXd y = m.forward_batch(x);
  for (int i = 0; i < 20; ++i) EXPECT_NEAR(y(0, i), m.forward(x.col(i)), 1e-12);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (int init : {0, 1}) {
    bs::ModelSpec s = small_spec(5);
    s.init_scheme = init;
    auto m = bs::ResidualMlp::initialized(s);
    if (init == 1) {
      // Zero init has vanishing gradients almost everywhere; perturb it.
      m.parameters() = 0.3 * random_matrix(rng, m.parameters().size(), 1).col(0);
    }
    const auto r = bs::check_gradients(m, random_matrix(rng, 7, 8), random_matrix(rng, 1, 8));
    EXPECT_LT(r.max_relative_error, 1e-4) << m.parameter_name(r.worst_index);
  }
}

TEST(Mlp, GradientPerLayerType) {
  std::mt19937_64 rng(6);
  const auto m = bs::ResidualMlp::initialized(small_spec(7));
  const Eigen::MatrixXd x = random_matrix(rng, 7, 8), y = random_matrix(rng, 1, 8);
  Eigen::VectorXd grad;
  m.loss_and_gradient(x, y, grad);
  std::map<std::string, double> worst;
  const double h = 1e-4;
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    bs::ResidualMlp plus = m, minus = m;
    plus.parameters()(i) += h;
    minus.parameters()(i) -= h;
    const double numeric = (plus.loss(x, y) - minus.loss(x, y)) / (2 * h);
    const double rel = std::abs(grad(i) - numeric) /
                       std::max({std::abs(grad(i)), std::abs(numeric), 1e-6});
    std::string name = m.parameter_name(i);
    name = name.substr(0, name.find('['));
    name = name.substr(name.find('.') + 1);
    worst[name] = std::max(worst[name], rel);
  }
  for (const char *kind : {"w", "b", "w1", "b1", "w2", "b2"}) {
    ASSERT_TRUE(worst.count(kind)) << kind;
    EXPECT_LT(worst[kind], 1e-4) << kind;
  }
}

TEST(Mlp, PredictionsFollowBeamPermutation) {
  std::mt19937_64 rng(8);
  const auto m = bs::ResidualMlp::initialized(small_spec());
  const bs::SnapshotContext ctx = random_context(rng);
  const bs::Codebook cb = bs::dft_codebook(8, 8);
  std::vector<bs::Direction> dirs = cb.directions();
  const auto base = m.predict(ctx, dirs);
  std::vector<std::size_t> perm(dirs.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<bs::Direction> shuffled;
  for (std::size_t i : perm) shuffled.push_back(dirs[i]);
  const auto out = m.predict(ctx, shuffled);
  for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_EQ(out[i], base[perm[i]]);
}

TEST(Train, LearnsAConstant) {
  std::mt19937_64 rng(9);
  std::vector<bs::TrainingSample> samples;
  for (int i = 0; i < 600; ++i) {
    samples.push_back({random_context(rng), bs::unit_vector(bt::random_hemisphere(rng)), 0.3});
  }
  bs::TrainConfig cfg;
  cfg.seed = 1;
  cfg.epochs = 1000; // early stopping ends it well before
  const auto r = bs::train(samples, small_spec(), cfg);
  EXPECT_LT(r.log.epochs.size(), 1000u);
  EXPECT_LT(r.log.best_val_mse, 1e-4);
}

TEST(Train, SinglePathWorldIsLearnable) {
  // 32 LOS-only snapshots x 16 UE beams.
  const bs::WorldLayout world = bt::open_world();
  const bs::Codebook bs_cb = bs::dft_codebook(8, 8);
  const bs::Codebook ue_cb = bs::dft_codebook(4, 4);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> xy(-190.0, 190.0);
  std::vector<bs::TrainingSample> samples;
  for (int s = 0; s < 32; ++s) {
    const bs::Vec3 pos(xy(rng), xy(rng), 1.5);
    const auto ch = bs::generate_channel(world, bt::bs_array(), bt::ue_array(pos), {}, s);
    const Eigen::MatrixXd g = bs::pair_gains(ch, bs_cb.weight_matrix(), ue_cb.weight_matrix());
    const bs::SnapshotContext ctx = bs::make_context(world, pos, true);
    for (int u = 0; u < 16; ++u) {
      samples.push_back(bs::make_sample(ctx, ue_cb.beams[static_cast<std::size_t>(u)].direction,
                                        bs::gain_to_rsrp_dbm(g.row(u).maxCoeff(), {})));
    }
  }
  ASSERT_EQ(samples.size(), 512u);
  bs::ModelSpec spec;
  spec.seed = 3;
  bs::TrainConfig cfg;
  cfg.seed = 4;
  // Two steps per epoch at the default batch size; leave room for early stopping.
  cfg.epochs = 1000;
  const auto r = bs::train(samples, spec, cfg);
  EXPECT_LT(r.log.best_val_mse, 0.05);
}

TEST(Train, MemorizesSmallSet) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> label(-1.0, 1.0);
  std::vector<bs::TrainingSample> samples;
  for (int i = 0; i < 64; ++i) {
    samples.push_back({random_context(rng), bs::unit_vector(bt::random_hemisphere(rng)), label(rng)});
  }
  bs::TrainConfig cfg;
  cfg.epochs = 2000;
  cfg.batch_size = 16;
  cfg.weight_decay = 0.0;
  cfg.patience = 2000;
  cfg.seed = 2;
  bs::ModelSpec spec;
  spec.seed = 12;
  const auto r = bs::train(samples, spec, cfg);
  ASSERT_EQ(r.log.epochs.size(), 2000u);
  EXPECT_LT(r.log.epochs.back().train_mse, 1e-3);
}

TEST(Train, LogHasOneRowPerEpoch) {
  std::mt19937_64 rng(13);
  std::vector<bs::TrainingSample> samples;
  for (int i = 0; i < 64; ++i) samples.push_back({random_context(rng), bs::Vec3::UnitZ(), 0.1});
  bs::TrainConfig cfg;
  cfg.epochs = 7;
  cfg.batch_size = 8;
  const auto r = bs::train(samples, small_spec(), cfg);
  std::ostringstream csv;
  r.log.write_csv(csv);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 8);
  EXPECT_EQ(text.substr(0, text.find('\n')), "epoch,train_mse,val_mse");
}

TEST(Train, Deterministic) {
  std::mt19937_64 rng(14);
  std::vector<bs::TrainingSample> samples;
  for (int i = 0; i < 64; ++i) samples.push_back({random_context(rng), bs::Vec3::UnitZ(), 0.1 * i / 64.0});
  bs::TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 8;
  const auto a = bs::train(samples, small_spec(), cfg);
  const auto b = bs::train(samples, small_spec(), cfg);
  EXPECT_EQ(a.model.parameters(), b.model.parameters());
}

TEST(Train, RejectsTooFewSamples) {
  std::vector<bs::TrainingSample> samples(100);
  EXPECT_THROW(bs::train(samples, small_spec(), bs::TrainConfig{}), bs::TooFewSamples);
}

TEST(Train, RejectsNonFiniteLabels) {
  std::mt19937_64 rng(15);
  std::vector<bs::TrainingSample> samples;
  for (int i = 0; i < 64; ++i) samples.push_back({random_context(rng), bs::Vec3::UnitZ(), 0.1});
  samples[17].label = std::nan("");
  bs::TrainConfig cfg;
  cfg.batch_size = 8;
  EXPECT_THROW(bs::train(samples, small_spec(), cfg), bs::DataError);
}

TEST(Train, ExplodingStepsReportDivergence) {
  std::mt19937_64 rng(15);
  std::vector<bs::TrainingSample> samples;
  for (int i = 0; i < 64; ++i) {
    samples.push_back({random_context(rng), bs::unit_vector(bt::random_hemisphere(rng)), 1e150});
  }
  bs::TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.epochs = 50;
  cfg.learning_rate = 1e200;
  try {
    bs::train(samples, small_spec(), cfg);
    FAIL() << "expected divergence";
  } catch (const bs::TrainingDiverged &e) {
    EXPECT_LT(e.log().epochs.size(), 50u);
  }
}

TEST(ModelFile, RoundTripIsBitExact) {
  std::mt19937_64 rng(16);
  const auto m = bs::ResidualMlp::initialized(bs::ModelSpec{});
  std::stringstream buf;
  bs::save_model(m, buf);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.size(), bs::kModelHeaderBytes + 8 * bs::parameter_count(m.spec()));
  const auto back = bs::load_model(buf);
  EXPECT_EQ(back.spec(), m.spec());
  const Eigen::MatrixXd x = random_matrix(rng, 7, 16);
  EXPECT_EQ(back.forward_batch(x), m.forward_batch(x));
}

TEST(ModelFile, TruncationIsDetected) {
  const auto m = bs::ResidualMlp::initialized(small_spec());
  std::stringstream buf;
  bs::save_model(m, buf);
  const std::string bytes = buf.str();
  for (std::size_t cut : {std::size_t{3}, bs::kModelHeaderBytes - 1, bytes.size() - 1}) {
    std::stringstream partial(bytes.substr(0, cut));
    EXPECT_THROW(bs::load_model(partial), bs::CorruptModelFile) << cut;
  }
}

TEST(ModelFile, RejectsForeignVersionAndMagic) {
  const auto m = bs::ResidualMlp::initialized(small_spec());
  std::stringstream buf;
  bs::save_model(m, buf);
  std::string bytes = buf.str();
  std::string bad_version = bytes;
  bad_version[8] = 9;
  std::stringstream v(bad_version);
  EXPECT_THROW(bs::load_model(v), bs::ModelVersionMismatch);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::stringstream g(bad_magic);
  EXPECT_THROW(bs::load_model(g), bs::CorruptModelFile);
}

TEST(ModelFile, PathOverloads) {
  const auto m = bs::ResidualMlp::initialized(small_spec());
  const auto path = std::filesystem::temp_directory_path() / "beamshift_model_test.bin";
  bs::save_model(m, path);
  EXPECT_EQ(bs::load_model(path).parameters(), m.parameters());
  std::filesystem::remove(path);
  EXPECT_THROW(bs::load_model(path), bs::CorruptModelFile);
}
