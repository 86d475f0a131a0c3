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

#ifndef BEAMSHIFT_PREDICTOR_HPP
#define BEAMSHIFT_PREDICTOR_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "beamshift/error.hpp"
#include "beamshift/types.hpp"

namespace beamshift {

/*
 * Side information available to the beam predictor for one UE snapshot:
 * position relative to the BS (each component divided by the world
 * half-extent) and a line-of-sight flag. `extra` is appended verbatim to the
 * feature vector.
 */
struct SnapshotContext {
  Vec3 position_rel = Vec3::Zero();
  bool los = false;
  std::vector<double> extra;
};

inline constexpr int kBaseFeatureDim = 7;

// Fixed label normalization: (rsrp_dbm - offset) * scale. Values below the
// floor (deep nulls, -inf) are clamped to it before normalizing.
inline constexpr double kLabelOffsetDbm = -80.0;
inline constexpr double kLabelScale = 1.0 / 40.0;
inline constexpr double kLabelFloorDbm = -160.0;

double normalize_rsrp(double rsrp_dbm);
double denormalize_rsrp(double label);

// [position_rel (3), los (1), beam direction unit vector (3), extra...]
Eigen::VectorXd encode_features(const SnapshotContext &ctx, const Direction &beam);

struct TrainingSample {
  SnapshotContext context;
  Vec3 beam_dir = Vec3::UnitZ(); // unit vector of the beam direction
  double label = 0.0;            // normalized RSRP
};

TrainingSample make_sample(const SnapshotContext &ctx, const Direction &beam,
                           double rsrp_dbm);

struct ModelSpec {
  int input_dim = kBaseFeatureDim;
  int hidden_width = 64;
  int residual_blocks = 3;
  int output_dim = 1;
  int init_scheme = 0; // 0: scaled uniform, 1: all zeros
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const ModelSpec &, const ModelSpec &) = default;
};

std::size_t parameter_count(const ModelSpec &spec);

// Anything that scores beam directions for a snapshot; larger is better.
class BeamPowerPredictor {
public:
  virtual ~BeamPowerPredictor() = default;
  virtual std::vector<double> predict(const SnapshotContext &ctx,
                                      std::span<const Direction> beams) const = 0;
};

/*
 * Residual multilayer perceptron regressor:
 *
 *   h0 = silu(W_in x + b_in)
 *   h_{i+1} = h_i + W2_i silu(W1_i h_i + b1_i) + b2_i
 *   y = W_out h_B + b_out
 *
 * All parameters live in one flat vector (the layout save_model() writes).
 * Single-sample inference uses matrix-vector products only, so the output
 * for a feature vector never depends on which other inputs are evaluated.
 */
class ResidualMlp : public BeamPowerPredictor {
public:
  ResidualMlp() = default; // untrained, holds no parameters
  explicit ResidualMlp(const ModelSpec &spec);

  static ResidualMlp initialized(const ModelSpec &spec);

  bool empty() const { return params_.size() == 0; }
  const ModelSpec &spec() const { return spec_; }
  const Eigen::VectorXd &parameters() const { return params_; }
  Eigen::VectorXd &parameters() { return params_; }

  double forward(const Eigen::Ref<const Eigen::VectorXd> &features) const;

  // Features one per column; returns output_dim x n.
  Eigen::MatrixXd forward_batch(const Eigen::Ref<const Eigen::MatrixXd> &x) const;

  // Mean squared error over all outputs and samples, with its gradient.
  double loss_and_gradient(const Eigen::Ref<const Eigen::MatrixXd> &x,
                           const Eigen::Ref<const Eigen::MatrixXd> &y,
                           Eigen::VectorXd &gradient) const;

  double loss(const Eigen::Ref<const Eigen::MatrixXd> &x,
              const Eigen::Ref<const Eigen::MatrixXd> &y) const;

  std::vector<double> predict(const SnapshotContext &ctx,
                              std::span<const Direction> beams) const override;

  // Human readable name of a flat parameter index, e.g. "block1.w2[3,5]".
  std::string parameter_name(Eigen::Index index) const;

private:
  ModelSpec spec_;
  Eigen::VectorXd params_;
};

struct TrainConfig {
  int epochs = 200;
  int batch_size = 256;
  double learning_rate = 1e-3;
  double weight_decay = 1e-5;
  double validation_fraction = 0.1;
  int patience = 20;
  std::uint64_t seed = 0;

  void validate() const;
  // Learning rate for a 0-based epoch: halved at 60% and again at 85%.
  double learning_rate_at(int epoch) const;
};

struct EpochLog {
  int epoch;
  double train_mse;
  double val_mse;
};

struct TrainingLog {
  std::vector<EpochLog> epochs;
  int best_epoch = -1;
  double best_val_mse = 0.0;
  bool early_stopped = false;

  void write_csv(std::ostream &out) const;
};

struct TrainingResult {
  ResidualMlp model;
  TrainingLog log;
};

class TrainingDiverged : public NonFiniteLoss {
public:
  TrainingDiverged(const std::string &what, TrainingLog log)
      : NonFiniteLoss(what), log_(std::move(log)) {}
  const TrainingLog &log() const { return log_; }

private:
  TrainingLog log_;
};

class ModelVersionMismatch : public CorruptModelFile {
public:
  using CorruptModelFile::CorruptModelFile;
};

/*
 * Adam on the mean squared error of normalized labels. Deterministic for a
 * fixed (spec.seed, config.seed): the validation split, the batch order and
 * the initial parameters all derive from them. Returns the parameters of the
 * epoch with the lowest validation loss.
 */
TrainingResult train(std::span<const TrainingSample> samples, const ModelSpec &spec,
                     const TrainConfig &config);

// Feature matrix (one column per sample) and label row vector.
Eigen::MatrixXd feature_matrix(std::span<const TrainingSample> samples);
Eigen::MatrixXd label_matrix(std::span<const TrainingSample> samples);

inline constexpr char kModelMagic[8] = {'B', 'S', 'H', 'F', 'T', 'M', 'L', 'P'};
inline constexpr std::uint32_t kModelFormatVersion = 1;
// magic + version + five u32 spec fields + u64 seed + u64 parameter count
inline constexpr std::size_t kModelHeaderBytes = 8 + 4 + 5 * 4 + 8 + 8;

void save_model(const ResidualMlp &model, const std::filesystem::path &path);
void save_model(const ResidualMlp &model, std::ostream &out);
ResidualMlp load_model(const std::filesystem::path &path);
ResidualMlp load_model(std::istream &in);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  Eigen::Index worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/*
 * Compares backpropagated gradients with central differences of loss().
 * Relative error is |a - n| / max(|a|, |n|, floor).
 */
GradientCheckResult check_gradients(const ResidualMlp &model,
                                    const Eigen::Ref<const Eigen::MatrixXd> &x,
                                    const Eigen::Ref<const Eigen::MatrixXd> &y,
                                    double step = 1e-4, double floor = 1e-6);

} // namespace beamshift

#endif // BEAMSHIFT_PREDICTOR_HPP
