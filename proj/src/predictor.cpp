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

#include "beamshift/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace beamshift {

double normalize_rsrp(double rsrp_dbm) {
  return (std::max(rsrp_dbm, kLabelFloorDbm) - kLabelOffsetDbm) * kLabelScale;
}

double denormalize_rsrp(double label) { return label / kLabelScale + kLabelOffsetDbm; }

Eigen::VectorXd encode_features(const SnapshotContext &ctx, const Direction &beam) {
  Eigen::VectorXd f(kBaseFeatureDim + static_cast<Eigen::Index>(ctx.extra.size()));
  f.head<3>() = ctx.position_rel;
  f(3) = ctx.los ? 1.0 : 0.0;
  f.segment<3>(4) = unit_vector(beam);
  for (std::size_t i = 0; i < ctx.extra.size(); ++i) {
    f(kBaseFeatureDim + static_cast<Eigen::Index>(i)) = ctx.extra[i];
  }
  return f;
}

TrainingSample make_sample(const SnapshotContext &ctx, const Direction &beam,
                           double rsrp_dbm) {
  return {ctx, unit_vector(beam), normalize_rsrp(rsrp_dbm)};
}

void ModelSpec::validate() const {
  expects(input_dim >= 1 && hidden_width >= 1 && residual_blocks >= 0 &&
              output_dim >= 1,
          "ModelSpec: dimensions must be >= 1");
  expects(init_scheme == 0 || init_scheme == 1,
          "ModelSpec: unknown initialization scheme");
}

namespace {

struct BlockOffsets {
  Eigen::Index w1, b1, w2, b2;
};

// Offsets of every tensor inside the flat parameter vector.
struct Layout {
  Eigen::Index in_dim, hidden, out_dim;
  Eigen::Index in_w, in_b;
  std::vector<BlockOffsets> blocks;
  Eigen::Index out_w, out_b;
  Eigen::Index total;

  explicit Layout(const ModelSpec &s)
      : in_dim(s.input_dim), hidden(s.hidden_width), out_dim(s.output_dim) {
    Eigen::Index at = 0;
    in_w = at;
    at += hidden * in_dim;
    in_b = at;
    at += hidden;
    for (int i = 0; i < s.residual_blocks; ++i) {
      BlockOffsets b;
      b.w1 = at;
      at += hidden * hidden;
      b.b1 = at;
      at += hidden;
      b.w2 = at;
      at += hidden * hidden;
      b.b2 = at;
      at += hidden;
      blocks.push_back(b);
    }
    out_w = at;
    at += out_dim * hidden;
    out_b = at;
    at += out_dim;
    total = at;
  }
};

using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using MatMap = Eigen::Map<Eigen::MatrixXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

ConstMatMap mat(const Eigen::VectorXd &p, Eigen::Index off, Eigen::Index r,
                Eigen::Index c) {
  return ConstMatMap(p.data() + off, r, c);
}
ConstVecMap vec(const Eigen::VectorXd &p, Eigen::Index off, Eigen::Index n) {
  return ConstVecMap(p.data() + off, n);
}
MatMap mat(Eigen::VectorXd &p, Eigen::Index off, Eigen::Index r, Eigen::Index c) {
  return MatMap(p.data() + off, r, c);
}
VecMap vec(Eigen::VectorXd &p, Eigen::Index off, Eigen::Index n) {
  return VecMap(p.data() + off, n);
}

template <typename Derived> auto silu(const Eigen::ArrayBase<Derived> &z) {
  return z / (1.0 + (-z).exp());
}

template <typename Derived> auto silu_grad(const Eigen::ArrayBase<Derived> &z) {
  const auto s = 1.0 / (1.0 + (-z).exp());
  return s * (1.0 + z * (1.0 - s));
}

} // namespace

std::size_t parameter_count(const ModelSpec &spec) {
  spec.validate();
  return static_cast<std::size_t>(Layout(spec).total);
}

ResidualMlp::ResidualMlp(const ModelSpec &spec)
    : spec_(spec), params_(Eigen::VectorXd::Zero(
                       static_cast<Eigen::Index>(parameter_count(spec)))) {}

ResidualMlp ResidualMlp::initialized(const ModelSpec &spec) {
  ResidualMlp model(spec);
  if (spec.init_scheme == 1) {
    return model;
  }
  const Layout lay(spec);
  std::mt19937_64 rng(spec.seed);
  auto fill = [&](Eigen::Index off, Eigen::Index n, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < n; ++i) {
      model.params_(off + i) = dist(rng);
    }
  };
  const double h = double(lay.hidden);
  fill(lay.in_w, lay.hidden * lay.in_dim, std::sqrt(6.0 / lay.in_dim));
  for (const BlockOffsets &b : lay.blocks) {
    fill(b.w1, lay.hidden * lay.hidden, std::sqrt(6.0 / h));
    // Residual branches start close to the identity map.
    fill(b.w2, lay.hidden * lay.hidden, 0.1 * std::sqrt(6.0 / h));
  }
  fill(lay.out_w, lay.out_dim * lay.hidden, 1.0 / std::sqrt(h));
  return model;
}

double ResidualMlp::forward(const Eigen::Ref<const Eigen::VectorXd> &features) const {
  expects(!empty(), "ResidualMlp: model has no parameters");
  expects(features.size() == spec_.input_dim,
          "ResidualMlp: feature length does not match input_dim");
  const Layout lay(spec_);
  Eigen::VectorXd z = mat(params_, lay.in_w, lay.hidden, lay.in_dim) * features;
  z += vec(params_, lay.in_b, lay.hidden);
  Eigen::VectorXd h = silu(z.array()).matrix();
  for (const BlockOffsets &b : lay.blocks) {
    z.noalias() = mat(params_, b.w1, lay.hidden, lay.hidden) * h;
    z += vec(params_, b.b1, lay.hidden);
    const Eigen::VectorXd g = silu(z.array()).matrix();
    h.noalias() += mat(params_, b.w2, lay.hidden, lay.hidden) * g;
    h += vec(params_, b.b2, lay.hidden);
  }
  return mat(params_, lay.out_w, lay.out_dim, lay.hidden).row(0).dot(h) +
         params_(lay.out_b);
}

Eigen::MatrixXd
ResidualMlp::forward_batch(const Eigen::Ref<const Eigen::MatrixXd> &x) const {
  expects(!empty(), "ResidualMlp: model has no parameters");
  expects(x.rows() == spec_.input_dim,
          "ResidualMlp: feature length does not match input_dim");
  const Layout lay(spec_);
  Eigen::MatrixXd z = mat(params_, lay.in_w, lay.hidden, lay.in_dim) * x;
  z.colwise() += vec(params_, lay.in_b, lay.hidden);
  Eigen::MatrixXd h = silu(z.array()).matrix();
  Eigen::MatrixXd g(lay.hidden, x.cols());
  for (const BlockOffsets &b : lay.blocks) {
    z.noalias() = mat(params_, b.w1, lay.hidden, lay.hidden) * h;
    z.colwise() += vec(params_, b.b1, lay.hidden);
    g = silu(z.array()).matrix();
    h.noalias() += mat(params_, b.w2, lay.hidden, lay.hidden) * g;
    h.colwise() += vec(params_, b.b2, lay.hidden);
  }
  Eigen::MatrixXd y = mat(params_, lay.out_w, lay.out_dim, lay.hidden) * h;
  y.colwise() += vec(params_, lay.out_b, lay.out_dim);
  return y;
}

double ResidualMlp::loss(const Eigen::Ref<const Eigen::MatrixXd> &x,
                         const Eigen::Ref<const Eigen::MatrixXd> &y) const {
  expects(y.rows() == spec_.output_dim && y.cols() == x.cols(),
          "ResidualMlp: label shape mismatch");
  return (forward_batch(x) - y).squaredNorm() / double(y.size());
}

double ResidualMlp::loss_and_gradient(const Eigen::Ref<const Eigen::MatrixXd> &x,
                                      const Eigen::Ref<const Eigen::MatrixXd> &y,
                                      Eigen::VectorXd &gradient) const {
  expects(!empty(), "ResidualMlp: model has no parameters");
  expects(x.rows() == spec_.input_dim, "ResidualMlp: feature length mismatch");
  expects(y.rows() == spec_.output_dim && y.cols() == x.cols(),
          "ResidualMlp: label shape mismatch");
  const Layout lay(spec_);
  const Eigen::Index n = x.cols();
  const std::size_t n_blocks = lay.blocks.size();

  // Forward pass, keeping what backpropagation needs.
  Eigen::MatrixXd z0 = mat(params_, lay.in_w, lay.hidden, lay.in_dim) * x;
  z0.colwise() += vec(params_, lay.in_b, lay.hidden);
  std::vector<Eigen::MatrixXd> h(n_blocks + 1);
  std::vector<Eigen::MatrixXd> z1(n_blocks);
  std::vector<Eigen::MatrixXd> g(n_blocks);
  h[0] = silu(z0.array()).matrix();
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const BlockOffsets &b = lay.blocks[i];
    z1[i].noalias() = mat(params_, b.w1, lay.hidden, lay.hidden) * h[i];
    z1[i].colwise() += vec(params_, b.b1, lay.hidden);
    g[i] = silu(z1[i].array()).matrix();
    h[i + 1] = h[i];
    h[i + 1].noalias() += mat(params_, b.w2, lay.hidden, lay.hidden) * g[i];
    h[i + 1].colwise() += vec(params_, b.b2, lay.hidden);
  }
  Eigen::MatrixXd out = mat(params_, lay.out_w, lay.out_dim, lay.hidden) * h[n_blocks];
  out.colwise() += vec(params_, lay.out_b, lay.out_dim);

  const Eigen::MatrixXd residual = out - y;
  const double count = double(residual.size());
  const double value = residual.squaredNorm() / count;

  gradient.setZero(lay.total);
  const Eigen::MatrixXd d_out = (2.0 / count) * residual;
  mat(gradient, lay.out_w, lay.out_dim, lay.hidden).noalias() =
      d_out * h[n_blocks].transpose();
  vec(gradient, lay.out_b, lay.out_dim) = d_out.rowwise().sum();
  Eigen::MatrixXd d_h =
      mat(params_, lay.out_w, lay.out_dim, lay.hidden).transpose() * d_out;

  Eigen::MatrixXd d_z(lay.hidden, n);
  for (std::size_t i = n_blocks; i-- > 0;) {
    const BlockOffsets &b = lay.blocks[i];
    mat(gradient, b.w2, lay.hidden, lay.hidden).noalias() = d_h * g[i].transpose();
    vec(gradient, b.b2, lay.hidden) = d_h.rowwise().sum();
    d_z.noalias() = mat(params_, b.w2, lay.hidden, lay.hidden).transpose() * d_h;
    d_z.array() *= silu_grad(z1[i].array());
    mat(gradient, b.w1, lay.hidden, lay.hidden).noalias() = d_z * h[i].transpose();
    vec(gradient, b.b1, lay.hidden) = d_z.rowwise().sum();
    d_h.noalias() += mat(params_, b.w1, lay.hidden, lay.hidden).transpose() * d_z;
  }
  d_h.array() *= silu_grad(z0.array());
  mat(gradient, lay.in_w, lay.hidden, lay.in_dim).noalias() = d_h * x.transpose();
  vec(gradient, lay.in_b, lay.hidden) = d_h.rowwise().sum();
  return value;
}

std::vector<double> ResidualMlp::predict(const SnapshotContext &ctx,
                                         std::span<const Direction> beams) const {
  expects(!empty(), "predict: model is untrained");
  std::vector<double> out;
  out.reserve(beams.size());
  for (const Direction &d : beams) {
    out.push_back(forward(encode_features(ctx, d)));
  }
  return out;
}

std::string ResidualMlp::parameter_name(Eigen::Index index) const {
  const Layout lay(spec_);
  auto element = [](const std::string &name, Eigen::Index local, Eigen::Index rows) {
    std::ostringstream os;
    os << name << '[' << local % rows << ',' << local / rows << ']';
    return os.str();
  };
  auto entry = [](const std::string &name, Eigen::Index local) {
    return name + '[' + std::to_string(local) + ']';
  };
  if (index < lay.in_b) return element("input.w", index - lay.in_w, lay.hidden);
  if (index < lay.in_b + lay.hidden) return entry("input.b", index - lay.in_b);
  for (std::size_t i = 0; i < lay.blocks.size(); ++i) {
    const BlockOffsets &b = lay.blocks[i];
    const std::string prefix = "block" + std::to_string(i);
    if (index < b.b1) return element(prefix + ".w1", index - b.w1, lay.hidden);
    if (index < b.w2) return entry(prefix + ".b1", index - b.b1);
    if (index < b.b2) return element(prefix + ".w2", index - b.w2, lay.hidden);
    if (index < b.b2 + lay.hidden) return entry(prefix + ".b2", index - b.b2);
  }
  if (index < lay.out_b) return element("output.w", index - lay.out_w, lay.out_dim);
  return entry("output.b", index - lay.out_b);
}

void TrainConfig::validate() const {
  expects(epochs >= 1, "TrainConfig: epochs must be >= 1");
  expects(batch_size >= 1, "TrainConfig: batch_size must be >= 1");
  expects(learning_rate > 0.0, "TrainConfig: learning rate must be positive");
  expects(weight_decay >= 0.0, "TrainConfig: weight decay must be >= 0");
  expects(validation_fraction > 0.0 && validation_fraction < 1.0,
          "TrainConfig: validation fraction must be in (0, 1)");
  expects(patience >= 1, "TrainConfig: patience must be >= 1");
}

double TrainConfig::learning_rate_at(int epoch) const {
  double lr = learning_rate;
  if (epoch >= 0.6 * epochs) lr *= 0.5;
  if (epoch >= 0.85 * epochs) lr *= 0.5;
  return lr;
}

void TrainingLog::write_csv(std::ostream &out) const {
  out << "epoch,train_mse,val_mse\n";
  char buf[96];
  for (const EpochLog &e : epochs) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g\n", e.epoch, e.train_mse, e.val_mse);
    out << buf;
  }
}

Eigen::MatrixXd feature_matrix(std::span<const TrainingSample> samples) {
  const Eigen::Index extra =
      samples.empty() ? 0 : static_cast<Eigen::Index>(samples[0].context.extra.size());
  Eigen::MatrixXd x(kBaseFeatureDim + extra, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const TrainingSample &s = samples[i];
    expects(static_cast<Eigen::Index>(s.context.extra.size()) == extra,
            "feature_matrix: inconsistent feature tails");
    auto col = x.col(static_cast<Eigen::Index>(i));
    col.head<3>() = s.context.position_rel;
    col(3) = s.context.los ? 1.0 : 0.0;
    col.segment<3>(4) = s.beam_dir;
    for (Eigen::Index e = 0; e < extra; ++e) {
      col(kBaseFeatureDim + e) = s.context.extra[static_cast<std::size_t>(e)];
    }
  }
  return x;
}

Eigen::MatrixXd label_matrix(std::span<const TrainingSample> samples) {
  Eigen::MatrixXd y(1, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    y(0, static_cast<Eigen::Index>(i)) = samples[i].label;
  }
  return y;
}

namespace {

double chunked_loss(const ResidualMlp &model, const Eigen::MatrixXd &x,
                    const Eigen::MatrixXd &y) {
  constexpr Eigen::Index kChunk = 4096;
  double sum = 0.0;
  for (Eigen::Index start = 0; start < x.cols(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, x.cols() - start);
    sum += (model.forward_batch(x.middleCols(start, len)) - y.middleCols(start, len))
               .squaredNorm();
  }
  return sum / double(y.size());
}

} // namespace

TrainingResult train(std::span<const TrainingSample> samples, const ModelSpec &spec,
                     const TrainConfig &config) {
  spec.validate();
  config.validate();
  if (samples.size() < 2 * static_cast<std::size_t>(config.batch_size)) {
    throw TooFewSamples("train: " + std::to_string(samples.size()) +
                        " samples, need at least " +
                        std::to_string(2 * config.batch_size));
  }
  const Eigen::MatrixXd x_all = feature_matrix(samples);
  const Eigen::MatrixXd y_all = label_matrix(samples);
  expects(x_all.rows() == spec.input_dim,
          "train: feature length does not match ModelSpec.input_dim");
  if (!y_all.allFinite()) {
    throw DataError("train: non-finite label in training set");
  }

  std::mt19937_64 rng(config.seed);
  std::vector<Eigen::Index> order(samples.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(config.validation_fraction *
                                                double(samples.size()))));
  const std::vector<Eigen::Index> val_idx(order.begin(), order.begin() + n_val);
  std::vector<Eigen::Index> train_idx(order.begin() + n_val, order.end());
  const Eigen::MatrixXd x_val = x_all(Eigen::all, val_idx);
  const Eigen::MatrixXd y_val = y_all(Eigen::all, val_idx);

  ResidualMlp model = ResidualMlp::initialized(spec);
  Eigen::VectorXd &theta = model.parameters();
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(theta.size());
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  long step = 0;

  TrainingResult result;
  result.log.best_val_mse = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best = theta;
  int since_best = 0;
  Eigen::MatrixXd xb(x_all.rows(), config.batch_size);
  Eigen::MatrixXd yb(1, config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    const double lr = config.learning_rate_at(epoch);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < train_idx.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t len = std::min<std::size_t>(config.batch_size,
                                                    train_idx.size() - start);
      const auto cols = static_cast<Eigen::Index>(len);
      for (Eigen::Index j = 0; j < cols; ++j) {
        const Eigen::Index src = train_idx[start + static_cast<std::size_t>(j)];
        xb.col(j) = x_all.col(src);
        yb(0, j) = y_all(0, src);
      }
      const double batch_loss =
          model.loss_and_gradient(xb.leftCols(cols), yb.leftCols(cols), grad);
      if (!std::isfinite(batch_loss)) {
        throw TrainingDiverged("train: non-finite loss at epoch " +
                                   std::to_string(epoch) + ", sample offset " +
                                   std::to_string(start),
                               result.log);
      }
      loss_sum += batch_loss * double(len);
      grad += config.weight_decay * theta;
      ++step;
      m1 = kBeta1 * m1 + (1.0 - kBeta1) * grad;
      m2 = kBeta2 * m2 + (1.0 - kBeta2) * grad.cwiseAbs2();
      const double c1 = 1.0 - std::pow(kBeta1, double(step));
      const double c2 = 1.0 - std::pow(kBeta2, double(step));
      theta.array() -=
          lr * (m1.array() / c1) / ((m2.array() / c2).sqrt() + kEps);
    }
    const double train_mse = loss_sum / double(train_idx.size());
    const double val_mse = chunked_loss(model, x_val, y_val);
    if (!std::isfinite(val_mse)) {
      throw TrainingDiverged("train: non-finite validation loss at epoch " +
                                 std::to_string(epoch),
                             result.log);
    }
    result.log.epochs.push_back({epoch, train_mse, val_mse});
    if (val_mse < result.log.best_val_mse) {
      result.log.best_val_mse = val_mse;
      result.log.best_epoch = epoch;
      best = theta;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      result.log.early_stopped = true;
      break;
    }
  }
  theta = best;
  result.model = std::move(model);
  return result;
}

namespace {

void put_bytes(std::ostream &out, std::uint64_t value, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) {
    buf[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  }
  out.write(buf, bytes);
}

std::uint64_t get_bytes(const std::vector<char> &data, std::size_t &at, int bytes) {
  std::uint64_t value = 0;
  for (int i = 0; i < bytes; ++i) {
    value |= std::uint64_t(static_cast<unsigned char>(data[at + i])) << (8 * i);
  }
  at += static_cast<std::size_t>(bytes);
  return value;
}

} // namespace

void save_model(const ResidualMlp &model, std::ostream &out) {
  expects(!model.empty(), "save_model: model has no parameters");
  const ModelSpec &s = model.spec();
  out.write(kModelMagic, sizeof kModelMagic);
  put_bytes(out, kModelFormatVersion, 4);
  put_bytes(out, std::uint32_t(s.input_dim), 4);
  put_bytes(out, std::uint32_t(s.hidden_width), 4);
  put_bytes(out, std::uint32_t(s.residual_blocks), 4);
  put_bytes(out, std::uint32_t(s.output_dim), 4);
  put_bytes(out, std::uint32_t(s.init_scheme), 4);
  put_bytes(out, s.seed, 8);
  put_bytes(out, std::uint64_t(model.parameters().size()), 8);
  for (const double v : model.parameters()) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_bytes(out, bits, 8);
  }
  if (!out) {
    throw std::runtime_error("save_model: write failed");
  }
}

void save_model(const ResidualMlp &model, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("save_model: cannot open " + path.string());
  }
  save_model(model, out);
}

ResidualMlp load_model(std::istream &in) {
  const std::vector<char> data((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
  if (data.size() < kModelHeaderBytes) {
    throw CorruptModelFile("load_model: file shorter than header");
  }
  if (!std::equal(std::begin(kModelMagic), std::end(kModelMagic), data.begin())) {
    throw CorruptModelFile("load_model: bad magic");
  }
  std::size_t at = sizeof kModelMagic;
  const auto version = get_bytes(data, at, 4);
  if (version != kModelFormatVersion) {
    throw ModelVersionMismatch("load_model: format version " +
                               std::to_string(version) + ", expected " +
                               std::to_string(kModelFormatVersion));
  }
  ModelSpec spec;
  spec.input_dim = static_cast<int>(get_bytes(data, at, 4));
  spec.hidden_width = static_cast<int>(get_bytes(data, at, 4));
  spec.residual_blocks = static_cast<int>(get_bytes(data, at, 4));
  spec.output_dim = static_cast<int>(get_bytes(data, at, 4));
  spec.init_scheme = static_cast<int>(get_bytes(data, at, 4));
  spec.seed = get_bytes(data, at, 8);
  const auto count = get_bytes(data, at, 8);
  try {
    spec.validate();
  } catch (const ContractViolation &e) {
    throw CorruptModelFile(std::string("load_model: invalid header: ") + e.what());
  }
  if (count != parameter_count(spec)) {
    throw CorruptModelFile("load_model: parameter count does not match header");
  }
  if (data.size() != kModelHeaderBytes + 8 * count) {
    throw CorruptModelFile("load_model: parameter block has wrong length");
  }
  ResidualMlp model(spec);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t bits = get_bytes(data, at, 8);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    model.parameters()(static_cast<Eigen::Index>(i)) = v;
  }
  return model;
}

ResidualMlp load_model(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CorruptModelFile("load_model: cannot open " + path.string());
  }
  return load_model(in);
}

GradientCheckResult check_gradients(const ResidualMlp &model,
                                    const Eigen::Ref<const Eigen::MatrixXd> &x,
                                    const Eigen::Ref<const Eigen::MatrixXd> &y,
                                    double step, double floor) {
  Eigen::VectorXd analytic;
  model.loss_and_gradient(x, y, analytic);
  ResidualMlp probe = model;
  GradientCheckResult r;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double saved = probe.parameters()(i);
    probe.parameters()(i) = saved + step;
    const double up = probe.loss(x, y);
    probe.parameters()(i) = saved - step;
    const double down = probe.loss(x, y);
    probe.parameters()(i) = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double scale = std::max({std::abs(analytic(i)), std::abs(numeric), floor});
    const double err = std::abs(analytic(i) - numeric) / scale;
    if (err > r.max_relative_error || r.worst_index < 0) {
      r.max_relative_error = err;
      r.worst_index = i;
      r.worst_analytic = analytic(i);
      r.worst_numeric = numeric;
    }
  }
  return r;
}

} // namespace beamshift
