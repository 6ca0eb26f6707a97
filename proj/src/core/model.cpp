// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "asd/core/binary_io.hpp"
#include "asd/core/error.hpp"

namespace asd {

std::vector<int> default_layer_dims(int input_dim) {
  return {input_dim, 128, 128, 128, 128, 8, 128, 128, 128, 128, input_dim};
}

void validate_layer_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) fail(ErrorCode::kConfig, "an autoencoder needs at least two layer dims");
  for (int d : dims) {
    if (d < 1) fail(ErrorCode::kConfig, "layer dims must be positive");
  }
  if (dims.front() != dims.back()) {
    fail(ErrorCode::kConfig, "first and last layer dims differ (" +
                                 std::to_string(dims.front()) + " vs " +
                                 std::to_string(dims.back()) + ")");
  }
}

template <typename T>
BasicAutoencoder<T>::BasicAutoencoder(std::vector<int> dims) : dims_(std::move(dims)) {
  validate_layer_dims(dims_);
  layers_.resize(dims_.size() - 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].weight = Matrix::Zero(dims_[l + 1], dims_[l]);
    layers_[l].bias = Vector::Zero(dims_[l + 1]);
  }
}

template <typename T>
BasicAutoencoder<T> BasicAutoencoder<T>::initialized(std::vector<int> dims, std::uint64_t seed) {
  BasicAutoencoder model(std::move(dims));
  std::mt19937_64 rng(seed);
  for (auto& layer : model.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = static_cast<T>(dist(rng));
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = static_cast<T>(dist(rng));
  }
  return model;
}

template <typename T>
std::size_t BasicAutoencoder<T>::num_parameters() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) {
    n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  }
  return n;
}

template <typename T>
typename BasicAutoencoder<T>::Matrix BasicAutoencoder<T>::forward(
    const Eigen::Ref<const Matrix>& batch) const {
  if (batch.rows() != input_dim()) {
    fail(ErrorCode::kDimensionMismatch, "input dim " + std::to_string(batch.rows()) +
                                            " does not match model dim " +
                                            std::to_string(input_dim()));
  }
  Matrix a = batch;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = layers_[l].weight * a;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.cwiseMax(T(0));
    a = std::move(z);
  }
  return a;
}

template <typename T>
template <typename U>
BasicAutoencoder<U> BasicAutoencoder<T>::cast() const {
  BasicAutoencoder<U> out(dims_);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    out.layers()[l].weight = layers_[l].weight.template cast<U>();
    out.layers()[l].bias = layers_[l].bias.template cast<U>();
  }
  return out;
}

template <typename T>
Gradients<T> gradient(const BasicAutoencoder<T>& model,
                      const Eigen::Ref<const typename BasicAutoencoder<T>::Matrix>& batch) {
  using Matrix = typename BasicAutoencoder<T>::Matrix;
  if (batch.rows() != model.input_dim()) {
    fail(ErrorCode::kDimensionMismatch, "batch dim does not match model input dim");
  }
  if (batch.cols() == 0) fail(ErrorCode::kInsufficientData, "empty batch");

  const auto& layers = model.layers();
  const std::size_t n = layers.size();

  // activations[0] is the input; activations[l+1] the output of layer l.
  std::vector<Matrix> activations(n + 1);
  activations[0] = batch;
  for (std::size_t l = 0; l < n; ++l) {
    Matrix z = layers[l].weight * activations[l];
    z.colwise() += layers[l].bias;
    if (l + 1 < n) z = z.cwiseMax(T(0));
    activations[l + 1] = std::move(z);
  }

  const T scale = T(1) / static_cast<T>(batch.rows() * batch.cols());
  Matrix delta = activations[n] - batch;

  Gradients<T> grads;
  grads.loss = delta.squaredNorm() * scale;
  grads.layers.resize(n);
  delta *= T(2) * scale;
  for (std::size_t l = n; l-- > 0;) {
    grads.layers[l].weight = delta * activations[l].transpose();
    grads.layers[l].bias = delta.rowwise().sum();
    if (l == 0) break;
    Matrix back = layers[l].weight.transpose() * delta;
    // Rectifier derivative: activations of hidden layers are max(z, 0).
    delta = back.cwiseProduct(
        activations[l].unaryExpr([](T a) { return a > T(0) ? T(1) : T(0); }));
  }
  return grads;
}

template <typename T>
T reconstruction_mse(const BasicAutoencoder<T>& model,
                     const Eigen::Ref<const typename BasicAutoencoder<T>::Matrix>& batch) {
  if (batch.cols() == 0) fail(ErrorCode::kInsufficientData, "empty batch");
  return (model.forward(batch) - batch).squaredNorm() / static_cast<T>(batch.size());
}

void TrainConfig::validate() const {
  if (epochs < 1) fail(ErrorCode::kConfig, "epochs must be >= 1");
  if (batch_size < 1) fail(ErrorCode::kConfig, "batch_size must be >= 1");
  if (!(learning_rate > 0.0)) fail(ErrorCode::kConfig, "learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    fail(ErrorCode::kConfig, "Adam betas must be in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) fail(ErrorCode::kConfig, "adam_epsilon must be > 0");
}

namespace {

double parameter_norm(const AeModel& model) {
  double sq = 0.0;
  for (const auto& layer : model.layers()) {
    sq += layer.weight.cast<double>().squaredNorm() + layer.bias.cast<double>().squaredNorm();
  }
  return std::sqrt(sq);
}

struct AdamState {
  std::vector<LayerParams<float>> m;
  std::vector<LayerParams<float>> v;
  long step = 0;
};

template <typename Param>
void adam_update(Param& param, Param& m, Param& v, const Param& g, float lr_t, float b1,
                 float b2, float eps, float bias2) {
  m = b1 * m + (1.0f - b1) * g;
  v = b2 * v + (1.0f - b2) * g.cwiseProduct(g);
  param.array() -= lr_t * m.array() / ((v.array() / bias2).sqrt() + eps);
}

}  // namespace

TrainResult train(AeModel& model, const Eigen::Ref<const Eigen::MatrixXf>& features,
                  const TrainConfig& config) {
  config.validate();
  if (features.cols() < 1) fail(ErrorCode::kInsufficientData, "no training vectors");
  if (features.rows() != model.input_dim()) {
    fail(ErrorCode::kDimensionMismatch, "feature dim " + std::to_string(features.rows()) +
                                            " does not match model dim " +
                                            std::to_string(model.input_dim()));
  }
  if (!features.allFinite()) fail(ErrorCode::kNumerical, "training features contain NaN/Inf");

  AdamState state;
  for (const auto& layer : model.layers()) {
    state.m.push_back({LayerParams<float>::Matrix::Zero(layer.weight.rows(), layer.weight.cols()),
                       LayerParams<float>::Vector::Zero(layer.bias.size())});
  }
  state.v = state.m;

  const auto count = static_cast<std::size_t>(features.cols());
  std::vector<Eigen::Index> order(count);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(config.seed);

  const auto b1 = static_cast<float>(config.beta1);
  const auto b2 = static_cast<float>(config.beta2);
  const auto eps = static_cast<float>(config.adam_epsilon);

  TrainResult result;
  Eigen::MatrixXf batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_sum = 0.0;
    int batch_index = 0;
    for (std::size_t start = 0; start < count; start += config.batch_size, ++batch_index) {
      const std::size_t len = std::min<std::size_t>(config.batch_size, count - start);
      batch.resize(features.rows(), static_cast<Eigen::Index>(len));
      for (std::size_t i = 0; i < len; ++i) {
        batch.col(static_cast<Eigen::Index>(i)) = features.col(order[start + i]);
      }
      const Gradients<float> grads = gradient(model, batch);
      if (!std::isfinite(grads.loss)) {
        std::ostringstream msg;
        msg << "non-finite training loss at epoch " << epoch << ", batch " << batch_index
            << " (parameter norm " << parameter_norm(model) << ")";
        fail(ErrorCode::kNumerical, msg.str());
      }
      epoch_sum += static_cast<double>(grads.loss) * static_cast<double>(len);

      ++state.step;
      const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
      const auto bias2 =
          static_cast<float>(1.0 - std::pow(config.beta2, static_cast<double>(state.step)));
      const auto lr_t = static_cast<float>(config.learning_rate / bias1);
      for (std::size_t l = 0; l < model.num_layers(); ++l) {
        auto& layer = model.layers()[l];
        adam_update(layer.weight, state.m[l].weight, state.v[l].weight, grads.layers[l].weight,
                    lr_t, b1, b2, eps, bias2);
        adam_update(layer.bias, state.m[l].bias, state.v[l].bias, grads.layers[l].bias, lr_t,
                    b1, b2, eps, bias2);
      }
    }
    result.loss_history.push_back(epoch_sum / static_cast<double>(count));
  }
  return result;
}

std::uint64_t count_macs(const std::vector<int>& dims) {
  std::uint64_t macs = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    macs += static_cast<std::uint64_t>(dims[l]) * static_cast<std::uint64_t>(dims[l + 1]);
  }
  return macs;
}

namespace {
constexpr std::string_view kModelMagic{"ASDAE\0\0\1", 8};
}

std::vector<std::uint8_t> serialize_model(const AeModel& model) {
  BinaryWriter w;
  w.bytes(kModelMagic.data(), kModelMagic.size());
  w.put<std::uint32_t>(kModelFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.dims().size()));
  for (int d : model.dims()) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
  for (const auto& layer : model.layers()) {
    // Row-major weight order: out index outer, in index inner.
    const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = layer.weight;
    w.bytes(rm.data(), sizeof(float) * static_cast<std::size_t>(rm.size()));
    w.bytes(layer.bias.data(), sizeof(float) * static_cast<std::size_t>(layer.bias.size()));
  }
  w.append_checksum();
  return w.buffer();
}

AeModel deserialize_model(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  BinaryReader r(bytes, origin);
  r.expect_magic(kModelMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != kModelFormatVersion) {
    fail(ErrorCode::kVersionMismatch, origin + ": model format version " +
                                          std::to_string(version) + ", expected " +
                                          std::to_string(kModelFormatVersion));
  }
  const auto n = r.get<std::uint32_t>();
  if (n < 2 || n > 4096) fail(ErrorCode::kCorruptArtifact, origin + ": implausible layer count");
  std::vector<int> dims(n);
  for (auto& d : dims) {
    const auto v = r.get<std::uint32_t>();
    if (v == 0 || v > (1u << 24)) fail(ErrorCode::kCorruptArtifact, origin + ": bad layer dim");
    d = static_cast<int>(v);
  }
  if (dims.front() != dims.back()) {
    fail(ErrorCode::kCorruptArtifact, origin + ": first and last dims differ");
  }
  AeModel model(dims);
  for (auto& layer : model.layers()) {
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(layer.weight.rows(),
                                                                            layer.weight.cols());
    r.bytes(rm.data(), sizeof(float) * static_cast<std::size_t>(rm.size()));
    layer.weight = rm;
    r.bytes(layer.bias.data(), sizeof(float) * static_cast<std::size_t>(layer.bias.size()));
  }
  r.verify_checksum();
  return model;
}

void save_model(const AeModel& model, const std::filesystem::path& path) {
  write_binary_file_atomic(path, serialize_model(model));
}

AeModel load_model(const std::filesystem::path& path) {
  return deserialize_model(read_binary_file(path), path.string());
}

template class BasicAutoencoder<float>;
template class BasicAutoencoder<double>;
template BasicAutoencoder<double> BasicAutoencoder<float>::cast<double>() const;
template BasicAutoencoder<float> BasicAutoencoder<double>::cast<float>() const;
template BasicAutoencoder<float> BasicAutoencoder<float>::cast<float>() const;
template BasicAutoencoder<double> BasicAutoencoder<double>::cast<double>() const;
template Gradients<float> gradient(const AeModel&, const Eigen::Ref<const AeModel::Matrix>&);
template Gradients<double> gradient(const AeModelD&, const Eigen::Ref<const AeModelD::Matrix>&);
template float reconstruction_mse(const AeModel&, const Eigen::Ref<const AeModel::Matrix>&);
template double reconstruction_mse(const AeModelD&, const Eigen::Ref<const AeModelD::Matrix>&);

}  // namespace asd
