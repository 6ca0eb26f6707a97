// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Dense autoencoder r(x): rectifier hidden layers, identity output layer,
// trained with Adam on the batch-mean squared reconstruction error.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace asd {

/// 640 -> 128 x4 -> 8 -> 128 x4 -> 640.
std::vector<int> default_layer_dims(int input_dim = 640);

/// Throws kConfig unless there are >= 2 positive dims with first == last.
void validate_layer_dims(const std::vector<int>& dims);

template <typename T>
struct LayerParams {
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  Matrix weight;  // out x in
  Vector bias;    // out
};

template <typename T>
class BasicAutoencoder {
 public:
  using Scalar = T;
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  BasicAutoencoder() = default;
  /// Zero-initialised parameters.
  explicit BasicAutoencoder(std::vector<int> dims);

  /// Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) from mt19937_64(seed).
  static BasicAutoencoder initialized(std::vector<int> dims, std::uint64_t seed);

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t num_parameters() const;

  std::vector<LayerParams<T>>& layers() { return layers_; }
  const std::vector<LayerParams<T>>& layers() const { return layers_; }

  /// Column-per-sample batch in, same shape out.
  Matrix forward(const Eigen::Ref<const Matrix>& batch) const;

  template <typename U>
  BasicAutoencoder<U> cast() const;

 private:
  std::vector<int> dims_;
  std::vector<LayerParams<T>> layers_;
};

using AeModel = BasicAutoencoder<float>;
using AeModelD = BasicAutoencoder<double>;

template <typename T>
struct Gradients {
  std::vector<LayerParams<T>> layers;
  T loss = 0;  // batch-mean MSE, 1/(B*D) sum of squared residuals
};

/// Analytic gradient of the batch-mean MSE by backpropagation.
template <typename T>
Gradients<T> gradient(const BasicAutoencoder<T>& model,
                      const Eigen::Ref<const typename BasicAutoencoder<T>::Matrix>& batch);

template <typename T>
T reconstruction_mse(const BasicAutoencoder<T>& model,
                     const Eigen::Ref<const typename BasicAutoencoder<T>::Matrix>& batch);

struct TrainConfig {
  int epochs = 100;
  int batch_size = 256;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  std::vector<double> loss_history;  // mean training MSE per epoch
};

/// In-place Adam training over the columns of `features`. Shuffling uses
/// mt19937_64(config.seed). Throws kNumerical with epoch, batch and parameter
/// norm if a non-finite loss appears.
TrainResult train(AeModel& model, const Eigen::Ref<const Eigen::MatrixXf>& features,
                  const TrainConfig& config);

/// Multiply-accumulates for one forward pass of a single input vector:
/// sum of in*out over layers. Bias additions and activations excluded.
std::uint64_t count_macs(const std::vector<int>& dims);
template <typename T>
std::uint64_t count_macs(const BasicAutoencoder<T>& model) {
  return count_macs(model.dims());
}

// Model file, little-endian:
//   char[8]  magic "ASDAE\0\0\1"
//   u32      format version (1)
//   u32      number of dims n
//   u32[n]   layer dims
//   per layer l: f32[out*in] weight (row-major), f32[out] bias
//   u64      FNV-1a hash of every preceding byte
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> serialize_model(const AeModel& model);
AeModel deserialize_model(const std::vector<std::uint8_t>& bytes, const std::string& origin);
void save_model(const AeModel& model, const std::filesystem::path& path);
AeModel load_model(const std::filesystem::path& path);

}  // namespace asd
