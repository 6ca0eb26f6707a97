// Copyright 2026 The asdkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "asd/core/model.hpp"

#include "support.hpp"

using namespace asd;
using asd::test::error_code_of;

namespace {

// Independent per-layer tally: walk adjacent pairs by hand.
std::uint64_t tally_macs(const std::vector<int>& dims) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    std::uint64_t layer = 0;
    for (int o = 0; o < dims[i + 1]; ++o) layer += static_cast<std::uint64_t>(dims[i]);
    total += layer;
  }
  return total;
}

double loss_of(const AeModelD& m, const Eigen::MatrixXd& batch) {
  return (batch - m.forward(batch)).squaredNorm() / static_cast<double>(batch.size());
}

}  // namespace

TEST_CASE("default architecture") {
  const auto dims = default_layer_dims();
  CHECK(dims == std::vector<int>{640, 128, 128, 128, 128, 8, 128, 128, 128, 128, 640});
  const AeModel m = AeModel::initialized(dims, 1);
  CHECK(m.num_layers() == 10);
  CHECK(count_macs(m) == 264192);
  CHECK(tally_macs(dims) == 264192);
}

TEST_CASE("mac counting") {
  CHECK(count_macs({640, 128, 640}) == 163840);
  CHECK(count_macs({7, 7}) == 49);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> dims{1 + static_cast<int>(rng() % 50)};
    const int layers = 1 + static_cast<int>(rng() % 6);
    for (int l = 0; l < layers - 1; ++l) dims.push_back(1 + static_cast<int>(rng() % 50));
    dims.push_back(dims.front());
    CHECK(count_macs(dims) == tally_macs(dims));
    // Additivity over a split of the layer list.
    const std::size_t cut = 1 + rng() % (dims.size() - 1);
    const std::vector<int> head(dims.begin(), dims.begin() + static_cast<std::ptrdiff_t>(cut) + 1);
    const std::vector<int> tail(dims.begin() + static_cast<std::ptrdiff_t>(cut), dims.end());
    CHECK(count_macs(dims) == tally_macs(head) + tally_macs(tail));
  }
}

TEST_CASE("layer dims validation") {
  CHECK(error_code_of([] { validate_layer_dims({640, 8, 512}); }) == ErrorCode::kConfig);
  CHECK(error_code_of([] { validate_layer_dims({640}); }) == ErrorCode::kConfig);
  CHECK(error_code_of([] { validate_layer_dims({4, 0, 4}); }) == ErrorCode::kConfig);
  CHECK(error_code_of([] { AeModel::initialized({6, 3, 5}, 0); }) == ErrorCode::kConfig);
}

TEST_CASE("initialisation is seeded and fan-in scaled") {
  const std::vector<int> dims{20, 10, 20};
  const AeModel a = AeModel::initialized(dims, 42);
  const AeModel b = AeModel::initialized(dims, 42);
  const AeModel c = AeModel::initialized(dims, 43);
  CHECK(serialize_model(a) == serialize_model(b));
  CHECK(serialize_model(a) != serialize_model(c));
  for (std::size_t l = 0; l < a.num_layers(); ++l) {
    const float bound = 1.0f / std::sqrt(static_cast<float>(dims[l]));
    CHECK(a.layers()[l].weight.cwiseAbs().maxCoeff() <= bound);
    CHECK(a.layers()[l].weight.rows() == dims[l + 1]);
    CHECK(a.layers()[l].weight.cols() == dims[l]);
  }
}

TEST_CASE("forward basics") {
  AeModel zero({6, 4, 6});
  Eigen::MatrixXf x = Eigen::MatrixXf::Random(6, 9);
  const Eigen::MatrixXf y = zero.forward(x);
  CHECK(y.rows() == 6);
  CHECK(y.cols() == 9);
  CHECK(y.isZero(0.0f));

  AeModel identity({4, 4, 4});
  for (auto& l : identity.layers()) l.weight.setIdentity();
  const Eigen::MatrixXf nonneg = Eigen::MatrixXf::Random(4, 5).cwiseAbs();
  CHECK(identity.forward(nonneg) == nonneg);

  CHECK(error_code_of([&] { zero.forward(Eigen::MatrixXf::Zero(5, 2)); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 24; ++trial) {
    const int hidden = 2 + static_cast<int>(rng() % 4);
    const std::vector<int> dims = trial % 2 ? std::vector<int>{6, hidden, 3, hidden, 6}
                                            : std::vector<int>{6, hidden, 6};
    AeModelD m = AeModelD::initialized(dims, rng());
    // Biases away from zero keep the rectifiers off their kinks.
    for (auto& l : m.layers()) l.bias.array() += 0.3;
    const Eigen::MatrixXd batch = asd::test::random_matrix(rng, 6, 1 + static_cast<int>(rng() % 7));
    const auto g = gradient(m, batch);
    CHECK(g.loss == doctest::Approx(loss_of(m, batch)).epsilon(1e-12));

    const double h = 1e-5;
    for (std::size_t l = 0; l < m.num_layers(); ++l) {
      auto check_param = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + h;
        const double up = loss_of(m, batch);
        param = saved - h;
        const double down = loss_of(m, batch);
        param = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double rel = std::abs(numeric - analytic) /
                           std::max({std::abs(numeric), std::abs(analytic), 1e-6});
        worst = std::max(worst, rel);
      };
      auto& layer = m.layers()[l];
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
        check_param(layer.weight.data()[i], g.layers[l].weight.data()[i]);
      }
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
        check_param(layer.bias.data()[i], g.layers[l].bias.data()[i]);
      }
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("gradient vanishes at exact reconstruction") {
  AeModelD m({3, 3, 3});
  for (auto& l : m.layers()) l.weight.setIdentity();
  const Eigen::MatrixXd batch = Eigen::MatrixXd::Random(3, 4).cwiseAbs();
  const auto g = gradient(m, batch);
  CHECK(g.loss == 0.0);
  for (const auto& l : g.layers) {
    CHECK(l.weight.isZero(0.0));
    CHECK(l.bias.isZero(0.0));
  }
}

TEST_CASE("training reproduces a constant dataset") {
  AeModel m = AeModel::initialized({6, 4, 2, 4, 6}, 3);
  Eigen::VectorXf v(6);
  v << 0.5f, -1.0f, 2.0f, 0.0f, 1.5f, -0.25f;
  const Eigen::MatrixXf data = v.replicate(1, 64);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 16;
  cfg.learning_rate = 1e-2;
  const auto result = train(m, data, cfg);
  REQUIRE(result.loss_history.size() == 200);
  CHECK(result.loss_history.back() < 1e-3 * result.loss_history.front());
}

TEST_CASE("training is deterministic per seed and keeps the shape") {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXf data = asd::test::random_matrix(rng, 8, 100).cast<float>();
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 32;
  cfg.seed = 77;
  AeModel a = AeModel::initialized({8, 4, 8}, 1);
  AeModel b = AeModel::initialized({8, 4, 8}, 1);
  const std::size_t params = a.num_parameters();
  const auto ha = train(a, data, cfg).loss_history;
  const auto hb = train(b, data, cfg).loss_history;
  CHECK(ha == hb);
  CHECK(serialize_model(a) == serialize_model(b));
  CHECK(a.num_parameters() == params);
  CHECK(a.dims() == std::vector<int>{8, 4, 8});
  CHECK(ha.back() < ha.front());
}

TEST_CASE("training rejects bad configs and non-finite losses") {
  AeModel m = AeModel::initialized({4, 2, 4}, 0);
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK(error_code_of([&] { train(m, Eigen::MatrixXf::Zero(4, 3), cfg); }) == ErrorCode::kConfig);
  cfg = TrainConfig{};
  CHECK(error_code_of([&] { train(m, Eigen::MatrixXf::Zero(4, 0), cfg); }) ==
        ErrorCode::kInsufficientData);
  Eigen::MatrixXf bad = Eigen::MatrixXf::Zero(4, 3);
  bad(0, 0) = std::numeric_limits<float>::infinity();
  cfg.epochs = 1;
  CHECK(error_code_of([&] { train(m, bad, cfg); }) == ErrorCode::kNumerical);
  // Finite inputs whose squared error overflows.
  const Eigen::MatrixXf huge = Eigen::MatrixXf::Constant(4, 3, 1e30f);
  try {
    train(m, huge, cfg);
    FAIL("expected a numerical error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumerical);
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("model file round trip and corruption") {
  asd::test::TempDir dir;
  const AeModel m = AeModel::initialized({10, 3, 10}, 9);
  save_model(m, dir / "m.bin");
  const AeModel back = load_model(dir / "m.bin");
  const Eigen::MatrixXf x = Eigen::MatrixXf::Random(10, 4);
  CHECK(back.dims() == m.dims());
  CHECK(back.forward(x) == m.forward(x));

  auto bytes = serialize_model(m);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 11);
  CHECK(error_code_of([&] { deserialize_model(truncated, "t"); }) == ErrorCode::kCorruptArtifact);

  auto magic = bytes;
  magic[0] = 'X';
  CHECK(error_code_of([&] { deserialize_model(magic, "m"); }) == ErrorCode::kArtifactFormat);

  auto version = bytes;
  version[8] = 99;
  CHECK(error_code_of([&] { deserialize_model(version, "v"); }) == ErrorCode::kVersionMismatch);

  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  CHECK(error_code_of([&] { deserialize_model(flipped, "f"); }) == ErrorCode::kCorruptArtifact);

  CHECK(error_code_of([&] { load_model(dir / "absent.bin"); }) == ErrorCode::kMissingArtifact);
}
