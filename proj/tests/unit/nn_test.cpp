#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gradient_check.hpp"
#include "tow/nn/checkpoint.hpp"
#include "tow/nn/mlp.hpp"

namespace tow::nn {
namespace {

// Straight-line evaluation with plain loops, independent of the Eigen path.
std::vector<double> reference_forward(const Mlp& net, std::vector<double> x) {
  const auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    std::vector<double> y(l.weight.rows());
    for (int r = 0; r < l.weight.rows(); ++r) {
      double acc = l.bias(r);
      for (int c = 0; c < l.weight.cols(); ++c) acc += l.weight(r, c) * x[c];
      y[r] = (i + 1 < layers.size()) ? std::max(0.0, acc) : acc;
    }
    x = std::move(y);
  }
  if (net.spec().output == OutputActivation::Softmax) {
    double peak = x[0];
    for (double v : x) peak = std::max(peak, v);
    double total = 0;
    for (double& v : x) total += (v = std::exp(v - peak));
    for (double& v : x) v /= total;
  }
  return x;
}

TEST(MlpInit, DeterministicShapesAndZeroBiases) {
  const MlpSpec spec{{4, 8, 6}};
  const Mlp a = Mlp::init(spec, 42);
  const Mlp b = Mlp::init(spec, 42);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, Mlp::init(spec, 43));
  ASSERT_EQ(a.layers().size(), 2u);
  EXPECT_EQ(a.layers()[0].weight.rows(), 8);
  EXPECT_EQ(a.layers()[0].weight.cols(), 4);
  EXPECT_EQ(a.layers()[1].weight.rows(), 6);
  EXPECT_EQ(a.layers()[1].weight.cols(), 8);
  for (const auto& l : a.layers()) EXPECT_TRUE(l.bias.isZero(0.0));
  const double bound = std::sqrt(6.0 / 4.0);
  EXPECT_LE(a.layers()[0].weight.cwiseAbs().maxCoeff(), bound);
}

TEST(MlpInit, RejectsBadSpecs) {
  EXPECT_THROW(Mlp::init(MlpSpec{{4}}, 1), std::invalid_argument);
  EXPECT_THROW(Mlp::init(MlpSpec{{4, 0, 2}}, 1), std::invalid_argument);
}

TEST(Forward, ZeroNetworkGivesZero) {
  Mlp net = Mlp::init(MlpSpec{{3, 5, 2}}, 1);
  for (auto& l : net.layers()) l.weight.setZero();
  const std::vector<double> x{1.0, -2.0, 3.0};
  EXPECT_TRUE(net.forward(x).isZero(0.0));
}

TEST(Forward, IdentityLayer) {
  std::vector<DenseLayer> layers{{Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3)}};
  const Mlp net(MlpSpec{{3, 3}}, layers);
  const std::vector<double> x{0.5, -1.5, 2.0};
  const Eigen::VectorXd y = net.forward(x);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(y(i), x[i]);
}

TEST(Forward, MatchesStraightLineReimplementation) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 40; ++trial) {
    const auto act = trial % 2 ? OutputActivation::Softmax : OutputActivation::Identity;
    Mlp net = Mlp::init(MlpSpec{{5, 7, 6, 3}, act}, trial);
    for (auto& l : net.layers()) l.bias = Eigen::VectorXd::NullaryExpr(l.bias.size(), [&] { return u(gen); });
    std::vector<double> x(5);
    for (double& v : x) v = u(gen);
    const Eigen::VectorXd y = net.forward(x);
    const auto ref = reference_forward(net, x);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(y(i), ref[i], 1e-12);
  }
}

TEST(Forward, ShapeMismatchThrows) {
  const Mlp net = Mlp::init(MlpSpec{{3, 2}}, 1);
  const std::vector<double> x{1.0, 2.0};
  EXPECT_THROW(net.forward(x), std::invalid_argument);
}

TEST(Gradients, MatchCentralFiniteDifferences) {
  for (int trial = 0; trial < 20; ++trial) {
    const auto act = trial % 4 == 3 ? OutputActivation::Softmax : OutputActivation::Identity;
    const double err = testing_support::max_gradient_relative_error(trial, act);
    EXPECT_LT(err, 1e-4) << "trial " << trial;
  }
}

TEST(TrainStep, ToyRegressionImproves) {
  Mlp net = Mlp::init(MlpSpec{{2, 16, 16, 1}}, 3);
  Eigen::MatrixXd x(2, 4), y(1, 4);
  x << 0, 0, 1, 1, 0, 1, 0, 1;
  y << 0.1, 0.9, 0.9, 0.1;
  Adam opt(net, AdamOptions{1e-2});
  const double initial = mse_loss(net, x, y);
  for (int i = 0; i < 200; ++i) train_step(net, opt, x, y);
  EXPECT_LT(mse_loss(net, x, y), initial);
  EXPECT_LT(mse_loss(net, x, y), 0.01);
}

TEST(TrainStep, ZeroLearningRateLeavesParameters) {
  Mlp net = Mlp::init(MlpSpec{{3, 4, 2}}, 9);
  const Mlp before = net;
  Adam opt(net, AdamOptions{0.0});
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 5);
  Eigen::MatrixXd y = Eigen::MatrixXd::Random(2, 5);
  for (int i = 0; i < 5; ++i) train_step(net, opt, x, y);
  EXPECT_EQ(net, before);
}

TEST(TrainStep, NonFiniteLossAborts) {
  Mlp net = Mlp::init(MlpSpec{{2, 3, 1}}, 1);
  const Mlp before = net;
  Adam opt(net, AdamOptions{});
  Eigen::MatrixXd x(2, 1), y(1, 1);
  x << 1, 2;
  y << std::numeric_limits<double>::infinity();
  EXPECT_THROW(train_step(net, opt, x, y), std::runtime_error);
  EXPECT_EQ(net, before);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const Mlp net = Mlp::init(MlpSpec{{6, 5, 4, 3}, OutputActivation::Softmax}, 5);
  const std::string bytes = save_params_to_string(net);
  const Mlp back = load_params_from_string(bytes);
  EXPECT_EQ(back, net);
  EXPECT_EQ(save_params_to_string(back), bytes);
  EXPECT_EQ(bytes.substr(0, 6), "TOWMLP");
}

TEST(Checkpoint, RejectsCorruption) {
  const std::string bytes = save_params_to_string(Mlp::init(MlpSpec{{3, 4, 2}}, 5));
  EXPECT_THROW(load_params_from_string(bytes.substr(0, bytes.size() - 1)), std::runtime_error);
  EXPECT_THROW(load_params_from_string(bytes.substr(0, 20)), std::runtime_error);
  EXPECT_THROW(load_params_from_string(""), std::runtime_error);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(load_params_from_string(bad_magic), std::runtime_error);
  std::string bad_version = bytes;
  bad_version[8] = 9;
  EXPECT_THROW(load_params_from_string(bad_version), std::runtime_error);
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  EXPECT_THROW(load_params_from_string(flipped), std::runtime_error);
}

TEST(Checkpoint, FileRoundTrip) {
  const Mlp net = Mlp::init(MlpSpec{{4, 3, 2}}, 11);
  const auto path = std::filesystem::temp_directory_path() / "tow_nn_test_checkpoint.bin";
  save_params_file(net, path);
  EXPECT_EQ(load_params_file(path), net);
  std::filesystem::remove(path);
}

TEST(Forward, SharedPrefixAndSingleSampleMatchBatchExactly) {
  const Mlp net = Mlp::init(MlpSpec{{7, 9, 4}}, 21);
  const Eigen::VectorXd shared = Eigen::VectorXd::Random(5);
  const Eigen::MatrixXd varying = Eigen::MatrixXd::Random(2, 6);
  Eigen::MatrixXd full(7, 6);
  full.topRows(5) = shared.replicate(1, 6);
  full.bottomRows(2) = varying;
  EXPECT_EQ(net.forward_batch_shared(shared, varying), net.forward_batch(full));
  for (int j = 0; j < 6; ++j) {
    const Eigen::VectorXd col = full.col(j);
    EXPECT_EQ(net.forward(std::span<const double>(col.data(), 7)), net.forward_batch(full).col(j));
  }
}

}  // namespace
}  // namespace tow::nn
