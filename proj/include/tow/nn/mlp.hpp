#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace tow::nn {

enum class OutputActivation : std::uint32_t { Identity = 0, Softmax = 1 };

// Dense network: rectifier on hidden layers, `output` on the last one.
struct MlpSpec {
  std::vector<int> layer_sizes;  // input, hidden..., output
  OutputActivation output = OutputActivation::Identity;

  void validate() const;  // throws std::invalid_argument
  int inputs() const { return layer_sizes.front(); }
  int outputs() const { return layer_sizes.back(); }

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // outputs x inputs
  Eigen::VectorXd bias;
};

bool operator==(const DenseLayer& a, const DenseLayer& b);

class Mlp {
 public:
  Mlp() = default;
  Mlp(MlpSpec spec, std::vector<DenseLayer> layers);

  // He-uniform weights from `seed`, zero biases.
  static Mlp init(const MlpSpec& spec, std::uint64_t seed);

  const MlpSpec& spec() const { return spec_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  std::size_t parameter_count() const;

  Eigen::VectorXd forward(std::span<const double> input) const;
  // One sample per column. Every column is bit-identical to forward() on
  // that sample alone.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;
  // Same as forward_batch on inputs whose leading rows are `shared` in every
  // column and whose remaining rows are `varying`; the shared part of the
  // first layer is computed once. Results equal forward_batch exactly.
  Eigen::MatrixXd forward_batch_shared(const Eigen::VectorXd& shared, const Eigen::MatrixXd& varying) const;

  bool all_finite() const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  // Finishes a forward pass given the first layer's pre-activations.
  Eigen::MatrixXd forward_from_first(Eigen::MatrixXd z) const;

  MlpSpec spec_;
  std::vector<DenseLayer> layers_;
};

struct Gradients {
  std::vector<DenseLayer> layers;
};

// Mean squared error over every output of every sample (one sample per
// column) and its gradient with respect to all parameters.
double mse_loss(const Mlp& net, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets);
double mse_gradients(const Mlp& net, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets, Gradients& out);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(const Mlp& net, AdamOptions options);

  void apply(Mlp& net, const Gradients& grads);
  const AdamOptions& options() const { return options_; }
  void set_learning_rate(double lr) { options_.learning_rate = lr; }
  long long steps() const { return step_; }

 private:
  AdamOptions options_;
  std::vector<DenseLayer> first_;
  std::vector<DenseLayer> second_;
  long long step_ = 0;
};

// One optimizer step on a batch; returns the pre-update loss. Throws
// std::runtime_error if the loss is not finite (parameters are left untouched).
double train_step(Mlp& net, Adam& optimizer, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets);

}  // namespace tow::nn
