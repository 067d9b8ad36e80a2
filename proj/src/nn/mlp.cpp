#include "tow/nn/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace tow::nn {

namespace {

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd out(z.rows(), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const double peak = z.col(c).maxCoeff();
    Eigen::VectorXd e = (z.col(c).array() - peak).exp();
    out.col(c) = e / e.sum();
  }
  return out;
}

// Z = start + W[:, offset..] * X, accumulated one input at a time in fixed
// order. Each column's result is independent of the batch it sits in, so
// single and batched evaluation agree bit for bit.
Eigen::MatrixXd accumulate(const Eigen::MatrixXd& w, Eigen::Index offset, const Eigen::MatrixXd& x,
                           const Eigen::VectorXd& start) {
  Eigen::MatrixXd z(w.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::VectorXd acc = start;
    for (Eigen::Index k = 0; k < x.rows(); ++k) {
      const double v = x(k, j);
      if (v != 0.0) acc.noalias() += w.col(offset + k) * v;
    }
    z.col(j) = acc;
  }
  return z;
}

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

void check_batch(const Mlp& net, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) {
  if (inputs.rows() != net.spec().inputs() || targets.rows() != net.spec().outputs() ||
      inputs.cols() != targets.cols() || inputs.cols() == 0) {
    throw std::invalid_argument("batch shape does not match network");
  }
}

}  // namespace

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) throw std::invalid_argument("MlpSpec: need at least input and output layers");
  for (int n : layer_sizes) {
    if (n <= 0) throw std::invalid_argument("MlpSpec: layer sizes must be positive");
  }
}

bool operator==(const DenseLayer& a, const DenseLayer& b) {
  return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() && a.bias.size() == b.bias.size() &&
         a.weight == b.weight && a.bias == b.bias;
}

Mlp::Mlp(MlpSpec spec, std::vector<DenseLayer> layers) : spec_(std::move(spec)), layers_(std::move(layers)) {
  spec_.validate();
  if (layers_.size() != spec_.layer_sizes.size() - 1) throw std::invalid_argument("Mlp: layer count mismatch");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.weight.rows() != spec_.layer_sizes[i + 1] || l.weight.cols() != spec_.layer_sizes[i] ||
        l.bias.size() != spec_.layer_sizes[i + 1]) {
      throw std::invalid_argument("Mlp: layer " + std::to_string(i) + " has the wrong shape");
    }
  }
}

Mlp Mlp::init(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 gen(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < spec.layer_sizes.size(); ++i) {
    const int fan_in = spec.layer_sizes[i];
    const int fan_out = spec.layer_sizes[i + 1];
    const double bound = std::sqrt(6.0 / fan_in);
    DenseLayer l{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) l.weight(r, c) = (2.0 * uniform01(gen) - 1.0) * bound;
    }
    layers.push_back(std::move(l));
  }
  return Mlp(spec, std::move(layers));
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

Eigen::VectorXd Mlp::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != spec_.inputs()) throw std::invalid_argument("Mlp::forward: input size mismatch");
  Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
  return forward_batch(x).col(0);
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != spec_.inputs()) throw std::invalid_argument("Mlp::forward_batch: input size mismatch");
  return forward_from_first(accumulate(layers_[0].weight, 0, inputs, layers_[0].bias));
}

Eigen::MatrixXd Mlp::forward_batch_shared(const Eigen::VectorXd& shared, const Eigen::MatrixXd& varying) const {
  if (shared.size() + varying.rows() != spec_.inputs()) {
    throw std::invalid_argument("Mlp::forward_batch_shared: input size mismatch");
  }
  const auto& w = layers_[0].weight;
  const Eigen::VectorXd fixed = accumulate(w, 0, shared, layers_[0].bias);
  return forward_from_first(accumulate(w, shared.size(), varying, fixed));
}

Eigen::MatrixXd Mlp::forward_from_first(Eigen::MatrixXd z) const {
  for (std::size_t i = 0;; ++i) {
    if (i + 1 == layers_.size()) {
      return spec_.output == OutputActivation::Softmax ? softmax_columns(z) : z;
    }
    z = accumulate(layers_[i + 1].weight, 0, relu(z), layers_[i + 1].bias);
  }
}

bool Mlp::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

double mse_loss(const Mlp& net, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) {
  check_batch(net, inputs, targets);
  const Eigen::MatrixXd diff = net.forward_batch(inputs) - targets;
  return diff.squaredNorm() / static_cast<double>(diff.size());
}

double mse_gradients(const Mlp& net, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets, Gradients& out) {
  check_batch(net, inputs, targets);
  const auto& layers = net.layers();
  const std::size_t depth = layers.size();

  // activations[0] = inputs, activations[i+1] = output of layer i
  std::vector<Eigen::MatrixXd> activations;
  activations.reserve(depth + 1);
  activations.push_back(inputs);
  for (std::size_t i = 0; i < depth; ++i) {
    Eigen::MatrixXd z = layers[i].weight * activations.back();
    z.colwise() += layers[i].bias;
    if (i + 1 < depth) {
      activations.push_back(relu(z));
    } else {
      activations.push_back(net.spec().output == OutputActivation::Softmax ? softmax_columns(z) : z);
    }
  }

  const Eigen::MatrixXd diff = activations.back() - targets;
  const double scale = 1.0 / static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() * scale;

  Eigen::MatrixXd delta = 2.0 * scale * diff;  // dL/d(output)
  if (net.spec().output == OutputActivation::Softmax) {
    const Eigen::MatrixXd& y = activations.back();
    for (Eigen::Index c = 0; c < delta.cols(); ++c) {
      const double dot = delta.col(c).dot(y.col(c));
      delta.col(c) = y.col(c).cwiseProduct((delta.col(c).array() - dot).matrix());
    }
  }

  out.layers.resize(depth);
  for (std::size_t k = depth; k-- > 0;) {
    out.layers[k].weight = delta * activations[k].transpose();
    out.layers[k].bias = delta.rowwise().sum();
    if (k > 0) {
      Eigen::MatrixXd back = layers[k].weight.transpose() * delta;
      delta = back.cwiseProduct((activations[k].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

Adam::Adam(const Mlp& net, AdamOptions options) : options_(options) {
  for (const auto& l : net.layers()) {
    first_.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
  }
  second_ = first_;
}

void Adam::apply(Mlp& net, const Gradients& grads) {
  auto& layers = net.layers();
  if (grads.layers.size() != layers.size() || first_.size() != layers.size()) {
    throw std::invalid_argument("Adam::apply: gradient shape mismatch");
  }
  ++step_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double lr = options_.learning_rate;
  const double eps = options_.epsilon;
  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update(layers[i].weight, grads.layers[i].weight, first_[i].weight, second_[i].weight);
    update(layers[i].bias, grads.layers[i].bias, first_[i].bias, second_[i].bias);
  }
}

double train_step(Mlp& net, Adam& optimizer, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) {
  Gradients grads;
  const double loss = mse_gradients(net, inputs, targets, grads);
  if (!std::isfinite(loss)) throw std::runtime_error("train_step: loss is not finite");
  optimizer.apply(net, grads);
  return loss;
}

}  // namespace tow::nn
