#include "relusat/network.hpp"

#include <cmath>

namespace relusat {

std::string to_string(const NeuronId& id) {
  return "n" + std::to_string(id.layer) + "_" + std::to_string(id.index);
}

bool Box::contains(std::span<const double> x, double tol) const {
  if (x.size() != dim()) {
    return false;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] - tol && x[i] <= upper[i] + tol)) {
      return false;
    }
  }
  return true;
}

bool Box::is_valid() const {
  if (lower.size() != upper.size()) {
    return false;
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i]) {
      return false;
    }
  }
  return true;
}

Network::Network(std::size_t input_dim, std::vector<Layer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
  if (input_dim_ == 0) {
    throw InputError("network must have at least one input");
  }
  if (layers_.empty()) {
    throw InputError("network must have at least one layer");
  }
  auto prev = static_cast<Eigen::Index>(input_dim_);
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const Layer& layer = layers_[k];
    const std::string where = "layer " + std::to_string(k + 1);
    if (layer.weights.rows() == 0) {
      throw InputError(where + " has no neurons");
    }
    if (layer.weights.cols() != prev) {
      throw InputError(where + " expects " + std::to_string(layer.weights.cols()) +
                       " inputs but the previous layer has " + std::to_string(prev));
    }
    if (layer.bias.size() != layer.weights.rows()) {
      throw InputError(where + " bias length " + std::to_string(layer.bias.size()) +
                       " does not match row count " + std::to_string(layer.weights.rows()));
    }
    if (layer.activation == Activation::identity && k + 1 != layers_.size()) {
      throw InputError(where + " is Identity but only the final layer may be");
    }
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
      throw InputError(where + " contains non-finite parameters");
    }
    prev = layer.weights.rows();
  }

  for (std::size_t k = 0; k < layers_.size(); ++k) {
    layer_offsets_.push_back(relu_neurons_.size());
    if (layers_[k].activation != Activation::relu) {
      continue;
    }
    for (Eigen::Index i = 0; i < layers_[k].weights.rows(); ++i) {
      relu_neurons_.push_back({static_cast<int>(k + 1), static_cast<int>(i)});
    }
  }
}

std::size_t Network::output_dim() const {
  return static_cast<std::size_t>(layers_.back().weights.rows());
}

std::size_t Network::flat_index(const NeuronId& id) const {
  if (id.layer < 1 || static_cast<std::size_t>(id.layer) > layers_.size()) {
    throw InputError("no layer " + std::to_string(id.layer));
  }
  const Layer& layer = layers_[static_cast<std::size_t>(id.layer - 1)];
  if (layer.activation != Activation::relu || id.index < 0 || id.index >= layer.weights.rows()) {
    throw InputError(to_string(id) + " is not a ReLU neuron");
  }
  return layer_offsets_[static_cast<std::size_t>(id.layer - 1)] + static_cast<std::size_t>(id.index);
}

Network::Evaluation Network::forward(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw InputError("input has " + std::to_string(x.size()) + " entries, network expects " +
                     std::to_string(input_dim_));
  }
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  return forward(v);
}

Network::Evaluation Network::forward(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim_) {
    throw InputError("input has " + std::to_string(x.size()) + " entries, network expects " +
                     std::to_string(input_dim_));
  }
  Evaluation eval;
  eval.pre_activations.reserve(layers_.size());
  Eigen::VectorXd value = x;
  for (const Layer& layer : layers_) {
    Eigen::VectorXd z = layer.weights * value + layer.bias;
    eval.pre_activations.push_back(z);
    value = layer.activation == Activation::relu ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  eval.outputs = std::move(value);
  return eval;
}

Eigen::VectorXd Network::gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& loss) const {
  if (static_cast<std::size_t>(loss.size()) != output_dim()) {
    throw InputError("loss has " + std::to_string(loss.size()) + " coefficients, network has " +
                     std::to_string(output_dim()) + " outputs");
  }
  const Evaluation eval = forward(x);
  // Backward pass: `adjoint` is d(loss)/d(post-activation of layer k).
  Eigen::VectorXd adjoint = loss;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const Layer& layer = layers_[k];
    if (layer.activation == Activation::relu) {
      const Eigen::VectorXd& z = eval.pre_activations[k];
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (!(z(i) > 0.0)) {
          adjoint(i) = 0.0;
        }
      }
    }
    adjoint = layer.weights.transpose() * adjoint;
  }
  return adjoint;
}

} // namespace relusat
