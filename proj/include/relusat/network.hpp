#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace relusat {

/// Raised when a network or an input vector has inconsistent dimensions.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class Activation { relu, identity };

struct Layer {
  Eigen::MatrixXd weights; // rows = out-neurons, cols = in-neurons
  Eigen::VectorXd bias;
  Activation activation = Activation::relu;
};

/// A ReLU neuron: 1-based layer index, 0-based position within the layer.
struct NeuronId {
  int layer = 0;
  int index = 0;

  friend auto operator<=>(const NeuronId&, const NeuronId&) = default;
};

std::string to_string(const NeuronId& id);

/// Axis-aligned input region.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  [[nodiscard]] std::size_t dim() const { return lower.size(); }
  [[nodiscard]] bool contains(std::span<const double> x, double tol = 0.0) const;
  [[nodiscard]] bool is_valid() const;

  friend bool operator==(const Box&, const Box&) = default;
};

/// Layered affine + ReLU network. Immutable after construction.
class Network {
public:
  struct Evaluation {
    Eigen::VectorXd outputs;
    /// Pre-activation values, one vector per layer (the last entry is the
    /// output layer's affine value).
    std::vector<Eigen::VectorXd> pre_activations;

    [[nodiscard]] double pre_activation(const NeuronId& id) const {
      return pre_activations[static_cast<std::size_t>(id.layer - 1)](id.index);
    }
  };

  /// Throws InputError when the layer dimensions do not chain, a bias has
  /// the wrong length, or a non-final layer is not ReLU.
  Network(std::size_t input_dim, std::vector<Layer> layers);

  [[nodiscard]] std::size_t input_dim() const { return input_dim_; }
  [[nodiscard]] std::size_t output_dim() const;
  [[nodiscard]] const std::vector<Layer>& layers() const { return layers_; }
  [[nodiscard]] std::size_t num_layers() const { return layers_.size(); }

  /// All neurons of ReLU layers ordered by (layer, index). The position of a
  /// neuron in this list is its flat index.
  [[nodiscard]] const std::vector<NeuronId>& relu_neurons() const { return relu_neurons_; }
  [[nodiscard]] std::size_t relu_count() const { return relu_neurons_.size(); }
  [[nodiscard]] std::size_t flat_index(const NeuronId& id) const;
  /// Flat index of the first neuron of `layer` (1-based); only meaningful for
  /// ReLU layers.
  [[nodiscard]] std::size_t layer_offset(int layer) const {
    return layer_offsets_[static_cast<std::size_t>(layer - 1)];
  }

  [[nodiscard]] Evaluation forward(std::span<const double> x) const;
  [[nodiscard]] Evaluation forward(const Eigen::VectorXd& x) const;

  /// Gradient of loss . net(x) with respect to x, where `loss` is a linear
  /// functional over the outputs. ReLU kinks take the zero subgradient.
  [[nodiscard]] Eigen::VectorXd gradient(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& loss) const;

private:
  std::size_t input_dim_;
  std::vector<Layer> layers_;
  std::vector<NeuronId> relu_neurons_;
  std::vector<std::size_t> layer_offsets_;
};

inline double relu(double v) { return v > 0.0 ? v : 0.0; }

} // namespace relusat
