#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace surco {

/// Row-major batch of feature vectors, one row per decision variable.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

/// Dense network with tanh hidden layers and a linear scalar output, applied
/// row-wise with shared weights. Parameters live in one flat vector: for each
/// layer the weight matrix (out x in, row-major) followed by its bias.
class Mlp {
 public:
  Mlp() = default;
  /// Glorot-uniform weights and zero biases drawn from `seed`.
  Mlp(std::vector<int> layer_sizes, std::uint64_t seed);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::size_t input_dim() const { return static_cast<std::size_t>(sizes_.front()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(sizes_.back()); }
  std::size_t num_parameters() const { return params_.size(); }

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  /// Replaces all parameters; the size must match.
  void set_parameters(std::vector<double> params);

  /// Activations of every layer, kept for the backward pass.
  struct Trace {
    std::vector<std::vector<double>> activations;
  };

  /// Outputs are rows x output_dim, row-major.
  std::vector<double> forward(const FeatureMatrix& features, Trace* trace = nullptr) const;

  /// Gradient of sum(grad_out * outputs) with respect to the parameters.
  std::vector<double> backward(const Trace& trace, std::span<const double> grad_out) const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + static_cast<std::size_t>(sizes_[layer + 1] * sizes_[layer]);
  }

  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

/// Adam with bias correction.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::span<double> params, std::span<const double> grad);

  double learning_rate() const { return lr_; }
  long steps() const { return t_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  long t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace surco
