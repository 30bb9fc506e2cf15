#include "surco/mlp.hpp"

#include <cmath>
#include <string>

#include "surco/errors.hpp"
#include "surco/random.hpp"

namespace surco {

Mlp::Mlp(std::vector<int> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw ParameterError("mlp needs at least an input and an output layer");
  for (int s : sizes_) {
    if (s < 1) throw ParameterError("mlp layer sizes must be positive");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l + 1]) * static_cast<std::size_t>(sizes_[l] + 1);
  }
  params_.assign(total, 0.0);

  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double limit = std::sqrt(6.0 / (sizes_[l] + sizes_[l + 1]));
    const std::size_t count = static_cast<std::size_t>(sizes_[l + 1] * sizes_[l]);
    for (std::size_t k = 0; k < count; ++k) {
      params_[weight_offset(l) + k] = rng.uniform(-limit, limit);
    }
  }
}

void Mlp::set_parameters(std::vector<double> params) {
  if (params.size() != params_.size()) {
    throw ParameterError("mlp expects " + std::to_string(params_.size()) + " parameters, got " +
                         std::to_string(params.size()));
  }
  params_ = std::move(params);
}

std::vector<double> Mlp::forward(const FeatureMatrix& features, Trace* trace) const {
  if (sizes_.empty()) throw ParameterError("mlp is not initialized");
  if (features.cols != input_dim()) {
    throw ParameterError("feature dimension " + std::to_string(features.cols) +
                         " does not match mlp input " + std::to_string(input_dim()));
  }
  const std::size_t rows = features.rows;
  std::vector<double> act = features.data;
  if (trace) trace->activations.assign(1, act);

  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = static_cast<std::size_t>(sizes_[l]);
    const std::size_t out = static_cast<std::size_t>(sizes_[l + 1]);
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    std::vector<double> next(rows * out);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t o = 0; o < out; ++o) {
        double z = b[o];
        for (std::size_t i = 0; i < in; ++i) z += w[o * in + i] * act[r * in + i];
        next[r * out + o] = (l + 1 < layers) ? std::tanh(z) : z;
      }
    }
    act = std::move(next);
    if (trace) trace->activations.push_back(act);
  }
  return act;
}

std::vector<double> Mlp::backward(const Trace& trace, std::span<const double> grad_out) const {
  const std::size_t layers = sizes_.size() - 1;
  if (trace.activations.size() != layers + 1) throw ParameterError("mlp trace is incomplete");
  const std::size_t rows = trace.activations.front().size() / input_dim();
  if (grad_out.size() != rows * output_dim()) {
    throw ParameterError("mlp backward: output gradient has the wrong size");
  }

  std::vector<double> grad(params_.size(), 0.0);
  std::vector<double> delta(grad_out.begin(), grad_out.end());
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = static_cast<std::size_t>(sizes_[l]);
    const std::size_t out = static_cast<std::size_t>(sizes_[l + 1]);
    const auto& input = trace.activations[l];
    const auto& output = trace.activations[l + 1];
    if (l + 1 < layers) {
      for (std::size_t k = 0; k < delta.size(); ++k) delta[k] *= 1.0 - output[k] * output[k];
    }
    double* gw = grad.data() + weight_offset(l);
    double* gb = grad.data() + bias_offset(l);
    const double* w = params_.data() + weight_offset(l);
    std::vector<double> prev(rows * in, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta[r * out + o];
        if (d == 0.0) continue;
        gb[o] += d;
        for (std::size_t i = 0; i < in; ++i) {
          gw[o * in + i] += d * input[r * in + i];
          prev[r * in + i] += d * w[o * in + i];
        }
      }
    }
    delta = std::move(prev);
  }
  return grad;
}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size()) throw ParameterError("adam: gradient size mismatch");
  if (m_.size() != params.size()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
    t_ = 0;
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

}  // namespace surco
