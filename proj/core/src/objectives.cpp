#include "surco/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "surco/errors.hpp"

namespace surco {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

ObjectiveValue ontime_objective(std::span<const double> x, const RouteInstance& inst) {
  const auto& mu = inst.mu();
  const auto& sigma2 = inst.sigma2();
  if (x.size() != mu.size()) throw ParameterError("on-time objective: dimension mismatch");

  double mean = 0.0;
  double var = 0.0;
  for (std::size_t e = 0; e < x.size(); ++e) {
    mean += mu[e] * x[e];
    var += sigma2[e] * x[e];
  }
  if (!(var > 0.0)) throw DegenerateError("on-time objective: path variance is zero");

  const double s = std::sqrt(var);
  const double slack = inst.deadline() - mean;
  const double z = slack / s;
  const double density = normal_pdf(z);

  ObjectiveValue out;
  out.value = normal_cdf(z);
  out.grad.resize(x.size());
  const double s3 = var * s;
  for (std::size_t e = 0; e < x.size(); ++e) {
    out.grad[e] = density * (-mu[e] / s - slack * sigma2[e] / (2.0 * s3));
  }
  return out;
}

ObjectiveValue toy_objective(std::span<const double> x, const ToyInstance& inst) {
  if (x.size() != 2) throw ParameterError("toy objective expects a 2-vector");
  const double cy = std::cos(inst.y);
  const double sy = std::sin(inst.y);
  const double inner = x[0] * cy + x[1] * sy;
  return {inner * inner, {2.0 * inner * cy, 2.0 * inner * sy}};
}

ObjectiveValue assignment_objective(std::span<const double> x, const AssignmentInstance& inst,
                                    RowCheck rows) {
  constexpr double kBeta = 10.0;
  constexpr double kCountCoef = 0.3;
  constexpr double kCountEps = 1e-9;

  const int items = inst.num_items;
  const int devices = inst.num_devices;
  if (x.size() != static_cast<std::size_t>(inst.num_variables())) {
    throw ParameterError("assignment objective: dimension mismatch");
  }
  if (rows == RowCheck::kEnforce) {
    for (int t = 0; t < items; ++t) {
      double sum = 0.0;
      for (int d = 0; d < devices; ++d) sum += x[inst.index(t, d)];
      if (std::abs(sum - 1.0) > 1e-6) {
        throw ParameterError("assignment objective: row " + std::to_string(t) +
                             " does not sum to one");
      }
    }
  }

  std::vector<double> count(static_cast<std::size_t>(devices), 0.0);
  std::vector<double> load(static_cast<std::size_t>(devices), 0.0);
  for (int t = 0; t < items; ++t) {
    for (int d = 0; d < devices; ++d) {
      const double v = x[inst.index(t, d)];
      load[d] += inst.weights[t] * v;
      count[d] += v;
    }
  }
  std::vector<double> root(static_cast<std::size_t>(devices));
  for (int d = 0; d < devices; ++d) {
    root[d] = std::sqrt(count[d] + kCountEps);
    load[d] += kCountCoef * root[d];
  }

  const double peak = *std::max_element(load.begin(), load.end());
  std::vector<double> w(static_cast<std::size_t>(devices));
  double norm = 0.0;
  for (int d = 0; d < devices; ++d) {
    w[d] = std::exp(kBeta * (load[d] - peak));
    norm += w[d];
  }
  double value = 0.0;
  for (int d = 0; d < devices; ++d) {
    w[d] /= norm;
    value += w[d] * load[d];
  }

  ObjectiveValue out;
  out.value = value;
  out.grad.resize(x.size());
  for (int d = 0; d < devices; ++d) {
    const double dvalue_dload = w[d] * (1.0 + kBeta * (load[d] - value));
    const double dcount = kCountCoef * 0.5 / root[d];
    for (int t = 0; t < items; ++t) {
      out.grad[inst.index(t, d)] = dvalue_dload * (inst.weights[t] + dcount);
    }
  }
  return out;
}

ObjectiveValue Objective::operator()(std::span<const double> x) const {
  if (x.size() != dimension_) throw ParameterError("objective: dimension mismatch");
  calls_.fetch_add(1, std::memory_order_relaxed);
  return fn_(x);
}

ObjectiveValue Objective::loss(std::span<const double> x) const {
  ObjectiveValue out = (*this)(x);
  if (sense_ == Sense::kMaximize) {
    out.value = -out.value;
    for (double& g : out.grad) g = -g;
  }
  return out;
}

Objective make_ontime_objective(const RouteInstance& inst) {
  return Objective([inst](std::span<const double> x) { return ontime_objective(x, inst); },
                   Sense::kMaximize, static_cast<std::size_t>(inst.num_edges()));
}

Objective make_toy_objective(const ToyInstance& inst) {
  return Objective([inst](std::span<const double> x) { return toy_objective(x, inst); },
                   Sense::kMaximize, 2);
}

Objective make_assignment_objective(const AssignmentInstance& inst) {
  return Objective([inst](std::span<const double> x) { return assignment_objective(x, inst); },
                   Sense::kMinimize, static_cast<std::size_t>(inst.num_variables()));
}

}  // namespace surco
