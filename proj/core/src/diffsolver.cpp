#include "surco/diffsolver.hpp"

#include <algorithm>
#include <cmath>

#include "surco/errors.hpp"

namespace surco {

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

}  // namespace

void BlackboxConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("blackbox lambda must be positive and finite");
  }
}

BlackboxCache solve_and_cache(const SolverOracle& oracle, std::span<const double> c) {
  BlackboxCache cache;
  cache.oracle = &oracle;
  cache.c.assign(c.begin(), c.end());
  cache.x = oracle.solve(c);
  return cache;
}

std::vector<double> backward(const BlackboxCache& cache, std::span<const double> grad_x,
                             const BlackboxConfig& cfg) {
  cfg.validate();
  if (cache.oracle == nullptr) throw ParameterError("backward called on an empty cache");
  if (grad_x.size() != cache.x.size()) {
    throw ParameterError("backward: gradient dimension does not match the solution");
  }
  check_finite(grad_x, "solution gradient");

  double step = cfg.lambda;
  if (cfg.normalize) {
    const double g_scale = max_abs(grad_x);
    const double c_scale = max_abs(cache.c);
    step = g_scale > 0.0 ? cfg.lambda * (c_scale > 0.0 ? c_scale : 1.0) / g_scale : 0.0;
  }

  // Minimizers move along +g_x; maximizers see the negated problem.
  const double sign = cache.oracle->sense() == Sense::kMinimize ? 1.0 : -1.0;
  std::vector<double> perturbed(cache.c);
  for (std::size_t i = 0; i < perturbed.size(); ++i) perturbed[i] += sign * step * grad_x[i];

  const std::vector<double> improved = cache.oracle->solve(perturbed);
  std::vector<double> grad_c(cache.x.size());
  for (std::size_t i = 0; i < grad_c.size(); ++i) {
    grad_c[i] = sign * (improved[i] - cache.x[i]) / cfg.lambda;
  }
  return grad_c;
}

}  // namespace surco
