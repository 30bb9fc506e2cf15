#pragma once

#include <span>
#include <vector>

#include "surco/solvers.hpp"

namespace surco {

/// Blackbox differentiation of a linear solver.
///
/// The perturbed cost is c + lambda * scale(c) * g_x / max|g_x| where scale(c)
/// is max|c| (or 1 for a zero vector), so lambda is measured relative to the
/// magnitude of the cost vector. For a minimizing oracle the returned gradient
/// is (x' - x) / lambda with x' the solution of the perturbed problem; a descent
/// step c -= alpha * g_c then moves c toward reproducing x'.
struct BlackboxConfig {
  double lambda = 1.0;
  bool normalize = true;

  void validate() const;
};

/// Forward-pass state retained for the backward call.
struct BlackboxCache {
  const SolverOracle* oracle = nullptr;
  std::vector<double> c;
  std::vector<double> x;
};

BlackboxCache solve_and_cache(const SolverOracle& oracle, std::span<const double> c);

/// Issues exactly one further solver call.
std::vector<double> backward(const BlackboxCache& cache, std::span<const double> grad_x,
                             const BlackboxConfig& cfg = {});

}  // namespace surco
