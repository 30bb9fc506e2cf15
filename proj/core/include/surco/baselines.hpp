#pragma once

#include <vector>

#include "surco/instances.hpp"
#include "surco/solution.hpp"

namespace surco {

/// Trade-off values for the mean-variance route heuristic.
struct HeuristicConfig {
  /// 0, 31 geometric values from 0.01 to 100, and 1e6 as a variance-only proxy.
  std::vector<double> lambda_sweep = default_sweep();

  static std::vector<double> default_sweep();
  /// Non-empty, non-negative, sorted ascending; throws ParameterError otherwise.
  void validate() const;
};

struct HeuristicResult {
  PathSolution path;
  double value = 0.0;   ///< on-time probability of `path`
  double lambda = 0.0;  ///< trade-off that produced it
};

/// For every lambda, the shortest path under mu + lambda * sigma2; keeps the
/// candidate with the highest on-time probability (first lambda on ties).
HeuristicResult heuristic_mean_variance(const RouteInstance& inst,
                                        const HeuristicConfig& cfg = {});

struct OracleResult {
  PathSolution path;
  double value = 0.0;
  /// On-time probability of every simple path, descending.
  std::vector<double> sorted_values;
};

/// Exhaustive maximization of the on-time probability over all simple paths;
/// ties go to the first path in enumeration order.
OracleResult exact_oracle(const RouteInstance& inst);

}  // namespace surco
