#include "surco/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "surco/errors.hpp"
#include "surco/objectives.hpp"
#include "surco/solvers.hpp"

namespace surco {

std::vector<double> HeuristicConfig::default_sweep() {
  std::vector<double> sweep{0.0};
  constexpr int kGeometric = 31;
  for (int k = 0; k < kGeometric; ++k) {
    sweep.push_back(std::pow(10.0, -2.0 + 4.0 * k / (kGeometric - 1)));
  }
  sweep.push_back(1e6);
  return sweep;
}

void HeuristicConfig::validate() const {
  if (lambda_sweep.empty()) throw ParameterError("heuristic sweep is empty");
  for (double v : lambda_sweep) {
    if (!std::isfinite(v) || v < 0.0) throw ParameterError("heuristic sweep values must be >= 0");
  }
  if (!std::is_sorted(lambda_sweep.begin(), lambda_sweep.end())) {
    throw ParameterError("heuristic sweep must be sorted");
  }
}

HeuristicResult heuristic_mean_variance(const RouteInstance& inst, const HeuristicConfig& cfg) {
  cfg.validate();
  HeuristicResult best;
  bool have = false;
  std::vector<double> weight(static_cast<std::size_t>(inst.num_edges()));
  for (double lambda : cfg.lambda_sweep) {
    for (std::size_t e = 0; e < weight.size(); ++e) {
      weight[e] = inst.mu()[e] + lambda * inst.sigma2()[e];
    }
    PathSolution path = solve_shortest_path(inst, weight);
    const double value = ontime_objective(path.x, inst).value;
    if (!have || value > best.value) {
      best = {std::move(path), value, lambda};
      have = true;
    }
  }
  return best;
}

OracleResult exact_oracle(const RouteInstance& inst) {
  std::vector<PathSolution> paths = enumerate_paths(inst);
  OracleResult out;
  out.sorted_values.reserve(paths.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const double value = ontime_objective(paths[i].x, inst).value;
    out.sorted_values.push_back(value);
    if (i == 0 || value > out.value) {
      out.value = value;
      best = i;
    }
  }
  out.path = std::move(paths[best]);
  std::sort(out.sorted_values.begin(), out.sorted_values.end(), std::greater<>());
  return out;
}

}  // namespace surco
