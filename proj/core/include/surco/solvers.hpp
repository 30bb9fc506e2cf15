#pragma once

#include <atomic>
#include <cstddef>
#include <span>
#include <vector>

#include "surco/instances.hpp"
#include "surco/solution.hpp"

namespace surco {

/// Surrogate costs are projected to at least this value before path search so
/// the bidirected grid never carries a negative cycle.
inline constexpr double kMinPathCost = 1e-6;

enum class Sense { kMinimize, kMaximize };

/// Throws ParameterError if any entry is NaN or infinite.
void check_finite(std::span<const double> values, const char* what);

/// A linear combinatorial solver x = argmin_{x in Omega} c^T x (or argmax when
/// sense() is kMaximize). Every call returns a feasible vertex of Omega and is
/// deterministic in c. solve() counts its invocations.
class SolverOracle {
 public:
  virtual ~SolverOracle() = default;

  virtual std::size_t num_variables() const = 0;
  virtual Sense sense() const { return Sense::kMinimize; }

  std::vector<double> solve(std::span<const double> c) const;

  std::size_t calls() const { return calls_.load(std::memory_order_relaxed); }
  void reset_calls() const { calls_.store(0, std::memory_order_relaxed); }

 protected:
  virtual std::vector<double> do_solve(std::span<const double> c) const = 0;

 private:
  mutable std::atomic<std::size_t> calls_{0};
};

// ---------------------------------------------------------------------------
// Shortest path

/// Minimum-cost simple source-target path under c~ = max(c, kMinPathCost),
/// computed with Bellman-Ford over the bidirected grid. Among equal-cost paths
/// the lexicographically smallest node sequence wins.
PathSolution solve_shortest_path(const RouteInstance& inst, std::span<const double> c);

/// Every simple source-target path in DFS order (neighbors by increasing id).
/// Guarded to grids with at most 25 nodes.
std::vector<PathSolution> enumerate_paths(const RouteInstance& inst);

inline constexpr int kMaxEnumerationNodes = 25;

/// Builds the edge indicator for a node sequence; throws if two consecutive
/// nodes are not adjacent.
std::vector<double> path_indicator(const RouteInstance& inst, std::span<const NodeId> nodes);

/// True iff `sol` is a simple source-target path consistent with its indicator.
bool is_valid_path(const RouteInstance& inst, const PathSolution& sol);

double path_cost(std::span<const double> c, std::span<const double> x);

class PathOracle final : public SolverOracle {
 public:
  explicit PathOracle(RouteInstance inst) : inst_(std::move(inst)) {}

  std::size_t num_variables() const override { return inst_.edges().size(); }
  const RouteInstance& instance() const { return inst_; }

  PathSolution solve_path(std::span<const double> c) const;

 protected:
  std::vector<double> do_solve(std::span<const double> c) const override;

 private:
  RouteInstance inst_;
};

// ---------------------------------------------------------------------------
// Capacitated assignment

/// Exact argmin of sum c[t,d] x[t,d] subject to one device per item and device
/// memory capacity. Depth-first branch-and-bound (items in order, devices in
/// order) with a min-cost-flow lower bound; among equal-cost optima the
/// lexicographically smallest `assign` wins. Throws InfeasibleError when no
/// assignment fits.
AssignmentSolution solve_assignment(const AssignmentInstance& inst, std::span<const double> c);

/// All capacity-feasible assignments in lexicographic order of `assign`.
/// Guarded to num_devices^num_items <= 10^6.
std::vector<AssignmentSolution> enumerate_assignments(const AssignmentInstance& inst);

inline constexpr double kMaxAssignmentEnumeration = 1e6;

/// Lower bound on the remaining cost from the transportation relaxation
/// (items may be split across devices in proportion to memory). Returns
/// +infinity when even the relaxation is infeasible. Exposed for tests.
double assignment_flow_bound(const AssignmentInstance& inst, std::span<const double> c,
                             std::span<const int> items, std::span<const double> residual);

std::vector<double> assignment_indicator(const AssignmentInstance& inst,
                                         std::span<const int> assign);

bool is_valid_assignment(const AssignmentInstance& inst, const AssignmentSolution& sol);

class AssignmentOracle final : public SolverOracle {
 public:
  explicit AssignmentOracle(AssignmentInstance inst);

  std::size_t num_variables() const override {
    return static_cast<std::size_t>(inst_.num_variables());
  }
  const AssignmentInstance& instance() const { return inst_; }

  AssignmentSolution solve_assignment(std::span<const double> c) const;

 protected:
  std::vector<double> do_solve(std::span<const double> c) const override;

 private:
  AssignmentInstance inst_;
};

// ---------------------------------------------------------------------------
// Toy triangle

/// Optimizes c^T x over the three triangle vertices; the first vertex in
/// ToyInstance::kVertices order wins ties.
class ToyOracle final : public SolverOracle {
 public:
  explicit ToyOracle(Sense sense = Sense::kMaximize) : sense_(sense) {}

  std::size_t num_variables() const override { return 2; }
  Sense sense() const override { return sense_; }

 protected:
  std::vector<double> do_solve(std::span<const double> c) const override;

 private:
  Sense sense_;
};

}  // namespace surco
