#include "surco/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "surco/errors.hpp"

namespace surco {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Two surrogate costs closer than this (relative) are treated as tied.
bool strictly_less(double a, double b) { return a < b - 1e-9 * (1.0 + std::abs(b)); }

}  // namespace

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ParameterError(std::string(what) + " contains a non-finite entry");
  }
}

std::vector<double> SolverOracle::solve(std::span<const double> c) const {
  if (c.size() != num_variables()) {
    throw ParameterError("cost vector has " + std::to_string(c.size()) + " entries, oracle expects " +
                         std::to_string(num_variables()));
  }
  check_finite(c, "surrogate cost");
  calls_.fetch_add(1, std::memory_order_relaxed);
  return do_solve(c);
}

double path_cost(std::span<const double> c, std::span<const double> x) {
  double total = 0.0;
  for (std::size_t i = 0; i < c.size() && i < x.size(); ++i) total += c[i] * x[i];
  return total;
}

std::vector<double> path_indicator(const RouteInstance& inst, std::span<const NodeId> nodes) {
  std::vector<double> x(static_cast<std::size_t>(inst.num_edges()), 0.0);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const int e = inst.edge_index(nodes[i], nodes[i + 1]);
    if (e < 0) throw ParameterError("consecutive path nodes are not adjacent");
    x[e] = 1.0;
  }
  return x;
}

bool is_valid_path(const RouteInstance& inst, const PathSolution& sol) {
  if (sol.node_seq.size() < 2) return false;
  if (sol.node_seq.front() != inst.source() || sol.node_seq.back() != inst.target()) return false;
  if (sol.x.size() != static_cast<std::size_t>(inst.num_edges())) return false;
  std::vector<char> seen(static_cast<std::size_t>(inst.num_nodes()), 0);
  std::vector<double> expected(sol.x.size(), 0.0);
  for (std::size_t i = 0; i < sol.node_seq.size(); ++i) {
    const NodeId v = sol.node_seq[i];
    if (v < 0 || v >= inst.num_nodes() || seen[v]) return false;
    seen[v] = 1;
    if (i + 1 < sol.node_seq.size()) {
      const int e = inst.edge_index(v, sol.node_seq[i + 1]);
      if (e < 0) return false;
      expected[e] = 1.0;
    }
  }
  return expected == sol.x;
}

PathSolution solve_shortest_path(const RouteInstance& inst, std::span<const double> c) {
  if (c.size() != static_cast<std::size_t>(inst.num_edges())) {
    throw ParameterError("path cost vector must have one entry per undirected edge");
  }
  check_finite(c, "surrogate cost");

  std::vector<double> weight(c.size());
  for (std::size_t e = 0; e < c.size(); ++e) weight[e] = std::max(c[e], kMinPathCost);

  // Bellman-Ford toward the target over both arc directions of every edge.
  const int n = inst.num_nodes();
  std::vector<double> dist(static_cast<std::size_t>(n), kInf);
  dist[inst.target()] = 0.0;
  const auto& edges = inst.edges();
  for (int round = 0; round < n - 1; ++round) {
    bool changed = false;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto [u, v] = edges[e];
      if (dist[v] + weight[e] < dist[u]) {
        dist[u] = dist[v] + weight[e];
        changed = true;
      }
      if (dist[u] + weight[e] < dist[v]) {
        dist[v] = dist[u] + weight[e];
        changed = true;
      }
    }
    if (!changed) break;
  }

  // Walk the tight arcs from the source, always taking the smallest node id:
  // this yields the lexicographically smallest shortest path.
  PathSolution sol;
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  NodeId u = inst.source();
  sol.node_seq.push_back(u);
  visited[u] = 1;
  while (u != inst.target()) {
    const double tol = 1e-12 * (1.0 + dist[u]);
    NodeId next = -1;
    for (const auto& [v, e] : inst.adjacency()[u]) {
      if (!visited[v] && weight[e] + dist[v] <= dist[u] + tol) {
        next = v;
        break;
      }
    }
    if (next < 0) throw std::logic_error("shortest-path reconstruction failed");
    sol.node_seq.push_back(next);
    visited[next] = 1;
    u = next;
  }
  sol.x = path_indicator(inst, sol.node_seq);
  return sol;
}

std::vector<PathSolution> enumerate_paths(const RouteInstance& inst) {
  if (inst.num_nodes() > kMaxEnumerationNodes) {
    throw GuardError("path enumeration is limited to grids with at most " +
                     std::to_string(kMaxEnumerationNodes) + " nodes");
  }
  std::vector<PathSolution> paths;
  std::vector<NodeId> stack{inst.source()};
  std::vector<char> on_path(static_cast<std::size_t>(inst.num_nodes()), 0);
  on_path[inst.source()] = 1;

  auto dfs = [&](auto&& self, NodeId u) -> void {
    if (u == inst.target()) {
      paths.push_back({stack, path_indicator(inst, stack)});
      return;
    }
    for (const auto& [v, e] : inst.adjacency()[u]) {
      if (on_path[v]) continue;
      on_path[v] = 1;
      stack.push_back(v);
      self(self, v);
      stack.pop_back();
      on_path[v] = 0;
    }
  };
  dfs(dfs, inst.source());
  return paths;
}

PathSolution PathOracle::solve_path(std::span<const double> c) const {
  return solve_shortest_path(inst_, c);
}

std::vector<double> PathOracle::do_solve(std::span<const double> c) const {
  PathSolution sol = solve_shortest_path(inst_, c);
  if (!is_valid_path(inst_, sol)) throw std::logic_error("path solver produced an invalid path");
  return std::move(sol.x);
}

// ---------------------------------------------------------------------------
// Assignment

std::vector<double> assignment_indicator(const AssignmentInstance& inst,
                                         std::span<const int> assign) {
  std::vector<double> x(static_cast<std::size_t>(inst.num_variables()), 0.0);
  for (int t = 0; t < inst.num_items; ++t) x[inst.index(t, assign[t])] = 1.0;
  return x;
}

bool is_valid_assignment(const AssignmentInstance& inst, const AssignmentSolution& sol) {
  if (sol.assign.size() != static_cast<std::size_t>(inst.num_items)) return false;
  if (sol.x.size() != static_cast<std::size_t>(inst.num_variables())) return false;
  std::vector<double> load(static_cast<std::size_t>(inst.num_devices), 0.0);
  for (int t = 0; t < inst.num_items; ++t) {
    const int d = sol.assign[t];
    if (d < 0 || d >= inst.num_devices) return false;
    double row = 0.0;
    for (int k = 0; k < inst.num_devices; ++k) {
      const double v = sol.x[inst.index(t, k)];
      if (v != 0.0 && v != 1.0) return false;
      row += v;
    }
    if (row != 1.0 || sol.x[inst.index(t, d)] != 1.0) return false;
    load[d] += inst.mem[t];
  }
  for (double l : load) {
    if (l > inst.capacity * (1.0 + 1e-12)) return false;
  }
  return true;
}

namespace {

// Successive-shortest-path min-cost flow on the item/device transportation
// network. Supplies are item memories, sink capacities are residual device
// memory, unit costs are c[t,d] / mem[t].
class TransportFlow {
 public:
  TransportFlow(int sources, int sinks) : sources_(sources), sinks_(sinks) {
    const int n = sources + sinks + 2;
    adj_.assign(static_cast<std::size_t>(n), {});
  }

  int super_source() const { return sources_ + sinks_; }
  int super_sink() const { return sources_ + sinks_ + 1; }
  int sink_node(int d) const { return sources_ + d; }

  void add_arc(int from, int to, double cap, double cost) {
    adj_[from].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({to, cap, cost});
    adj_[to].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({from, 0.0, -cost});
  }

  // Returns the minimum cost of shipping `demand`, or +inf if impossible.
  // Returns nullopt when rounding produces a negative residual cycle or the
  // augmentation count runs away; callers fall back to a weaker bound.
  std::optional<double> run(double demand) {
    const double cap_eps = 1e-9 * (1.0 + demand);
    const int n = static_cast<int>(adj_.size());
    const int max_augment = 4 * static_cast<int>(arcs_.size()) + 8;
    double shipped = 0.0;
    double cost = 0.0;
    std::vector<double> dist(static_cast<std::size_t>(n));
    std::vector<int> via(static_cast<std::size_t>(n));
    for (int augment = 0; shipped < demand - cap_eps; ++augment) {
      if (augment == max_augment) return std::nullopt;
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(via.begin(), via.end(), -1);
      dist[super_source()] = 0.0;
      bool changed = true;
      for (int round = 0; round < n && changed; ++round) {
        changed = false;
        for (int u = 0; u < n; ++u) {
          if (dist[u] == kInf) continue;
          for (int a : adj_[u]) {
            const Arc& arc = arcs_[a];
            const double d = dist[u] + arc.cost;
            if (arc.cap > cap_eps && d < dist[arc.to] - 1e-12 * (1.0 + std::abs(d))) {
              dist[arc.to] = d;
              via[arc.to] = a;
              changed = true;
            }
          }
        }
      }
      if (changed) return std::nullopt;
      if (dist[super_sink()] == kInf) return kInf;
      double push = demand - shipped;
      int hops = 0;
      for (int v = super_sink(); v != super_source(); v = arcs_[via[v] ^ 1].to) {
        if (via[v] < 0 || ++hops > n) return std::nullopt;
        push = std::min(push, arcs_[via[v]].cap);
      }
      for (int v = super_sink(); v != super_source(); v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].cap -= push;
        arcs_[via[v] ^ 1].cap += push;
      }
      shipped += push;
      cost += push * dist[super_sink()];
    }
    return cost;
  }

 private:
  struct Arc {
    int to;
    double cap;
    double cost;
  };

  int sources_;
  int sinks_;
  std::vector<std::vector<int>> adj_;
  std::vector<Arc> arcs_;
};

class AssignmentSearch {
 public:
  AssignmentSearch(const AssignmentInstance& inst, std::span<const double> c)
      : inst_(inst), c_(c) {}

  AssignmentSolution run() {
    const int items = inst_.num_items;
    residual_.assign(static_cast<std::size_t>(inst_.num_devices), inst_.capacity);
    current_.assign(static_cast<std::size_t>(items), -1);
    best_cost_ = kInf;
    search(0, 0.0);
    if (best_.empty()) throw InfeasibleError("no capacity-feasible assignment exists");
    return {best_, assignment_indicator(inst_, best_)};
  }

 private:
  void search(int item, double fixed) {
    if (item == inst_.num_items) {
      if (best_.empty() || strictly_less(fixed, best_cost_)) {
        best_cost_ = fixed;
        best_ = current_;
      }
      return;
    }
    if (!best_.empty()) {
      std::vector<int> rest(static_cast<std::size_t>(inst_.num_items - item));
      std::iota(rest.begin(), rest.end(), item);
      const double bound = fixed + assignment_flow_bound(inst_, c_, rest, residual_);
      // Nothing below this node can beat the incumbent by more than the tie tolerance.
      if (!strictly_less(bound - 1e-9 * (1.0 + std::abs(best_cost_)), best_cost_)) return;
    }
    for (int d = 0; d < inst_.num_devices; ++d) {
      if (inst_.mem[item] > residual_[d] * (1.0 + 1e-12)) continue;
      residual_[d] -= inst_.mem[item];
      current_[item] = d;
      search(item + 1, fixed + c_[inst_.index(item, d)]);
      current_[item] = -1;
      residual_[d] += inst_.mem[item];
    }
  }

  const AssignmentInstance& inst_;
  std::span<const double> c_;
  std::vector<double> residual_;
  std::vector<int> current_;
  std::vector<int> best_;
  double best_cost_ = kInf;
};

}  // namespace

double assignment_flow_bound(const AssignmentInstance& inst, std::span<const double> c,
                             std::span<const int> items, std::span<const double> residual) {
  const int devices = inst.num_devices;
  double free_cost = 0.0;
  std::vector<int> weighted;
  double demand = 0.0;
  for (int t : items) {
    if (inst.mem[t] <= 0.0) {
      double best = kInf;
      for (int d = 0; d < devices; ++d) best = std::min(best, c[inst.index(t, d)]);
      free_cost += best;
    } else {
      weighted.push_back(t);
      demand += inst.mem[t];
    }
  }
  if (weighted.empty()) return free_cost;

  TransportFlow flow(static_cast<int>(weighted.size()), devices);
  for (std::size_t k = 0; k < weighted.size(); ++k) {
    const int t = weighted[k];
    flow.add_arc(flow.super_source(), static_cast<int>(k), inst.mem[t], 0.0);
    for (int d = 0; d < devices; ++d) {
      flow.add_arc(static_cast<int>(k), flow.sink_node(d), inst.mem[t],
                   c[inst.index(t, d)] / inst.mem[t]);
    }
  }
  for (int d = 0; d < devices; ++d) {
    flow.add_arc(flow.sink_node(d), flow.super_sink(), std::max(residual[d], 0.0), 0.0);
  }
  const std::optional<double> flow_cost = flow.run(demand);
  if (flow_cost) return free_cost + *flow_cost;
  // Capacity-free bound: every item on its cheapest device.
  double relaxed = free_cost;
  for (int t : weighted) {
    double best = kInf;
    for (int d = 0; d < devices; ++d) best = std::min(best, c[inst.index(t, d)]);
    relaxed += best;
  }
  return relaxed;
}

AssignmentSolution solve_assignment(const AssignmentInstance& inst, std::span<const double> c) {
  inst.validate();
  if (c.size() != static_cast<std::size_t>(inst.num_variables())) {
    throw ParameterError("assignment cost vector must have items x devices entries");
  }
  check_finite(c, "surrogate cost");
  return AssignmentSearch(inst, c).run();
}

std::vector<AssignmentSolution> enumerate_assignments(const AssignmentInstance& inst) {
  inst.validate();
  if (std::pow(static_cast<double>(inst.num_devices), inst.num_items) >
      kMaxAssignmentEnumeration) {
    throw GuardError("assignment enumeration is limited to devices^items <= 1e6");
  }
  std::vector<AssignmentSolution> out;
  std::vector<int> assign(static_cast<std::size_t>(inst.num_items), 0);
  std::vector<double> load(static_cast<std::size_t>(inst.num_devices), 0.0);

  auto rec = [&](auto&& self, int t) -> void {
    if (t == inst.num_items) {
      out.push_back({assign, assignment_indicator(inst, assign)});
      return;
    }
    for (int d = 0; d < inst.num_devices; ++d) {
      if (load[d] + inst.mem[t] > inst.capacity * (1.0 + 1e-12)) continue;
      load[d] += inst.mem[t];
      assign[t] = d;
      self(self, t + 1);
      load[d] -= inst.mem[t];
    }
  };
  rec(rec, 0);
  return out;
}

AssignmentOracle::AssignmentOracle(AssignmentInstance inst) : inst_(std::move(inst)) {
  inst_.validate();
}

AssignmentSolution AssignmentOracle::solve_assignment(std::span<const double> c) const {
  return surco::solve_assignment(inst_, c);
}

std::vector<double> AssignmentOracle::do_solve(std::span<const double> c) const {
  AssignmentSolution sol = surco::solve_assignment(inst_, c);
  if (!is_valid_assignment(inst_, sol)) {
    throw std::logic_error("assignment solver produced an infeasible assignment");
  }
  return std::move(sol.x);
}

// ---------------------------------------------------------------------------
// Toy

std::vector<double> ToyOracle::do_solve(std::span<const double> c) const {
  std::size_t best = 0;
  double best_value = 0.0;
  for (std::size_t i = 0; i < ToyInstance::kVertices.size(); ++i) {
    const auto& v = ToyInstance::kVertices[i];
    const double value = c[0] * v[0] + c[1] * v[1];
    const bool better = sense_ == Sense::kMinimize ? value < best_value : value > best_value;
    if (i == 0 || better) {
      best = i;
      best_value = value;
    }
  }
  return {ToyInstance::kVertices[best][0], ToyInstance::kVertices[best][1]};
}

}  // namespace surco
