#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "surco/solution.hpp"

namespace surco {

/// An undirected grid edge. `u < v` always holds.
struct GridEdge {
  NodeId u = 0;
  NodeId v = 0;
};

/// Deadline setting relative to the least-expected-time path length.
struct DeadlineRegime {
  enum class Label { kLoose, kNormal, kTight };

  Label label = Label::kNormal;

  static DeadlineRegime loose() { return {Label::kLoose}; }
  static DeadlineRegime normal() { return {Label::kNormal}; }
  static DeadlineRegime tight() { return {Label::kTight}; }
  static DeadlineRegime parse(std::string_view name);

  double multiplier() const;
  std::string_view name() const;

  friend bool operator==(const DeadlineRegime&, const DeadlineRegime&) = default;
};

/// A grid graph with independent Gaussian edge travel times.
///
/// Nodes are numbered row-major (`r * cols + c`). Edge order is row-major with
/// the horizontal edges of a row listed before the vertical edges below it;
/// decision vectors index this undirected edge list.
class RouteInstance {
 public:
  RouteInstance() = default;
  /// Validates every invariant; throws ParameterError on violation.
  RouteInstance(int rows, int cols, std::vector<double> mu, std::vector<double> sigma2,
                NodeId source, NodeId target, double deadline, std::uint64_t seed);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_nodes() const { return rows_ * cols_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<GridEdge>& edges() const { return edges_; }
  const std::vector<double>& mu() const { return mu_; }
  const std::vector<double>& sigma2() const { return sigma2_; }
  NodeId source() const { return source_; }
  NodeId target() const { return target_; }
  double deadline() const { return deadline_; }
  std::uint64_t seed() const { return seed_; }

  /// Index of the undirected edge joining `a` and `b`, or -1.
  int edge_index(NodeId a, NodeId b) const;

  /// Directed adjacency: for each node, (neighbor, edge index) sorted by neighbor id.
  const std::vector<std::vector<std::pair<NodeId, int>>>& adjacency() const {
    return adjacency_;
  }

  RouteInstance with_deadline(double deadline) const;

  friend bool operator==(const RouteInstance& a, const RouteInstance& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.mu_ == b.mu_ &&
           a.sigma2_ == b.sigma2_ && a.source_ == b.source_ && a.target_ == b.target_ &&
           a.deadline_ == b.deadline_ && a.seed_ == b.seed_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<GridEdge> edges_;
  std::vector<double> mu_;
  std::vector<double> sigma2_;
  NodeId source_ = 0;
  NodeId target_ = 0;
  double deadline_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<std::vector<std::pair<NodeId, int>>> adjacency_;
};

/// Undirected edge list of a rows x cols 4-connected grid in canonical order.
std::vector<GridEdge> grid_edges(int rows, int cols);

/// The two-dimensional example: maximize (x1 cos y + x2 sin y)^2 over the
/// triangle with vertices (0,0), (0,1), (1,0).
struct ToyInstance {
  static constexpr std::array<std::array<double, 2>, 3> kVertices{{{0.0, 0.0},
                                                                   {0.0, 1.0},
                                                                   {1.0, 0.0}}};
  double y = 0.0;

  explicit ToyInstance(double angle);
  ToyInstance() = default;
};

/// Synthetic capacitated assignment of items to identical devices.
///
/// Decision variable `x[t * num_devices + d]` is 1 iff item t goes to device d.
/// The capacity rule and the cost weights are synthetic (not drawn from any
/// production workload).
struct AssignmentInstance {
  int num_items = 0;
  int num_devices = 0;
  std::vector<double> mem;
  double capacity = 0.0;
  std::vector<double> weights;
  std::uint64_t seed = 0;

  int num_variables() const { return num_items * num_devices; }
  int index(int item, int device) const { return item * num_devices + device; }

  /// Throws ParameterError when shapes or capacities are inconsistent.
  void validate() const;

  friend bool operator==(const AssignmentInstance&, const AssignmentInstance&) = default;
};

/// `rows x cols` grids, source at the top-left and target at the bottom-right
/// corner, mu ~ U(0.1, 1), sigma2 ~ U(0.1, 0.3) * (1 - mu), deadline =
/// regime multiplier x least-expected-time path length.
std::vector<RouteInstance> generate_route_instances(int rows, int cols, int count,
                                                    DeadlineRegime regime,
                                                    std::uint64_t seed);

/// mem ~ U(0.1, 1), weights ~ U(0.1, 1), capacity = 1.2 x average load.
/// Redraws an instance (at most 100 times) until first-fit-decreasing packs it.
std::vector<AssignmentInstance> generate_assignment_instances(int num_items, int num_devices,
                                                              int count, std::uint64_t seed);

/// Greedy first-fit-decreasing packing; returns per-item devices, or an empty
/// vector when it fails.
std::vector<int> first_fit_decreasing(const AssignmentInstance& inst);

/// Shortest source-target path under mean travel times (lexicographic ties).
PathSolution let_path(const RouteInstance& inst);

/// Sum of mu along the least-expected-time path.
double let_length(const RouteInstance& inst);

// JSON documents. Route and assignment round-trips are bit-exact.
nlohmann::json to_json(const RouteInstance& inst);
RouteInstance route_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AssignmentInstance& inst);
AssignmentInstance assignment_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ToyInstance& inst);
ToyInstance toy_from_json(const nlohmann::json& doc);

}  // namespace surco
