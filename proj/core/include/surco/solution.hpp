#pragma once

#include <vector>

#include <nlohmann/json.hpp>

namespace surco {

using NodeId = int;

/// A simple source-to-target path plus its indicator over undirected edges.
struct PathSolution {
  std::vector<NodeId> node_seq;
  std::vector<double> x;

  friend bool operator==(const PathSolution&, const PathSolution&) = default;
};

/// Per-item device choice plus the flattened indicator `x[t * D + d]`.
struct AssignmentSolution {
  std::vector<int> assign;
  std::vector<double> x;

  friend bool operator==(const AssignmentSolution&, const AssignmentSolution&) = default;
};

nlohmann::json to_json(const PathSolution& sol);
nlohmann::json to_json(const AssignmentSolution& sol);

}  // namespace surco
