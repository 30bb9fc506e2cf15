#include "surco/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "surco/errors.hpp"
#include "surco/random.hpp"
#include "surco/solvers.hpp"

namespace surco {

DeadlineRegime DeadlineRegime::parse(std::string_view name) {
  if (name == "loose") return loose();
  if (name == "normal") return normal();
  if (name == "tight") return tight();
  throw ParameterError("unknown deadline regime '" + std::string(name) + "'");
}

double DeadlineRegime::multiplier() const {
  switch (label) {
    case Label::kLoose:
      return 1.1;
    case Label::kNormal:
      return 1.0;
    case Label::kTight:
      return 0.9;
  }
  return 1.0;
}

std::string_view DeadlineRegime::name() const {
  switch (label) {
    case Label::kLoose:
      return "loose";
    case Label::kNormal:
      return "normal";
    case Label::kTight:
      return "tight";
  }
  return "normal";
}

std::vector<GridEdge> grid_edges(int rows, int cols) {
  std::vector<GridEdge> edges;
  if (rows < 1 || cols < 1) return edges;
  edges.reserve(static_cast<std::size_t>(rows * (cols - 1) + (rows - 1) * cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      edges.push_back({r * cols + c, r * cols + c + 1});
    }
    if (r + 1 < rows) {
      for (int c = 0; c < cols; ++c) {
        edges.push_back({r * cols + c, (r + 1) * cols + c});
      }
    }
  }
  return edges;
}

RouteInstance::RouteInstance(int rows, int cols, std::vector<double> mu,
                             std::vector<double> sigma2, NodeId source, NodeId target,
                             double deadline, std::uint64_t seed)
    : rows_(rows),
      cols_(cols),
      mu_(std::move(mu)),
      sigma2_(std::move(sigma2)),
      source_(source),
      target_(target),
      deadline_(deadline),
      seed_(seed) {
  if (rows_ < 1 || cols_ < 1 || rows_ * cols_ < 2) {
    throw ParameterError("route grid needs at least two nodes");
  }
  edges_ = grid_edges(rows_, cols_);
  if (mu_.size() != edges_.size() || sigma2_.size() != edges_.size()) {
    throw ParameterError("route instance expects " + std::to_string(edges_.size()) +
                         " edge parameters, got mu=" + std::to_string(mu_.size()) +
                         " sigma2=" + std::to_string(sigma2_.size()));
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (!std::isfinite(mu_[e]) || mu_[e] < 0.0) {
      throw ParameterError("edge mean travel time must be finite and non-negative");
    }
    if (!std::isfinite(sigma2_[e]) || sigma2_[e] <= 0.0) {
      throw ParameterError("edge travel-time variance must be positive");
    }
  }
  const int n = num_nodes();
  if (source_ < 0 || source_ >= n || target_ < 0 || target_ >= n) {
    throw ParameterError("source/target outside the grid");
  }
  if (source_ == target_) throw ParameterError("source and target coincide");
  if (!std::isfinite(deadline_) || deadline_ <= 0.0) {
    throw ParameterError("deadline must be positive");
  }

  adjacency_.assign(static_cast<std::size_t>(n), {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [u, v] = edges_[e];
    adjacency_[u].emplace_back(v, static_cast<int>(e));
    adjacency_[v].emplace_back(u, static_cast<int>(e));
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

int RouteInstance::edge_index(NodeId a, NodeId b) const {
  if (a < 0 || a >= num_nodes()) return -1;
  for (const auto& [v, e] : adjacency_[a]) {
    if (v == b) return e;
  }
  return -1;
}

RouteInstance RouteInstance::with_deadline(double deadline) const {
  return RouteInstance(rows_, cols_, mu_, sigma2_, source_, target_, deadline, seed_);
}

ToyInstance::ToyInstance(double angle) : y(angle) {
  if (!std::isfinite(angle)) throw ParameterError("toy angle must be finite");
}

void AssignmentInstance::validate() const {
  if (num_items < 1 || num_devices < 1) {
    throw ParameterError("assignment needs at least one item and one device");
  }
  if (static_cast<int>(mem.size()) != num_items ||
      static_cast<int>(weights.size()) != num_items) {
    throw ParameterError("assignment mem/weights must have one entry per item");
  }
  if (!std::isfinite(capacity) || capacity <= 0.0) {
    throw ParameterError("device capacity must be positive");
  }
  for (int t = 0; t < num_items; ++t) {
    if (!std::isfinite(mem[t]) || mem[t] < 0.0) throw ParameterError("item memory must be >= 0");
    if (!std::isfinite(weights[t])) throw ParameterError("item weight must be finite");
    if (mem[t] > capacity) {
      throw InfeasibleError("item " + std::to_string(t) + " does not fit on any device");
    }
  }
}

PathSolution let_path(const RouteInstance& inst) {
  return solve_shortest_path(inst, inst.mu());
}

double let_length(const RouteInstance& inst) {
  const PathSolution path = let_path(inst);
  return path_cost(inst.mu(), path.x);
}

std::vector<RouteInstance> generate_route_instances(int rows, int cols, int count,
                                                    DeadlineRegime regime,
                                                    std::uint64_t seed) {
  if (rows < 2 || cols < 2) throw ParameterError("route grid must be at least 2x2");
  if (count < 1) throw ParameterError("instance count must be positive");

  const std::size_t num_edges = grid_edges(rows, cols).size();
  const NodeId source = 0;
  const NodeId target = rows * cols - 1;

  std::vector<RouteInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const std::uint64_t inst_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    Rng rng(inst_seed);
    std::vector<double> mu(num_edges);
    std::vector<double> sigma2(num_edges);
    for (std::size_t e = 0; e < num_edges; ++e) {
      mu[e] = rng.uniform(0.1, 1.0);
      sigma2[e] = rng.uniform(0.1, 0.3) * (1.0 - mu[e]);
    }
    // Provisional deadline; replaced once the LET length is known.
    RouteInstance draft(rows, cols, mu, sigma2, source, target, 1.0, inst_seed);
    const double deadline = regime.multiplier() * let_length(draft);
    out.push_back(draft.with_deadline(deadline));
  }
  return out;
}

std::vector<int> first_fit_decreasing(const AssignmentInstance& inst) {
  std::vector<int> order(static_cast<std::size_t>(inst.num_items));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return inst.mem[a] > inst.mem[b]; });
  std::vector<double> load(static_cast<std::size_t>(inst.num_devices), 0.0);
  std::vector<int> assign(static_cast<std::size_t>(inst.num_items), -1);
  for (int t : order) {
    bool placed = false;
    for (int d = 0; d < inst.num_devices; ++d) {
      if (load[d] + inst.mem[t] <= inst.capacity) {
        load[d] += inst.mem[t];
        assign[t] = d;
        placed = true;
        break;
      }
    }
    if (!placed) return {};
  }
  return assign;
}

std::vector<AssignmentInstance> generate_assignment_instances(int num_items, int num_devices,
                                                              int count, std::uint64_t seed) {
  if (num_devices < 1 || num_items < num_devices) {
    throw ParameterError("assignment generator requires items >= devices >= 1");
  }
  if (count < 1) throw ParameterError("instance count must be positive");

  constexpr int kMaxAttempts = 100;
  std::vector<AssignmentInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    bool done = false;
    for (int attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
      const std::uint64_t inst_seed =
          derive_seed(derive_seed(seed, static_cast<std::uint64_t>(i)),
                      static_cast<std::uint64_t>(attempt));
      Rng rng(inst_seed);
      AssignmentInstance inst;
      inst.num_items = num_items;
      inst.num_devices = num_devices;
      inst.seed = inst_seed;
      inst.mem.resize(static_cast<std::size_t>(num_items));
      inst.weights.resize(static_cast<std::size_t>(num_items));
      for (int t = 0; t < num_items; ++t) inst.mem[t] = rng.uniform(0.1, 1.0);
      for (int t = 0; t < num_items; ++t) inst.weights[t] = rng.uniform(0.1, 1.0);
      const double total = std::accumulate(inst.mem.begin(), inst.mem.end(), 0.0);
      inst.capacity = 1.2 * total / num_devices;
      const double largest = *std::max_element(inst.mem.begin(), inst.mem.end());
      if (largest > inst.capacity) continue;
      if (first_fit_decreasing(inst).empty()) continue;
      out.push_back(std::move(inst));
      done = true;
    }
    if (!done) {
      throw InfeasibleError("no packable assignment instance after 100 draws");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void require_keys(const nlohmann::json& doc, std::initializer_list<const char*> keys,
                  const char* what) {
  if (!doc.is_object()) throw ParameterError(std::string(what) + " document must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.count(key)) {
      throw ParameterError(std::string("unknown key '") + key + "' in " + what + " document");
    }
  }
  for (const char* key : keys) {
    if (!doc.contains(key)) {
      throw ParameterError(std::string("missing key '") + key + "' in " + what + " document");
    }
  }
}

template <typename T>
T get_as(const nlohmann::json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

nlohmann::json to_json(const RouteInstance& inst) {
  return nlohmann::json{{"rows", inst.rows()},     {"cols", inst.cols()},
                        {"mu", inst.mu()},         {"sigma2", inst.sigma2()},
                        {"source", inst.source()}, {"target", inst.target()},
                        {"deadline", inst.deadline()}, {"seed", inst.seed()}};
}

RouteInstance route_from_json(const nlohmann::json& doc) {
  require_keys(doc, {"rows", "cols", "mu", "sigma2", "source", "target", "deadline", "seed"},
               "route instance");
  return RouteInstance(get_as<int>(doc, "rows"), get_as<int>(doc, "cols"),
                       get_as<std::vector<double>>(doc, "mu"),
                       get_as<std::vector<double>>(doc, "sigma2"), get_as<int>(doc, "source"),
                       get_as<int>(doc, "target"), get_as<double>(doc, "deadline"),
                       get_as<std::uint64_t>(doc, "seed"));
}

nlohmann::json to_json(const AssignmentInstance& inst) {
  return nlohmann::json{{"num_items", inst.num_items}, {"num_devices", inst.num_devices},
                        {"mem", inst.mem},             {"capacity", inst.capacity},
                        {"weights", inst.weights},     {"seed", inst.seed},
                        {"synthetic", true}};
}

AssignmentInstance assignment_from_json(const nlohmann::json& doc) {
  require_keys(doc, {"num_items", "num_devices", "mem", "capacity", "weights", "seed", "synthetic"},
               "assignment instance");
  AssignmentInstance inst;
  inst.num_items = get_as<int>(doc, "num_items");
  inst.num_devices = get_as<int>(doc, "num_devices");
  inst.mem = get_as<std::vector<double>>(doc, "mem");
  inst.capacity = get_as<double>(doc, "capacity");
  inst.weights = get_as<std::vector<double>>(doc, "weights");
  inst.seed = get_as<std::uint64_t>(doc, "seed");
  inst.validate();
  return inst;
}

nlohmann::json to_json(const ToyInstance& inst) { return nlohmann::json{{"y", inst.y}}; }

ToyInstance toy_from_json(const nlohmann::json& doc) {
  require_keys(doc, {"y"}, "toy instance");
  return ToyInstance(get_as<double>(doc, "y"));
}

nlohmann::json to_json(const PathSolution& sol) {
  return nlohmann::json{{"node_seq", sol.node_seq}, {"x", sol.x}};
}

nlohmann::json to_json(const AssignmentSolution& sol) {
  return nlohmann::json{{"assign", sol.assign}, {"x", sol.x}};
}

}  // namespace surco
