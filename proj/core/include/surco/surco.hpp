#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surco/diffsolver.hpp"
#include "surco/instances.hpp"
#include "surco/mlp.hpp"
#include "surco/objectives.hpp"
#include "surco/solvers.hpp"

namespace surco {

enum class InitMode { kRandom, kWarmStart };

/// Default blackbox perturbation scale for surco_zero and prior training.
inline constexpr double kDefaultLambda = 50.0;

/// Per-instance surrogate-cost optimization settings.
struct ZeroConfig {
  double alpha = 0.05;
  int max_steps = 200;
  int patience = 50;
  InitMode init_mode = InitMode::kRandom;
  std::uint64_t seed = 0;
  /// Random initialization draws every coordinate from U(init_lo, init_hi).
  double init_lo = 0.1;
  double init_hi = 1.0;
  /// Perturbation scale for the loop. Small values leave the perturbed path
  /// unchanged on most steps and the loop stalls.
  BlackboxConfig blackbox{kDefaultLambda};

  void validate() const;
};

struct StepRecord {
  int step = 0;
  int instance_id = 0;
  double f = 0.0;          ///< objective value in its natural direction
  double best_loss = 0.0;  ///< best minimization loss seen so far
  double cost_norm = 0.0;  ///< Euclidean norm of c before the update
  double wall_ms = 0.0;    ///< elapsed since the run started
};

struct TrainRecord {
  std::vector<StepRecord> steps;
  std::vector<double> best_x;
  std::vector<double> best_c;
  double best_f = 0.0;
  double best_loss = std::numeric_limits<double>::infinity();
  int best_step = -1;
  std::size_t solver_calls = 0;
  std::size_t objective_calls = 0;
};

/// Minimizes the objective loss of g(c) over c with Adam and blackbox
/// gradients. Returns the best solution seen over all iterations, not the last
/// iterate. Warm-start mode requires `warm_start`.
TrainRecord surco_zero(const SolverOracle& oracle, const Objective& objective,
                       const ZeroConfig& cfg, std::span<const double> warm_start = {},
                       int instance_id = 0);

// ---------------------------------------------------------------------------
// Prior network

struct FeatureSpec {
  std::string domain;
  std::vector<std::string> names;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Edge-wise (or item/device pair-wise) cost predictor c^(y; theta) sharing one
/// network across all decision variables of an instance.
struct PriorModel {
  static constexpr int kVersion = 1;

  Mlp net;
  FeatureSpec features;
  std::uint64_t seed = 0;

  /// [3, 32, 32, 1] over (mu, sigma2, deadline / LET length) per edge.
  static PriorModel route(std::uint64_t seed);
  /// [3, 32, 32, 1] over (mem / capacity, weight, device / num_devices) per pair.
  static PriorModel assignment(std::uint64_t seed);

  std::vector<double> predict(const FeatureMatrix& features) const;

  friend bool operator==(const PriorModel&, const PriorModel&) = default;
};

FeatureMatrix route_edge_features(const RouteInstance& inst);
FeatureMatrix assignment_pair_features(const AssignmentInstance& inst);

nlohmann::json to_json(const PriorModel& model);
PriorModel prior_from_json(const nlohmann::json& doc);

/// One training instance: its solver, its objective and its feature rows.
struct PriorSample {
  std::shared_ptr<const SolverOracle> oracle;
  std::shared_ptr<const Objective> objective;
  FeatureMatrix features;
};

PriorSample make_route_sample(const RouteInstance& inst);
PriorSample make_assignment_sample(const AssignmentInstance& inst);

struct PriorTrainConfig {
  /// Infinity trains the network end to end through the solver; a finite value
  /// keeps free per-instance costs tied to the prediction by
  /// lambda_reg * ||c_i - c^(y_i)||_2.
  static constexpr double kDirect = std::numeric_limits<double>::infinity();

  int epochs = 300;
  double lambda_reg = kDirect;
  double lr_theta = 1e-3;
  double lr_costs = 0.05;
  int batch_size = 0;  ///< 0 uses the whole training set every epoch
  std::uint64_t seed = 0;
  BlackboxConfig blackbox{kDefaultLambda};

  void validate() const;
};

struct PriorTrainResult {
  PriorModel model;
  /// Free per-instance costs after training (finite lambda_reg only).
  std::vector<std::vector<double>> instance_costs;
  /// Mean objective value over each epoch's batch, natural direction.
  std::vector<double> epoch_mean_f;
  int best_epoch = -1;
};

/// Trains `init` in place of a fresh model. With lambda_reg infinite the
/// returned parameters are those with the best epoch mean loss.
PriorTrainResult surco_prior_train(std::span<const PriorSample> samples, PriorModel init,
                                   const PriorTrainConfig& cfg);

/// One forward pass and one solver call; the objective is never consulted.
std::vector<double> surco_prior_infer(const PriorModel& model, const SolverOracle& oracle,
                                      const FeatureMatrix& features);

/// surco_zero started from the prior's predicted costs.
TrainRecord surco_hybrid(const PriorModel& model, const SolverOracle& oracle,
                         const Objective& objective, const FeatureMatrix& features,
                         const ZeroConfig& cfg, int instance_id = 0);

}  // namespace surco
