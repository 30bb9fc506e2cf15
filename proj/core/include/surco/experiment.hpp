#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "surco/baselines.hpp"
#include "surco/instances.hpp"
#include "surco/surco.hpp"

namespace surco {

enum class Domain { kRoute, kToy, kAssignment };
enum class Method { kZero, kPrior, kHybrid, kHeuristic, kOracle, kLet };

Domain parse_domain(std::string_view name);
std::string_view domain_name(Domain d);
Method parse_method(std::string_view name);
std::string_view method_name(Method m);

/// Settings for the theory tables.
struct TheoryConfig {
  double eps = 0.01;
  std::vector<double> spacings{0.1, 0.01, 0.001};
  int queries = 1000;
  std::vector<int> dataset_sizes{10, 40, 78, 79, 100, 160};
  int trials = 20;
};

/// Full description of an experiment run. Every output embeds the resolved
/// document and its hash.
struct ExperimentConfig {
  Domain domain = Domain::kRoute;
  std::vector<DeadlineRegime> regimes{DeadlineRegime::normal()};
  std::vector<Method> methods{Method::kZero, Method::kHeuristic, Method::kOracle, Method::kLet};
  int rows = 5;
  int cols = 5;
  int items = 8;
  int devices = 3;
  int train_count = 25;
  int test_count = 25;
  std::uint64_t seed = 7;
  ZeroConfig zero;
  HeuristicConfig heuristic;
  PriorTrainConfig prior;
  TheoryConfig theory;
  std::string out_dir = "surco_out";
  int jobs = 1;

  /// Rejects unknown keys at every level; missing keys keep their defaults.
  static ExperimentConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
  /// FNV-1a of the canonical resolved document, as 16 hex digits.
  std::string hash() const;
  void validate() const;
};

/// Reads a JSON file; throws IoError if unreadable, ParameterError if malformed.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

struct GenerateSummary {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

/// Writes train and test instance files under <out>/instances.
GenerateSummary cmd_generate(const ExperimentConfig& cfg);

/// One evaluated (instance, method) pair.
struct ResultRow {
  std::string instance;
  Method method = Method::kZero;
  std::string regime;
  double f = 0.0;
  double oracle_gap = 0.0;
  bool has_gap = false;
  double wall_ms = 0.0;
  std::size_t solver_calls = 0;
  std::size_t objective_calls = 0;
  std::uint64_t seed = 0;
};

struct HeadToHead {
  std::string regime;
  Method method = Method::kZero;
  Method opponent = Method::kZero;
  int wins = 0;
  int losses = 0;
  int ties = 0;
};

struct RunSummary {
  std::vector<ResultRow> rows;  ///< sorted by regime, instance, method
  std::vector<HeadToHead> head_to_head;
  std::filesystem::path csv_path;
};

/// Evaluates every configured method on the test instances and writes
/// <out>/results.csv. Prior and hybrid require a model from cmd_train_prior.
RunSummary cmd_run(const ExperimentConfig& cfg);

/// Trains one prior per regime on the train split; writes <out>/models/.
std::vector<std::filesystem::path> cmd_train_prior(const ExperimentConfig& cfg);

/// Writes <out>/theory.csv with the Lipschitz, cover and 1-NN tables.
std::filesystem::path cmd_theory(const ExperimentConfig& cfg);

/// Invariant violations found in an instance, model or config document
/// (empty when valid). Throws ParameterError for unrecognized documents.
std::vector<std::string> validate_document(const nlohmann::json& doc);

std::filesystem::path prior_model_path(const ExperimentConfig& cfg, DeadlineRegime regime);

}  // namespace surco
