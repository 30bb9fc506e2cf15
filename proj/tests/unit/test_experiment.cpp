#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "surco/csv.hpp"
#include "surco/errors.hpp"
#include "surco/experiment.hpp"
#include "surco/objectives.hpp"

using namespace surco;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("surco_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_route(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.rows = 3;
  cfg.cols = 3;
  cfg.train_count = 4;
  cfg.test_count = 4;
  cfg.out_dir = out.string();
  return cfg;
}

std::vector<std::vector<std::string>> rows_of_kind(const fs::path& csv, const std::string& kind) {
  std::vector<std::vector<std::string>> out;
  for (auto& r : parse_csv(slurp(csv))) {
    if (!r.empty() && r[0] == kind) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Config, DefaultsAreValid) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.train_count, 25);
  EXPECT_EQ(cfg.test_count, 25);
  EXPECT_EQ(cfg.hash().size(), 16u);
}

TEST(Config, JsonRoundTripKeepsHash) {
  ExperimentConfig cfg;
  cfg.regimes = {DeadlineRegime::loose(), DeadlineRegime::tight()};
  cfg.prior.lambda_reg = 5.0;
  const auto back = ExperimentConfig::from_json(nlohmann::json::parse(cfg.to_json().dump()));
  EXPECT_EQ(back.hash(), cfg.hash());
  EXPECT_EQ(back.to_json(), cfg.to_json());
}

TEST(Config, HashIgnoresOutputAndJobs) {
  ExperimentConfig a;
  ExperimentConfig b;
  b.out_dir = "elsewhere";
  b.jobs = 4;
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 8;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(ExperimentConfig::from_json({{"colour", 1}}), ParameterError);
  EXPECT_THROW(ExperimentConfig::from_json({{"zero", {{"speed", 1}}}}), ParameterError);
  EXPECT_THROW(ExperimentConfig::from_json({{"domain", "maze"}}), ParameterError);
  EXPECT_THROW(ExperimentConfig::from_json({{"regime", "late"}}), ParameterError);
  EXPECT_THROW(ExperimentConfig::from_json({{"rows", "five"}}), ParameterError);
}

TEST(Config, RegimeAllAndInfinity) {
  const auto cfg = ExperimentConfig::from_json({{"regime", "all"}, {"prior", {{"lambda_reg", "inf"}}}});
  EXPECT_EQ(cfg.regimes.size(), 3u);
  EXPECT_TRUE(std::isinf(cfg.prior.lambda_reg));
}

TEST(Config, RouteOnlyMethodsRejectedElsewhere) {
  EXPECT_THROW(ExperimentConfig::from_json({{"domain", "toy"}, {"method", "heuristic"}}),
               ParameterError);
  EXPECT_THROW(ExperimentConfig::from_json({{"domain", "toy"}, {"method", "prior"}}),
               ParameterError);
}

TEST(Generate, WritesSplitsDeterministically) {
  const fs::path out = scratch("generate");
  const auto cfg = small_route(out);
  const auto first = cmd_generate(cfg);
  EXPECT_EQ(first.files.size(), 8u);
  const std::string bytes = slurp(first.files[2]);
  fs::remove_all(out);
  const auto second = cmd_generate(cfg);
  EXPECT_EQ(slurp(second.files[2]), bytes);
  EXPECT_TRUE(fs::exists(out / "instances" / "manifest.json"));
  fs::remove_all(out);
}

TEST(Generate, DefaultRouteCounts) {
  const fs::path out = scratch("generate_default");
  ExperimentConfig cfg;
  cfg.out_dir = out.string();
  const auto summary = cmd_generate(cfg);
  EXPECT_EQ(summary.files.size(), 50u);
  EXPECT_TRUE(summary.warnings.empty());
  fs::remove_all(out);
}

TEST(Generate, WarnsWhenOracleWillBeUnavailable) {
  const fs::path out = scratch("generate_big");
  ExperimentConfig cfg = small_route(out);
  cfg.rows = 6;
  cfg.cols = 5;
  cfg.methods = {Method::kZero, Method::kLet};
  const auto summary = cmd_generate(cfg);
  ASSERT_EQ(summary.warnings.size(), 1u);
  EXPECT_NE(summary.warnings[0].find("exact oracle"), std::string::npos);
  fs::remove_all(out);
}

TEST(Run, LetRowsMatchObjectiveAndGapsAreNonNegative) {
  const fs::path out = scratch("run");
  const auto cfg = small_route(out);
  cmd_generate(cfg);
  const auto summary = cmd_run(cfg);
  for (const auto& row : summary.rows) {
    ASSERT_TRUE(row.has_gap);
    EXPECT_GE(row.oracle_gap, -1e-15);
    if (row.method == Method::kLet) {
      const auto inst =
          route_from_json(read_json_file(out / "instances" / "test" / (row.instance + ".json")));
      EXPECT_EQ(row.f, ontime_objective(let_path(inst).x, inst).value);
    }
  }
  EXPECT_EQ(rows_of_kind(summary.csv_path, "instance").size(), 16u);
  EXPECT_EQ(rows_of_kind(summary.csv_path, "mean").size(), 4u);
  EXPECT_EQ(rows_of_kind(summary.csv_path, "head_to_head").size(), 6u);
  EXPECT_TRUE(fs::exists(out / "config.resolved.json"));
  fs::remove_all(out);
}

TEST(Run, IdenticalConfigGivesIdenticalRows) {
  const fs::path out = scratch("run_repeat");
  auto cfg = small_route(out);
  cmd_generate(cfg);
  auto strip_time = [](std::vector<std::vector<std::string>> rows) {
    for (auto& r : rows) r[8] = "";  // wall_ms
    return rows;
  };
  const auto a = strip_time(parse_csv(slurp(cmd_run(cfg).csv_path)));
  cfg.jobs = 3;
  const auto b = strip_time(parse_csv(slurp(cmd_run(cfg).csv_path)));
  EXPECT_EQ(a, b);
  fs::remove_all(out);
}

TEST(Run, MissingInstancesIsIoError) {
  const fs::path out = scratch("run_missing");
  EXPECT_THROW(cmd_run(small_route(out)), IoError);
  fs::remove_all(out);
}

TEST(Run, PriorWithoutModelIsIoError) {
  const fs::path out = scratch("run_nomodel");
  auto cfg = small_route(out);
  cfg.methods = {Method::kPrior};
  cmd_generate(cfg);
  EXPECT_THROW(cmd_run(cfg), IoError);
  fs::remove_all(out);
}

TEST(Run, PriorAndHybridAfterTraining) {
  const fs::path out = scratch("run_prior");
  auto cfg = small_route(out);
  cfg.methods = {Method::kPrior, Method::kHybrid, Method::kOracle};
  cfg.prior.epochs = 20;
  cmd_generate(cfg);
  const auto models = cmd_train_prior(cfg);
  ASSERT_EQ(models.size(), 1u);
  EXPECT_TRUE(validate_document(read_json_file(models[0])).empty());
  const auto summary = cmd_run(cfg);
  for (std::size_t i = 0; i < summary.rows.size(); i += 3) {
    // Rows per instance sort as hybrid, oracle, prior.
    EXPECT_EQ(summary.rows[i].method, Method::kHybrid);
    EXPECT_EQ(summary.rows[i + 2].method, Method::kPrior);
    EXPECT_GE(summary.rows[i].f, summary.rows[i + 2].f);
    EXPECT_EQ(summary.rows[i + 2].objective_calls, 0u);
    EXPECT_EQ(summary.rows[i + 2].solver_calls, 1u);
  }
  for (const auto& r : rows_of_kind(summary.csv_path, "instance")) {
    if (r[4] == "prior" || r[4] == "hybrid") EXPECT_EQ(r[15], "prior-on-routing extension");
  }
  fs::remove_all(out);
}

TEST(Run, AssignmentRowsAreFlaggedSynthetic) {
  const fs::path out = scratch("run_assignment");
  ExperimentConfig cfg;
  cfg.domain = Domain::kAssignment;
  cfg.items = 5;
  cfg.devices = 2;
  cfg.test_count = 3;
  cfg.train_count = 2;
  cfg.methods = {Method::kZero, Method::kOracle};
  cfg.out_dir = out.string();
  cmd_generate(cfg);
  const auto summary = cmd_run(cfg);
  for (const auto& row : summary.rows) EXPECT_GE(row.oracle_gap, -1e-12);
  for (const auto& r : rows_of_kind(summary.csv_path, "instance")) {
    EXPECT_EQ(r[1], "assignment-synthetic");
  }
  fs::remove_all(out);
}

TEST(Run, ToyRecoversVertices) {
  const fs::path out = scratch("run_toy");
  ExperimentConfig cfg;
  cfg.domain = Domain::kToy;
  cfg.test_count = 10;
  cfg.methods = {Method::kZero, Method::kOracle};
  cfg.out_dir = out.string();
  cmd_generate(cfg);
  for (const auto& row : cmd_run(cfg).rows) EXPECT_EQ(row.oracle_gap, 0.0);
  fs::remove_all(out);
}

TEST(Theory, TablesHaveExpectedShape) {
  const fs::path out = scratch("theory");
  ExperimentConfig cfg;
  cfg.out_dir = out.string();
  const auto path = cmd_theory(cfg);
  std::vector<double> direct;
  for (const auto& r : rows_of_kind(path, "lipschitz")) {
    if (r[1] == "direct") direct.push_back(std::stod(r[3]));
    if (r[1] == "surrogate") EXPECT_LE(std::stod(r[3]), 1.0 + 1e-6);
  }
  ASSERT_EQ(direct.size(), 3u);
  EXPECT_LT(direct[0], direct[1]);
  EXPECT_LT(direct[1], direct[2]);
  for (const auto& r : rows_of_kind(path, "cover_random")) {
    EXPECT_NEAR(std::stod(r[10]), M_PI / 4.0 * 100.0, 1e-9);
    if (std::stoi(r[6]) < 79) EXPECT_EQ(r[9], "0");
  }
  const auto grid = rows_of_kind(path, "cover_grid");
  ASSERT_EQ(grid.size(), 1u);
  EXPECT_EQ(grid[0][9], "1");
  EXPECT_LE(std::stod(grid[0][11]), 0.01);
  fs::remove_all(out);
}

TEST(Validate, RouteInstanceChecks) {
  const auto inst = generate_route_instances(3, 3, 1, DeadlineRegime::tight(), 1)[0];
  EXPECT_TRUE(validate_document(to_json(inst)).empty());
  auto doc = to_json(inst);
  doc["deadline"] = inst.deadline() * 1.05;
  EXPECT_FALSE(validate_document(doc).empty());
}

TEST(Validate, AssignmentAndConfig) {
  EXPECT_TRUE(validate_document(to_json(generate_assignment_instances(4, 2, 1, 1)[0])).empty());
  EXPECT_TRUE(validate_document(ExperimentConfig{}.to_json()).empty());
  EXPECT_THROW(validate_document(nlohmann::json{{"nonsense", 1}}), ParameterError);
}
