#include <gtest/gtest.h>

#include <cmath>

#include "surco/baselines.hpp"
#include "surco/errors.hpp"
#include "surco/random.hpp"
#include "surco/surco.hpp"

using namespace surco;

namespace {

std::vector<PriorSample> route_samples(int rows, int count, DeadlineRegime r, std::uint64_t seed) {
  std::vector<PriorSample> out;
  for (const auto& inst : generate_route_instances(rows, rows, count, r, seed)) {
    out.push_back(make_route_sample(inst));
  }
  return out;
}

}  // namespace

TEST(ZeroConfig, Validation) {
  ZeroConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.alpha = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.patience = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.init_lo = 2.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(SurcoZero, ToySmallAngleFindsFirstAxis) {
  const ToyInstance inst(0.1);
  const ToyOracle oracle;
  const Objective obj = make_toy_objective(inst);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ZeroConfig cfg;
    cfg.seed = seed;
    const auto rec = surco_zero(oracle, obj, cfg);
    EXPECT_EQ(rec.best_x, (std::vector<double>{1.0, 0.0})) << seed;
    EXPECT_LE(rec.steps.size(), 200u);
  }
}

TEST(SurcoZero, MatchesOracleOn3x3) {
  int hits = 0;
  const auto insts = generate_route_instances(3, 3, 20, DeadlineRegime::tight(), 55);
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const PathOracle oracle(insts[i]);
    const Objective obj = make_ontime_objective(insts[i]);
    ZeroConfig cfg;
    cfg.seed = derive_seed(55, i);
    const auto rec = surco_zero(oracle, obj, cfg);
    if (std::abs(rec.best_f - exact_oracle(insts[i]).value) <= 1e-12) ++hits;
  }
  EXPECT_GE(hits, 18);
}

TEST(SurcoZero, ZeroGradientFixpoint) {
  // At x = (0,0) the toy loss gradient vanishes, so c never moves.
  const ToyOracle oracle;
  const Objective obj = make_toy_objective(ToyInstance(0.7));
  ZeroConfig cfg;
  cfg.init_mode = InitMode::kWarmStart;
  cfg.max_steps = 20;
  cfg.patience = 5;
  const std::vector<double> start{-1.0, -1.0};
  const auto rec = surco_zero(oracle, obj, cfg, start);
  EXPECT_EQ(rec.best_x, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(rec.best_c, start);
  EXPECT_EQ(rec.best_step, 0);
  for (const auto& s : rec.steps) EXPECT_EQ(s.f, 0.0);
}

TEST(SurcoZero, BestSeenNotLastIterate) {
  const auto inst = generate_route_instances(4, 4, 1, DeadlineRegime::loose(), 3)[0];
  const PathOracle oracle(inst);
  const Objective obj = make_ontime_objective(inst);
  ZeroConfig cfg;
  cfg.seed = 4;
  const auto rec = surco_zero(oracle, obj, cfg);
  double best = -1.0;
  for (const auto& s : rec.steps) best = std::max(best, s.f);
  EXPECT_EQ(rec.best_f, best);
  EXPECT_DOUBLE_EQ(obj(rec.best_x).value, rec.best_f);
}

TEST(SurcoZero, CallBudget) {
  const auto inst = generate_route_instances(3, 3, 1, DeadlineRegime::normal(), 3)[0];
  const PathOracle oracle(inst);
  const Objective obj = make_ontime_objective(inst);
  ZeroConfig cfg;
  cfg.max_steps = 30;
  cfg.patience = 30;
  const auto rec = surco_zero(oracle, obj, cfg);
  EXPECT_EQ(rec.objective_calls, rec.steps.size());
  // Two solves per step except the last, which skips the backward call.
  EXPECT_EQ(rec.solver_calls, 2 * rec.steps.size() - 1);
  EXPECT_LE(rec.steps.size(), 30u);
}

TEST(SurcoZero, Deterministic) {
  const auto inst = generate_route_instances(5, 5, 1, DeadlineRegime::tight(), 3)[0];
  const PathOracle oracle(inst);
  const Objective obj = make_ontime_objective(inst);
  ZeroConfig cfg;
  cfg.seed = 9;
  const auto a = surco_zero(oracle, obj, cfg);
  const auto b = surco_zero(oracle, obj, cfg);
  EXPECT_EQ(a.best_x, b.best_x);
  EXPECT_EQ(a.best_c, b.best_c);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) EXPECT_EQ(a.steps[i].f, b.steps[i].f);
}

TEST(SurcoZero, WarmStartNeedsCosts) {
  const ToyOracle oracle;
  const Objective obj = make_toy_objective(ToyInstance(0.2));
  ZeroConfig cfg;
  cfg.init_mode = InitMode::kWarmStart;
  EXPECT_THROW(surco_zero(oracle, obj, cfg), ParameterError);
}

TEST(SurcoZero, DimensionMismatch) {
  const auto inst = generate_route_instances(3, 3, 1, DeadlineRegime::normal(), 3)[0];
  const PathOracle oracle(inst);
  const Objective obj = make_toy_objective(ToyInstance(0.2));
  EXPECT_THROW(surco_zero(oracle, obj, ZeroConfig{}), ParameterError);
}

TEST(SurcoZero, AssignmentNeverWorseThanStart) {
  for (const auto& inst : generate_assignment_instances(6, 3, 5, 2)) {
    const AssignmentOracle oracle(inst);
    const Objective obj = make_assignment_objective(inst);
    ZeroConfig cfg;
    cfg.seed = inst.seed;
    const auto rec = surco_zero(oracle, obj, cfg);
    EXPECT_LE(rec.best_f, rec.steps.front().f);
    EXPECT_TRUE(is_valid_assignment(inst, oracle.solve_assignment(rec.best_c)));
  }
}

TEST(PriorModel, JsonRoundTrip) {
  const PriorModel model = PriorModel::route(12);
  const PriorModel back = prior_from_json(nlohmann::json::parse(to_json(model).dump()));
  EXPECT_EQ(model, back);
  auto doc = to_json(model);
  doc["extra"] = 1;
  EXPECT_THROW(prior_from_json(doc), ParameterError);
  doc = to_json(model);
  doc["version"] = 2;
  EXPECT_THROW(prior_from_json(doc), ParameterError);
  doc = to_json(model);
  doc["weights"] = std::vector<double>{1.0};
  EXPECT_THROW(prior_from_json(doc), ParameterError);
}

TEST(PriorFeatures, RouteColumns) {
  const auto inst = generate_route_instances(3, 3, 1, DeadlineRegime::loose(), 3)[0];
  const auto f = route_edge_features(inst);
  ASSERT_EQ(f.rows, 12u);
  ASSERT_EQ(f.cols, 3u);
  for (std::size_t e = 0; e < f.rows; ++e) {
    EXPECT_EQ(f(e, 0), inst.mu()[e]);
    EXPECT_EQ(f(e, 1), inst.sigma2()[e]);
    EXPECT_NEAR(f(e, 2), 1.1, 1e-12);
  }
}

TEST(PriorInfer, MeanPredictorGivesLetPath) {
  PriorModel model = PriorModel::route(1);
  model.net = Mlp({3, 1}, 1);
  model.net.set_parameters({1.0, 0.0, 0.0, 0.0});
  for (const auto& inst : generate_route_instances(4, 4, 5, DeadlineRegime::normal(), 8)) {
    const PathOracle oracle(inst);
    EXPECT_EQ(surco_prior_infer(model, oracle, route_edge_features(inst)), let_path(inst).x);
  }
}

TEST(PriorInfer, OneSolveNoObjective) {
  const auto inst = generate_route_instances(3, 3, 1, DeadlineRegime::normal(), 8)[0];
  const PathOracle oracle(inst);
  const Objective obj = make_ontime_objective(inst);
  surco_prior_infer(PriorModel::route(3), oracle, route_edge_features(inst));
  EXPECT_EQ(oracle.calls(), 1u);
  EXPECT_EQ(obj.calls(), 0u);
}

TEST(PriorTrain, Deterministic) {
  const auto samples = route_samples(3, 6, DeadlineRegime::normal(), 4);
  PriorTrainConfig cfg;
  cfg.epochs = 20;
  const auto a = surco_prior_train(samples, PriorModel::route(2), cfg);
  const auto b = surco_prior_train(samples, PriorModel::route(2), cfg);
  EXPECT_EQ(a.model.net.parameters(), b.model.net.parameters());
  EXPECT_EQ(a.epoch_mean_f, b.epoch_mean_f);
}

TEST(PriorTrain, SingleInstanceApproachesZero) {
  const auto inst = generate_route_instances(4, 4, 1, DeadlineRegime::tight(), 21)[0];
  std::vector<PriorSample> samples{make_route_sample(inst)};
  PriorTrainConfig cfg;
  cfg.epochs = 600;
  cfg.lr_theta = 1e-2;
  const auto trained = surco_prior_train(samples, PriorModel::route(5), cfg);
  const PathOracle oracle(inst);
  const Objective obj = make_ontime_objective(inst);
  const double prior_f = obj(surco_prior_infer(trained.model, oracle, samples[0].features)).value;
  ZeroConfig zc;
  zc.seed = 1;
  const double zero_f = surco_zero(oracle, obj, zc).best_f;
  EXPECT_GE(prior_f, 0.95 * zero_f);
}

TEST(PriorTrain, LargePenaltyTiesCostsToPrediction) {
  const auto samples = route_samples(3, 4, DeadlineRegime::normal(), 6);
  PriorTrainConfig cfg;
  cfg.epochs = 50;
  cfg.lambda_reg = 1e6;
  const auto res = surco_prior_train(samples, PriorModel::route(3), cfg);
  ASSERT_EQ(res.instance_costs.size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto pred = res.model.predict(samples[i].features);
    for (std::size_t e = 0; e < pred.size(); ++e) {
      EXPECT_NEAR(res.instance_costs[i][e], pred[e], 1e-2);
    }
  }
}

TEST(PriorTrain, ZeroPenaltyIsIndependentPerInstance) {
  const auto samples = route_samples(3, 2, DeadlineRegime::normal(), 6);
  PriorTrainConfig cfg;
  cfg.epochs = 10;
  cfg.lambda_reg = 0.0;
  const PriorModel init = PriorModel::route(3);
  const auto res = surco_prior_train(samples, init, cfg);
  // No penalty gradient reaches the network.
  EXPECT_EQ(res.model.net.parameters(), init.net.parameters());
}

TEST(PriorTrain, RejectsBadInput) {
  PriorTrainConfig cfg;
  EXPECT_THROW(surco_prior_train({}, PriorModel::route(1), cfg), ParameterError);
  const auto samples = route_samples(3, 1, DeadlineRegime::normal(), 1);
  cfg.epochs = 0;
  EXPECT_THROW(surco_prior_train(samples, PriorModel::route(1), cfg), ParameterError);
  cfg = {};
  cfg.lambda_reg = -1.0;
  EXPECT_THROW(surco_prior_train(samples, PriorModel::route(1), cfg), ParameterError);
}

TEST(PriorTrain, BeatsRandomCostsOnHeldOutGrids) {
  const auto train = route_samples(5, 25, DeadlineRegime::normal(), derive_seed(7, 1));
  PriorTrainConfig cfg;
  const auto trained = surco_prior_train(train, PriorModel::route(11), cfg);
  double prior_sum = 0.0;
  double random_sum = 0.0;
  Rng rng(13);
  for (const auto& inst : generate_route_instances(5, 5, 25, DeadlineRegime::normal(),
                                                   derive_seed(7, 2))) {
    const PathOracle oracle(inst);
    const Objective obj = make_ontime_objective(inst);
    prior_sum += obj(surco_prior_infer(trained.model, oracle, route_edge_features(inst))).value;
    std::vector<double> c(static_cast<std::size_t>(inst.num_edges()));
    for (double& v : c) v = rng.uniform(0.1, 1.0);
    random_sum += obj(oracle.solve(c)).value;
  }
  EXPECT_GT(prior_sum, random_sum);
}

TEST(Hybrid, OneStepEqualsInference) {
  const auto inst = generate_route_instances(4, 4, 1, DeadlineRegime::normal(), 2)[0];
  const PathOracle oracle(inst);
  const Objective obj = make_ontime_objective(inst);
  const PriorModel model = PriorModel::route(4);
  const auto features = route_edge_features(inst);
  ZeroConfig cfg;
  cfg.max_steps = 1;
  cfg.patience = 1;
  const auto rec = surco_hybrid(model, oracle, obj, features, cfg);
  EXPECT_EQ(rec.best_x, surco_prior_infer(model, oracle, features));
  EXPECT_EQ(rec.best_c, model.predict(features));
}

TEST(Hybrid, NeverWorseThanInference) {
  const PriorModel model = PriorModel::route(4);
  for (const auto& inst : generate_route_instances(4, 4, 8, DeadlineRegime::loose(), 2)) {
    const PathOracle oracle(inst);
    const Objective obj = make_ontime_objective(inst);
    const auto features = route_edge_features(inst);
    const double infer_f = obj(surco_prior_infer(model, oracle, features)).value;
    EXPECT_GE(surco_hybrid(model, oracle, obj, features, ZeroConfig{}).best_f, infer_f);
  }
}
