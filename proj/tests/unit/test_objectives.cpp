#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "surco/errors.hpp"
#include "surco/objectives.hpp"
#include "surco/random.hpp"
#include "surco/solvers.hpp"

using namespace surco;

TEST(NormalCdf, MatchesQuadrature) {
  for (double z : {-6.0, -2.5, -1.0, -0.1, 0.0, 0.3, 1.0, 2.0, 4.0}) {
    EXPECT_NEAR(normal_cdf(z), ::surco::testing::simpson_cdf(z), 1e-12) << z;
  }
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_pdf(0.0), 1.0 / std::sqrt(2.0 * M_PI), 1e-15);
}

TEST(OntimeObjective, SingleEdgeAtDeadline) {
  const RouteInstance inst(1, 2, {0.7}, {0.2}, 0, 1, 0.7, 0);
  const auto v = ontime_objective(std::vector<double>{1.0}, inst);
  EXPECT_DOUBLE_EQ(v.value, 0.5);
}

TEST(OntimeObjective, OneStandardDeviationOfSlack) {
  // T - m = s with m = 0.5, s = 0.2.
  const RouteInstance inst(1, 2, {0.5}, {0.04}, 0, 1, 0.7, 0);
  const auto v = ontime_objective(std::vector<double>{1.0}, inst);
  EXPECT_NEAR(v.value, ::surco::testing::simpson_cdf(1.0), 1e-12);
}

TEST(OntimeObjective, ZeroVarianceIsDegenerate) {
  const auto inst = generate_route_instances(2, 2, 1, DeadlineRegime::normal(), 1)[0];
  EXPECT_THROW(ontime_objective(std::vector<double>(4, 0.0), inst), DegenerateError);
  EXPECT_THROW(ontime_objective(std::vector<double>(3, 1.0), inst), ParameterError);
}

TEST(OntimeObjective, GradientMatchesFiniteDifferences) {
  Rng rng(8);
  for (const auto& inst : generate_route_instances(4, 4, 10, DeadlineRegime::tight(), 2)) {
    std::vector<double> x(static_cast<std::size_t>(inst.num_edges()));
    for (double& v : x) v = rng.uniform(0.05, 0.95);
    const auto v = ontime_objective(x, inst);
    const double err = ::surco::testing::fd_relative_error(
        [&](std::span<const double> p) { return ontime_objective(p, inst).value; }, x, v.grad);
    EXPECT_LT(err, 1e-5);
  }
}

TEST(ToyObjective, Vertices) {
  const ToyInstance zero(0.0);
  EXPECT_DOUBLE_EQ(toy_objective(std::vector<double>{1.0, 0.0}, zero).value, 1.0);
  const ToyInstance right(M_PI / 2.0);
  EXPECT_NEAR(toy_objective(std::vector<double>{0.0, 1.0}, right).value, 1.0, 1e-15);
  const auto origin = toy_objective(std::vector<double>{0.0, 0.0}, ToyInstance(0.4));
  EXPECT_EQ(origin.value, 0.0);
  EXPECT_EQ(origin.grad, (std::vector<double>{0.0, 0.0}));
}

TEST(ToyObjective, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  for (int k = 0; k < 50; ++k) {
    const ToyInstance inst(rng.uniform(0.0, M_PI / 2.0));
    const double a = rng.uniform();
    const double b = rng.uniform() * (1.0 - a);
    const std::vector<double> x{a, b};
    const auto v = toy_objective(x, inst);
    EXPECT_LT(::surco::testing::fd_relative_error(
                  [&](std::span<const double> p) { return toy_objective(p, inst).value; }, x,
                  v.grad),
              1e-6);
  }
}

TEST(AssignmentObjective, SingleTerm) {
  const AssignmentInstance inst{1, 1, {0.5}, 1.0, {0.42}, 0};
  EXPECT_NEAR(assignment_objective(std::vector<double>{1.0}, inst).value,
              0.42 + 0.3 * std::sqrt(1.0 + 1e-9), 1e-15);
  EXPECT_NEAR(assignment_objective(std::vector<double>{1.0}, inst).value, 0.72, 1e-9);
}

TEST(AssignmentObjective, SymmetricSplit) {
  const AssignmentInstance inst{2, 2, {0.5, 0.5}, 1.0, {0.6, 0.6}, 0};
  const auto v = assignment_objective(std::vector<double>{1.0, 0.0, 0.0, 1.0}, inst);
  EXPECT_NEAR(v.value, 0.6 + 0.3 * std::sqrt(1.0 + 1e-9), 1e-14);
}

TEST(AssignmentObjective, RowSumEnforced) {
  const AssignmentInstance inst{2, 2, {0.5, 0.5}, 1.0, {0.6, 0.6}, 0};
  EXPECT_THROW(assignment_objective(std::vector<double>{1.0, 1.0, 0.0, 1.0}, inst),
               ParameterError);
  EXPECT_NO_THROW(
      assignment_objective(std::vector<double>{1.0, 1.0, 0.0, 1.0}, inst, RowCheck::kSkip));
}

TEST(AssignmentObjective, GradientMatchesFiniteDifferences) {
  Rng rng(12);
  for (const auto& inst : generate_assignment_instances(5, 3, 10, 6)) {
    std::vector<double> x(static_cast<std::size_t>(inst.num_variables()));
    for (int t = 0; t < inst.num_items; ++t) {
      double sum = 0.0;
      for (int d = 0; d < inst.num_devices; ++d) sum += x[inst.index(t, d)] = rng.uniform(0.1, 1.0);
      for (int d = 0; d < inst.num_devices; ++d) x[inst.index(t, d)] /= sum;
    }
    const auto v = assignment_objective(x, inst);
    const double err = ::surco::testing::fd_relative_error(
        [&](std::span<const double> p) {
          return assignment_objective(p, inst, RowCheck::kSkip).value;
        },
        x, v.grad);
    EXPECT_LT(err, 1e-5);
  }
}

TEST(ObjectiveWrapper, LossFlipsForMaximization) {
  const auto inst = generate_route_instances(3, 3, 1, DeadlineRegime::normal(), 3)[0];
  const Objective obj = make_ontime_objective(inst);
  const auto x = let_path(inst).x;
  const auto v = obj(x);
  const auto l = obj.loss(x);
  EXPECT_EQ(obj.sense(), Sense::kMaximize);
  EXPECT_DOUBLE_EQ(l.value, -v.value);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(l.grad[i], -v.grad[i]);
  EXPECT_EQ(obj.calls(), 2u);

  const auto asg = generate_assignment_instances(3, 2, 1, 3)[0];
  const Objective aobj = make_assignment_objective(asg);
  EXPECT_EQ(aobj.sense(), Sense::kMinimize);
}
