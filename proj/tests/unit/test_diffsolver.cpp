#include <gtest/gtest.h>

#include <cmath>

#include "surco/diffsolver.hpp"
#include "surco/errors.hpp"
#include "surco/random.hpp"
#include "surco/solvers.hpp"

using namespace surco;

TEST(SolveAndCache, ToyArgmaxAtZeroAngle) {
  const ToyOracle oracle;
  const auto cache = solve_and_cache(oracle, std::vector<double>{std::cos(0.0), std::sin(0.0)});
  EXPECT_EQ(cache.x, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(cache.oracle, &oracle);
}

TEST(SolveAndCache, RepeatedCallsAgree) {
  const auto inst = generate_route_instances(4, 4, 1, DeadlineRegime::normal(), 5)[0];
  const PathOracle oracle(inst);
  Rng rng(1);
  std::vector<double> c(static_cast<std::size_t>(inst.num_edges()));
  for (double& v : c) v = rng.uniform();
  EXPECT_EQ(solve_and_cache(oracle, c).x, solve_and_cache(oracle, c).x);
}

TEST(SolveAndCache, MeanCostsGiveLetPath) {
  const auto inst = generate_route_instances(3, 3, 1, DeadlineRegime::normal(), 5)[0];
  const PathOracle oracle(inst);
  EXPECT_EQ(solve_and_cache(oracle, inst.mu()).x, let_path(inst).x);
}

TEST(Backward, ZeroIncomingGradient) {
  const auto inst = generate_route_instances(3, 3, 1, DeadlineRegime::normal(), 5)[0];
  const PathOracle oracle(inst);
  const auto cache = solve_and_cache(oracle, inst.mu());
  const auto g = backward(cache, std::vector<double>(12, 0.0));
  EXPECT_EQ(g, std::vector<double>(12, 0.0));
  EXPECT_EQ(oracle.calls(), 2u);
}

TEST(Backward, TinyPerturbationLeavesSolution) {
  const auto inst = generate_route_instances(3, 3, 1, DeadlineRegime::normal(), 5)[0];
  const PathOracle oracle(inst);
  const auto cache = solve_and_cache(oracle, inst.mu());
  std::vector<double> g(12, 0.0);
  g[0] = 1.0;
  const auto gc = backward(cache, g, {1e-9, true});
  EXPECT_EQ(gc, std::vector<double>(12, 0.0));
}

TEST(Backward, FlipsBetweenCornerPaths) {
  // Edges: 0 = (0,1), 1 = (0,2), 2 = (1,3), 3 = (2,3).
  const RouteInstance inst(2, 2, std::vector<double>(4, 0.5), std::vector<double>(4, 0.1), 0, 3,
                           1.0, 0);
  const PathOracle oracle(inst);
  const std::vector<double> c{0.5, 0.55, 0.5, 0.55};  // path costs 1.0 and 1.1
  const auto cache = solve_and_cache(oracle, c);
  const std::vector<double> cheap{1.0, 0.0, 1.0, 0.0};
  ASSERT_EQ(cache.x, cheap);
  const auto gc = backward(cache, cheap, {1.0, true});
  const std::vector<double> flipped{0.0, 1.0, 0.0, 1.0};
  for (int e = 0; e < 4; ++e) EXPECT_DOUBLE_EQ(gc[e], flipped[e] - cheap[e]);
}

TEST(Backward, DescentStepMovesTowardImprovedSolution) {
  const RouteInstance inst(2, 2, std::vector<double>(4, 0.5), std::vector<double>(4, 0.1), 0, 3,
                           1.0, 0);
  const PathOracle oracle(inst);
  std::vector<double> c{0.5, 0.55, 0.5, 0.55};
  const auto cache = solve_and_cache(oracle, c);
  const auto gc = backward(cache, cache.x, {1.0, true});
  for (int e = 0; e < 4; ++e) c[e] -= 0.2 * gc[e];
  EXPECT_EQ(oracle.solve(c), (std::vector<double>{0.0, 1.0, 0.0, 1.0}));
}

TEST(Backward, MaximizingOracleSign) {
  // Loss gradient favours the second coordinate; the descent step must too.
  const ToyOracle oracle;
  std::vector<double> c{1.0, 0.9};
  const auto cache = solve_and_cache(oracle, c);
  ASSERT_EQ(cache.x, (std::vector<double>{1.0, 0.0}));
  const auto gc = backward(cache, std::vector<double>{1.0, -1.0}, {1.0, true});
  EXPECT_GT(gc[0], 0.0);
  EXPECT_LT(gc[1], 0.0);
}

TEST(Backward, RejectsBadInput) {
  const ToyOracle oracle;
  const auto cache = solve_and_cache(oracle, std::vector<double>{1.0, 0.0});
  EXPECT_THROW(backward(cache, std::vector<double>{1.0}), ParameterError);
  EXPECT_THROW(backward(cache, std::vector<double>{1.0, 0.0}, {0.0, true}), ParameterError);
  EXPECT_THROW(backward(cache, std::vector<double>{1.0, NAN}), ParameterError);
  EXPECT_THROW(backward(BlackboxCache{}, std::vector<double>{}), ParameterError);
}

TEST(Backward, ScaleInvariantWhenNormalized) {
  const auto inst = generate_route_instances(4, 4, 1, DeadlineRegime::normal(), 8)[0];
  const PathOracle oracle(inst);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> c(static_cast<std::size_t>(inst.num_edges()));
    std::vector<double> g(c.size());
    for (double& v : c) v = rng.uniform(0.1, 1.0);
    for (double& v : g) v = rng.uniform(-1.0, 1.0);
    std::vector<double> c2(c);
    std::vector<double> g2(g);
    for (double& v : c2) v *= 8.0;
    for (double& v : g2) v *= 0.25;
    EXPECT_EQ(backward(solve_and_cache(oracle, c), g), backward(solve_and_cache(oracle, c2), g2));
  }
}
