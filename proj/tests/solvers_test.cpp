// Copyright 2026 The NashStoch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nashstoch/solvers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "nashstoch/errors.hpp"
#include "nashstoch/zoo.hpp"

namespace nashstoch {
namespace {

TEST(TraceTest, CsvAndMonotoneIterations) {
  Trace t;
  t.Add({0, 0.5, 0.25, 0, 0.0});
  t.Add({10, 1.0 / 3, 1e-20, 40, 0.0});
  EXPECT_THROW(t.Add({10, 0, 0, 0, 0}), ValidationError);
  EXPECT_EQ(TraceToCsv(t),
            "iteration,epsilon,loss,queries,seconds\n"
            "0,0.5,0.25,0,0\n"
            "10,0.333333333333,1e-20,40,0\n");
}

TEST(SgdTest, ZeroLearningRateLeavesProfile) {
  SgdConfig cfg;
  cfg.lr = 0.0;
  cfg.iterations = 1;
  cfg.initial = JointStrategy({{0.2, 0.8}, {0.6, 0.4}});
  const auto r = SgdSolve(ClassicGame("chicken"), cfg);
  EXPECT_EQ(r.x, *cfg.initial);
  ASSERT_EQ(r.trace.rows.size(), 2u);
  EXPECT_EQ(r.trace.rows[1].iteration, 1);
}

TEST(SgdTest, CheckpointsIncludeFirstAndLast) {
  SgdConfig cfg;
  cfg.iterations = 250;
  cfg.checkpoint_every = 100;
  const auto r = SgdSolve(ClassicGame("rps"), cfg);
  std::vector<std::int64_t> its;
  for (const auto& row : r.trace.rows) its.push_back(row.iteration);
  EXPECT_EQ(its, (std::vector<std::int64_t>{0, 100, 200, 250}));
  for (const auto& row : r.trace.rows) EXPECT_EQ(row.seconds, 0.0);
}

TEST(SgdTest, RpsExactConvergesAfterSweep) {
  // Start off-center so the run has something to do.
  SgdConfig base;
  base.iterations = 10000;
  base.checkpoint_every = 1000;
  base.initial = JointStrategy({{0.6, 0.3, 0.1}, {0.1, 0.1, 0.8}});
  const auto sweep = SweepSgd(ClassicGame("rps"), base, DefaultLearningRateGrid(), 4);
  EXPECT_EQ(sweep.entries.size(), 24u);
  EXPECT_LT(sweep.best.trace.back().epsilon, 1e-3);
}

TEST(SgdTest, SeededRunsAreBitwiseIdentical) {
  SgdConfig cfg;
  cfg.iterations = 300;
  cfg.batch = 2;
  cfg.kind = GradientKind::kSampleAll;
  cfg.tau = 0.05;
  cfg.projection = Projection::kMirror;
  cfg.seed = 77;
  const auto g = RandomGame({2, 3, 2}, 4);
  const auto a = SgdSolve(g, cfg);
  const auto b = SgdSolve(g, cfg);
  EXPECT_EQ(TraceToCsv(a.trace), TraceToCsv(b.trace));
  EXPECT_EQ(a.x, b.x);
  cfg.seed = 78;
  EXPECT_NE(TraceToCsv(SgdSolve(g, cfg).trace), TraceToCsv(a.trace));
}

TEST(SgdTest, DivergenceIsReported) {
  // A huge step lands on the probability floor, where the entropy term makes
  // the loss explode at a high temperature.
  SgdConfig cfg;
  cfg.lr = 1e6;
  cfg.iterations = 5;
  cfg.checkpoint_every = 1;
  cfg.tau = 100.0;
  cfg.initial = JointStrategy({{0.3, 0.7}, {0.5, 0.5}});
  EXPECT_THROW(SgdSolve(ClassicGame("chicken"), cfg), NumericalError);
  SgdConfig bad;
  bad.iterations = 0;
  EXPECT_THROW(SgdSolve(ClassicGame("rps"), bad), ValidationError);
}

TEST(RegretMatchingTest, MatchingPenniesAverageConverges) {
  BaselineConfig cfg;
  cfg.iterations = 10000;
  cfg.checkpoint_every = 1000;
  const auto r = RegretMatching(ClassicGame("matching_pennies"), cfg);
  EXPECT_LT(r.trace.back().epsilon, 0.01);
  EXPECT_LT(ExploitabilityOf(ClassicGame("matching_pennies"), r.x).epsilon, 0.01);
}

TEST(RegretMatchingTest, ZeroRegretPlaysUniform) {
  // A constant game never accumulates regret.
  const NormalFormGame g({3, 2}, {std::vector<double>(6, 0.5),
                                  std::vector<double>(6, 0.5)});
  BaselineConfig cfg;
  cfg.iterations = 10;
  const auto r = RegretMatching(g, cfg);
  const auto u = JointStrategy::Uniform({3, 2});
  for (int i = 0; i < u.size(); ++i) EXPECT_NEAR(r.x[i], u[i], 1e-15);
}

TEST(FtrlTest, TinyStepStaysUniform) {
  BaselineConfig cfg;
  cfg.iterations = 50;
  cfg.lr = 1e-12;
  const auto r = Ftrl(RandomGame({3, 3}, 1), cfg);
  for (double p : r.x.flat()) EXPECT_NEAR(p, 1.0 / 3, 1e-10);
}

TEST(FtrlTest, SampledRunsAreDeterministic) {
  BaselineConfig cfg;
  cfg.iterations = 200;
  cfg.batch = 3;
  cfg.seed = 5;
  const auto g = RandomGame({2, 2, 2}, 3);
  EXPECT_EQ(TraceToCsv(Ftrl(g, cfg).trace), TraceToCsv(Ftrl(g, cfg).trace));
}

TEST(SymmetricProfileTest, Convention) {
  const auto x0 = SymmetricProfile(0.0, 3);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(x0.block(k)[0], 1.0);
  const auto xh = SymmetricProfile(0.5, 2);
  for (double p : xh.flat()) EXPECT_EQ(p, 0.5);
  EXPECT_THROW(SymmetricProfile(1.5, 2), ValidationError);
}

TEST(BlinTest, PullSchedule) {
  EXPECT_EQ(BlinEdge(1), 1.0);
  EXPECT_EQ(BlinEdge(3), 0.25);
  EXPECT_EQ(BlinPulls(1, 100, 1.0), static_cast<std::int64_t>(std::ceil(std::log(100.0))));
  EXPECT_EQ(BlinPulls(2, 100, 1.0),
            static_cast<std::int64_t>(std::ceil(4 * std::log(100.0))));
}

TEST(BlinTest, FindsPeakOfConcaveReward) {
  const BlinObjective f = [](std::span<const double> z, std::uint64_t) {
    return -std::abs(z[0] - 0.5);
  };
  BlinConfig cfg;
  cfg.horizon = 20000;
  cfg.c1 = 0.0;
  const auto r = BlinSolve(f, cfg);
  int deepest = 0;
  for (const auto& a : r.history)
    if (a.pulls > 0) deepest = std::max(deepest, a.depth);
  EXPECT_LE(std::abs(r.best_arm[0] - 0.5), BlinEdge(deepest));
  EXPECT_LE(r.pulls_used, cfg.horizon);
  EXPECT_EQ(r.pulls_used, cfg.horizon);
}

TEST(BlinTest, OptimumSurvivesNoiseFreeElimination) {
  // 1-Lipschitz with the maximizer off the dyadic grid.
  const double peak = 0.3141;
  const BlinObjective f = [peak](std::span<const double> z, std::uint64_t) {
    return -std::abs(z[0] - peak);
  };
  BlinConfig cfg;
  cfg.horizon = 5000;
  const auto r = BlinSolve(f, cfg);
  for (int depth = 1; depth <= r.completed_batches; ++depth) {
    bool covered = false;
    for (const auto& a : r.history)
      if (a.depth == depth && a.alive && a.pulls > 0 && a.lo[0] <= peak &&
          peak <= a.hi[0])
        covered = true;
    EXPECT_TRUE(covered) << "depth " << depth;
  }
}

TEST(BlinTest, ChildrenPartitionSurvivingParents) {
  const BlinObjective f = [](std::span<const double> z, std::uint64_t key) {
    return std::sin(6 * z[0]) * std::cos(4 * z[1]) + 0.1 * UniformAt(key, 0);
  };
  BlinConfig cfg;
  cfg.horizon = 30000;
  cfg.dimension = 2;
  cfg.c1 = 0.01;
  cfg.seed = 3;
  const auto r = BlinSolve(f, cfg);
  std::map<std::int64_t, std::vector<const ArmRecord*>> kids;
  for (const auto& a : r.history)
    if (a.parent >= 0) kids[a.parent].push_back(&a);
  for (const auto& [parent, children] : kids) {
    const ArmRecord& p = r.history[parent];
    EXPECT_TRUE(p.alive);
    ASSERT_EQ(children.size(), 4u);
    double area = 0.0;
    for (const ArmRecord* c : children) {
      area += (c->hi[0] - c->lo[0]) * (c->hi[1] - c->lo[1]);
      for (int i = 0; i < 2; ++i) {
        EXPECT_GE(c->lo[i], p.lo[i]);
        EXPECT_LE(c->hi[i], p.hi[i]);
      }
    }
    EXPECT_EQ(area, (p.hi[0] - p.lo[0]) * (p.hi[1] - p.lo[1]));
  }
  // Pulling is reproducible for a fixed seed and any thread count.
  cfg.threads = 4;
  const auto again = BlinSolve(f, cfg);
  EXPECT_EQ(again.best_arm, r.best_arm);
  EXPECT_EQ(again.random_arm, r.random_arm);
}

TEST(BlinTest, BudgetTooSmallForFirstBatch) {
  BlinConfig cfg;
  cfg.horizon = 10;
  cfg.c2 = 100.0;
  const BlinObjective f = [](std::span<const double>, std::uint64_t) { return 0.0; };
  EXPECT_THROW(BlinSolve(f, cfg), ValidationError);
}

TEST(BlinLossTest, ObjectiveWiring) {
  const auto g = Sym7Game();
  LossObjectiveConfig oc;
  oc.symmetric = true;
  EXPECT_EQ(BlinDimension(g, oc), 1);
  const auto lc = BlinLossConfig(g, 0.05);
  EXPECT_NEAR(lc.tau, SetTau(0.05), 1e-15);
  EXPECT_NEAR(lc.etas[0], 2.0 / LipschitzBound(GameDims::Of(g), 0.05), 1e-15);
  const std::vector<double> z{0.5};
  const auto x = MapHypercube(g, z, oc);
  for (double p : x.flat()) EXPECT_EQ(p, 0.5);
  // The reward is an unbiased estimate of -L^tau.
  const auto obj = MakeLossObjective(g, oc);
  double mean = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) mean += obj(z, DeriveKey(1, {std::uint64_t(i)})) / n;
  const double exact = -Loss(g, x, lc);
  EXPECT_NEAR(mean, exact, 0.05 * BlinRewardRange(g, 0.05));
  oc.symmetric = false;
  EXPECT_EQ(BlinDimension(g, oc), 7);
}

}  // namespace
}  // namespace nashstoch
