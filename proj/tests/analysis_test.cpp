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

#include "nashstoch/analysis.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nashstoch/errors.hpp"
#include "nashstoch/zoo.hpp"

namespace nashstoch {
namespace {

TEST(LossSurfaceTest, PrisonersDilemmaIsFlat) {
  const auto grid = LossSurface(ClassicGame("prisoners_dilemma"),
                                LossConfig::Uniform(2), 51, SurfaceSpace::kProb, 4);
  ASSERT_EQ(grid.cells.size(), 51u * 51u);
  double lo = 1e9, hi = -1e9;
  for (const auto& c : grid.cells) {
    lo = std::min(lo, c.loss);
    hi = std::max(hi, c.loss);
  }
  EXPECT_LT(hi - lo, 1e-12);
  EXPECT_NEAR(lo, 1.0 / 9.0, 1e-15);
}

TEST(LossSurfaceTest, ResolutionTwoHitsCorners) {
  const auto grid = LossSurface(ClassicGame("chicken"), LossConfig::Uniform(2), 2,
                                SurfaceSpace::kProb);
  ASSERT_EQ(grid.cells.size(), 4u);
  EXPECT_EQ(grid.at(0, 0).coords[0][0], 0.0);
  EXPECT_EQ(grid.at(1, 0).coords[0][0], 1.0);
  EXPECT_EQ(grid.at(1, 1).coords[1][0], 1.0);
  EXPECT_THROW(LossSurface(ClassicGame("chicken"), LossConfig::Uniform(2), 1,
                           SurfaceSpace::kProb),
               ValidationError);
}

TEST(LossSurfaceTest, LogitSpaceAndThreeActions) {
  const auto grid = LossSurface(ClassicGame("matching_pennies"),
                                LossConfig::Uniform(2, 0.1), 5, SurfaceSpace::kLogit);
  EXPECT_NEAR(grid.at(0, 0).coords[0][0], 1.0 / (1.0 + std::exp(kLogitSpan)), 1e-15);
  EXPECT_NEAR(grid.at(2, 2).coords[0][0], 0.5, 1e-15);
  EXPECT_NEAR(grid.at(2, 2).loss, 0.0, 1e-30);
  for (const auto& c : grid.cells) EXPECT_TRUE(std::isfinite(c.bound));

  const auto rps = LossSurface(ClassicGame("rps"), LossConfig::Uniform(2), 4,
                               SurfaceSpace::kProb);
  EXPECT_EQ(rps.points[0], 10);  // 4 * 5 / 2 simplex grid points
  EXPECT_THROW(LossSurface(ClassicGame("rps"), LossConfig::Uniform(2), 4,
                           SurfaceSpace::kLogit),
               ValidationError);
  EXPECT_THROW(LossSurface(RandomGame(3, 2, 1), LossConfig::Uniform(3), 4,
                           SurfaceSpace::kProb),
               ValidationError);
}

TEST(LossSurfaceTest, BoundColumnSubtractsOffset) {
  const double tau = 0.1;
  const auto grid = LossSurface(ClassicGame("chicken"), LossConfig::Uniform(2, tau),
                                11, SurfaceSpace::kProb);
  const auto& c = grid.at(3, 7);
  EXPECT_NEAR(c.bound, std::sqrt(4.0) * std::sqrt(c.loss), 1e-15);
  EXPECT_GE(c.bound + tau * std::log(4.0), c.epsilon);
}

TEST(LossSurfaceTest, ThreadCountDoesNotChangeCells) {
  const auto a = LossSurface(ClassicGame("chicken"), LossConfig::Uniform(2, 0.05),
                             21, SurfaceSpace::kProb, 1);
  const auto b = LossSurface(ClassicGame("chicken"), LossConfig::Uniform(2, 0.05),
                             21, SurfaceSpace::kProb, 8);
  EXPECT_EQ(SurfaceToCsv(a), SurfaceToCsv(b));
}

TEST(LossSurfaceTest, ChickenInteriorMinimumAtZeroTemperature) {
  // At tau = 0 the loss vanishes exactly on the mixed equilibrium, which is
  // a grid point when the resolution is 3k + 1.
  const auto grid = LossSurface(ClassicGame("chicken"), LossConfig::Uniform(2), 31,
                                SurfaceSpace::kProb);
  const auto minima = LocalMinima2D(grid, SurfaceField::kLoss);
  ASSERT_FALSE(minima.empty());
  EXPECT_EQ(minima.front(), (std::pair<int, int>{20, 20}));
  EXPECT_NEAR(grid.at(20, 20).loss, 0.0, 1e-30);
}

TEST(BiasedSurfaceTest, InteriorEquilibriumIsNotAMinimum) {
  const auto grid = BiasedNashConvSurface(ClassicGame("chicken"), 0.0, 31);
  const double interior = grid.at(20, 20).biased_nashconv;
  EXPECT_GT(interior, 0.1);
  EXPECT_NEAR(grid.at(30, 0).biased_nashconv, 0.0, 1e-15);
  const auto minima = LocalMinima2D(grid, SurfaceField::kBiasedNashConv);
  for (const auto& m : minima) EXPECT_NE(m, (std::pair<int, int>{20, 20}));
}

TEST(LocalMinimaTest, PlateausAreNotMinima) {
  const auto flat = LossSurface(ClassicGame("prisoners_dilemma"),
                                LossConfig::Uniform(2), 9, SurfaceSpace::kProb);
  SurfaceGrid g = flat;
  for (auto& c : g.cells) c.loss = 1.0;
  EXPECT_TRUE(LocalMinima2D(g, SurfaceField::kLoss).empty());
  g.cells[4 * 9 + 4].loss = 0.5;
  g.cells[0].loss = 0.25;
  const auto m = LocalMinima2D(g, SurfaceField::kLoss);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0], (std::pair<int, int>{0, 0}));
  EXPECT_EQ(m[1], (std::pair<int, int>{4, 4}));
}

TEST(SurfaceCsvTest, HeaderAndPrecision) {
  const auto grid = LossSurface(ClassicGame("chicken"), LossConfig::Uniform(2), 4,
                                SurfaceSpace::kProb);
  std::istringstream in(SurfaceToCsv(grid));
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header, "p0_a0,p1_a0,loss,bound_minus_offset,epsilon,biased_nashconv");
  std::getline(in, row);
  EXPECT_EQ(row.substr(0, 4), "0,0,");
  std::getline(in, row);
  EXPECT_EQ(row.substr(0, 16), "0,0.333333333333");
}

TEST(CriticalPointTest, DescentReachesRpsEquilibrium) {
  const auto g = ClassicGame("rps");
  const BlockVector start = JointStrategy({{0.5, 0.3, 0.2}, {0.2, 0.2, 0.6}});
  const auto d = DescendGradientNorm(g, start, LossConfig::Uniform(2), 1e-16, 50000);
  EXPECT_TRUE(d.converged);
  for (double p : d.x.flat()) EXPECT_NEAR(p, 1.0 / 3, 1e-4);
}

TEST(CriticalPointTest, StudyOnShapleyFindsMinimum) {
  CriticalStudyConfig cfg;
  cfg.loss = LossConfig::Uniform(2);
  cfg.n_trajectories = 3;
  cfg.sgd_iterations = 200;
  cfg.n_probes = 4;
  cfg.seed = 11;
  cfg.threads = 4;
  const auto pts = CriticalPointStudy(ClassicGame("modified_shapley"), cfg);
  ASSERT_FALSE(pts.empty());
  for (const auto& c : pts) {
    EXPECT_LT(c.grad_norm, 1e-4);
    EXPECT_GE(c.alpha, 0.0);
    EXPECT_LE(c.alpha, 1.0);
    if (c.epsilon < 1e-6) EXPECT_EQ(c.alpha, 0.0);
  }
  cfg.threads = 1;
  EXPECT_EQ(CriticalPointsToCsv(CriticalPointStudy(ClassicGame("modified_shapley"), cfg)),
            CriticalPointsToCsv(pts));
}

}  // namespace
}  // namespace nashstoch
