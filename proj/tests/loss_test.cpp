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

#include "nashstoch/loss.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nashstoch/errors.hpp"
#include "nashstoch/zoo.hpp"
#include "test_util.hpp"

namespace nashstoch {
namespace {

using std::numbers::e;

TEST(EntropyTest, Examples) {
  const std::vector<double> u4(4, 0.25), pure{0, 1, 0}, half{0.5, 0.5};
  EXPECT_NEAR(Entropy(u4), std::log(4.0), 1e-15);
  EXPECT_EQ(Entropy(pure), 0.0);
  const auto g = EntropyGradient(half);
  EXPECT_NEAR(g[0], -(std::log(0.5) + 1.0), 1e-15);
  EXPECT_NEAR(g[0], -0.30685281944005469, 1e-15);
  EXPECT_EQ(g[0], g[1]);
}

TEST(RegularizedGradientTest, ZeroTauIsPlayerGradient) {
  const auto g = RandomGame({3, 2}, 3);
  const auto x = testing::RandomProfile(g.action_counts(), 1);
  EXPECT_EQ(RegularizedGradient(g, x, 0, 0.0), PlayerGradient(g, x, 0));
}

TEST(LossTest, RpsUniformIsZero) {
  const auto g = ClassicGame("rps");
  EXPECT_NEAR(Loss(g, JointStrategy::Uniform({3, 3}), LossConfig::Uniform(2)),
              0.0, 1e-30);
}

TEST(LossTest, PrisonersDilemmaIsConstant) {
  // Normalized rows [[2/3, 0], [1, 1/3]]: action 1 beats action 0 by exactly
  // 1/3 whatever the opponent does, so each projected gradient is
  // (-1/6, 1/6) and L = 2 * 2 * (1/6)^2 = 1/9.
  const auto g = ClassicGame("prisoners_dilemma");
  const double want = 2.0 * 2.0 * (1.0 / 36.0);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto x = testing::RandomProfile({2, 2}, s, 0.0);
    EXPECT_NEAR(Loss(g, x, LossConfig::Uniform(2)), want, 1e-15);
  }
  EXPECT_NEAR(want, 1.0 / 9.0, 1e-17);
}

TEST(LossTest, ZeroAtInteriorEquilibria) {
  const auto rps = ClassicGame("rps");
  const auto mp = ClassicGame("matching_pennies");
  const auto chicken = ClassicGame("chicken");
  const auto cfg = LossConfig::Uniform(2);
  EXPECT_LT(Loss(rps, JointStrategy::Uniform({3, 3}), cfg), 1e-30);
  EXPECT_LT(Loss(mp, JointStrategy::Uniform({2, 2}), cfg), 1e-30);
  const JointStrategy ne({{2.0 / 3, 1.0 / 3}, {2.0 / 3, 1.0 / 3}});
  EXPECT_LT(Loss(chicken, ne, cfg), 1e-30);
}

TEST(ExploitabilityTest, Examples) {
  const auto pd = ClassicGame("prisoners_dilemma");
  EXPECT_EQ(ExploitabilityOf(pd, JointStrategy::Pure({2, 2}, {1, 1})).epsilon, 0.0);
  const auto chicken = ClassicGame("chicken");
  const JointStrategy ne({{2.0 / 3, 1.0 / 3}, {2.0 / 3, 1.0 / 3}});
  EXPECT_LT(ExploitabilityOf(chicken, ne).epsilon, 1e-12);
  EXPECT_LT(NashConv(chicken, ne), 1e-12);
  // Pure cooperate in PD: each player gains 1/3 by defecting.
  const auto cc = ExploitabilityOf(pd, JointStrategy::Pure({2, 2}, {0, 0}));
  EXPECT_NEAR(cc.epsilon, 1.0 / 3, 1e-15);
  EXPECT_NEAR(NashConv(pd, JointStrategy::Pure({2, 2}, {0, 0})), 2.0 / 3, 1e-15);
}

TEST(QreTest, ZeroAtLogitFixedPoint) {
  // Iterate the damped logit map on RPS-like games until it settles.
  const auto g = RandomGame({2, 3}, 21);
  const double tau = 0.5;
  BlockVector x = JointStrategy::Uniform(g.action_counts());
  for (int it = 0; it < 5000; ++it) {
    for (int k = 0; k < 2; ++k) {
      auto grad = PlayerGradient(g, x, k);
      for (double& v : grad) v /= tau;
      const double lse = LogSumExp(grad);
      for (int i = 0; i < x.block_size(k); ++i)
        x.block(k)[i] = 0.5 * x.block(k)[i] + 0.5 * std::exp(grad[i] - lse);
    }
  }
  EXPECT_LT(QreExploitability(g, x, tau), 1e-12);
  EXPECT_LT(Loss(g, x, LossConfig::Uniform(2, tau)), 1e-20);
}

TEST(QreTest, HighTemperatureLimit) {
  // At uniform x, eps_QRE = tau lse(g / tau) - mean(g) - tau ln m, which is
  // var(g) / (2 tau) to leading order.
  const auto g = RandomGame({3, 3}, 5);
  const auto x = JointStrategy::Uniform({3, 3});
  const double tau = 1e4;
  const auto eps = QreExploitabilityPerPlayer(g, x, tau);
  for (int k = 0; k < 2; ++k) {
    const auto grad = PlayerGradient(g, x, k);
    double mean = 0.0, var = 0.0;
    for (double v : grad) mean += v / 3;
    for (double v : grad) var += (v - mean) * (v - mean) / 3;
    EXPECT_NEAR(eps[k], var / (2 * tau), 1e-9);
  }
  EXPECT_THROW(QreExploitability(g, x, 0.0), ValidationError);
}

TEST(NashBoundTest, Formula) {
  const std::vector<int> counts{2, 2};
  EXPECT_NEAR(NashBoundFromLoss(0.09, counts, LossConfig::Uniform(2)),
              std::sqrt(4.0) * 0.3, 1e-15);
  EXPECT_NEAR(NashBoundFromLoss(0.0, counts, LossConfig::Uniform(2, 0.1)),
              0.1 * std::log(4.0), 1e-15);
  LossConfig weighted{{0.5, 2.0}, 0.0};
  EXPECT_NEAR(NashBoundFromLoss(0.01, counts, weighted), std::sqrt(8.0) * 0.1,
              1e-15);
}

TEST(TemperatureTest, SetTauAndMinProb) {
  EXPECT_NEAR(SetTau(1.0 / e), 1.0, 1e-15);
  EXPECT_NEAR(SetTau(0.5), 1.4426950408889634, 1e-15);
  EXPECT_NEAR(MinProb(0.5, 2), 0.25, 1e-17);
  EXPECT_THROW(SetTau(0.0), ValidationError);
  EXPECT_THROW(SetTau(1.0), ValidationError);
}

TEST(BoundsTest, LipschitzExample) {
  GameDims d{2, 2.0, 2};
  EXPECT_NEAR(LipschitzBound(d, 1.0 / e), (std::log(2.0) + 2.0) * (4 * e + 4),
              1e-12);
  EXPECT_NEAR(GradientInfNormBound(d, 1.0 / e, {1.0, 3.0}),
              1.5 * LipschitzBound(d, 1.0 / e), 1e-12);
}

TEST(BoundsTest, LipschitzBlowsUpAtBothEnds) {
  const GameDims d = GameDims::Of(std::vector<int>{3, 2, 4});
  std::vector<double> ps;
  for (double p = 1e-4; p < 1.0; p *= 1.5) ps.push_back(p);
  int argmin = 0;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (LipschitzBound(d, ps[i]) < LipschitzBound(d, ps[argmin])) argmin = i;
  for (int i = 0; i < argmin; ++i)
    EXPECT_GT(LipschitzBound(d, ps[i]), LipschitzBound(d, ps[i + 1]));
  for (std::size_t i = argmin + 1; i + 1 < ps.size(); ++i)
    EXPECT_LT(LipschitzBound(d, ps[i]), LipschitzBound(d, ps[i + 1]));
  EXPECT_GT(argmin, 0);
  EXPECT_LT(argmin + 1, static_cast<int>(ps.size()));
}

TEST(BoundsTest, LossRangeBoundHolds) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto g = RandomGame({2, 3, 2}, s);
    const double p = 0.1;
    const auto cfg = LossConfig::Uniform(3, SetTau(p), 0.7);
    const double bound = LossRangeBound(GameDims::Of(g), p, cfg.etas);
    for (std::uint64_t t = 0; t < 20; ++t) {
      // Profiles with every probability at least p / m*.
      const auto x = testing::RandomProfile(g.action_counts(), 100 * s + t,
                                            MinProb(p, g.max_actions()));
      EXPECT_LE(Loss(g, x, cfg), bound);
    }
  }
}

TEST(DecompositionTest, SumsToLoss) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto g = RandomGame({2, 3, 2}, s);
    const auto x = testing::RandomProfile(g.action_counts(), s);
    for (double tau : {0.0, 0.3}) {
      const auto cfg = LossConfig::Uniform(3, tau, 1.5);
      const auto d = DecomposeLoss(g, x, cfg);
      EXPECT_NEAR(d.a + d.b + d.c, Loss(g, x, cfg), 1e-13);
      if (tau == 0.0) {
        EXPECT_EQ(d.b, 0.0);
        EXPECT_EQ(d.c, 0.0);
      }
    }
  }
  const auto d = DecomposeLoss(ClassicGame("rps"), JointStrategy::Uniform({3, 3}),
                               LossConfig::Uniform(2));
  EXPECT_NEAR(d.a, 0.0, 1e-30);
}

TEST(BiasedNashConvTest, MatchesEnumerationAndFlagsInteriorNe) {
  const auto g = ClassicGame("chicken");
  const JointStrategy ne({{2.0 / 3, 1.0 / 3}, {2.0 / 3, 1.0 / 3}});
  // Independent oracle: sum over the opponent's pure action of the best
  // reply payoff, minus the current utility.
  double want = 0.0;
  for (int k = 0; k < 2; ++k) {
    double eb = 0.0;
    for (int b = 0; b < 2; ++b) {
      double best = -1.0;
      for (int a = 0; a < 2; ++a) {
        const int joint[] = {k == 0 ? a : b, k == 0 ? b : a};
        best = std::max(best, g.payoff(k, g.JointIndex(joint)));
      }
      eb += ne.block(1 - k)[b] * best;
    }
    want += eb - Utility(g, ne, k);
  }
  EXPECT_NEAR(BiasedSampledNashConv(g, ne, 0.0), want, 1e-15);
  EXPECT_GT(BiasedSampledNashConv(g, ne, 0.0), 0.1);
  EXPECT_LT(NashConv(g, ne), 1e-12);
  // Pure equilibria are unbiased: the opponent's draw is deterministic.
  EXPECT_NEAR(BiasedSampledNashConv(g, JointStrategy::Pure({2, 2}, {0, 1}), 0.0),
              0.0, 1e-15);
}

TEST(BoundInvariantTest, EpsilonBelowBound) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = RandomGame({2 + static_cast<int>(s % 2), 3, 2}, s);
    for (double tau : {0.0, 0.05, 0.5}) {
      const auto cfg = LossConfig::Uniform(3, tau, 0.5 + 0.1 * s);
      for (std::uint64_t t = 0; t < 20; ++t) {
        const auto x = testing::RandomProfile(g.action_counts(), t, 1e-3);
        const auto r = LossValue(g, x, cfg);
        EXPECT_LE(r.epsilon, r.bound + 1e-12);
        for (int k = 0; k < 3; ++k)
          EXPECT_LE(r.player_eps[k], std::sqrt(2.0) * r.projected_norms[k] +
                                         tau * std::log(g.num_actions(k)) + 1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace nashstoch
