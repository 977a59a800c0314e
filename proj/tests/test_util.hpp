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

#ifndef NASHSTOCH_TESTS_TEST_UTIL_HPP_
#define NASHSTOCH_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "nashstoch/game.hpp"
#include "nashstoch/rng.hpp"

namespace nashstoch::testing {

// Interior profile with every probability at least `floor`.
inline JointStrategy RandomProfile(const std::vector<int>& counts,
                                   std::uint64_t seed, double floor = 0.05) {
  Stream rng(seed, {0x70726f66});
  std::vector<std::vector<double>> blocks;
  for (int m : counts) {
    std::vector<double> b(m);
    double s = 0.0;
    for (double& v : b) {
      v = -std::log(std::max(rng.Uniform(), 1e-12));
      s += v;
    }
    for (double& v : b) v = floor + (1.0 - m * floor) * v / s;
    blocks.push_back(b);
  }
  return JointStrategy(blocks);
}

// Brute-force expected utility: sum over joint actions of prod_k x_k[a_k] u(a).
inline double EnumeratedUtility(const NormalFormGame& g, const BlockVector& x,
                                int k) {
  double total = 0.0;
  for (std::int64_t j = 0; j < g.num_joint_actions(); ++j) {
    const auto a = g.DecodeJoint(j);
    double w = 1.0;
    for (int p = 0; p < g.num_players(); ++p) w *= x.block(p)[a[p]];
    total += w * g.payoff(k, j);
  }
  return total;
}

// Utility gradient by brute force: replace x_k with each pure action.
inline std::vector<double> EnumeratedGradient(const NormalFormGame& g,
                                              const BlockVector& x, int k) {
  std::vector<double> out;
  for (int i = 0; i < g.num_actions(k); ++i) {
    BlockVector y = x;
    for (int j = 0; j < g.num_actions(k); ++j) y.block(k)[j] = i == j ? 1.0 : 0.0;
    out.push_back(EnumeratedUtility(g, y, k));
  }
  return out;
}

}  // namespace nashstoch::testing

#endif  // NASHSTOCH_TESTS_TEST_UTIL_HPP_
