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

#include "nashstoch/linalg.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "nashstoch/parallel.hpp"
#include "nashstoch/rng.hpp"

namespace nashstoch {
namespace {

Matrix RandomSymmetric(int n, std::uint64_t seed) {
  Stream rng(seed, {});
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = 2.0 * rng.Uniform() - 1.0;
  return a;
}

TEST(JacobiEigenTest, MatchesEigenSolver) {
  for (int n : {1, 2, 5, 9, 16}) {
    const Matrix a = RandomSymmetric(n, n);
    Eigen::MatrixXd e(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) e(i, j) = a(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e);
    std::vector<double> want(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + n);
    std::sort(want.rbegin(), want.rend());
    const EigenResult got = JacobiEigen(a);
    ASSERT_EQ(static_cast<int>(got.values.size()), n);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(got.values[i], want[i], 1e-9);
    // A v = lambda v for each returned pair.
    for (int c = 0; c < n; ++c) {
      std::vector<double> v(n);
      for (int r = 0; r < n; ++r) v[r] = got.vectors(r, c);
      const auto av = a.Apply(v);
      for (int r = 0; r < n; ++r) EXPECT_NEAR(av[r], got.values[c] * v[r], 1e-8);
    }
  }
}

TEST(JacobiEigenTest, DiagonalNeedsNoSweeps) {
  Matrix d(3, 3);
  d(0, 0) = 1;
  d(1, 1) = 3;
  d(2, 2) = -2;
  const auto r = JacobiEigen(d);
  EXPECT_EQ(r.sweeps, 0);
  EXPECT_EQ(r.values, (std::vector<double>{3, 1, -2}));
}

TEST(RankTest, Examples) {
  EXPECT_EQ(Rank(Matrix(4, 3)), 0);
  EXPECT_EQ(Rank(Matrix::Identity(4)), 4);
  Matrix dup(4, 3);
  Stream rng(3, {});
  for (int i = 0; i < 4; ++i) {
    dup(i, 0) = rng.Uniform();
    dup(i, 1) = rng.Uniform();
    dup(i, 2) = dup(i, 0);
  }
  EXPECT_EQ(Rank(dup), 2);
}

TEST(SingularValuesTest, MatchesEigenSvd) {
  Stream rng(4, {});
  Matrix a(7, 4);
  Eigen::MatrixXd e(7, 4);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 4; ++j) e(i, j) = a(i, j) = rng.Uniform() - 0.5;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
  auto got = SingularValues(a);
  std::sort(got.rbegin(), got.rend());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(got[i], svd.singularValues()(i), 1e-12);
}

TEST(MatrixTest, ProductsAndCentering) {
  Matrix a(2, 3);
  for (int i = 0; i < 6; ++i) a.data()[i] = i + 1;
  const Matrix ata = a.Transposed() * a;
  EXPECT_EQ(ata(0, 0), 17);
  EXPECT_EQ(ata(2, 1), 36);
  const Matrix c = CenterColumns(a);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(c(0, j) + c(1, j), 0.0);
  EXPECT_THROW(a * a, ValidationError);
}

TEST(RngTest, KeyedStreamsAreReproducible) {
  Stream a(42, {1, 2}), b(42, {1, 2}), c(42, {2, 1});
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double u = a.Uniform();
    EXPECT_EQ(u, b.Uniform());
    differs |= u != c.Uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(a.draws(), 100u);
}

TEST(RngTest, CategoricalFrequencies) {
  Stream rng(5, {});
  const std::vector<double> p{0.1, 0.6, 0.3};
  std::vector<int> hits(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++hits[rng.Categorical(p)];
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(hits[i] / double(n), p[i], 0.006);
  const std::vector<double> pure{0, 1, 0};
  for (int i = 0; i < 50; ++i) EXPECT_EQ(rng.Categorical(pure), 1);
}

TEST(ParallelForTest, CoversEveryIndexAndRethrowsLowest) {
  std::vector<int> hit(1000, 0);
  ParallelFor(1000, 8, [&](std::int64_t i) { hit[i] += 1; });
  EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 1000);
  try {
    ParallelFor(100, 4, [](std::int64_t i) {
      if (i == 17 || i == 60) throw ValidationError("fail " + std::to_string(i));
    });
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "fail 17");
  }
}

}  // namespace
}  // namespace nashstoch
