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

#ifndef NASHSTOCH_CALCULUS_HPP_
#define NASHSTOCH_CALCULUS_HPP_

// First and second derivatives of L^tau and the matrices used to certify
// isolated equilibria.
//
// With r_k = Pi(grad^{k,tau}) and B_kl = d r_k / d x_l, i.e.
//   B_kl = Pi H^k_kl                (k != l)
//   B_ll = -tau Pi diag(1 / x_l),
// the Hessian block for players (l, q) is
//   2 sum_k eta_k B_kl^T B_kq
//   + [l == q] 2 tau eta_l diag(r_l / x_l^2)
//   + [l != q] 2 sum_{k != l, q} eta_k C_k,   C_k[i][j] = sum_a T^k_klq[a][i][j] r_k[a].

#include <cmath>
#include <cstdint>
#include <vector>

#include "nashstoch/errors.hpp"
#include "nashstoch/estimators.hpp"
#include "nashstoch/game.hpp"
#include "nashstoch/linalg.hpp"
#include "nashstoch/loss.hpp"
#include "nashstoch/simplex.hpp"
#include "nashstoch/zoo.hpp"

namespace nashstoch {

inline constexpr double kRankTolerance = 1e-8;
inline constexpr double kNegativeEigenTolerance = 1e-8;

inline BlockVector LossGradient(const NormalFormGame& game, const BlockVector& x,
                                const LossConfig& cfg) {
  return EstimateLossGradient(game, x, cfg, GradientKind::kExact, 0).gradient;
}

// Column offsets of each player's block in the stacked Sum m_k coordinates.
inline std::vector<int> BlockOffsets(const std::vector<int>& action_counts) {
  std::vector<int> off(action_counts.size() + 1, 0);
  for (std::size_t k = 0; k < action_counts.size(); ++k)
    off[k + 1] = off[k] + action_counts[k];
  return off;
}

namespace internal {

// B_kl for every ordered pair, including the entropy diagonal blocks.
inline std::vector<std::vector<Matrix>> LossJacobianBlocks(
    const NormalFormGame& game, const BlockVector& x, double tau) {
  const int n = game.num_players();
  std::vector<std::vector<Matrix>> b(n, std::vector<Matrix>(n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) {
        Matrix d(game.num_actions(k), game.num_actions(k));
        for (int i = 0; i < d.rows(); ++i) d(i, i) = -tau / x.block(k)[i];
        b[k][l] = CenterColumns(d);
      } else {
        b[k][l] = CenterColumns(BimatrixApprox(game, x, k, l));
      }
    }
  return b;
}

}  // namespace internal

inline Matrix Hessian(const NormalFormGame& game, const BlockVector& x,
                      const LossConfig& cfg) {
  cfg.Validate(game.num_players());
  CheckProfileShape(game, x);
  CheckInteriorForTau(x, cfg.tau);
  const int n = game.num_players();
  const auto off = BlockOffsets(game.action_counts());
  const auto b = internal::LossJacobianBlocks(game, x, cfg.tau);
  std::vector<std::vector<double>> r(n);
  for (int k = 0; k < n; ++k)
    r[k] = ProjectTangent(RegularizedGradient(game, x, k, cfg.tau));

  Matrix hess(off[n], off[n]);
  for (int l = 0; l < n; ++l) {
    for (int q = 0; q < n; ++q) {
      Matrix block(game.num_actions(l), game.num_actions(q));
      for (int k = 0; k < n; ++k) {
        Matrix term = b[k][l].Transposed() * b[k][q];
        term *= 2.0 * cfg.etas[k];
        block += term;
      }
      if (l == q && cfg.tau > 0.0) {
        for (int i = 0; i < block.rows(); ++i) {
          const double xi = x.block(l)[i];
          block(i, i) += 2.0 * cfg.tau * cfg.etas[l] * r[l][i] / (xi * xi);
        }
      }
      if (l != q) {
        for (int k = 0; k < n; ++k) {
          if (k == l || k == q) continue;
          const Tensor3 t = ThreeTensorApprox(game, x, k, l, q);
          for (int i = 0; i < t.d1; ++i)
            for (int j = 0; j < t.d2; ++j) {
              double c = 0.0;
              for (int a = 0; a < t.d0; ++a) c += t(a, i, j) * r[k][a];
              block(i, j) += 2.0 * cfg.etas[k] * c;
            }
        }
      }
      for (int i = 0; i < block.rows(); ++i)
        for (int j = 0; j < block.cols(); ++j)
          hess(off[l] + i, off[q] + j) = block(i, j);
    }
  }
  return hess;
}

namespace internal {

// Stacks sqrt(eta_k) B_kl over the per-player ones rows. `pair(k, l)` gives
// the (uncentered) payoff block for k != l.
template <typename PairFn>
Matrix AssembleTestMatrix(const std::vector<int>& counts, const BlockVector& x,
                          const LossConfig& cfg, PairFn pair) {
  const int n = static_cast<int>(counts.size());
  const auto off = BlockOffsets(counts);
  Matrix m(off[n] + n, off[n]);
  for (int k = 0; k < n; ++k) {
    const double s = std::sqrt(cfg.etas[k]);
    for (int l = 0; l < n; ++l) {
      Matrix blk;
      if (k == l) {
        blk = Matrix(counts[k], counts[k]);
        for (int i = 0; i < counts[k]; ++i) blk(i, i) = -cfg.tau / x.block(k)[i];
      } else {
        blk = pair(k, l);
      }
      blk = CenterColumns(std::move(blk));
      for (int i = 0; i < blk.rows(); ++i)
        for (int j = 0; j < blk.cols(); ++j)
          m(off[k] + i, off[l] + j) = s * blk(i, j);
    }
    for (int j = 0; j < counts[k]; ++j) m(off[n] + k, off[k] + j) = 1.0;
  }
  return m;
}

}  // namespace internal

// M(x): (Sum m_k + n) x Sum m_k.
inline Matrix TestMatrix(const NormalFormGame& game, const BlockVector& x,
                         const LossConfig& cfg) {
  cfg.Validate(game.num_players());
  CheckProfileShape(game, x);
  CheckInteriorForTau(x, cfg.tau);
  return internal::AssembleTestMatrix(
      game.action_counts(), x, cfg,
      [&](int k, int l) { return BimatrixApprox(game, x, k, l); });
}

// Same construction with the pair matrices P^k_kl in place of H^k_kl.
inline Matrix TestMatrix(const PolymatrixGame& game, const BlockVector& x,
                         const LossConfig& cfg) {
  ValidatePolymatrix(game);
  cfg.Validate(game.num_players());
  if (x.sizes() != game.action_counts)
    throw ValidationError("profile shape does not match the game");
  CheckInteriorForTau(x, cfg.tau);
  return internal::AssembleTestMatrix(
      game.action_counts, x, cfg, [&](int k, int l) { return game.pair[k][l]; });
}

inline bool IsolationTest(const NormalFormGame& game, const BlockVector& x,
                          const LossConfig& cfg, double tol = kRankTolerance) {
  return Rank(TestMatrix(game, x, cfg), tol) == game.total_actions();
}

// Block-diagonal Sum m_k x Sum (m_k - 1) matrix whose columns are an
// orthonormal basis of the product of tangent spaces (Helmert contrasts).
inline Matrix TangentBasis(const std::vector<int>& action_counts) {
  const auto off = BlockOffsets(action_counts);
  int cols = 0;
  for (int m : action_counts) cols += m - 1;
  Matrix q(off.back(), cols);
  int c = 0;
  for (std::size_t k = 0; k < action_counts.size(); ++k) {
    for (int j = 1; j < action_counts[k]; ++j, ++c) {
      const double norm = std::sqrt(static_cast<double>(j) * (j + 1));
      for (int i = 0; i < j; ++i) q(off[k] + i, c) = 1.0 / norm;
      q(off[k] + j, c) = -static_cast<double>(j) / norm;
    }
  }
  return q;
}

struct SpectrumReport {
  std::vector<double> eigenvalues;  // descending
  double alpha = 0.0;               // fraction below -kNegativeEigenTolerance
  int rank = 0;
  int sweeps = 0;
};

// Restricts a symmetric matrix to the tangent space and eigendecomposes it.
inline SpectrumReport TangentSpectrumOf(const Matrix& hess,
                                        const std::vector<int>& action_counts,
                                        double tol = kRankTolerance) {
  const Matrix q = TangentBasis(action_counts);
  if (hess.rows() != q.rows() || hess.cols() != q.rows())
    throw ValidationError("Hessian shape does not match the action counts");
  const Matrix reduced = q.Transposed() * hess * q;
  const double fro = reduced.FrobeniusNorm();
  const EigenResult eig =
      JacobiEigen(reduced, std::max(1e-10, 1e-14 * fro), 200);
  SpectrumReport rep;
  rep.eigenvalues = eig.values;
  rep.sweeps = eig.sweeps;
  double top = 0.0;
  for (double v : eig.values) top = std::max(top, std::abs(v));
  int negative = 0;
  for (double v : eig.values) {
    if (v < -kNegativeEigenTolerance) ++negative;
    if (std::abs(v) > tol * top && top > 0.0) ++rep.rank;
  }
  rep.alpha = eig.values.empty()
                  ? 0.0
                  : static_cast<double>(negative) / eig.values.size();
  return rep;
}

inline SpectrumReport TangentSpectrum(const NormalFormGame& game,
                                      const BlockVector& x,
                                      const LossConfig& cfg) {
  return TangentSpectrumOf(Hessian(game, x, cfg), game.action_counts());
}

}  // namespace nashstoch

#endif  // NASHSTOCH_CALCULUS_HPP_
