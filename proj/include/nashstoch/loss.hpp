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

#ifndef NASHSTOCH_LOSS_HPP_
#define NASHSTOCH_LOSS_HPP_

// The projected-gradient loss
//
//   L^tau(x) = sum_k eta_k || Pi(grad^k + tau dS/dx_k) ||^2
//
// together with exploitability measures and the closed-form bounds that
// relate them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nashstoch/errors.hpp"
#include "nashstoch/game.hpp"
#include "nashstoch/linalg.hpp"
#include "nashstoch/simplex.hpp"

namespace nashstoch {

inline constexpr double kLogFloor = 1e-300;
// Cap on the opponent profiles enumerated by BiasedSampledNashConv.
inline constexpr std::int64_t kEnumerationCap = std::int64_t{1} << 24;

struct LossConfig {
  std::vector<double> etas;
  double tau = 0.0;

  static LossConfig Uniform(int num_players, double tau = 0.0, double eta = 1.0) {
    return {std::vector<double>(num_players, eta), tau};
  }

  void Validate(int num_players) const {
    if (static_cast<int>(etas.size()) != num_players)
      throw ValidationError("expected " + std::to_string(num_players) +
                            " step weights, got " + std::to_string(etas.size()));
    for (double e : etas)
      if (!(e > 0.0) || !std::isfinite(e))
        throw ValidationError("step weights must be positive and finite");
    if (!(tau >= 0.0) || !std::isfinite(tau))
      throw ValidationError("temperature must be non-negative and finite");
  }

  double min_eta() const { return *std::min_element(etas.begin(), etas.end()); }
  double max_eta() const { return *std::max_element(etas.begin(), etas.end()); }
};

// Shannon entropy with 0 ln 0 = 0.
inline double Entropy(std::span<const double> x) {
  double s = 0.0;
  for (double p : x)
    if (p > 0.0) s -= p * std::log(p);
  return s;
}

// dS/dx = -(ln x + 1), with x floored at kLogFloor.
inline std::vector<double> EntropyGradient(std::span<const double> x) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    g[i] = -(std::log(std::max(x[i], kLogFloor)) + 1.0);
  return g;
}

inline double LogSumExp(std::span<const double> v) {
  const double top = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - top);
  return top + std::log(s);
}

// grad^k + tau dS/dx_k given the plain gradient.
inline std::vector<double> Regularize(std::span<const double> grad,
                                      std::span<const double> xk, double tau) {
  std::vector<double> out(grad.begin(), grad.end());
  if (tau == 0.0) return out;
  const auto ds = EntropyGradient(xk);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += tau * ds[i];
  return out;
}

inline std::vector<double> RegularizedGradient(const NormalFormGame& game,
                                               const BlockVector& x, int k,
                                               double tau) {
  return Regularize(PlayerGradient(game, x, k), x.block(k), tau);
}

struct Exploitability {
  double epsilon = 0.0;
  std::vector<double> per_player;
};

// eps_k = max_l grad^k_l - <x_k, grad^k>; eps = max_k eps_k.
inline Exploitability ExploitabilityFromGradients(const BlockVector& x,
                                                  const BlockVector& grads) {
  Exploitability e;
  for (int k = 0; k < x.num_blocks(); ++k) {
    const auto g = grads.block(k);
    const double best = *std::max_element(g.begin(), g.end());
    const double ek = std::max(0.0, best - Dot(x.block(k), g));
    e.per_player.push_back(ek);
    e.epsilon = std::max(e.epsilon, ek);
  }
  return e;
}

inline Exploitability ExploitabilityOf(const NormalFormGame& game,
                                       const BlockVector& x) {
  return ExploitabilityFromGradients(x, AllPlayerGradients(game, x));
}

inline double NashConv(const NormalFormGame& game, const BlockVector& x) {
  double s = 0.0;
  for (double e : ExploitabilityOf(game, x).per_player) s += e;
  return s;
}

inline double LogActionProduct(const std::vector<int>& action_counts) {
  double s = 0.0;
  for (int m : action_counts) s += std::log(static_cast<double>(m));
  return s;
}

// tau ln(prod m_k) + sqrt(2n / min eta) sqrt(L^tau).
inline double NashBoundFromLoss(double loss, const std::vector<int>& action_counts,
                                const LossConfig& cfg) {
  const double n = static_cast<double>(action_counts.size());
  return cfg.tau * LogActionProduct(action_counts) +
         std::sqrt(2.0 * n / cfg.min_eta()) * std::sqrt(std::max(loss, 0.0));
}

struct LossReport {
  double loss = 0.0;
  // ||Pi(grad^{k,tau})|| per player.
  std::vector<double> projected_norms;
  std::vector<double> player_eps;
  double epsilon = 0.0;
  double nashconv = 0.0;
  // f_tau(L^tau), an upper bound on epsilon.
  double bound = 0.0;
};

inline LossReport LossValue(const NormalFormGame& game, const BlockVector& x,
                            const LossConfig& cfg) {
  cfg.Validate(game.num_players());
  CheckProfileShape(game, x);
  const BlockVector grads = AllPlayerGradients(game, x);
  LossReport r;
  for (int k = 0; k < game.num_players(); ++k) {
    const auto pg =
        ProjectTangent(Regularize(grads.block(k), x.block(k), cfg.tau));
    const double sq = Dot(pg, pg);
    r.loss += cfg.etas[k] * sq;
    r.projected_norms.push_back(std::sqrt(sq));
  }
  const Exploitability e = ExploitabilityFromGradients(x, grads);
  r.player_eps = e.per_player;
  r.epsilon = e.epsilon;
  for (double v : e.per_player) r.nashconv += v;
  r.bound = NashBoundFromLoss(r.loss, game.action_counts(), cfg);
  return r;
}

inline double Loss(const NormalFormGame& game, const BlockVector& x,
                   const LossConfig& cfg) {
  return LossValue(game, x, cfg).loss;
}

inline double NashBound(const NormalFormGame& game, const BlockVector& x,
                        const LossConfig& cfg) {
  return LossValue(game, x, cfg).bound;
}

// Per-player entropy-regularized exploitability: the best regularized
// response value tau lse(grad/tau) minus u_k(x) + tau S(x_k).
inline std::vector<double> QreExploitabilityPerPlayer(const NormalFormGame& game,
                                                      const BlockVector& x,
                                                      double tau) {
  if (!(tau > 0.0)) throw ValidationError("QRE exploitability needs tau > 0");
  std::vector<double> out;
  for (int k = 0; k < game.num_players(); ++k) {
    const auto g = PlayerGradient(game, x, k);
    std::vector<double> scaled(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) scaled[i] = g[i] / tau;
    const double best = tau * LogSumExp(scaled);
    const double current = Dot(x.block(k), g) + tau * Entropy(x.block(k));
    out.push_back(std::max(0.0, best - current));
  }
  return out;
}

inline double QreExploitability(const NormalFormGame& game, const BlockVector& x,
                                double tau) {
  const auto v = QreExploitabilityPerPlayer(game, x, tau);
  return *std::max_element(v.begin(), v.end());
}

// Expected best-response gain when opponents' pure actions are sampled before
// the best response is taken:
//   E_{a_-k}[max_{a_k} u^tau_k(a)] - (u_k(x) + tau S(x_k)),
// with the max replaced by tau lse(./tau) for tau > 0. Summed over players.
inline std::vector<double> BiasedSampledNashConvPerPlayer(
    const NormalFormGame& game, const BlockVector& x, double tau,
    std::int64_t cap = kEnumerationCap) {
  CheckProfileShape(game, x);
  if (tau < 0.0) throw ValidationError("temperature must be non-negative");
  const int n = game.num_players();
  std::vector<double> out;
  for (int k = 0; k < n; ++k) {
    std::int64_t others = game.num_joint_actions() / game.num_actions(k);
    if (others > cap)
      throw SizeError("opponent profile enumeration of " +
                      std::to_string(others) + " exceeds the cap");
    const int mk = game.num_actions(k);
    std::vector<int> a(n, 0);
    std::vector<double> row(mk);
    double expected_best = 0.0;
    for (std::int64_t j = 0; j < others; ++j) {
      double w = 1.0;
      for (int p = 0; p < n; ++p)
        if (p != k) w *= x.block(p)[a[p]];
      if (w != 0.0) {
        for (int i = 0; i < mk; ++i) {
          a[k] = i;
          row[i] = game.payoff(k, game.JointIndex(a));
        }
        a[k] = 0;
        double best;
        if (tau > 0.0) {
          for (double& v : row) v /= tau;
          best = tau * LogSumExp(row);
        } else {
          best = *std::max_element(row.begin(), row.end());
        }
        expected_best += w * best;
      }
      for (int p = n - 1; p >= 0; --p) {
        if (p == k) continue;
        if (++a[p] < game.num_actions(p)) break;
        a[p] = 0;
      }
    }
    const double current = Utility(game, x, k) + tau * Entropy(x.block(k));
    out.push_back(expected_best - current);
  }
  return out;
}

inline double BiasedSampledNashConv(const NormalFormGame& game,
                                    const BlockVector& x, double tau,
                                    std::int64_t cap = kEnumerationCap) {
  double s = 0.0;
  for (double v : BiasedSampledNashConvPerPlayer(game, x, tau, cap)) s += v;
  return s;
}

inline void CheckP(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("p must lie in (0, 1)");
}

// tau = 1 / ln(1/p).
inline double SetTau(double p) {
  CheckP(p);
  return 1.0 / std::log(1.0 / p);
}

// Lower bound p / m* on every probability of a QRE at tau = SetTau(p).
inline double MinProb(double p, int max_actions) {
  CheckP(p);
  return p / max_actions;
}

struct GameDims {
  int num_players = 0;
  double mean_actions = 0.0;  // m-bar
  int max_actions = 0;        // m*

  static GameDims Of(const std::vector<int>& action_counts) {
    GameDims d;
    d.num_players = static_cast<int>(action_counts.size());
    int total = 0;
    for (int m : action_counts) {
      total += m;
      d.max_actions = std::max(d.max_actions, m);
    }
    d.mean_actions = static_cast<double>(total) / d.num_players;
    return d;
  }
  static GameDims Of(const NormalFormGame& g) { return Of(g.action_counts()); }
};

// L-hat = (ln m* / ln(1/p) + 2)(m*^2 / (p ln(1/p)) + n m-bar). The loss
// gradient's infinity norm is at most max(eta) L-hat / 2.
inline double LipschitzBound(const GameDims& d, double p) {
  CheckP(p);
  const double lp = std::log(1.0 / p);
  const double ms = d.max_actions;
  return (std::log(ms) / lp + 2.0) *
         (ms * ms / (p * lp) + d.num_players * d.mean_actions);
}

inline double GradientInfNormBound(const GameDims& d, double p,
                                   const std::vector<double>& etas) {
  return 0.5 * *std::max_element(etas.begin(), etas.end()) * LipschitzBound(d, p);
}

// |L^tau| <= (1/4) max(eta) n m-bar (ln m* / ln(1/p) + 2)^2.
inline double LossRangeBound(const GameDims& d, double p,
                             const std::vector<double>& etas) {
  CheckP(p);
  const double t = std::log(static_cast<double>(d.max_actions)) /
                       std::log(1.0 / p) + 2.0;
  return 0.25 * *std::max_element(etas.begin(), etas.end()) * d.num_players *
         d.mean_actions * t * t;
}

struct LossDecomposition {
  double a = 0.0;  // sum eta_k ||B_kq x_q||^2
  double b = 0.0;  // 2 sum eta_k E_k^T B_kq x_q
  double c = 0.0;  // sum eta_k ||E_k||^2
};

// Splits L^tau into payoff, cross and entropy parts with B_kq = Pi H^k_kq,
// E_k = -tau Pi ln x_k and partner q = (k + 1) mod n.
inline LossDecomposition DecomposeLoss(const NormalFormGame& game,
                                       const BlockVector& x,
                                       const LossConfig& cfg) {
  cfg.Validate(game.num_players());
  const int n = game.num_players();
  LossDecomposition d;
  for (int k = 0; k < n; ++k) {
    const int q = (k + 1) % n;
    const Matrix b = CenterColumns(BimatrixApprox(game, x, k, q));
    const auto bx = b.Apply(x.block(q));
    std::vector<double> logx(x.block_size(k));
    for (int i = 0; i < x.block_size(k); ++i)
      logx[i] = std::log(std::max(x.block(k)[i], kLogFloor));
    auto e = ProjectTangent(logx);
    for (double& v : e) v *= -cfg.tau;
    d.a += cfg.etas[k] * Dot(bx, bx);
    d.b += 2.0 * cfg.etas[k] * Dot(e, bx);
    d.c += cfg.etas[k] * Dot(e, e);
  }
  return d;
}

}  // namespace nashstoch

#endif  // NASHSTOCH_LOSS_HPP_
