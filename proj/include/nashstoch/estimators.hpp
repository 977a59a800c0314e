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

#ifndef NASHSTOCH_ESTIMATORS_HPP_
#define NASHSTOCH_ESTIMATORS_HPP_

// Unbiased Monte-Carlo estimates of player gradients, the loss and the loss
// gradient.
//
// Randomness is addressed by key: a loss estimate keyed by K draws player k's
// two gradient samples from streams DeriveKey(K, {k, 0}) and
// DeriveKey(K, {k, 1}). Callers usually take K = DeriveKey(seed, {iteration}).

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nashstoch/errors.hpp"
#include "nashstoch/game.hpp"
#include "nashstoch/linalg.hpp"
#include "nashstoch/loss.hpp"
#include "nashstoch/rng.hpp"
#include "nashstoch/simplex.hpp"

namespace nashstoch {

enum class GradientKind { kExact, kSampleOthers, kSampleAll };

inline GradientKind ParseGradientKind(std::string_view s) {
  if (s == "exact") return GradientKind::kExact;
  if (s == "sample_others") return GradientKind::kSampleOthers;
  if (s == "sample_all") return GradientKind::kSampleAll;
  throw ValidationError("unknown estimator kind '" + std::string(s) +
                        "' (expected exact, sample_others or sample_all)");
}

inline const char* GradientKindName(GradientKind k) {
  switch (k) {
    case GradientKind::kExact: return "exact";
    case GradientKind::kSampleOthers: return "sample_others";
    case GradientKind::kSampleAll: return "sample_all";
  }
  return "?";
}

struct GradientEstimate {
  int player = 0;
  std::vector<double> values;
  GradientKind kind = GradientKind::kExact;
  std::uint64_t rng_draws_consumed = 0;
  // Payoff tensor entries read.
  std::int64_t queries = 0;
};

namespace internal {

// Draws a pure action for every player except those in `skip`.
inline std::vector<int> DrawOpponents(const BlockVector& x, int skip_a,
                                      int skip_b, Stream& rng) {
  std::vector<int> a(x.num_blocks(), 0);
  for (int p = 0; p < x.num_blocks(); ++p)
    if (p != skip_a && p != skip_b) a[p] = rng.Categorical(x.block(p));
  return a;
}

}  // namespace internal

inline GradientEstimate SampleGradient(const NormalFormGame& game,
                                       const BlockVector& x, int k,
                                       GradientKind kind, Stream& rng) {
  CheckPlayer(game, k);
  CheckProfileShape(game, x);
  GradientEstimate est;
  est.player = k;
  est.kind = kind;
  const int mk = game.num_actions(k);
  const std::uint64_t before = rng.draws();
  switch (kind) {
    case GradientKind::kExact:
      est.values = PlayerGradient(game, x, k);
      est.queries = game.num_joint_actions();
      break;
    case GradientKind::kSampleOthers: {
      std::vector<int> a = internal::DrawOpponents(x, k, k, rng);
      est.values.resize(mk);
      for (int i = 0; i < mk; ++i) {
        a[k] = i;
        est.values[i] = game.payoff(k, game.JointIndex(a));
      }
      est.queries = mk;
      break;
    }
    case GradientKind::kSampleAll: {
      const int ak = rng.Below(mk);
      std::vector<int> a = internal::DrawOpponents(x, k, k, rng);
      a[k] = ak;
      est.values.assign(mk, 0.0);
      est.values[ak] = mk * game.payoff(k, game.JointIndex(a));
      est.queries = 1;
      break;
    }
  }
  est.rng_draws_consumed = rng.draws() - before;
  return est;
}

// Average of `batch` independent samples drawn from one stream.
inline GradientEstimate SampleGradientBatch(const NormalFormGame& game,
                                            const BlockVector& x, int k,
                                            GradientKind kind, int batch,
                                            Stream& rng) {
  if (batch < 1) throw ValidationError("minibatch size must be at least 1");
  if (kind == GradientKind::kExact) return SampleGradient(game, x, k, kind, rng);
  GradientEstimate total = SampleGradient(game, x, k, kind, rng);
  for (int s = 1; s < batch; ++s) {
    const GradientEstimate e = SampleGradient(game, x, k, kind, rng);
    for (std::size_t i = 0; i < e.values.size(); ++i)
      total.values[i] += e.values[i];
    total.rng_draws_consumed += e.rng_draws_consumed;
    total.queries += e.queries;
  }
  for (double& v : total.values) v /= batch;
  return total;
}

struct LossEstimate {
  double value = 0.0;
  std::int64_t queries = 0;
};

// Two-sample estimate: sum_k eta_k <Pi(g1_k + tau dS), Pi(g2_k + tau dS)>
// with g1, g2 independent gradient estimates. The entropy term is added
// exactly. Individual estimates can be negative.
inline LossEstimate EstimateLoss(const NormalFormGame& game, const BlockVector& x,
                                 const LossConfig& cfg, GradientKind kind,
                                 std::uint64_t key, int batch = 1) {
  cfg.Validate(game.num_players());
  CheckProfileShape(game, x);
  LossEstimate out;
  for (int k = 0; k < game.num_players(); ++k) {
    Stream s0(DeriveKey(key, {std::uint64_t(k), 0}));
    Stream s1(DeriveKey(key, {std::uint64_t(k), 1}));
    const auto g0 = SampleGradientBatch(game, x, k, kind, batch, s0);
    const auto g1 = SampleGradientBatch(game, x, k, kind, batch, s1);
    const auto p0 = ProjectTangent(Regularize(g0.values, x.block(k), cfg.tau));
    const auto p1 = ProjectTangent(Regularize(g1.values, x.block(k), cfg.tau));
    out.value += cfg.etas[k] * Dot(p0, p1);
    out.queries += g0.queries + g1.queries;
  }
  return out;
}

// One draw of a_{-kl}; returns u_k(., ., a_{-kl}) as an m_k x m_l matrix.
inline Matrix SampleBimatrix(const NormalFormGame& game, const BlockVector& x,
                             int k, int l, Stream& rng) {
  CheckPlayer(game, k);
  CheckPlayer(game, l);
  if (k == l) throw ValidationError("bimatrix sample needs k != l");
  CheckProfileShape(game, x);
  std::vector<int> a = internal::DrawOpponents(x, k, l, rng);
  Matrix h(game.num_actions(k), game.num_actions(l));
  for (int i = 0; i < h.rows(); ++i)
    for (int j = 0; j < h.cols(); ++j) {
      a[k] = i;
      a[l] = j;
      h(i, j) = game.payoff(k, game.JointIndex(a));
    }
  return h;
}

struct LossGradientEstimate {
  BlockVector gradient;
  std::int64_t queries = 0;
};

inline void CheckInteriorForTau(const BlockVector& x, double tau) {
  if (tau <= 0.0) return;
  for (double p : x.flat())
    if (!(p > 0.0))
      throw NumericalError(
          "the loss gradient at tau > 0 needs a strictly interior profile; "
          "clamp probabilities away from zero first");
}

// grad_{x_l} L = 2 sum_k eta_k B_kl^T Pi(grad^{k,tau}), with B_kl estimated
// from sampled bimatrix games independent of the sampled gradients. The
// entropy block B_ll = -tau Pi diag(1/x_l) is exact. With kind == kExact
// this is the exact gradient.
inline LossGradientEstimate EstimateLossGradient(const NormalFormGame& game,
                                                 const BlockVector& x,
                                                 const LossConfig& cfg,
                                                 GradientKind kind,
                                                 std::uint64_t key,
                                                 int batch = 1) {
  cfg.Validate(game.num_players());
  CheckProfileShape(game, x);
  CheckInteriorForTau(x, cfg.tau);
  const int n = game.num_players();
  LossGradientEstimate out{BlockVector(game.action_counts()), 0};
  for (int k = 0; k < n; ++k) {
    Stream gs(DeriveKey(key, {std::uint64_t(k), 3}));
    const auto g = SampleGradientBatch(game, x, k, kind, batch, gs);
    out.queries += g.queries;
    const auto pg = ProjectTangent(Regularize(g.values, x.block(k), cfg.tau));
    for (int l = 0; l < n; ++l) {
      auto dst = out.gradient.block(l);
      if (l == k) {
        if (cfg.tau == 0.0) continue;
        // B_kk^T pg = -tau diag(1/x_k) Pi pg = -tau pg / x_k since Pi pg = pg.
        for (int i = 0; i < x.block_size(k); ++i)
          dst[i] += 2.0 * cfg.etas[k] * (-cfg.tau) * pg[i] / x.block(k)[i];
        continue;
      }
      Matrix h;
      if (kind == GradientKind::kExact || n == 2) {
        h = BimatrixApprox(game, x, k, l);
        out.queries += game.num_joint_actions();
      } else {
        Stream hs(DeriveKey(key, {std::uint64_t(k), 2, std::uint64_t(l)}));
        h = SampleBimatrix(game, x, k, l, hs);
        for (int s = 1; s < batch; ++s) h += SampleBimatrix(game, x, k, l, hs);
        h *= 1.0 / batch;
        out.queries += static_cast<std::int64_t>(batch) * h.rows() * h.cols();
      }
      // B_kl^T pg = H^T Pi pg = H^T pg.
      const auto v = h.ApplyTransposed(pg);
      for (int i = 0; i < x.block_size(l); ++i)
        dst[i] += 2.0 * cfg.etas[k] * v[i];
    }
  }
  return out;
}

struct EstimatorStats {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double range = 1.0;   // width of the interval containing every sample
  double delta = 0.05;  // Hoeffding failure probability
  double half_width = std::numeric_limits<double>::infinity();

  double variance() const { return count > 1 ? m2 / (count - 1) : 0.0; }
  double std_error() const {
    return count > 0 ? std::sqrt(variance() / count) : 0.0;
  }
};

inline double HoeffdingHalfWidth(double range, double delta, std::int64_t count) {
  if (count <= 0) return std::numeric_limits<double>::infinity();
  return range * std::sqrt(std::log(2.0 / delta) / (2.0 * count));
}

// Welford update.
inline EstimatorStats Accumulate(EstimatorStats s, double value) {
  ++s.count;
  const double d = value - s.mean;
  s.mean += d / s.count;
  s.m2 += d * (value - s.mean);
  s.half_width = HoeffdingHalfWidth(s.range, s.delta, s.count);
  return s;
}

// Worst-case range of a single two-sample loss estimate when every
// gradient entry lies in [lo_k, hi_k] before projection: each projected
// product is at most (1/4) m_k (hi_k - lo_k)^2 in magnitude.
inline double LossEstimateRange(const NormalFormGame& game, const BlockVector& x,
                                const LossConfig& cfg, GradientKind kind) {
  double bound = 0.0;
  for (int k = 0; k < game.num_players(); ++k) {
    const int mk = game.num_actions(k);
    double width = kind == GradientKind::kSampleAll ? mk : 1.0;
    if (cfg.tau > 0.0) {
      const auto ds = EntropyGradient(x.block(k));
      const auto [lo, hi] = std::minmax_element(ds.begin(), ds.end());
      width += cfg.tau * (*hi - *lo);
    }
    bound += 0.25 * cfg.etas[k] * mk * width * width;
  }
  return 2.0 * bound;
}

}  // namespace nashstoch

#endif  // NASHSTOCH_ESTIMATORS_HPP_
