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

#ifndef NASHSTOCH_GAME_HPP_
#define NASHSTOCH_GAME_HPP_

// Dense n-player normal-form games and exact expectations over mixed
// strategies.
//
// Payoff tensors are stored row-major over the joint action space: the joint
// index of (a_1, ..., a_n) is sum_k a_k * stride_k with the last player's axis
// varying fastest.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nashstoch/errors.hpp"
#include "nashstoch/linalg.hpp"

namespace nashstoch {

inline constexpr double kSimplexSumTolerance = 1e-9;
inline constexpr double kNegativeTolerance = 1e-12;
// Largest number of entries allowed in a single payoff tensor.
inline constexpr std::int64_t kMaxTensorEntries = std::int64_t{1} << 25;

// Per-player blocks stored contiguously. Used both for strategy profiles and
// for gradients, and for points off the simplex (finite differences).
class BlockVector {
 public:
  BlockVector() = default;
  explicit BlockVector(std::vector<int> sizes, double fill = 0.0)
      : sizes_(std::move(sizes)) {
    BuildOffsets();
    data_.assign(offsets_.back(), fill);
  }
  BlockVector(std::vector<int> sizes, std::vector<double> flat)
      : sizes_(std::move(sizes)), data_(std::move(flat)) {
    BuildOffsets();
    if (static_cast<int>(data_.size()) != offsets_.back())
      throw ValidationError("flat data does not match block sizes");
  }
  static BlockVector FromBlocks(const std::vector<std::vector<double>>& blocks) {
    std::vector<int> sizes;
    std::vector<double> flat;
    for (const auto& b : blocks) {
      sizes.push_back(static_cast<int>(b.size()));
      flat.insert(flat.end(), b.begin(), b.end());
    }
    return BlockVector(std::move(sizes), std::move(flat));
  }

  int num_blocks() const { return static_cast<int>(sizes_.size()); }
  int block_size(int k) const { return sizes_[k]; }
  int offset(int k) const { return offsets_[k]; }
  int size() const { return static_cast<int>(data_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }

  std::span<const double> block(int k) const {
    return std::span<const double>(data_).subspan(offsets_[k], sizes_[k]);
  }
  std::span<double> block(int k) {
    return std::span<double>(data_).subspan(offsets_[k], sizes_[k]);
  }
  std::span<const double> flat() const { return data_; }
  std::span<double> flat() { return data_; }
  double operator[](int i) const { return data_[i]; }
  double& operator[](int i) { return data_[i]; }

  std::vector<std::vector<double>> ToBlocks() const {
    std::vector<std::vector<double>> out;
    for (int k = 0; k < num_blocks(); ++k)
      out.emplace_back(block(k).begin(), block(k).end());
    return out;
  }

  BlockVector& operator+=(const BlockVector& o) {
    CheckSameShape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  BlockVector& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend bool operator==(const BlockVector& a, const BlockVector& b) {
    return a.sizes_ == b.sizes_ && a.data_ == b.data_;
  }

 private:
  void BuildOffsets() {
    offsets_.assign(sizes_.size() + 1, 0);
    for (std::size_t k = 0; k < sizes_.size(); ++k) {
      if (sizes_[k] < 0) throw ValidationError("negative block size");
      offsets_[k + 1] = offsets_[k] + sizes_[k];
    }
  }
  void CheckSameShape(const BlockVector& o) const {
    if (o.sizes_ != sizes_) throw ValidationError("block shape mismatch");
  }

  std::vector<int> sizes_;
  std::vector<int> offsets_{0};
  std::vector<double> data_;
};

// Checks a probability vector and clamps tiny negative entries to zero.
inline std::vector<double> ValidatedProbabilities(std::vector<double> p) {
  if (p.empty()) throw ValidationError("empty probability vector");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]))
      throw ValidationError("non-finite probability at index " +
                            std::to_string(i));
    if (p[i] < -kNegativeTolerance)
      throw ValidationError("negative probability " + std::to_string(p[i]) +
                            " at index " + std::to_string(i));
    if (p[i] < 0.0) p[i] = 0.0;
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > kSimplexSumTolerance)
    throw ValidationError("probabilities sum to " + std::to_string(sum));
  return p;
}

class MixedStrategy {
 public:
  explicit MixedStrategy(std::vector<double> probs)
      : probs_(ValidatedProbabilities(std::move(probs))) {}

  static MixedStrategy Uniform(int m) {
    return MixedStrategy(std::vector<double>(m, 1.0 / m));
  }

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vector() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// A BlockVector whose every block is a valid mixed strategy.
class JointStrategy : public BlockVector {
 public:
  explicit JointStrategy(const BlockVector& v) : BlockVector(v) { Validate(); }
  explicit JointStrategy(const std::vector<std::vector<double>>& blocks)
      : BlockVector(BlockVector::FromBlocks(blocks)) {
    Validate();
  }
  JointStrategy(std::initializer_list<std::vector<double>> blocks)
      : JointStrategy(std::vector<std::vector<double>>(blocks)) {}
  explicit JointStrategy(const std::vector<MixedStrategy>& strategies)
      : BlockVector(Collect(strategies)) {
    Validate();
  }

  static JointStrategy Uniform(const std::vector<int>& action_counts) {
    BlockVector v(action_counts);
    for (int k = 0; k < v.num_blocks(); ++k)
      for (double& p : v.block(k)) p = 1.0 / v.block_size(k);
    return JointStrategy(v);
  }

  static JointStrategy Pure(const std::vector<int>& action_counts,
                            const std::vector<int>& actions) {
    if (actions.size() != action_counts.size())
      throw ValidationError("pure profile has wrong number of players");
    BlockVector v(action_counts);
    for (int k = 0; k < v.num_blocks(); ++k) {
      if (actions[k] < 0 || actions[k] >= action_counts[k])
        throw ValidationError("pure action out of range");
      v.block(k)[actions[k]] = 1.0;
    }
    return JointStrategy(v);
  }

  MixedStrategy strategy(int k) const {
    return MixedStrategy(std::vector<double>(block(k).begin(), block(k).end()));
  }

  double MinProbability() const {
    double m = 1.0;
    for (double p : flat()) m = std::min(m, p);
    return m;
  }

 private:
  static BlockVector Collect(const std::vector<MixedStrategy>& strategies) {
    std::vector<std::vector<double>> blocks;
    for (const auto& s : strategies) blocks.push_back(s.vector());
    return BlockVector::FromBlocks(blocks);
  }

  void Validate() {
    for (int k = 0; k < num_blocks(); ++k) {
      try {
        std::vector<double> p = ValidatedProbabilities(
            std::vector<double>(block(k).begin(), block(k).end()));
        std::copy(p.begin(), p.end(), block(k).begin());
      } catch (const ValidationError& e) {
        throw ValidationError("player " + std::to_string(k) + ": " + e.what());
      }
    }
  }
};

struct GameLabels {
  std::string title;
  std::vector<std::string> players;
  std::vector<std::vector<std::string>> actions;

  bool empty() const {
    return title.empty() && players.empty() && actions.empty();
  }
  friend bool operator==(const GameLabels&, const GameLabels&) = default;
};

// An m_k x m_l x m_q tensor, row-major.
struct Tensor3 {
  int d0 = 0, d1 = 0, d2 = 0;
  std::vector<double> data;

  double operator()(int i, int j, int l) const {
    return data[(static_cast<std::size_t>(i) * d1 + j) * d2 + l];
  }
};

class NormalFormGame {
 public:
  NormalFormGame(std::vector<int> action_counts,
                 std::vector<std::vector<double>> payoffs,
                 GameLabels labels = {})
      : action_counts_(std::move(action_counts)),
        payoffs_(std::move(payoffs)),
        labels_(std::move(labels)) {
    const int n = num_players();
    if (n < 2) throw ValidationError("a game needs at least two players");
    std::int64_t joint = 1;
    for (int k = 0; k < n; ++k) {
      if (action_counts_[k] < 2)
        throw ValidationError("player " + std::to_string(k) +
                              " needs at least two actions");
      joint *= action_counts_[k];
      if (joint > kMaxTensorEntries)
        throw SizeError("joint action space exceeds " +
                        std::to_string(kMaxTensorEntries) + " entries");
    }
    num_joint_ = joint;
    strides_.assign(n, 1);
    for (int k = n - 2; k >= 0; --k)
      strides_[k] = strides_[k + 1] * action_counts_[k + 1];
    if (static_cast<int>(payoffs_.size()) != n)
      throw ValidationError("expected " + std::to_string(n) +
                            " payoff tensors, got " +
                            std::to_string(payoffs_.size()));
    for (int k = 0; k < n; ++k) {
      if (static_cast<std::int64_t>(payoffs_[k].size()) != num_joint_)
        throw ValidationError("payoff tensor " + std::to_string(k) + " has " +
                              std::to_string(payoffs_[k].size()) +
                              " entries, expected " +
                              std::to_string(num_joint_));
      for (double v : payoffs_[k])
        if (!std::isfinite(v))
          throw ValidationError("non-finite payoff in tensor " +
                                std::to_string(k));
    }
    if (!labels_.players.empty() && static_cast<int>(labels_.players.size()) != n)
      throw ValidationError("player label count does not match players");
    if (!labels_.actions.empty()) {
      if (static_cast<int>(labels_.actions.size()) != n)
        throw ValidationError("action label count does not match players");
      for (int k = 0; k < n; ++k)
        if (static_cast<int>(labels_.actions[k].size()) != action_counts_[k])
          throw ValidationError("action labels for player " +
                                std::to_string(k) + " do not match m_k");
    }
  }

  int num_players() const { return static_cast<int>(action_counts_.size()); }
  const std::vector<int>& action_counts() const { return action_counts_; }
  int num_actions(int k) const { return action_counts_[k]; }
  std::int64_t num_joint_actions() const { return num_joint_; }
  std::int64_t stride(int k) const { return strides_[k]; }
  int total_actions() const {
    return std::accumulate(action_counts_.begin(), action_counts_.end(), 0);
  }
  int max_actions() const {
    return *std::max_element(action_counts_.begin(), action_counts_.end());
  }
  double mean_actions() const {
    return static_cast<double>(total_actions()) / num_players();
  }
  const GameLabels& labels() const { return labels_; }

  std::span<const double> payoffs(int k) const { return payoffs_[k]; }
  double payoff(int k, std::int64_t joint) const { return payoffs_[k][joint]; }

  std::int64_t JointIndex(std::span<const int> actions) const {
    std::int64_t idx = 0;
    for (int k = 0; k < num_players(); ++k) idx += actions[k] * strides_[k];
    return idx;
  }

  std::vector<int> DecodeJoint(std::int64_t idx) const {
    std::vector<int> a(num_players());
    for (int k = 0; k < num_players(); ++k) {
      a[k] = static_cast<int>(idx / strides_[k]);
      idx %= strides_[k];
    }
    return a;
  }

  bool IsNormalized() const {
    for (const auto& t : payoffs_)
      for (double v : t)
        if (v < 0.0 || v > 1.0) return false;
    return true;
  }

  friend bool operator==(const NormalFormGame& a, const NormalFormGame& b) {
    return a.action_counts_ == b.action_counts_ && a.payoffs_ == b.payoffs_ &&
           a.labels_ == b.labels_;
  }

 private:
  std::vector<int> action_counts_;
  std::vector<std::vector<double>> payoffs_;
  GameLabels labels_;
  std::vector<std::int64_t> strides_;
  std::int64_t num_joint_ = 0;
};

inline void CheckProfileShape(const NormalFormGame& game, const BlockVector& x) {
  if (x.sizes() != game.action_counts())
    throw ValidationError("profile shape does not match the game's action counts");
}

inline void CheckPlayer(const NormalFormGame& game, int k) {
  if (k < 0 || k >= game.num_players())
    throw ValidationError("player index " + std::to_string(k) + " out of range");
}

// Contracts player k's payoff tensor with x over every axis not listed in
// `keep`. The result is a dense row-major tensor over the kept axes, in the
// order they are listed. x may lie off the simplex.
inline std::vector<double> Contract(const NormalFormGame& game, int k,
                                    const BlockVector& x,
                                    std::span<const int> keep) {
  CheckPlayer(game, k);
  CheckProfileShape(game, x);
  const int n = game.num_players();
  std::vector<std::int64_t> out_stride(n, 0);
  std::int64_t out_size = 1;
  for (int i = static_cast<int>(keep.size()) - 1; i >= 0; --i) {
    CheckPlayer(game, keep[i]);
    if (out_stride[keep[i]] != 0)
      throw ValidationError("repeated axis in contraction");
    out_stride[keep[i]] = out_size;
    out_size *= game.num_actions(keep[i]);
  }
  std::vector<bool> kept(n, false);
  for (int a : keep) kept[a] = true;

  // Odometer over the joint action space with prefix products of weights so
  // each step only recomputes the axes that changed.
  std::vector<double> out(out_size, 0.0);
  std::vector<int> digit(n, 0);
  std::vector<double> prefix(n + 1, 1.0);
  auto weight_of = [&](int axis) {
    return kept[axis] ? 1.0 : x.block(axis)[digit[axis]];
  };
  for (int a = 0; a < n; ++a) prefix[a + 1] = prefix[a] * weight_of(a);
  const auto tensor = game.payoffs(k);
  std::int64_t out_idx = 0;
  for (std::int64_t j = 0; j < game.num_joint_actions(); ++j) {
    if (prefix[n] != 0.0) out[out_idx] += prefix[n] * tensor[j];
    int axis = n - 1;
    while (axis >= 0) {
      out_idx += out_stride[axis];
      if (++digit[axis] < game.num_actions(axis)) break;
      out_idx -= out_stride[axis] * digit[axis];
      digit[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
    for (int a = axis; a < n; ++a) prefix[a + 1] = prefix[a] * weight_of(a);
  }
  return out;
}

inline double Utility(const NormalFormGame& game, const BlockVector& x, int k) {
  return Contract(game, k, x, {})[0];
}

// Entry l is u_k(a_kl, x_{-k}).
inline std::vector<double> PlayerGradient(const NormalFormGame& game,
                                          const BlockVector& x, int k) {
  const int keep[] = {k};
  return Contract(game, k, x, keep);
}

inline BlockVector AllPlayerGradients(const NormalFormGame& game,
                                      const BlockVector& x) {
  BlockVector g(game.action_counts());
  for (int k = 0; k < game.num_players(); ++k) {
    const auto gk = PlayerGradient(game, x, k);
    std::copy(gk.begin(), gk.end(), g.block(k).begin());
  }
  return g;
}

// H^k_kl: player k's expected payoff matrix against player l when everyone
// else plays x.
inline Matrix BimatrixApprox(const NormalFormGame& game, const BlockVector& x,
                             int k, int l) {
  CheckPlayer(game, k);
  CheckPlayer(game, l);
  if (k == l) throw ValidationError("bimatrix approximation needs k != l");
  const int keep[] = {k, l};
  const auto flat = Contract(game, k, x, keep);
  Matrix h(game.num_actions(k), game.num_actions(l));
  std::copy(flat.begin(), flat.end(), h.data().begin());
  return h;
}

// T^k_klq, indexed [a_k][a_l][a_q].
inline Tensor3 ThreeTensorApprox(const NormalFormGame& game,
                                 const BlockVector& x, int k, int l, int q) {
  CheckPlayer(game, k);
  CheckPlayer(game, l);
  CheckPlayer(game, q);
  if (k == l || k == q || l == q)
    throw ValidationError("three-tensor approximation needs distinct players");
  const int keep[] = {k, l, q};
  Tensor3 t;
  t.d0 = game.num_actions(k);
  t.d1 = game.num_actions(l);
  t.d2 = game.num_actions(q);
  t.data = Contract(game, k, x, keep);
  return t;
}

struct PayoffRange {
  double min = 0.0;
  double max = 1.0;

  // Maps a raw payoff into [0,1]; a degenerate range maps to 0.5.
  double Normalize(double raw) const {
    return max > min ? (raw - min) / (max - min) : 0.5;
  }
};

// Rescales each player's payoffs independently onto [0,1].
inline NormalFormGame NormalizePayoffs(const NormalFormGame& raw,
                                       std::vector<PayoffRange>* ranges = nullptr) {
  std::vector<std::vector<double>> tensors;
  std::vector<PayoffRange> used;
  for (int k = 0; k < raw.num_players(); ++k) {
    const auto t = raw.payoffs(k);
    const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
    PayoffRange r{*lo, *hi};
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = r.Normalize(t[i]);
    tensors.push_back(std::move(out));
    used.push_back(r);
  }
  if (ranges != nullptr) *ranges = std::move(used);
  return NormalFormGame(raw.action_counts(), std::move(tensors), raw.labels());
}

}  // namespace nashstoch

#endif  // NASHSTOCH_GAME_HPP_
