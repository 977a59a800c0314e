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

#ifndef NASHSTOCH_ZOO_HPP_
#define NASHSTOCH_ZOO_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nashstoch/errors.hpp"
#include "nashstoch/game.hpp"
#include "nashstoch/linalg.hpp"
#include "nashstoch/rng.hpp"

namespace nashstoch {

enum class ClassicName {
  kRps,
  kChicken,
  kMatchingPennies,
  kModifiedShapley,
  kPrisonersDilemma,
};

inline ClassicName ParseClassicName(std::string_view name) {
  if (name == "rps") return ClassicName::kRps;
  if (name == "chicken") return ClassicName::kChicken;
  if (name == "matching_pennies") return ClassicName::kMatchingPennies;
  if (name == "modified_shapley") return ClassicName::kModifiedShapley;
  if (name == "prisoners_dilemma") return ClassicName::kPrisonersDilemma;
  throw ValidationError("unknown classic game '" + std::string(name) +
                        "' (expected rps, chicken, matching_pennies, "
                        "modified_shapley or prisoners_dilemma)");
}

// Builds a two-player game from row-player and column-player matrices.
inline NormalFormGame Bimatrix(const Matrix& row, const Matrix& col,
                               GameLabels labels = {}) {
  if (row.rows() != col.rows() || row.cols() != col.cols())
    throw ValidationError("bimatrix payoff shapes differ");
  std::vector<double> a(row.data().begin(), row.data().end());
  std::vector<double> b(col.data().begin(), col.data().end());
  return NormalFormGame({row.rows(), row.cols()}, {a, b}, std::move(labels));
}

namespace internal {

inline Matrix FromRows(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows.begin()->size());
  Matrix m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace internal

// Unnormalized payoffs of the classic games.
inline NormalFormGame RawClassicGame(ClassicName name) {
  using internal::FromRows;
  switch (name) {
    case ClassicName::kRps:
      return Bimatrix(FromRows({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}}),
                      FromRows({{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}}),
                      {"rps", {"row", "col"}, {{"R", "P", "S"}, {"R", "P", "S"}}});
    case ClassicName::kChicken:
      return Bimatrix(FromRows({{0, -1}, {1, -3}}), FromRows({{0, 1}, {-1, -3}}),
                      {"chicken",
                       {"row", "col"},
                       {{"swerve", "straight"}, {"swerve", "straight"}}});
    case ClassicName::kMatchingPennies:
      return Bimatrix(FromRows({{1, -1}, {-1, 1}}), FromRows({{-1, 1}, {1, -1}}),
                      {"matching_pennies",
                       {"row", "col"},
                       {{"heads", "tails"}, {"heads", "tails"}}});
    case ClassicName::kModifiedShapley:
      return Bimatrix(
          FromRows({{1, 0, 0.5}, {0.5, 1, 0}, {0, 0.5, 1}}),
          FromRows({{-0.5, 1, 0}, {0, -0.5, 1}, {1, 0, -0.5}}),
          {"modified_shapley", {"row", "col"}, {{"a0", "a1", "a2"}, {"a0", "a1", "a2"}}});
    case ClassicName::kPrisonersDilemma:
      return Bimatrix(FromRows({{-1, -3}, {0, -2}}), FromRows({{-1, 0}, {-3, -2}}),
                      {"prisoners_dilemma",
                       {"row", "col"},
                       {{"cooperate", "defect"}, {"cooperate", "defect"}}});
  }
  throw ValidationError("unhandled classic game");
}

inline NormalFormGame ClassicGame(ClassicName name) {
  return NormalizePayoffs(RawClassicGame(name));
}

inline NormalFormGame ClassicGame(std::string_view name) {
  return ClassicGame(ParseClassicName(name));
}

// All ways to place `coins` identical coins on `fields` fields, in
// lexicographic order.
inline std::vector<std::vector<int>> BlottoAllocations(int coins, int fields) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(fields, 0);
  auto rec = [&](auto&& self, int field, int left) -> void {
    if (field == fields - 1) {
      cur[field] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[field] = v;
      self(self, field + 1, left - v);
    }
  };
  rec(rec, 0, coins);
  return out;
}

// Binomial coefficient, or -1 when it would exceed `cap`.
inline std::int64_t CappedBinomial(int n, int k, std::int64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return -1;
  }
  return r;
}

// Colonel Blotto. A field goes to the strict plurality of coins placed on it;
// tied leaders share the field equally. Raw payoff is the fraction of fields
// won, and the result is normalized per player.
inline NormalFormGame Blotto(int players, int coins, int fields) {
  if (players < 2) throw ValidationError("blotto needs at least 2 players");
  if (coins < 1) throw ValidationError("blotto needs at least 1 coin");
  if (fields < 2) throw ValidationError("blotto needs at least 2 fields");
  const std::int64_t m = CappedBinomial(coins + fields - 1, fields - 1,
                                        kMaxTensorEntries);
  if (m < 0) throw SizeError("blotto action count exceeds the size cap");
  std::int64_t joint = 1;
  for (int k = 0; k < players; ++k) {
    joint *= m;
    if (joint > kMaxTensorEntries)
      throw SizeError("blotto joint action space of " + std::to_string(m) +
                      "^" + std::to_string(players) + " exceeds the size cap");
  }
  const auto alloc = BlottoAllocations(coins, fields);
  std::vector<int> counts(players, static_cast<int>(m));
  std::vector<std::vector<double>> tensors(players, std::vector<double>(joint));
  std::vector<int> a(players, 0);
  std::vector<double> score(players);
  for (std::int64_t j = 0; j < joint; ++j) {
    std::fill(score.begin(), score.end(), 0.0);
    for (int f = 0; f < fields; ++f) {
      int best = -1, leaders = 0;
      for (int k = 0; k < players; ++k) {
        const int c = alloc[a[k]][f];
        if (c > best) {
          best = c;
          leaders = 1;
        } else if (c == best) {
          ++leaders;
        }
      }
      for (int k = 0; k < players; ++k)
        if (alloc[a[k]][f] == best) score[k] += 1.0 / leaders;
    }
    for (int k = 0; k < players; ++k) tensors[k][j] = score[k] / fields;
    for (int k = players - 1; k >= 0; --k) {
      if (++a[k] < m) break;
      a[k] = 0;
    }
  }
  GameLabels labels;
  labels.title = "blotto(" + std::to_string(players) + "," +
                 std::to_string(coins) + "," + std::to_string(fields) + ")";
  return NormalizePayoffs(NormalFormGame(counts, std::move(tensors), labels));
}

// A symmetric n-player two-action game. coeffs[a][c] is the payoff for
// playing action a when c of the other n-1 players play action 1.
struct SymmetricTwoActionGame {
  int num_players = 0;
  std::array<std::vector<double>, 2> coeffs;
};

inline SymmetricTwoActionGame SymmetricTwoAction(
    const std::vector<std::vector<double>>& coeffs) {
  if (coeffs.size() != 2)
    throw ValidationError("symmetric coefficients need exactly 2 rows");
  if (coeffs[0].size() != coeffs[1].size())
    throw ValidationError("symmetric coefficient rows differ in length");
  const int n = static_cast<int>(coeffs[0].size());
  if (n < 2) throw ValidationError("symmetric game needs at least 2 players");
  return {n, {coeffs[0], coeffs[1]}};
}

// Expands to normal form. Payoffs are kept as given when they already lie in
// [0,1] and normalized otherwise.
inline NormalFormGame ExpandSymmetric(const SymmetricTwoActionGame& g) {
  const int n = g.num_players;
  if (static_cast<int>(g.coeffs[0].size()) != n ||
      static_cast<int>(g.coeffs[1].size()) != n)
    throw ValidationError("symmetric coefficients must have n columns");
  const std::int64_t joint = std::int64_t{1} << n;
  if (joint > kMaxTensorEntries) throw SizeError("too many players");
  std::vector<std::vector<double>> tensors(n, std::vector<double>(joint));
  for (std::int64_t j = 0; j < joint; ++j) {
    int ones = 0;
    for (int k = 0; k < n; ++k) ones += (j >> (n - 1 - k)) & 1;
    for (int k = 0; k < n; ++k) {
      const int own = (j >> (n - 1 - k)) & 1;
      tensors[k][j] = g.coeffs[own][ones - own];
    }
  }
  NormalFormGame game(std::vector<int>(n, 2), std::move(tensors));
  return game.IsNormalized() ? game : NormalizePayoffs(game);
}

// The seven-player artificial symmetric game with several symmetric
// equilibria.
inline SymmetricTwoActionGame Sym7Coefficients() {
  return SymmetricTwoAction(
      {{0.09906873, 0, 0.23116037, 0, 0.62743528, 0, 0.19813746},
       {0, 0.33022909, 0, 0.03302291, 0, 0.62743528, 0}});
}

inline NormalFormGame Sym7Game() { return ExpandSymmetric(Sym7Coefficients()); }

// I.i.d. uniform payoffs. Entry j of player k's tensor is a pure function of
// (seed, k, j).
inline NormalFormGame RandomGame(const std::vector<int>& action_counts,
                                 std::uint64_t seed) {
  const int n = static_cast<int>(action_counts.size());
  std::int64_t joint = 1;
  for (int m : action_counts) {
    if (m < 2) throw ValidationError("every player needs at least 2 actions");
    joint *= m;
    if (joint > kMaxTensorEntries) throw SizeError("random game too large");
  }
  std::vector<std::vector<double>> tensors(n, std::vector<double>(joint));
  for (int k = 0; k < n; ++k) {
    const std::uint64_t key = DeriveKey(seed, {0x67616d65ULL, std::uint64_t(k)});
    for (std::int64_t j = 0; j < joint; ++j)
      tensors[k][j] = UniformAt(key, static_cast<std::uint64_t>(j));
  }
  return NormalFormGame(action_counts, std::move(tensors));
}

inline NormalFormGame RandomGame(int players, int actions, std::uint64_t seed) {
  return RandomGame(std::vector<int>(players, actions), seed);
}

// u_k(x) = sum_{l != k} x_k^T P^k_kl x_l. pair[k][l] is m_k x m_l; the diagonal
// is unused.
struct PolymatrixGame {
  std::vector<int> action_counts;
  std::vector<std::vector<Matrix>> pair;

  int num_players() const { return static_cast<int>(action_counts.size()); }
};

inline void ValidatePolymatrix(const PolymatrixGame& g) {
  const int n = g.num_players();
  if (n < 2) throw ValidationError("polymatrix game needs at least 2 players");
  if (static_cast<int>(g.pair.size()) != n)
    throw ValidationError("polymatrix game is missing pair matrices");
  for (int k = 0; k < n; ++k) {
    if (static_cast<int>(g.pair[k].size()) != n)
      throw ValidationError("polymatrix game is missing pair matrices for player " +
                            std::to_string(k));
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      const Matrix& p = g.pair[k][l];
      if (p.rows() != g.action_counts[k] || p.cols() != g.action_counts[l])
        throw ValidationError("missing or misshapen pair matrix P^" +
                              std::to_string(k) + "_" + std::to_string(k) +
                              std::to_string(l));
    }
  }
}

inline PolymatrixGame RandomPolymatrix(const std::vector<int>& action_counts,
                                       std::uint64_t seed) {
  PolymatrixGame g;
  g.action_counts = action_counts;
  const int n = static_cast<int>(action_counts.size());
  g.pair.assign(n, std::vector<Matrix>(n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      Matrix p(action_counts[k], action_counts[l]);
      const std::uint64_t key =
          DeriveKey(seed, {0x706f6c79ULL, std::uint64_t(k), std::uint64_t(l)});
      for (int i = 0; i < p.rows() * p.cols(); ++i)
        p.data()[i] = UniformAt(key, static_cast<std::uint64_t>(i));
      g.pair[k][l] = std::move(p);
    }
  return g;
}

// Expands to normal form and normalizes. If `ranges` is given it receives the
// per-player affine map applied, so normalized = ranges[k].Normalize(raw).
inline NormalFormGame ExpandPolymatrix(const PolymatrixGame& g,
                                       std::vector<PayoffRange>* ranges = nullptr) {
  ValidatePolymatrix(g);
  const int n = g.num_players();
  std::int64_t joint = 1;
  for (int m : g.action_counts) {
    joint *= m;
    if (joint > kMaxTensorEntries) throw SizeError("polymatrix game too large");
  }
  NormalFormGame shape(g.action_counts,
                       std::vector<std::vector<double>>(n, std::vector<double>(joint)));
  std::vector<std::vector<double>> tensors(n, std::vector<double>(joint, 0.0));
  for (std::int64_t j = 0; j < joint; ++j) {
    const auto a = shape.DecodeJoint(j);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        if (l != k) tensors[k][j] += g.pair[k][l](a[k], a[l]);
  }
  return NormalizePayoffs(NormalFormGame(g.action_counts, std::move(tensors)),
                          ranges);
}

}  // namespace nashstoch

#endif  // NASHSTOCH_ZOO_HPP_
