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

#ifndef NASHSTOCH_ANALYSIS_HPP_
#define NASHSTOCH_ANALYSIS_HPP_

// Loss surfaces over two-player games and the critical-point index study.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nashstoch/calculus.hpp"
#include "nashstoch/errors.hpp"
#include "nashstoch/game.hpp"
#include "nashstoch/loss.hpp"
#include "nashstoch/parallel.hpp"
#include "nashstoch/rng.hpp"
#include "nashstoch/simplex.hpp"
#include "nashstoch/solvers.hpp"

namespace nashstoch {

inline constexpr double kLogitSpan = 6.0;

enum class SurfaceSpace { kProb, kLogit };

inline SurfaceSpace ParseSurfaceSpace(std::string_view s) {
  if (s == "prob") return SurfaceSpace::kProb;
  if (s == "logit") return SurfaceSpace::kLogit;
  throw ValidationError("unknown surface space '" + std::string(s) +
                        "' (expected prob or logit)");
}

struct SurfaceCell {
  // Per player: probability of action 0 (two actions) or of actions 0 and 1
  // (three actions).
  std::vector<std::vector<double>> coords;
  double loss = 0.0;
  double bound = 0.0;  // f_tau(L^tau) - tau ln(prod m_k)
  double epsilon = 0.0;
  double biased_nashconv = 0.0;
};

struct SurfaceGrid {
  SurfaceSpace space = SurfaceSpace::kProb;
  int resolution = 0;
  double tau = 0.0;
  std::vector<int> points;  // grid points per player
  std::vector<SurfaceCell> cells;  // player 0 index varies slowest

  const SurfaceCell& at(int i, int j) const { return cells[i * points[1] + j]; }
};

namespace internal {

// Strategies a single player takes on the grid.
inline std::vector<std::vector<double>> PlayerGridStrategies(int m, int res,
                                                            SurfaceSpace space) {
  std::vector<std::vector<double>> out;
  auto coord = [&](int i) {
    const double t = static_cast<double>(i) / (res - 1);
    if (space == SurfaceSpace::kProb) return t;
    const double u = -kLogitSpan + 2.0 * kLogitSpan * t;
    return 1.0 / (1.0 + std::exp(-u));
  };
  if (m == 2) {
    for (int i = 0; i < res; ++i) {
      const double p = coord(i);
      out.push_back({p, 1.0 - p});
    }
  } else {
    if (space == SurfaceSpace::kLogit)
      throw ValidationError("logit surfaces need two-action players");
    for (int i = 0; i < res; ++i)
      for (int j = 0; i + j < res; ++j) {
        const double a = static_cast<double>(i) / (res - 1);
        const double b = static_cast<double>(j) / (res - 1);
        out.push_back({a, b, std::max(0.0, 1.0 - a - b)});
      }
  }
  return out;
}

}  // namespace internal

// Evaluates L^tau, f_tau(L^tau) - tau ln(prod m), epsilon and the biased
// NashConv at every cell.
inline SurfaceGrid LossSurface(const NormalFormGame& game, const LossConfig& cfg,
                               int resolution, SurfaceSpace space,
                               int threads = 1) {
  if (game.num_players() != 2)
    throw ValidationError("surfaces need a two-player game");
  for (int m : game.action_counts())
    if (m > 3) throw ValidationError("surfaces need players with at most 3 actions");
  if (resolution < 2) throw ValidationError("surface resolution must be >= 2");
  cfg.Validate(2);
  SurfaceGrid grid;
  grid.space = space;
  grid.resolution = resolution;
  grid.tau = cfg.tau;
  std::vector<std::vector<std::vector<double>>> strategies;
  for (int k = 0; k < 2; ++k) {
    strategies.push_back(
        internal::PlayerGridStrategies(game.num_actions(k), resolution, space));
    grid.points.push_back(static_cast<int>(strategies[k].size()));
  }
  const std::int64_t total =
      static_cast<std::int64_t>(grid.points[0]) * grid.points[1];
  grid.cells.resize(total);
  const double offset = cfg.tau * LogActionProduct(game.action_counts());
  ParallelFor(total, threads, [&](std::int64_t idx) {
    const int i = static_cast<int>(idx / grid.points[1]);
    const int j = static_cast<int>(idx % grid.points[1]);
    const JointStrategy x({strategies[0][i], strategies[1][j]});
    const LossReport rep = LossValue(game, x, cfg);
    SurfaceCell& c = grid.cells[idx];
    for (int k = 0; k < 2; ++k) {
      const auto& s = k == 0 ? strategies[0][i] : strategies[1][j];
      c.coords.emplace_back(s.begin(), s.end() - 1);
    }
    c.loss = rep.loss;
    c.bound = rep.bound - offset;
    c.epsilon = rep.epsilon;
    c.biased_nashconv = BiasedSampledNashConv(game, x, cfg.tau);
  });
  return grid;
}

inline SurfaceGrid BiasedNashConvSurface(const NormalFormGame& game, double tau,
                                         int resolution, int threads = 1) {
  return LossSurface(game, LossConfig::Uniform(game.num_players(), tau),
                     resolution, SurfaceSpace::kProb, threads);
}

enum class SurfaceField { kLoss, kBound, kEpsilon, kBiasedNashConv };

inline double FieldOf(const SurfaceCell& c, SurfaceField f) {
  switch (f) {
    case SurfaceField::kLoss: return c.loss;
    case SurfaceField::kBound: return c.bound;
    case SurfaceField::kEpsilon: return c.epsilon;
    case SurfaceField::kBiasedNashConv: return c.biased_nashconv;
  }
  return 0.0;
}

// Cells of a 2x2-game grid that are no larger than any of their (up to 8)
// neighbours and strictly smaller than at least one, sorted by value.
inline std::vector<std::pair<int, int>> LocalMinima2D(const SurfaceGrid& grid,
                                                      SurfaceField field) {
  if (grid.points.size() != 2 || grid.points[0] != grid.resolution ||
      grid.points[1] != grid.resolution)
    throw ValidationError("local minima need a two-action by two-action grid");
  const int r = grid.resolution;
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const double v = FieldOf(grid.at(i, j), field);
      bool is_min = true, strict = false;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= r || b >= r) continue;
          const double w = FieldOf(grid.at(a, b), field);
          if (w < v) {
            is_min = false;
            break;
          }
          if (w > v) strict = true;
        }
      if (is_min && strict) out.emplace_back(i, j);
    }
  std::sort(out.begin(), out.end(), [&](auto a, auto b) {
    return FieldOf(grid.at(a.first, a.second), field) <
           FieldOf(grid.at(b.first, b.second), field);
  });
  return out;
}

inline std::string SurfaceToCsv(const SurfaceGrid& grid) {
  std::ostringstream out;
  if (grid.cells.empty()) return "";
  const auto& first = grid.cells.front();
  for (std::size_t k = 0; k < first.coords.size(); ++k)
    for (std::size_t a = 0; a < first.coords[k].size(); ++a)
      out << "p" << k << "_a" << a << ',';
  out << "loss,bound_minus_offset,epsilon,biased_nashconv\n";
  for (const auto& c : grid.cells) {
    for (const auto& block : c.coords)
      for (double v : block) out << FormatG12(v) << ',';
    out << FormatG12(c.loss) << ',' << FormatG12(c.bound) << ','
        << FormatG12(c.epsilon) << ',' << FormatG12(c.biased_nashconv) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Critical points.

struct CriticalPoint {
  BlockVector x;
  double grad_norm = 0.0;  // tangent-projected ||grad L^tau||
  double loss = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::string method;  // "trajectory" or "random"
};

struct CriticalStudyConfig {
  LossConfig loss;
  int n_trajectories = 10;
  std::int64_t sgd_iterations = 1000;
  double sgd_lr = 0.1;
  int n_probes = 20;  // per method
  std::uint64_t seed = 0;
  double threshold = 1e-8;  // on the squared projected gradient norm
  std::int64_t max_iterations = 50000;
  int threads = 1;
};

struct DescentResult {
  BlockVector x;
  double objective = 0.0;  // ||P_T grad L||^2
  std::int64_t iterations = 0;
  bool converged = false;
};

// Minimizes phi(x) = ||P_T grad L(x)||^2 with tangent-space steps, halving
// backtracking and the Armijo condition. Steps leaving the interior of the
// simplex are rejected.
inline DescentResult DescendGradientNorm(const NormalFormGame& game,
                                         BlockVector x, const LossConfig& cfg,
                                         double threshold,
                                         std::int64_t max_iterations) {
  auto phi_of = [&](const BlockVector& y) {
    const BlockVector g = ProjectTangent(LossGradient(game, y, cfg));
    return std::pair{Dot(g.flat(), g.flat()), g};
  };
  auto interior = [](const BlockVector& y) {
    for (double p : y.flat())
      if (!(p > 0.0)) return false;
    return true;
  };
  auto [phi, g] = phi_of(x);
  DescentResult res{x, phi, 0, phi < threshold};
  double step = 1.0;
  while (!res.converged && res.iterations < max_iterations) {
    const Matrix h = Hessian(game, x, cfg);
    BlockVector dir(x.sizes(), h.Apply(g.flat()));
    dir *= 2.0;
    dir = ProjectTangent(dir);
    const double dir_sq = Dot(dir.flat(), dir.flat());
    if (!(dir_sq > 0.0)) break;
    bool accepted = false;
    step = std::min(step * 2.0, 1e8);
    while (step > 1e-30) {
      BlockVector trial = x;
      for (int i = 0; i < trial.size(); ++i) trial[i] -= step * dir[i];
      if (interior(trial)) {
        auto [tphi, tg] = phi_of(trial);
        if (tphi <= phi - 1e-4 * step * dir_sq) {
          x = std::move(trial);
          phi = tphi;
          g = std::move(tg);
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    ++res.iterations;
    if (!accepted) break;
    res.converged = phi < threshold;
  }
  res.x = x;
  res.objective = phi;
  return res;
}

// Uniform draw from the product of simplices restricted to the interior.
inline BlockVector RandomInteriorProfile(const std::vector<int>& counts,
                                         Stream& rng) {
  BlockVector x(counts);
  for (int k = 0; k < x.num_blocks(); ++k) {
    double s = 0.0;
    for (double& v : x.block(k)) {
      v = -std::log(std::max(rng.Uniform(), 1e-300));
      s += v;
    }
    for (double& v : x.block(k)) v /= s;
  }
  return x;
}

// Runs SGD trajectories from random starts, then descends the projected
// gradient norm from random trajectory points and from random profiles.
// Only converged points are returned, ordered trajectory probes first.
inline std::vector<CriticalPoint> CriticalPointStudy(
    const NormalFormGame& game, const CriticalStudyConfig& cfg) {
  cfg.loss.Validate(game.num_players());
  if (cfg.n_trajectories < 0 || cfg.n_probes < 0)
    throw ValidationError("trajectory and probe counts must be non-negative");
  const auto& counts = game.action_counts();

  std::vector<std::vector<BlockVector>> trajectories(cfg.n_trajectories);
  ParallelFor(cfg.n_trajectories, cfg.threads, [&](std::int64_t t) {
    Stream rng(cfg.seed, {0x74726aULL, std::uint64_t(t)});
    BlockVector x = RandomInteriorProfile(counts, rng);
    for (std::int64_t it = 0; it < cfg.sgd_iterations; ++it) {
      const BlockVector g = LossGradient(game, x, cfg.loss);
      for (int k = 0; k < x.num_blocks(); ++k) {
        std::vector<double> y(x.block(k).begin(), x.block(k).end());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] -= cfg.sgd_lr * g.block(k)[i];
        auto p = ProjectSimplexEuclidean(y).vector();
        internal::FloorProbabilities(p, kMirrorFloor);
        std::copy(p.begin(), p.end(), x.block(k).begin());
      }
      trajectories[t].push_back(x);
    }
  });

  struct Probe {
    BlockVector start;
    std::string method;
  };
  std::vector<Probe> probes;
  Stream pick(cfg.seed, {0x7069636bULL});
  if (cfg.n_trajectories > 0 && cfg.sgd_iterations > 0)
    for (int i = 0; i < cfg.n_probes; ++i) {
      const auto& tr = trajectories[pick.Below(cfg.n_trajectories)];
      probes.push_back({tr[pick.Below(static_cast<int>(tr.size()))], "trajectory"});
    }
  for (int i = 0; i < cfg.n_probes; ++i) {
    Stream rng(cfg.seed, {0x726e64ULL, std::uint64_t(i)});
    probes.push_back({RandomInteriorProfile(counts, rng), "random"});
  }

  std::vector<std::optional<CriticalPoint>> found(probes.size());
  ParallelFor(static_cast<std::int64_t>(probes.size()), cfg.threads,
              [&](std::int64_t i) {
                const DescentResult d = DescendGradientNorm(
                    game, probes[i].start, cfg.loss, cfg.threshold,
                    cfg.max_iterations);
                if (!d.converged) return;
                CriticalPoint c;
                c.x = d.x;
                c.grad_norm = std::sqrt(d.objective);
                const LossReport rep = LossValue(game, d.x, cfg.loss);
                c.loss = rep.loss;
                c.epsilon = rep.epsilon;
                c.alpha = TangentSpectrum(game, d.x, cfg.loss).alpha;
                c.method = probes[i].method;
                found[i] = std::move(c);
              });
  std::vector<CriticalPoint> out;
  for (auto& f : found)
    if (f) out.push_back(std::move(*f));
  return out;
}

inline std::string CriticalPointsToCsv(const std::vector<CriticalPoint>& pts) {
  std::ostringstream out;
  out << "method,epsilon,grad_norm,alpha,loss,profile\n";
  for (const auto& c : pts) {
    out << c.method << ',' << FormatG12(c.epsilon) << ',' << FormatG12(c.grad_norm)
        << ',' << FormatG12(c.alpha) << ',' << FormatG12(c.loss) << ",\"";
    for (int i = 0; i < c.x.size(); ++i) out << (i ? " " : "") << FormatG12(c.x[i]);
    out << "\"\n";
  }
  return out.str();
}

}  // namespace nashstoch

#endif  // NASHSTOCH_ANALYSIS_HPP_
