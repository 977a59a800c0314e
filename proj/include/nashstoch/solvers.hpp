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

#ifndef NASHSTOCH_SOLVERS_HPP_
#define NASHSTOCH_SOLVERS_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nashstoch/calculus.hpp"
#include "nashstoch/errors.hpp"
#include "nashstoch/estimators.hpp"
#include "nashstoch/game.hpp"
#include "nashstoch/loss.hpp"
#include "nashstoch/parallel.hpp"
#include "nashstoch/rng.hpp"
#include "nashstoch/simplex.hpp"

namespace nashstoch {

inline constexpr double kDivergenceLimit = 1e6;

struct TraceRow {
  std::int64_t iteration = 0;
  double epsilon = 0.0;
  double loss = 0.0;
  std::int64_t queries = 0;
  double seconds = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;

  void Add(const TraceRow& row) {
    if (!rows.empty() && row.iteration <= rows.back().iteration)
      throw ValidationError("trace iterations must increase");
    rows.push_back(row);
  }
  const TraceRow& back() const { return rows.back(); }
};

inline std::string FormatG12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string TraceToCsv(const Trace& trace) {
  std::ostringstream out;
  out << "iteration,epsilon,loss,queries,seconds\n";
  for (const auto& r : trace.rows)
    out << r.iteration << ',' << FormatG12(r.epsilon) << ',' << FormatG12(r.loss)
        << ',' << r.queries << ',' << FormatG12(r.seconds) << '\n';
  return out.str();
}

struct SolverResult {
  JointStrategy x;
  Trace trace;
};

enum class Projection { kEuclidean, kMirror };

inline Projection ParseProjection(std::string_view s) {
  if (s == "euclidean") return Projection::kEuclidean;
  if (s == "mirror") return Projection::kMirror;
  throw ValidationError("unknown projection '" + std::string(s) +
                        "' (expected euclidean or mirror)");
}

inline const char* ProjectionName(Projection p) {
  return p == Projection::kEuclidean ? "euclidean" : "mirror";
}

struct SgdConfig {
  double lr = 0.1;
  std::int64_t iterations = 1000;
  // Payoff samples per gradient estimate; 0 means exact gradients.
  int batch = 0;
  GradientKind kind = GradientKind::kSampleOthers;
  Projection projection = Projection::kEuclidean;
  bool use_projected_gradient = false;
  double tau = 0.0;
  std::vector<double> etas;  // empty means all ones
  std::uint64_t seed = 0;
  std::int64_t checkpoint_every = 100;
  bool timing = false;
  std::optional<BlockVector> initial;

  void Validate() const {
    if (!(lr >= 0.0) || !std::isfinite(lr))
      throw ValidationError("learning rate must be non-negative and finite");
    if (iterations < 1) throw ValidationError("iterations must be at least 1");
    if (batch < 0) throw ValidationError("minibatch size must be >= 0");
    if (checkpoint_every < 1)
      throw ValidationError("checkpoint interval must be at least 1");
  }
};

namespace internal {

class Clock {
 public:
  explicit Clock(bool enabled)
      : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

inline bool IsCheckpoint(std::int64_t t, std::int64_t every, std::int64_t last) {
  return t % every == 0 || t == last;
}

inline JointStrategy InitialProfile(const NormalFormGame& game,
                                    const std::optional<BlockVector>& init) {
  if (!init) return JointStrategy::Uniform(game.action_counts());
  CheckProfileShape(game, *init);
  return JointStrategy(*init);
}

// Floors every probability at `floor` and renormalizes.
inline void FloorProbabilities(std::span<double> p, double floor) {
  double s = 0.0;
  for (double& v : p) {
    v = std::max(v, floor);
    s += v;
  }
  for (double& v : p) v /= s;
}

}  // namespace internal

// Gradient descent on L^tau from the uniform profile (or cfg.initial). The
// reported profile is the last iterate.
inline SolverResult SgdSolve(const NormalFormGame& game, const SgdConfig& cfg) {
  cfg.Validate();
  const int n = game.num_players();
  LossConfig lc{cfg.etas.empty() ? std::vector<double>(n, 1.0) : cfg.etas,
                cfg.tau};
  lc.Validate(n);
  internal::Clock clock(cfg.timing);
  BlockVector x = internal::InitialProfile(game, cfg.initial);
  if (cfg.projection == Projection::kMirror || cfg.tau > 0.0) {
    for (int k = 0; k < n; ++k)
      internal::FloorProbabilities(x.block(k), kMirrorFloor);
  }
  Trace trace;
  std::int64_t queries = 0;
  auto checkpoint = [&](std::int64_t t) {
    const LossReport rep = LossValue(game, x, lc);
    if (!std::isfinite(rep.loss) || rep.loss > kDivergenceLimit)
      throw NumericalError("SGD diverged at iteration " + std::to_string(t) +
                           ": loss " + std::to_string(rep.loss) +
                           "; try a smaller learning rate");
    trace.Add({t, rep.epsilon, rep.loss, queries, clock.Seconds()});
  };
  checkpoint(0);
  for (std::int64_t t = 1; t <= cfg.iterations; ++t) {
    const GradientKind kind = cfg.batch == 0 ? GradientKind::kExact : cfg.kind;
    LossGradientEstimate est = EstimateLossGradient(
        game, x, lc, kind, DeriveKey(cfg.seed, {std::uint64_t(t)}),
        std::max(cfg.batch, 1));
    queries += est.queries;
    for (double v : est.gradient.flat())
      if (!std::isfinite(v))
        throw NumericalError("non-finite loss gradient at iteration " +
                             std::to_string(t));
    for (int k = 0; k < n; ++k) {
      std::vector<double> g(est.gradient.block(k).begin(),
                            est.gradient.block(k).end());
      if (cfg.use_projected_gradient) g = ProjectTangent(g);
      std::vector<double> next;
      if (cfg.projection == Projection::kMirror) {
        next = MirrorStep(x.block(k), g, cfg.lr).vector();
      } else {
        std::vector<double> y(x.block(k).begin(), x.block(k).end());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] -= cfg.lr * g[i];
        next = ProjectSimplexEuclidean(y).vector();
        if (cfg.tau > 0.0) internal::FloorProbabilities(next, kMirrorFloor);
      }
      std::copy(next.begin(), next.end(), x.block(k).begin());
    }
    if (internal::IsCheckpoint(t, cfg.checkpoint_every, cfg.iterations))
      checkpoint(t);
  }
  return {JointStrategy(x), std::move(trace)};
}

struct BaselineConfig {
  std::int64_t iterations = 1000;
  int batch = 0;  // 0 means exact gradients
  GradientKind kind = GradientKind::kSampleOthers;
  double lr = 0.1;  // FTRL only
  std::uint64_t seed = 0;
  std::int64_t checkpoint_every = 100;
  bool timing = false;

  void Validate() const {
    if (iterations < 1) throw ValidationError("iterations must be at least 1");
    if (batch < 0) throw ValidationError("minibatch size must be >= 0");
    if (!(lr >= 0.0) || !std::isfinite(lr))
      throw ValidationError("learning rate must be non-negative and finite");
    if (checkpoint_every < 1)
      throw ValidationError("checkpoint interval must be at least 1");
  }
};

namespace internal {

// Shared loop for no-regret baselines. `play` maps a player's accumulated
// state to its current strategy; `update` folds in a gradient estimate.
template <typename Play, typename Update>
SolverResult RunBaseline(const NormalFormGame& game, const BaselineConfig& cfg,
                         Play play, Update update) {
  cfg.Validate();
  const int n = game.num_players();
  const LossConfig lc = LossConfig::Uniform(n);
  Clock clock(cfg.timing);
  BlockVector state(game.action_counts());
  BlockVector current(game.action_counts());
  BlockVector avg_sum(game.action_counts());
  Trace trace;
  std::int64_t queries = 0;
  auto average = [&](std::int64_t t) {
    if (t == 0) return BlockVector(JointStrategy::Uniform(game.action_counts()));
    BlockVector a = avg_sum;
    a *= 1.0 / static_cast<double>(t);
    for (int k = 0; k < n; ++k) FloorProbabilities(a.block(k), 0.0);
    return a;
  };
  auto checkpoint = [&](std::int64_t t) {
    const BlockVector a = average(t);
    const LossReport rep = LossValue(game, a, lc);
    trace.Add({t, rep.epsilon, rep.loss, queries, clock.Seconds()});
  };
  checkpoint(0);
  for (std::int64_t t = 1; t <= cfg.iterations; ++t) {
    for (int k = 0; k < n; ++k) play(state.block(k), current.block(k));
    for (int k = 0; k < n; ++k) {
      Stream rng(cfg.seed, {std::uint64_t(t), std::uint64_t(k)});
      const GradientKind kind = cfg.batch == 0 ? GradientKind::kExact : cfg.kind;
      const GradientEstimate g = SampleGradientBatch(
          game, current, k, kind, std::max(cfg.batch, 1), rng);
      queries += g.queries;
      update(state.block(k), current.block(k), g.values);
    }
    avg_sum += current;
    if (IsCheckpoint(t, cfg.checkpoint_every, cfg.iterations)) checkpoint(t);
  }
  return {JointStrategy(average(cfg.iterations)), std::move(trace)};
}

}  // namespace internal

// Regret matching on cumulative regrets; uniform play when no regret is
// positive. Reports the average strategy.
inline SolverResult RegretMatching(const NormalFormGame& game,
                                   const BaselineConfig& cfg) {
  auto play = [](std::span<const double> regret, std::span<double> out) {
    double total = 0.0;
    for (double r : regret) total += std::max(r, 0.0);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = total > 0.0 ? std::max(regret[i], 0.0) / total
                           : 1.0 / static_cast<double>(out.size());
  };
  auto update = [](std::span<double> regret, std::span<const double> x,
                   const std::vector<double>& g) {
    const double value = Dot(x, g);
    for (std::size_t i = 0; i < regret.size(); ++i) regret[i] += g[i] - value;
  };
  return internal::RunBaseline(game, cfg, play, update);
}

// Follow the regularized leader with entropy: x = softmax(lr * sum of
// gradients). Reports the average strategy.
inline SolverResult Ftrl(const NormalFormGame& game, const BaselineConfig& cfg) {
  const double lr = cfg.lr;
  auto play = [lr](std::span<const double> cumulative, std::span<double> out) {
    double top = -std::numeric_limits<double>::infinity();
    for (double c : cumulative) top = std::max(top, lr * c);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = std::exp(lr * cumulative[i] - top);
      s += out[i];
    }
    for (double& v : out) v /= s;
  };
  auto update = [](std::span<double> cumulative, std::span<const double>,
                   const std::vector<double>& g) {
    for (std::size_t i = 0; i < cumulative.size(); ++i) cumulative[i] += g[i];
  };
  return internal::RunBaseline(game, cfg, play, update);
}

inline std::vector<double> DefaultLearningRateGrid() {
  return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2};
}

struct SweepEntry {
  double lr = 0.0;
  Projection projection = Projection::kEuclidean;
  bool use_projected_gradient = false;
  double final_epsilon = 0.0;
  bool diverged = false;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  SgdConfig best_config;
  SolverResult best;
};

// Runs SGD over every (lr, projection, projected-gradient) combination and
// keeps the run with the lowest final exploitability. Diverged runs are
// recorded and skipped.
inline SweepResult SweepSgd(const NormalFormGame& game, const SgdConfig& base,
                            const std::vector<double>& lrs,
                            int threads = 1) {
  struct Job {
    double lr;
    Projection projection;
    bool projected;
  };
  std::vector<Job> jobs;
  for (double lr : lrs)
    for (Projection p : {Projection::kEuclidean, Projection::kMirror})
      for (bool pg : {false, true}) jobs.push_back({lr, p, pg});
  if (jobs.empty()) throw ValidationError("empty learning-rate grid");
  std::vector<std::optional<SolverResult>> results(jobs.size());
  std::vector<SweepEntry> entries(jobs.size());
  ParallelFor(static_cast<std::int64_t>(jobs.size()), threads,
              [&](std::int64_t i) {
                SgdConfig cfg = base;
                cfg.lr = jobs[i].lr;
                cfg.projection = jobs[i].projection;
                cfg.use_projected_gradient = jobs[i].projected;
                entries[i] = {cfg.lr, cfg.projection, cfg.use_projected_gradient,
                              std::numeric_limits<double>::infinity(), false};
                try {
                  results[i] = SgdSolve(game, cfg);
                  entries[i].final_epsilon = results[i]->trace.back().epsilon;
                } catch (const NumericalError&) {
                  entries[i].diverged = true;
                }
              });
  int best = -1;
  for (int i = 0; i < static_cast<int>(jobs.size()); ++i)
    if (results[i] &&
        (best < 0 || entries[i].final_epsilon < entries[best].final_epsilon))
      best = i;
  if (best < 0) throw NumericalError("every run in the learning-rate sweep diverged");
  SgdConfig cfg = base;
  cfg.lr = jobs[best].lr;
  cfg.projection = jobs[best].projection;
  cfg.use_projected_gradient = jobs[best].projected;
  return {std::move(entries), cfg, std::move(*results[best])};
}

// Every player of a two-action game plays action 1 with probability p.
inline JointStrategy SymmetricProfile(double prob_of_action1, int num_players) {
  if (!(prob_of_action1 >= 0.0 && prob_of_action1 <= 1.0))
    throw ValidationError("symmetric profile probability must lie in [0,1]");
  if (num_players < 2) throw ValidationError("need at least two players");
  std::vector<std::vector<double>> blocks(
      num_players, {1.0 - prob_of_action1, prob_of_action1});
  return JointStrategy(blocks);
}

// ---------------------------------------------------------------------------
// BLiN: batched elimination over dyadic boxes of [0,1]^d.

enum class HypercubeMap { kSoftmax, kSpherical };

inline HypercubeMap ParseHypercubeMap(std::string_view s) {
  if (s == "softmax") return HypercubeMap::kSoftmax;
  if (s == "spherical") return HypercubeMap::kSpherical;
  throw ValidationError("unknown map '" + std::string(s) +
                        "' (expected softmax or spherical)");
}

struct BlinConfig {
  std::int64_t horizon = 10000;
  double c1 = 0.0;
  double c2 = 1.0;
  int dimension = 1;
  std::uint64_t seed = 0;
  int threads = 1;

  void Validate() const {
    if (horizon < 4) throw ValidationError("BLiN horizon must be at least 4");
    if (!(c1 >= 0.0) || !(c2 > 0.0))
      throw ValidationError("BLiN needs c1 >= 0 and c2 > 0");
    if (dimension < 1 || dimension > 20)
      throw ValidationError("BLiN dimension must lie in [1, 20]");
  }
};

struct ArmRecord {
  std::vector<double> lo;
  std::vector<double> hi;
  int depth = 1;  // batch index m; edge length 2^(1-m)
  std::int64_t pulls = 0;
  double reward_sum = 0.0;
  bool alive = true;
  std::int64_t parent = -1;

  double mean() const { return pulls > 0 ? reward_sum / pulls : 0.0; }
  std::vector<double> center() const {
    std::vector<double> c(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
  }
};

struct BlinResult {
  std::vector<double> best_arm;
  double best_mean = 0.0;
  // A previously pulled arm chosen uniformly over all pulls.
  std::vector<double> random_arm;
  std::vector<ArmRecord> history;
  std::int64_t pulls_used = 0;
  int completed_batches = 0;
};

// Edge length of boxes in batch m.
inline double BlinEdge(int m) { return std::ldexp(1.0, 1 - m); }

// Pulls per box in batch m: ceil(c2 ln T / r_m^2).
inline std::int64_t BlinPulls(int m, std::int64_t horizon, double c2) {
  const double r = BlinEdge(m);
  return static_cast<std::int64_t>(
      std::ceil(c2 * std::log(static_cast<double>(horizon)) / (r * r)));
}

// Reward callback: (point in [0,1]^d, pull key) -> reward. Rewards are
// maximized.
using BlinObjective =
    std::function<double(std::span<const double>, std::uint64_t)>;

inline BlinResult BlinSolve(const BlinObjective& objective,
                            const BlinConfig& cfg) {
  cfg.Validate();
  const int d = cfg.dimension;
  const double threshold_scale = 2.0 * (1.0 + std::sqrt(cfg.c1 / cfg.c2));
  BlinResult res;
  std::vector<std::int64_t> alive;
  {
    ArmRecord root;
    root.lo.assign(d, 0.0);
    root.hi.assign(d, 1.0);
    res.history.push_back(root);
    alive.push_back(0);
  }
  const std::int64_t first = BlinPulls(1, cfg.horizon, cfg.c2);
  if (first > cfg.horizon)
    throw ValidationError("BLiN budget " + std::to_string(cfg.horizon) +
                          " cannot cover the first batch of " +
                          std::to_string(first) + " pulls; raise the horizon "
                          "or lower c2");
  std::vector<std::int64_t> pulled_box;  // box of each pull, in order

  auto run_pulls = [&](const std::vector<std::int64_t>& boxes) {
    std::vector<double> rewards(boxes.size());
    const std::int64_t base = res.pulls_used;
    ParallelFor(static_cast<std::int64_t>(boxes.size()), cfg.threads,
                [&](std::int64_t i) {
                  const auto c = res.history[boxes[i]].center();
                  rewards[i] = objective(
                      c, DeriveKey(cfg.seed, {std::uint64_t(base + i)}));
                });
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      ArmRecord& r = res.history[boxes[i]];
      ++r.pulls;
      r.reward_sum += rewards[i];
      pulled_box.push_back(boxes[i]);
    }
    res.pulls_used += static_cast<std::int64_t>(boxes.size());
  };

  for (int m = 1;; ++m) {
    const std::int64_t per_box = BlinPulls(m, cfg.horizon, cfg.c2);
    const std::int64_t remaining = cfg.horizon - res.pulls_used;
    const bool full = per_box <= remaining / static_cast<std::int64_t>(alive.size());
    std::vector<std::int64_t> schedule;
    if (full) {
      for (std::int64_t b : alive)
        for (std::int64_t p = 0; p < per_box; ++p) schedule.push_back(b);
    } else {
      for (std::int64_t p = 0; p < remaining; ++p)
        schedule.push_back(alive[p % alive.size()]);
    }
    run_pulls(schedule);
    if (!full) break;
    ++res.completed_batches;

    double best = -std::numeric_limits<double>::infinity();
    std::int64_t best_box = alive.front();
    for (std::int64_t b : alive)
      if (res.history[b].mean() > best) {
        best = res.history[b].mean();
        best_box = b;
      }
    res.best_arm = res.history[best_box].center();
    res.best_mean = best;
    if (res.pulls_used >= cfg.horizon) break;
    const double threshold = threshold_scale * BlinEdge(m);
    std::vector<std::int64_t> next;
    for (std::int64_t b : alive) {
      if (best - res.history[b].mean() >= threshold) {
        res.history[b].alive = false;
        continue;
      }
      // Split into 2^d children of half the edge length.
      const ArmRecord parent = res.history[b];
      for (std::int64_t mask = 0; mask < (std::int64_t{1} << d); ++mask) {
        ArmRecord child;
        child.depth = m + 1;
        child.parent = b;
        child.lo = parent.lo;
        child.hi = parent.hi;
        for (int i = 0; i < d; ++i) {
          const double mid = 0.5 * (parent.lo[i] + parent.hi[i]);
          if ((mask >> i) & 1)
            child.lo[i] = mid;
          else
            child.hi[i] = mid;
        }
        next.push_back(static_cast<std::int64_t>(res.history.size()));
        res.history.push_back(std::move(child));
      }
    }
    alive = std::move(next);
  }
  if (res.best_arm.empty()) {
    // Only reachable when the first batch consumed the whole budget.
    res.best_arm = res.history[0].center();
    res.best_mean = res.history[0].mean();
  }
  Stream pick(cfg.seed, {0x72616e64ULL});
  const std::int64_t t = static_cast<std::int64_t>(
      pick.Uniform() * static_cast<double>(pulled_box.size()));
  res.random_arm =
      res.history[pulled_box[std::min<std::int64_t>(t, pulled_box.size() - 1)]]
          .center();
  return res;
}

struct LossObjectiveConfig {
  double p = 0.05;  // tau = 1 / ln(1/p)
  HypercubeMap map = HypercubeMap::kSoftmax;
  double logit_range = kDefaultLogitRange;
  GradientKind kind = GradientKind::kSampleOthers;
  int samples = 10;  // minibatch per gradient sample in each pull
  bool symmetric = false;  // d = 1, z is the probability of action 1
};

// eta = 2 / L-hat for every player.
inline LossConfig BlinLossConfig(const NormalFormGame& game, double p) {
  const double eta = 2.0 / LipschitzBound(GameDims::Of(game), p);
  return LossConfig::Uniform(game.num_players(), SetTau(p), eta);
}

// Reward range c = 2 * LossRangeBound at eta = 2 / L-hat.
inline double BlinRewardRange(const NormalFormGame& game, double p) {
  const LossConfig lc = BlinLossConfig(game, p);
  return 2.0 * LossRangeBound(GameDims::Of(game), p, lc.etas);
}

inline JointStrategy MapHypercube(const NormalFormGame& game,
                                  std::span<const double> z,
                                  const LossObjectiveConfig& oc) {
  if (oc.symmetric) {
    if (z.size() != 1) throw ValidationError("symmetric map needs d = 1");
    for (int m : game.action_counts())
      if (m != 2)
        throw ValidationError("symmetric map needs a two-action game");
    return SymmetricProfile(z[0], game.num_players());
  }
  return oc.map == HypercubeMap::kSoftmax
             ? SoftmaxMap(z, game.action_counts(), oc.logit_range)
             : SphericalMap(z, game.action_counts());
}

// Reward -L-hat^tau(s(z)) from one minibatched two-sample estimate.
inline BlinObjective MakeLossObjective(const NormalFormGame& game,
                                       const LossObjectiveConfig& oc) {
  const LossConfig lc = BlinLossConfig(game, oc.p);
  return [game, oc, lc](std::span<const double> z, std::uint64_t key) {
    const JointStrategy x = MapHypercube(game, z, oc);
    return -EstimateLoss(game, x, lc, oc.kind, key, oc.samples).value;
  };
}

inline int BlinDimension(const NormalFormGame& game, const LossObjectiveConfig& oc) {
  return oc.symmetric ? 1 : HypercubeDimension(game.action_counts());
}

}  // namespace nashstoch

#endif  // NASHSTOCH_SOLVERS_HPP_
