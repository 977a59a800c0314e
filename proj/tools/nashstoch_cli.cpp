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

// nashstoch command-line driver.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O or input-file error,
// 4 numerical abort.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nashstoch/analysis.hpp"
#include "nashstoch/calculus.hpp"
#include "nashstoch/errors.hpp"
#include "nashstoch/estimators.hpp"
#include "nashstoch/io.hpp"
#include "nashstoch/loss.hpp"
#include "nashstoch/parallel.hpp"
#include "nashstoch/solvers.hpp"
#include "nashstoch/zoo.hpp"

#ifndef NASHSTOCH_VERSION
#define NASHSTOCH_VERSION "unknown"
#endif

namespace ns = nashstoch;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

int ToInt(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ns::ValidationError("bad integer for " + what + ": '" + s + "'");
}

double ToDouble(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ns::ValidationError("bad number for " + what + ": '" + s + "'");
}

ns::NormalFormGame LoadGame(const std::string& source) {
  const auto colon = source.find(':');
  const std::string kind = source.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : source.substr(colon + 1);
  if (kind == "classic") return ns::ClassicGame(arg);
  if (kind == "sym7") return ns::Sym7Game();
  if (kind == "file") return ns::LoadGameFile(arg).game;
  if (kind == "blotto" || kind == "random") {
    const auto parts = Split(arg, ',');
    if (parts.size() != 3)
      throw ns::ValidationError(kind + " needs three comma-separated values");
    if (kind == "blotto")
      return ns::Blotto(ToInt(parts[0], "players"), ToInt(parts[1], "coins"),
                        ToInt(parts[2], "fields"));
    return ns::RandomGame(ToInt(parts[0], "players"), ToInt(parts[1], "actions"),
                          std::stoull(parts[2]));
  }
  throw ns::ValidationError("unknown game source '" + source +
                            "' (use classic:, blotto:, sym7, file:, random:)");
}

// "uniform", or blocks separated by ';' or '/' with comma-separated
// probabilities.
ns::JointStrategy ParseProfile(std::string spec, const ns::NormalFormGame& g) {
  if (spec == "uniform") return ns::JointStrategy::Uniform(g.action_counts());
  std::replace(spec.begin(), spec.end(), '/', ';');
  std::vector<std::vector<double>> blocks;
  for (const auto& b : Split(spec, ';')) {
    std::vector<double> probs;
    for (const auto& p : Split(b, ',')) probs.push_back(ToDouble(p, "profile"));
    blocks.push_back(probs);
  }
  ns::JointStrategy x(blocks);
  if (x.sizes() != g.action_counts())
    throw ns::ValidationError("profile shape does not match the game");
  return x;
}

// --s accepts a positive integer or "inf" for exact gradients.
int ParseSamples(const std::string& s) {
  if (s == "inf") return 0;
  const int v = ToInt(s, "--s");
  if (v < 1) throw ns::ValidationError("--s must be a positive integer or inf");
  return v;
}

json ProfileJson(const ns::BlockVector& x) {
  json players = json::array();
  for (int k = 0; k < x.num_blocks(); ++k) {
    const auto b = x.block(k);
    players.push_back(std::vector<double>(b.begin(), b.end()));
  }
  return players;
}

std::string Iso8601Now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct Common {
  std::string game = "classic:rps";
  std::string out = ".";
  std::uint64_t seed = 0;
  int threads = 0;
  double tau = 0.0;
  double eta = 1.0;

  int Threads() const { return threads > 0 ? threads : ns::DefaultThreads(); }
  std::string Path(const std::string& name) const {
    return (std::filesystem::path(out) / name).string();
  }
  ns::LossConfig Loss(const ns::NormalFormGame& g) const {
    return ns::LossConfig::Uniform(g.num_players(), tau, eta);
  }
};

void AddCommon(CLI::App* sub, Common& c) {
  sub->add_option("--game", c.game, "game source")->capture_default_str();
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("--threads", c.threads,
                  "worker cap (default NASHSTOCH_THREADS or all cores)");
  sub->add_option("--tau", c.tau, "entropy temperature")->capture_default_str();
  sub->add_option("--eta", c.eta, "per-player loss weight")->capture_default_str();
}

class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& argv)
      : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["argv"] = argv;
    doc_["version"] = NASHSTOCH_VERSION;
    doc_["started"] = Iso8601Now();
    doc_["artifacts"] = json::array();
  }
  json& config() { return doc_["config"]; }
  void Artifact(const std::string& path, const std::string& text) {
    ns::WriteTextFile(path, text);
    doc_["artifacts"].push_back(path);
  }
  void Finish(const Common& c) {
    doc_["seed"] = c.seed;
    doc_["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    ns::WriteTextFile(c.Path("manifest.json"), doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

void EchoCommon(json& cfg, const Common& c) {
  cfg["game"] = c.game;
  cfg["seed"] = c.seed;
  cfg["tau"] = c.tau;
  cfg["eta"] = c.eta;
  cfg["threads"] = c.Threads();
}

}  // namespace

static int Run(int argc, char** argv) {
  CLI::App app{"Nash equilibria of normal-form games by stochastic loss minimization"};
  app.set_version_flag("--version", std::string(NASHSTOCH_VERSION));
  app.require_subcommand(1);
  std::vector<std::string> args(argv, argv + argc);

  // solve
  Common solve_c;
  std::string alg = "sgd", samples = "inf", kind = "sample_others",
              projection = "euclidean", init;
  double lr = 0.1;
  std::int64_t iters = 1000, checkpoint = 100;
  bool projected = false, timing = false, sweep = false;
  std::int64_t horizon = 10000;
  double p = 0.05, c1 = -1.0, c2 = 1.0;
  int blin_samples = 10;
  bool symmetric = false;
  std::string map = "softmax";
  auto* solve = app.add_subcommand("solve", "run a solver and write its trace");
  AddCommon(solve, solve_c);
  solve->add_option("--alg", alg, "sgd, rm, ftrl or blin")->capture_default_str();
  solve->add_option("--lr", lr, "learning rate")->capture_default_str();
  solve->add_option("--iters", iters, "iterations")->capture_default_str();
  solve->add_option("--s", samples, "payoff samples per gradient, or inf")
      ->capture_default_str();
  solve->add_option("--kind", kind, "exact, sample_others or sample_all")
      ->capture_default_str();
  solve->add_option("--projection", projection, "euclidean or mirror")
      ->capture_default_str();
  solve->add_flag("--projected-gradient", projected, "step along the tangent gradient");
  solve->add_option("--checkpoint", checkpoint, "trace interval")->capture_default_str();
  solve->add_option("--init", init, "initial profile, e.g. 0.6,0.4/0.5,0.5");
  solve->add_flag("--timing", timing, "record wall-clock seconds in the trace");
  solve->add_flag("--sweep", sweep, "sweep the learning-rate grid (sgd)");
  solve->add_option("--T", horizon, "BLiN pull budget")->capture_default_str();
  solve->add_option("--p", p, "BLiN minimum probability scale")->capture_default_str();
  solve->add_option("--c1", c1, "BLiN elimination constant (default 2c^2)");
  solve->add_option("--c2", c2, "BLiN batch-size constant")->capture_default_str();
  solve->add_option("--samples", blin_samples, "BLiN payoff samples per pull")
      ->capture_default_str();
  solve->add_flag("--symmetric", symmetric, "BLiN over symmetric two-action profiles");
  solve->add_option("--map", map, "BLiN hypercube map: softmax or spherical")
      ->capture_default_str();

  // surface
  Common surf_c;
  int res = 101;
  std::string space = "prob";
  auto* surface = app.add_subcommand("surface", "tabulate the loss over a 2-player grid");
  AddCommon(surface, surf_c);
  surface->add_option("--res", res, "grid points per axis")->capture_default_str();
  surface->add_option("--space", space, "prob or logit")->capture_default_str();

  // rank
  Common rank_c;
  std::string at = "uniform";
  auto* rank = app.add_subcommand("rank", "rank test and tangent Hessian spectrum");
  AddCommon(rank, rank_c);
  rank->add_option("--at", at, "profile: uniform or 0.5,0.5/0.3,0.7")
      ->capture_default_str();

  // critical
  Common crit_c;
  ns::CriticalStudyConfig study;
  auto* critical = app.add_subcommand("critical", "search for critical points of the loss");
  AddCommon(critical, crit_c);
  critical->add_option("--trajectories", study.n_trajectories)->capture_default_str();
  critical->add_option("--sgd-iters", study.sgd_iterations)->capture_default_str();
  critical->add_option("--sgd-lr", study.sgd_lr)->capture_default_str();
  critical->add_option("--probes", study.n_probes)->capture_default_str();
  critical->add_option("--threshold", study.threshold)->capture_default_str();
  critical->add_option("--max-iters", study.max_iterations)->capture_default_str();

  // estimate
  Common est_c;
  std::string profile = "uniform", est_kind = "sample_others";
  std::int64_t draws = 10000;
  int batch = 1;
  double delta = 0.05;
  auto* estimate = app.add_subcommand("estimate", "Monte-Carlo estimate of the loss");
  AddCommon(estimate, est_c);
  estimate->add_option("--profile", profile, "uniform or 0.5,0.5/0.3,0.7")
      ->capture_default_str();
  estimate->add_option("--kind", est_kind)->capture_default_str();
  estimate->add_option("--T", draws, "number of estimates")->capture_default_str();
  estimate->add_option("--batch", batch, "payoff samples per gradient")
      ->capture_default_str();
  estimate->add_option("--delta", delta, "Hoeffding failure probability")
      ->capture_default_str();

  // replay
  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*replay) {
      const json doc = json::parse(ns::ReadTextFile(manifest_path));
      std::vector<std::string> saved = doc.at("argv").get<std::vector<std::string>>();
      if (saved.size() < 2 || saved[1] == "replay")
        throw ns::ValidationError("manifest does not record a replayable command");
      std::vector<char*> ptrs;
      for (auto& s : saved) ptrs.push_back(s.data());
      saved[0] = args[0];
      ptrs[0] = saved[0].data();
      return Run(static_cast<int>(ptrs.size()), ptrs.data());
    }

    if (*solve) {
      const Common& c = solve_c;
      const auto g = LoadGame(c.game);
      std::filesystem::create_directories(c.out);
      Manifest m("solve", args);
      json& cfg = m.config();
      EchoCommon(cfg, c);
      cfg["alg"] = alg;
      if (alg == "blin") {
        ns::LossObjectiveConfig oc;
        oc.p = p;
        oc.samples = blin_samples;
        oc.symmetric = symmetric;
        oc.kind = ns::ParseGradientKind(kind);
        oc.map = ns::ParseHypercubeMap(map);
        ns::BlinConfig bc;
        bc.horizon = horizon;
        const double range = ns::BlinRewardRange(g, p);
        bc.c1 = c1 >= 0.0 ? c1 : 2.0 * range * range;
        bc.c2 = c2;
        bc.dimension = ns::BlinDimension(g, oc);
        bc.seed = c.seed;
        bc.threads = c.Threads();
        cfg.update({{"T", horizon}, {"p", p}, {"c1", bc.c1}, {"c2", c2},
                    {"samples", blin_samples}, {"symmetric", symmetric},
                    {"map", map}, {"kind", kind}});
        const auto r = ns::BlinSolve(ns::MakeLossObjective(g, oc), bc);
        std::ostringstream arms;
        arms << "depth,pulls,mean,alive";
        for (int i = 0; i < bc.dimension; ++i) arms << ",center_" << i;
        arms << "\n";
        for (const auto& a : r.history) {
          arms << a.depth << ',' << a.pulls << ',' << ns::FormatG12(a.mean()) << ','
               << (a.alive ? 1 : 0);
          for (double v : a.center()) arms << ',' << ns::FormatG12(v);
          arms << "\n";
        }
        m.Artifact(c.Path("arms.csv"), arms.str());
        const auto x = ns::MapHypercube(g, r.best_arm, oc);
        const auto eps = ns::ExploitabilityOf(g, x).epsilon;
        json out = {{"best_arm", r.best_arm},
                    {"best_mean", r.best_mean},
                    {"random_arm", r.random_arm},
                    {"pulls_used", r.pulls_used},
                    {"completed_batches", r.completed_batches},
                    {"epsilon", eps},
                    {"profile", ProfileJson(x)}};
        m.Artifact(c.Path("profile.json"), out.dump(2) + "\n");
        std::printf("best arm eps %s after %lld pulls\n", ns::FormatG12(eps).c_str(),
                    static_cast<long long>(r.pulls_used));
        m.Finish(c);
        return 0;
      }

      const int batch_size = ParseSamples(samples);
      const auto gkind = ns::ParseGradientKind(kind);
      cfg.update({{"lr", lr}, {"iters", iters}, {"s", samples}, {"kind", kind},
                  {"checkpoint", checkpoint}, {"timing", timing}});
      ns::SolverResult result{ns::JointStrategy::Uniform(g.action_counts()), {}};
      if (alg == "sgd") {
        ns::SgdConfig sc;
        sc.lr = lr;
        sc.iterations = iters;
        sc.batch = batch_size;
        sc.kind = gkind;
        sc.projection = ns::ParseProjection(projection);
        sc.use_projected_gradient = projected;
        sc.tau = c.tau;
        sc.etas.assign(g.num_players(), c.eta);
        sc.seed = c.seed;
        sc.checkpoint_every = checkpoint;
        sc.timing = timing;
        if (!init.empty()) sc.initial = ParseProfile(init, g);
        cfg.update({{"projection", projection}, {"projected_gradient", projected},
                    {"init", init.empty() ? "uniform" : init}, {"sweep", sweep}});
        if (sweep) {
          auto sw = ns::SweepSgd(g, sc, ns::DefaultLearningRateGrid(), c.Threads());
          std::ostringstream csv;
          csv << "lr,projection,projected_gradient,final_epsilon,diverged\n";
          for (const auto& e : sw.entries)
            csv << ns::FormatG12(e.lr) << ',' << ns::ProjectionName(e.projection) << ','
                << e.use_projected_gradient << ',' << ns::FormatG12(e.final_epsilon)
                << ',' << e.diverged << "\n";
          m.Artifact(c.Path("sweep.csv"), csv.str());
          cfg["best"] = {{"lr", sw.best_config.lr},
                         {"projection", ns::ProjectionName(sw.best_config.projection)},
                         {"projected_gradient", sw.best_config.use_projected_gradient}};
          result = std::move(sw.best);
        } else {
          result = ns::SgdSolve(g, sc);
        }
      } else if (alg == "rm" || alg == "ftrl") {
        ns::BaselineConfig bc;
        bc.iterations = iters;
        bc.batch = batch_size;
        bc.kind = gkind;
        bc.lr = lr;
        bc.seed = c.seed;
        bc.checkpoint_every = checkpoint;
        bc.timing = timing;
        result = alg == "rm" ? ns::RegretMatching(g, bc) : ns::Ftrl(g, bc);
      } else {
        throw ns::ValidationError("unknown algorithm '" + alg +
                                  "' (use sgd, rm, ftrl or blin)");
      }
      m.Artifact(c.Path("trace.csv"), ns::TraceToCsv(result.trace));
      const auto rep = ns::LossValue(g, result.x, c.Loss(g));
      json out = {{"profile", ProfileJson(result.x)},
                  {"epsilon", rep.epsilon},
                  {"loss", rep.loss}};
      m.Artifact(c.Path("profile.json"), out.dump(2) + "\n");
      std::printf("final eps %s\n", ns::FormatG12(result.trace.back().epsilon).c_str());
      m.Finish(c);
      return 0;
    }

    if (*surface) {
      const Common& c = surf_c;
      const auto g = LoadGame(c.game);
      std::filesystem::create_directories(c.out);
      Manifest m("surface", args);
      EchoCommon(m.config(), c);
      m.config().update({{"res", res}, {"space", space}});
      const auto grid =
          ns::LossSurface(g, c.Loss(g), res, ns::ParseSurfaceSpace(space), c.Threads());
      m.Artifact(c.Path("surface.csv"), ns::SurfaceToCsv(grid));
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& cell : grid.cells) {
        lo = std::min(lo, cell.loss);
        hi = std::max(hi, cell.loss);
      }
      std::printf("loss range [%s, %s], spread %s\n", ns::FormatG12(lo).c_str(),
                  ns::FormatG12(hi).c_str(), ns::FormatG12(hi - lo).c_str());
      if (grid.points.size() == 2 && grid.points[0] == res) {
        for (const auto& [i, j] : ns::LocalMinima2D(grid, ns::SurfaceField::kBound)) {
          const auto& cell = grid.at(i, j);
          std::printf("local minimum of f_tau at (%s, %s): %s\n",
                      ns::FormatG12(cell.coords[0][0]).c_str(),
                      ns::FormatG12(cell.coords[1][0]).c_str(),
                      ns::FormatG12(cell.bound).c_str());
        }
      }
      m.Finish(c);
      return 0;
    }

    if (*rank) {
      const Common& c = rank_c;
      const auto g = LoadGame(c.game);
      const auto x = ParseProfile(at, g);
      std::filesystem::create_directories(c.out);
      Manifest m("rank", args);
      EchoCommon(m.config(), c);
      m.config()["at"] = at;
      const auto cfg = c.Loss(g);
      const int r = ns::Rank(ns::TestMatrix(g, x, cfg));
      const bool iso = ns::IsolationTest(g, x, cfg);
      const auto spec = ns::TangentSpectrum(g, x, cfg);
      json out = {{"rank", r},
                  {"columns", g.total_actions()},
                  {"isolated", iso},
                  {"tangent_eigenvalues", spec.eigenvalues},
                  {"alpha", spec.alpha}};
      m.Artifact(c.Path("rank.json"), out.dump(2) + "\n");
      std::printf("rank %d / %d, isolated: %s\n", r, g.total_actions(),
                  iso ? "true" : "false");
      m.Finish(c);
      return 0;
    }

    if (*critical) {
      const Common& c = crit_c;
      const auto g = LoadGame(c.game);
      std::filesystem::create_directories(c.out);
      Manifest m("critical", args);
      EchoCommon(m.config(), c);
      study.loss = c.Loss(g);
      study.seed = c.seed;
      study.threads = c.Threads();
      m.config().update({{"trajectories", study.n_trajectories},
                         {"sgd_iters", study.sgd_iterations},
                         {"sgd_lr", study.sgd_lr},
                         {"probes", study.n_probes},
                         {"threshold", study.threshold},
                         {"max_iters", study.max_iterations}});
      const auto pts = ns::CriticalPointStudy(g, study);
      m.Artifact(c.Path("critical.csv"), ns::CriticalPointsToCsv(pts));
      std::printf("%zu critical points\n", pts.size());
      m.Finish(c);
      return 0;
    }

    if (*estimate) {
      const Common& c = est_c;
      const auto g = LoadGame(c.game);
      const auto x = ParseProfile(profile, g);
      const auto gkind = ns::ParseGradientKind(est_kind);
      if (draws < 1) throw ns::ValidationError("--T must be at least 1");
      std::filesystem::create_directories(c.out);
      Manifest m("estimate", args);
      EchoCommon(m.config(), c);
      m.config().update({{"profile", profile}, {"kind", est_kind}, {"T", draws},
                         {"batch", batch}, {"delta", delta}});
      const auto cfg = c.Loss(g);
      ns::EstimatorStats st;
      st.range = ns::LossEstimateRange(g, x, cfg, gkind);
      st.delta = delta;
      std::int64_t queries = 0;
      for (std::int64_t t = 0; t < draws; ++t) {
        const auto e = ns::EstimateLoss(g, x, cfg, gkind,
                                        ns::DeriveKey(c.seed, {std::uint64_t(t)}), batch);
        st = ns::Accumulate(st, e.value);
        queries += e.queries;
      }
      const double exact = ns::Loss(g, x, cfg);
      json out = {{"mean", st.mean},
                  {"std_error", st.std_error()},
                  {"hoeffding_half_width", st.half_width},
                  {"band", {st.mean - st.half_width, st.mean + st.half_width}},
                  {"exact", exact},
                  {"queries", queries}};
      m.Artifact(c.Path("estimate.json"), out.dump(2) + "\n");
      std::printf("mean %s, std error %s, Hoeffding band [%s, %s], exact %s\n",
                  ns::FormatG12(st.mean).c_str(), ns::FormatG12(st.std_error()).c_str(),
                  ns::FormatG12(st.mean - st.half_width).c_str(),
                  ns::FormatG12(st.mean + st.half_width).c_str(),
                  ns::FormatG12(exact).c_str());
      m.Finish(c);
      return 0;
    }
  } catch (const ns::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const ns::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const ns::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "manifest error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}

int main(int argc, char** argv) { return Run(argc, argv); }
