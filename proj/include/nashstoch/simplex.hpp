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

#ifndef NASHSTOCH_SIMPLEX_HPP_
#define NASHSTOCH_SIMPLEX_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "nashstoch/errors.hpp"
#include "nashstoch/game.hpp"

namespace nashstoch {

inline constexpr double kMirrorFloor = 1e-12;
inline constexpr double kDefaultLogitRange = 10.0;

// [I - (1/d) 1 1^T] v.
inline std::vector<double> ProjectTangent(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  if (out.empty()) return out;
  const double mean =
      std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (double& x : out) x -= mean;
  return out;
}

// Applies ProjectTangent to every block.
inline BlockVector ProjectTangent(const BlockVector& v) {
  BlockVector out = v;
  for (int k = 0; k < out.num_blocks(); ++k) {
    const auto p = ProjectTangent(v.block(k));
    std::copy(p.begin(), p.end(), out.block(k).begin());
  }
  return out;
}

// Euclidean projection onto the probability simplex (sort and threshold).
inline MixedStrategy ProjectSimplexEuclidean(std::span<const double> v) {
  if (v.empty()) throw ValidationError("cannot project an empty vector");
  for (double x : v)
    if (!std::isfinite(x)) throw NumericalError("non-finite entry in projection");
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::max(v[i] - theta, 0.0);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return MixedStrategy(std::move(out));
}

// Entropic mirror descent step: x'_l proportional to x_l exp(-lr g_l).
// Probabilities are floored at kMirrorFloor and renormalized afterwards.
inline MixedStrategy MirrorStep(std::span<const double> x,
                                std::span<const double> g, double lr) {
  if (x.size() != g.size()) throw ValidationError("mirror step size mismatch");
  for (double p : x)
    if (!(p > 0.0))
      throw ValidationError(
          "mirror step needs a strictly interior strategy; clamp "
          "probabilities away from zero first");
  double gmin = g[0];
  for (double v : g) gmin = std::min(gmin, v);
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::log(x[i]) - lr * (g[i] - gmin);
  }
  const double top = *std::max_element(out.begin(), out.end());
  for (double& v : out) {
    v = std::exp(v - top);
    sum += v;
  }
  if (!std::isfinite(sum) || sum <= 0.0)
    throw NumericalError("mirror step produced non-finite weights");
  double total = 0.0;
  for (double& v : out) {
    v = std::max(v / sum, kMirrorFloor);
    total += v;
  }
  for (double& v : out) v /= total;
  return MixedStrategy(std::move(out));
}

inline int HypercubeDimension(const std::vector<int>& action_counts) {
  int d = 0;
  for (int m : action_counts) d += m - 1;
  return d;
}

namespace internal {

inline void CheckHypercube(std::span<const double> z,
                           const std::vector<int>& action_counts) {
  if (static_cast<int>(z.size()) != HypercubeDimension(action_counts))
    throw ValidationError("hypercube point has dimension " +
                          std::to_string(z.size()) + ", expected " +
                          std::to_string(HypercubeDimension(action_counts)));
  for (double c : z)
    if (!(c >= 0.0 && c <= 1.0))
      throw ValidationError("hypercube coordinate outside [0,1]");
}

}  // namespace internal

// Each player's block of m_k - 1 coordinates is mapped affinely to logits in
// [-R, R], a zero logit is appended, and softmax is applied.
inline JointStrategy SoftmaxMap(std::span<const double> z,
                                const std::vector<int>& action_counts,
                                double logit_range = kDefaultLogitRange) {
  internal::CheckHypercube(z, action_counts);
  BlockVector x(action_counts);
  int pos = 0;
  for (int k = 0; k < x.num_blocks(); ++k) {
    const int m = action_counts[k];
    std::vector<double> logits(m, 0.0);
    for (int i = 0; i < m - 1; ++i)
      logits[i] = logit_range * (2.0 * z[pos++] - 1.0);
    const double top = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& u : logits) {
      u = std::exp(u - top);
      sum += u;
    }
    for (int i = 0; i < m; ++i) x.block(k)[i] = logits[i] / sum;
  }
  return JointStrategy(x);
}

// Angles (pi/2) z give a point on the positive orthant of the unit sphere via
// spherical coordinates, which is then l1-normalized.
inline JointStrategy SphericalMap(std::span<const double> z,
                                  const std::vector<int>& action_counts) {
  internal::CheckHypercube(z, action_counts);
  BlockVector x(action_counts);
  int pos = 0;
  for (int k = 0; k < x.num_blocks(); ++k) {
    const int m = action_counts[k];
    std::vector<double> y(m);
    double sin_prod = 1.0;
    for (int i = 0; i < m - 1; ++i) {
      const double theta = 0.5 * std::numbers::pi * z[pos++];
      y[i] = sin_prod * std::cos(theta);
      sin_prod *= std::sin(theta);
    }
    y[m - 1] = sin_prod;
    double sum = 0.0;
    for (double& v : y) {
      v = std::max(v, 0.0);
      sum += v;
    }
    for (int i = 0; i < m; ++i) x.block(k)[i] = y[i] / sum;
  }
  return JointStrategy(x);
}

}  // namespace nashstoch

#endif  // NASHSTOCH_SIMPLEX_HPP_
