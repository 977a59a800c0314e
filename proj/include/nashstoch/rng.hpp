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

#ifndef NASHSTOCH_RNG_HPP_
#define NASHSTOCH_RNG_HPP_

// Counter-based random streams. A stream is identified by a 64-bit key that
// is derived by hashing a seed together with a path such as
// (iteration, player, slot). Draw i of a stream depends only on (key, i), so
// results do not depend on evaluation order or thread count.

#include <cstdint>
#include <initializer_list>
#include <span>

namespace nashstoch {

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t DeriveKey(std::uint64_t seed,
                                  std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = Mix64(seed ^ 0x6a09e667f3bcc908ULL);
  for (std::uint64_t part : path) key = Mix64(key ^ Mix64(part));
  return key;
}

// Maps 64 random bits to a double in [0, 1) with 53 bits of precision.
constexpr double ToUnit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Stateless draw: the i-th uniform of the stream keyed by `key`.
constexpr double UniformAt(std::uint64_t key, std::uint64_t index) {
  return ToUnit(Mix64(key ^ Mix64(index + 0x3c6ef372fe94f82bULL)));
}

class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}
  Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
      : key_(DeriveKey(seed, path)) {}

  double Uniform() { return UniformAt(key_, counter_++); }

  // Uniform integer in [0, n).
  int Below(int n) {
    int v = static_cast<int>(Uniform() * n);
    return v < n ? v : n - 1;
  }

  // Index drawn from a probability vector (need not be exactly normalized).
  int Categorical(std::span<const double> probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    const double u = Uniform() * total;
    double acc = 0.0;
    int last_positive = 0;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
      if (probs[i] <= 0.0) continue;
      last_positive = i;
      acc += probs[i];
      if (u < acc) return i;
    }
    return last_positive;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace nashstoch

#endif  // NASHSTOCH_RNG_HPP_
