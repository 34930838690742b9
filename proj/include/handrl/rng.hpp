// Copyright 2026 The handrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace handrl {

// Independent random streams derived from one trial seed.
enum class Stream : std::uint64_t {
  kPolicyInit = 1,
  kActionSampling = 2,
  kMinibatchShuffle = 3,
};

std::uint64_t splitmix64(std::uint64_t x);

// mt19937_64 keyed by splitmix64(seed, stream). Uniform and normal
// variates are generated here rather than through <random> distributions so
// the sequence does not depend on the standard library implementation.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream);
  explicit Rng(std::uint64_t key);

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1) with 53 random bits.
  double uniform();
  // Standard normal, Box-Muller.
  double normal();
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace handrl
