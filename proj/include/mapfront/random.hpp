// Copyright 2026 The mapfront Authors. All Rights Reserved.
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
// =============================================================================

#ifndef MAPFRONT_RANDOM_HPP
#define MAPFRONT_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mapfront {

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a, used for stream names and config digests.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Seed of a named substream. Components draw from their own substream so
// that adding draws in one place never shifts another component's sequence.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Thin wrapper over std::mt19937_64 whose distributions are written out by
// hand: the standard distribution objects are implementation-defined, which
// would make outputs differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n);

  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mapfront

#endif  // MAPFRONT_RANDOM_HPP
