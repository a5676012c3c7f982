// Copyright 2026 The macrocat Authors
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

// Counter-based random numbers.
//
// The block generator is Philox4x32-10 (Salmon et al., SC'11): key = 64-bit
// seed, counter = (shot index lo, shot index hi, stream tag, block index).
// Every shot owns an independent stream, so the samples of shot i never
// depend on how shots are partitioned across workers.

#pragma once

#include <array>
#include <cstdint>

namespace macrocat::rng {

using Philox4x32Block = std::array<std::uint32_t, 4>;

/// Ten rounds of Philox4x32 on `counter` under `key`.
Philox4x32Block philox4x32_10(Philox4x32Block counter, std::array<std::uint32_t, 2> key);

/// Stream tags keep different samplers that share a seed apart.
enum class StreamTag : std::uint32_t {
  kCounts = 1,
  kCountsExact = 2,
  kQuadratures = 3,
  kCountsPhi90 = 4,
};

/// Per-shot random stream: identical (seed, tag, shot) give identical
/// draws on every platform (up to libm rounding in normal()).
class SeededStream {
 public:
  SeededStream(std::uint64_t seed, StreamTag tag, std::uint64_t shot);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t shot() const { return shot_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform();
  /// Standard normal (Box-Muller; a spare value is cached).
  double normal();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint32_t tag_;
  std::uint64_t shot_;
  std::uint32_t block_ = 0;
  Philox4x32Block buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace macrocat::rng
