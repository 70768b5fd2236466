//
// Copyright 2026 The dpsgdf Authors.
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
//

// Counter-based randomness. A RandomStream is an immutable (seed, path)
// descriptor; every draw is a pure function of (seed, path, counter), so the
// stream for, say, [step, example] does not depend on what else was drawn.

#ifndef DPSGDF_RANDOM_H_
#define DPSGDF_RANDOM_H_

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace dpsgdf {

// Philox4x32 with 10 rounds (Salmon et al., SC'11).
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : seed_(seed) {}
  RandomStream(uint64_t seed, std::vector<uint64_t> path);

  uint64_t seed() const { return seed_; }
  const std::vector<uint64_t>& path() const { return path_; }

  RandomStream Child(uint64_t index) const;
  RandomStream Child(std::initializer_list<uint64_t> indices) const;

  // Sequential reader over this stream's counter space. Two generators made
  // from equal streams produce identical sequences.
  class Generator {
   public:
    uint64_t NextU64();
    // Uniform on the open interval (0, 1), 53-bit resolution.
    double NextUniform();
    double NextGaussian();
    // Uniform on {0, ..., bound - 1}; bound > 0. Rejection sampling, no bias.
    uint64_t UniformInt(uint64_t bound);

   private:
    friend class RandomStream;
    Generator(uint64_t seed, uint64_t path_digest);

    std::array<uint32_t, 2> key_;
    uint64_t path_digest_;
    uint64_t block_ = 0;
    std::array<uint32_t, 4> buffer_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
  };

  Generator MakeGenerator() const;

 private:
  uint64_t seed_;
  std::vector<uint64_t> path_;
  uint64_t digest_ = 0x9E3779B97F4A7C15ULL;
};

}  // namespace dpsgdf

#endif  // DPSGDF_RANDOM_H_
