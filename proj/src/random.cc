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

#include "dpsgdf/random.h"

#include <cmath>
#include <numbers>
#include <utility>

namespace dpsgdf {
namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85;

inline void MulHiLo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  const uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

// SplitMix64 finalizer, used to fold path components into one digest.
uint64_t Mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    MulHiLo(kPhiloxM0, ctr[0], hi0, lo0);
    MulHiLo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RandomStream::RandomStream(uint64_t seed, std::vector<uint64_t> path)
    : seed_(seed) {
  for (uint64_t p : path) *this = Child(p);
}

RandomStream RandomStream::Child(uint64_t index) const {
  RandomStream child = *this;
  child.path_.push_back(index);
  // Chaining keeps [1, 2] and [2, 1] (and [12] vs [1, 2]) distinct.
  child.digest_ = Mix64(digest_ ^ Mix64(index + path_.size()));
  return child;
}

RandomStream RandomStream::Child(
    std::initializer_list<uint64_t> indices) const {
  RandomStream child = *this;
  for (uint64_t i : indices) child = child.Child(i);
  return child;
}

RandomStream::Generator RandomStream::MakeGenerator() const {
  return Generator(seed_, digest_);
}

RandomStream::Generator::Generator(uint64_t seed, uint64_t path_digest)
    : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
      path_digest_(path_digest) {}

uint64_t RandomStream::Generator::NextU64() {
  if (used_ >= 4) {
    buffer_ = Philox4x32(
        {static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32),
         static_cast<uint32_t>(path_digest_),
         static_cast<uint32_t>(path_digest_ >> 32)},
        key_);
    ++block_;
    used_ = 0;
  }
  const uint64_t v = (static_cast<uint64_t>(buffer_[used_]) << 32) |
                     buffer_[used_ + 1];
  used_ += 2;
  return v;
}

double RandomStream::Generator::NextUniform() {
  // (k + 0.5) / 2^53 for k in [0, 2^53): never 0, never 1.
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::Generator::NextGaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = NextUniform();
  const double u2 = NextUniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

uint64_t RandomStream::Generator::UniformInt(uint64_t bound) {
  // Reject the top partial copy of [0, bound).
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  uint64_t v;
  do {
    v = NextU64();
  } while (v > limit);
  return v % bound;
}

}  // namespace dpsgdf
