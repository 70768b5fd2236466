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
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace dpsgdf {
namespace {

using Block = std::array<uint32_t, 4>;

// Known-answer vectors of the Random123 Philox4x32-10 reference.
TEST(PhiloxTest, KnownAnswers) {
  EXPECT_EQ(Philox4x32({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                       {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                       {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStreamTest, EqualStreamsReplay) {
  RandomStream::Generator a = RandomStream(42).Child({3, 1}).MakeGenerator();
  RandomStream::Generator b =
      RandomStream(42).Child(3).Child(1).MakeGenerator();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RandomStreamTest, DistinctPathsAndSeedsDiffer) {
  std::set<uint64_t> firsts;
  for (uint64_t seed : {0, 1, 2}) {
    for (uint64_t c : {0, 1, 2, 1000}) {
      firsts.insert(RandomStream(seed).Child(c).MakeGenerator().NextU64());
    }
    firsts.insert(RandomStream(seed).MakeGenerator().NextU64());
  }
  EXPECT_EQ(firsts.size(), 15u);
  // [1, 0] and [0, 1] are different paths.
  EXPECT_NE(RandomStream(0).Child({1, 0}).MakeGenerator().NextU64(),
            RandomStream(0).Child({0, 1}).MakeGenerator().NextU64());
}

TEST(GeneratorTest, UniformIsOpenInterval) {
  RandomStream::Generator g = RandomStream(9).MakeGenerator();
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = g.NextUniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
}

TEST(GeneratorTest, UniformIntCoversRangeEvenly) {
  RandomStream::Generator g = RandomStream(10).MakeGenerator();
  const int k = 7, n = 70000;
  std::vector<int> counts(k);
  for (int i = 0; i < n; ++i) {
    const uint64_t v = g.UniformInt(k);
    ASSERT_LT(v, static_cast<uint64_t>(k));
    ++counts[v];
  }
  // Chi-square with 6 degrees of freedom; 22.46 is the 0.999 quantile.
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / k) * (c - n / k) / double(n / k);
  EXPECT_LT(chi2, 22.46);
}

TEST(GeneratorTest, GaussianMoments) {
  RandomStream::Generator g = RandomStream(12).MakeGenerator();
  const int n = 1000000;
  double s = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = g.NextGaussian();
    s += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_LT(std::abs(mean), 5e-3);
  EXPECT_LT(std::abs(var - 1.0), 0.01);
  EXPECT_NEAR(s4 / n, 3.0, 0.05);
}

}  // namespace
}  // namespace dpsgdf
