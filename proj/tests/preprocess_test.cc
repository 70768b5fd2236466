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

#include "dpsgdf/preprocess.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "dpsgdf/analysis.h"
#include "dpsgdf/objective.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpsgdf {
namespace {

using ::dpsgdf::testing::RandomDataset;
using ::dpsgdf::testing::Unwrap;

constexpr double kEps = std::numeric_limits<double>::epsilon();

PrivacyBudget Budget(double eps, double delta) {
  return Unwrap(PrivacyBudget::Create(eps, delta));
}

PreprocessState StateWith(Vector mu, double tau) {
  PreprocessState s;
  s.mu_hat = std::move(mu);
  s.tau = tau;
  return s;
}

TEST(NormalizeRowsTest, ScalesNonzeroRows) {
  const LabeledDataset d = Unwrap(
      LabeledDataset::FromRows({{3, 4}, {0, 0}, {-1, 0}}, {1, -1, 1}));
  const LabeledDataset n = Unwrap(NormalizeRows(d, 2.0));
  EXPECT_DOUBLE_EQ(Norm2(n.row(0)), 2.0);
  EXPECT_EQ(Norm2(n.row(1)), 0.0);
  EXPECT_EQ(n.row(2)[0], -2.0);
  EXPECT_EQ(n.radius_hint(), 2.0);
  EXPECT_FALSE(NormalizeRows(d, 0.0).ok());
}

TEST(PrivateMeanTest, ZeroNoiseIdenticalRows) {
  const LabeledDataset d =
      Unwrap(LabeledDataset::FromRows({{3, 4}, {3, 4}, {3, 4}}, {1, 1, -1}));
  const Vector m =
      Unwrap(PrivateMean(d, PrivacyBudget::Unlimited(), 5.0, RandomStream(0)));
  EXPECT_DOUBLE_EQ(m[0], 3);
  EXPECT_DOUBLE_EQ(m[1], 4);
}

TEST(PrivateMeanTest, ZeroNoiseAntipodalRows) {
  const LabeledDataset d =
      Unwrap(LabeledDataset::FromRows({{3, 4}, {-3, -4}}, {1, -1}));
  EXPECT_EQ(
      Unwrap(PrivateMean(d, PrivacyBudget::Unlimited(), 5.0, RandomStream(0))),
      (Vector{0, 0}));
}

TEST(PrivateMeanTest, NoiseScaleMatchesGaussianMechanism) {
  const int n = 1000, d = 5, seeds = 500;
  const double r0 = 1.0, eps = 0.025, delta = 1e-5;
  RandomStream::Generator g = RandomStream(1).MakeGenerator();
  std::vector<double> x;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x.push_back((j == 0 ? 1.0 : 0.0) + 0.01 * g.NextGaussian());
  }
  const LabeledDataset data = Unwrap(LabeledDataset::Create(
      std::move(x), n, d, std::vector<int>(n, 1), LabelMode::kBinary));
  const Vector exact =
      Unwrap(PrivateMean(data, PrivacyBudget::Unlimited(), r0, RandomStream(0)));
  const double sigma_m =
      2 * r0 / n * std::sqrt(2 * std::log(1.25 / delta)) / eps;
  double ms = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const Vector m =
        Unwrap(PrivateMean(data, Budget(eps, delta), r0, RandomStream(s)));
    for (int j = 0; j < d; ++j) ms += (m[j] - exact[j]) * (m[j] - exact[j]);
  }
  EXPECT_NEAR(std::sqrt(ms / seeds), sigma_m * std::sqrt(d),
              0.1 * sigma_m * std::sqrt(d));
}

TEST(DistanceSetTest, Examples) {
  const LabeledDataset one = Unwrap(LabeledDataset::FromRows({{1, 2}}, {1}));
  EXPECT_EQ(DistanceSet(one, Vector{1, 2}), (std::vector<double>{0}));
  const LabeledDataset two =
      Unwrap(LabeledDataset::FromRows({{0, 0}, {3, 4}}, {1, -1}));
  EXPECT_EQ(DistanceSet(two, Vector{0, 0}), (std::vector<double>{0, 5}));
  const LabeledDataset r = RandomDataset(2, 50, 4);
  for (double v : DistanceSet(r, Vector{0.3, -1, 2, 0})) EXPECT_GE(v, 0.0);
}

TEST(TranslateAugmentTest, Examples) {
  const LabeledDataset d = Unwrap(LabeledDataset::FromRows({{5}}, {1}));
  const AugmentedDataset a = Unwrap(TranslateAugment(d, StateWith({4}, 2)));
  EXPECT_EQ(a.data.row(0)[0], 1);
  EXPECT_EQ(a.data.row(0)[1], 2);

  const LabeledDataset e =
      Unwrap(LabeledDataset::FromRows({{1.5, -2, 7}}, {-1}));
  const AugmentedDataset b =
      Unwrap(TranslateAugment(e, StateWith({1.5, -2, 7}, 0.25)));
  EXPECT_EQ(std::vector<double>(b.data.row(0).begin(), b.data.row(0).end()),
            (std::vector<double>{0, 0, 0, 0.25}));
  EXPECT_FALSE(TranslateAugment(e, StateWith({1, 2, 3}, 0)).ok());
  EXPECT_FALSE(TranslateAugment(e, StateWith({1, 2}, 1)).ok());
}

TEST(TranslateAugmentTest, LossIsPreservedUnderReparametrization) {
  RandomStream::Generator g = RandomStream(3).MakeGenerator();
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(g.UniformInt(20));
    const LabeledDataset data = RandomDataset(100 + trial, 30, d, 2.0);
    Vector mu(d);
    for (double& v : mu) v = g.NextGaussian();
    const double tau = 0.1 + 5 * g.NextUniform();
    const AugmentedDataset aug = Unwrap(TranslateAugment(data, StateWith(mu, tau)));
    LinearModel m;
    m.w.resize(d);
    for (double& v : m.w) v = g.NextGaussian();
    m.b = g.NextGaussian();
    LinearModel m2;
    m2.w = m.w;
    m2.w.push_back((m.b + Dot(m.w, mu)) / tau);
    for (const LossSpec& loss : {HingeLoss(), LogisticLoss()}) {
      const double l = Unwrap(EmpiricalLoss(m, data, loss));
      const double l2 = Unwrap(EmpiricalLoss(m2, aug.data, loss));
      EXPECT_LE(std::abs(l - l2) / (1 + std::abs(l)), 1e-9);
    }
  }
}

TEST(FeatureClipTest, Examples) {
  const double tau = 1.5;
  const LabeledDataset d = Unwrap(LabeledDataset::FromRows(
      {{0.5, 0.1, tau}, {2 * tau, 0, tau}}, {1, -1}));
  int clipped = -1;
  const AugmentedDataset c = Unwrap(FeatureClip({d, tau}, &clipped));
  EXPECT_EQ(clipped, 1);
  EXPECT_EQ(c.data.row(0)[0], 0.5);
  EXPECT_EQ(c.data.row(0)[2], tau);
  const double f = std::sqrt(2.0) / std::sqrt(5.0);
  EXPECT_NEAR(c.data.row(1)[0], 2 * tau * f, 1e-15);
  EXPECT_NEAR(c.data.row(1)[2], tau * f, 1e-15);
  EXPECT_EQ(c.data.labels(), d.labels());
}

TEST(FeatureClipTest, NormAndBiasCoordinateInvariants) {
  RandomStream::Generator g = RandomStream(4).MakeGenerator();
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + static_cast<int>(g.UniformInt(8));
    const LabeledDataset data = RandomDataset(200 + trial, 40, d, 3.0);
    const double tau = 0.5 + 3 * g.NextUniform();
    const AugmentedDataset aug =
        Unwrap(TranslateAugment(data, StateWith(Vector(d, 0.1), tau)));
    const AugmentedDataset c = Unwrap(FeatureClip(aug));
    for (int i = 0; i < data.size(); ++i) {
      EXPECT_EQ(aug.data.row(i)[d], tau);
      EXPECT_LE(Norm2(c.data.row(i)), std::sqrt(2.0) * tau * (1 + 4 * kEps));
      const double last = c.data.row(i)[d];
      if (Norm2(aug.data.row(i)) <= std::numbers::sqrt2 * tau) {
        EXPECT_EQ(last, tau);
      } else {
        EXPECT_GT(last, 0.0);
        EXPECT_LE(last, tau);
      }
    }
  }
}

TEST(FeatureClipTest, PreservesDesignRank) {
  RandomStream::Generator g = RandomStream(5).MakeGenerator();
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + static_cast<int>(g.UniformInt(10));
    const int n = 2 + static_cast<int>(g.UniformInt(49));
    const LabeledDataset data = RandomDataset(300 + trial, n, d, 2.0);
    const AugmentedDataset aug =
        Unwrap(TranslateAugment(data, StateWith(Vector(d, 0.0), 0.5)));
    int clipped = 0;
    const AugmentedDataset c = Unwrap(FeatureClip(aug, &clipped));
    EXPECT_GT(clipped, 0);
    EXPECT_EQ(Unwrap(DesignRank(c.data)).rank, Unwrap(DesignRank(aug.data)).rank);
  }
}

TEST(RunPreprocessTest, ZeroNoiseClusterNeedsNoClipping) {
  RandomStream::Generator g = RandomStream(6).MakeGenerator();
  std::vector<Vector> rows;
  std::vector<int> labels;
  for (int i = 0; i < 200; ++i) {
    rows.push_back({1.0 + 0.01 * g.NextGaussian(), 0.01 * g.NextGaussian()});
    labels.push_back(i % 2 ? 1 : -1);
  }
  const LabeledDataset d =
      Unwrap(NormalizeRows(Unwrap(LabeledDataset::FromRows(rows, labels)), 1));
  PreprocessState st;
  const AugmentedDataset a =
      Unwrap(RunPreprocess(d, PrivacyBudget::Unlimited(),
                           PrivacyBudget::Unlimited(), {}, RandomStream(0), &st));
  EXPECT_EQ(st.clipped_count, 0);
  EXPECT_GT(st.tau, 0.0);
  EXPECT_EQ(a.data.dim(), 3);
  EXPECT_EQ(st.ledger.entries().size(), 2u);
}

TEST(RunPreprocessTest, TwoClusterThresholdIsOrderOne) {
  const LabeledDataset d = Unwrap(MakeCounterexample({100, 64}));
  PreprocessOptions o;
  o.feature_norm = std::sqrt(100.0 * 100 + 1);
  PreprocessState st;
  Unwrap(RunPreprocess(d, PrivacyBudget::Unlimited(),
                       PrivacyBudget::Unlimited(), o, RandomStream(0), &st));
  EXPECT_GE(st.tau, 1.0);
  EXPECT_LE(st.tau, 4.0);
  EXPECT_EQ(st.clipped_count, 0);
}

TEST(RunPreprocessTest, SkipModeUsesFeatureNorm) {
  const LabeledDataset d = Unwrap(NormalizeRows(RandomDataset(7, 50, 3), 2.0));
  PreprocessOptions o;
  o.feature_norm = 2.0;
  o.skip_quantile = true;
  PreprocessState st;
  const AugmentedDataset a = Unwrap(RunPreprocess(
      d, Budget(1, 1e-5), Budget(1, 1e-5), o, RandomStream(0), &st));
  EXPECT_TRUE(st.quantile_skipped);
  EXPECT_EQ(st.tau, 2.0);
  EXPECT_EQ(st.clipped_count, 0);
  EXPECT_EQ(st.ledger.entries().size(), 1u);
  for (int i = 0; i < a.data.size(); ++i) EXPECT_EQ(a.data.row(i)[3], 2.0);
}

TEST(RunPreprocessTest, ClippedCountWithinOutlierAllowance) {
  const int n = 1000, trials = 500;
  const double eps_q = 1.0 / 3;
  const double bound = 125 / eps_q * std::log(n);
  const LabeledDataset d = Unwrap(NormalizeRows(RandomDataset(8, n, 4), 1.0));
  int within = 0;
  for (int t = 0; t < trials; ++t) {
    PreprocessState st;
    Unwrap(RunPreprocess(d, Budget(eps_q, 1e-5 / 3), Budget(eps_q, 1e-5 / 3),
                         {}, RandomStream(t), &st));
    within += st.clipped_count <= bound;
  }
  EXPECT_GE(within, 0.9 * trials);
}

}  // namespace
}  // namespace dpsgdf
