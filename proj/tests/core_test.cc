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

#include "dpsgdf/core.h"

#include <cmath>
#include <limits>
#include <vector>

#include "dpsgdf/objective.h"
#include "dpsgdf/random.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpsgdf {
namespace {

using ::dpsgdf::testing::RandomDataset;
using ::dpsgdf::testing::Unwrap;

constexpr double kEps = std::numeric_limits<double>::epsilon();

TEST(ClipTest, IdentityWhenWithinBound) {
  EXPECT_EQ(Unwrap(Clip(Vector{3, 4}, 10)), (Vector{3, 4}));
}

TEST(ClipTest, ScalesOntoSphere) {
  const Vector c = Unwrap(Clip(Vector{3, 4}, 1));
  EXPECT_DOUBLE_EQ(c[0], 0.6);
  EXPECT_DOUBLE_EQ(c[1], 0.8);
}

TEST(ClipTest, ZeroVector) {
  EXPECT_EQ(Unwrap(Clip(Vector{0, 0}, 7)), (Vector{0, 0}));
}

TEST(ClipTest, RejectsBadInput) {
  EXPECT_FALSE(Clip(Vector{1, 2}, 0).ok());
  EXPECT_FALSE(Clip(Vector{1, 2}, -1).ok());
  EXPECT_FALSE(Clip(Vector{std::nan(""), 2}, 1).ok());
  EXPECT_FALSE(
      Clip(Vector{std::numeric_limits<double>::infinity(), 0}, 1).ok());
}

TEST(ClipTest, IdempotentAndBoundedOnRandomInputs) {
  RandomStream::Generator g = RandomStream(11).MakeGenerator();
  for (int trial = 0; trial < 2000; ++trial) {
    const int d = 1 + static_cast<int>(g.UniformInt(30));
    Vector x(d);
    const double scale = std::exp(8.0 * g.NextGaussian());
    for (double& v : x) v = scale * g.NextGaussian();
    const double c = std::exp(3.0 * g.NextGaussian());
    const Vector once = Unwrap(Clip(x, c));
    const Vector twice = Unwrap(Clip(once, c));
    EXPECT_EQ(once, twice);
    EXPECT_LE(Norm2(once), c * (1 + 4 * kEps));
  }
}

TEST(MarginScoreTest, Examples) {
  EXPECT_EQ(Unwrap(MarginScore({{1, 0}, 0}, Vector{2, 9})), 2);
  EXPECT_EQ(Unwrap(MarginScore({{0, 0}, 3}, Vector{-7, 1e6})), 3);
  EXPECT_EQ(Unwrap(MarginScore({{1, 1}, -1}, Vector{0.5, 0.5})), 0);
  EXPECT_FALSE(MarginScore({{1, 1}, 0}, Vector{1}).ok());
}

TEST(LossTest, PhiIsNonIncreasingAndMatchesMetadata) {
  for (const LossSpec& loss : {HingeLoss(), LogisticLoss()}) {
    double prev = loss.phi(-50.0);
    for (double z = -50.0; z <= 50.0; z += 0.125) {
      const double v = loss.phi(z);
      EXPECT_LE(v, prev) << loss.name << " at " << z;
      EXPECT_GE(v, 0.0);
      EXPECT_LE(std::abs(loss.phi_prime(z)), loss.lipschitz);
      prev = v;
    }
    EXPECT_DOUBLE_EQ(loss.phi(0.0), loss.phi_at_zero);
  }
  EXPECT_EQ(HingeLoss().phi_prime(1.0), 0.0);
  EXPECT_EQ(HingeLoss().phi_prime(1.0 - 1e-12), -1.0);
  // Large margins stay finite in both directions.
  EXPECT_NEAR(LogisticLoss().phi(-800.0), 800.0, 1e-9);
  EXPECT_EQ(LogisticLoss().phi(800.0), 0.0);
  EXPECT_FALSE(LossByName("squared").ok());
}

TEST(GradientTest, HingeActiveAtZeroModel) {
  const Vector g =
      Unwrap(PerExampleGradient({{0, 0}, 0}, Vector{2, 1}, +1, HingeLoss()));
  EXPECT_EQ(g, (Vector{-2, -1, -1}));
}

TEST(GradientTest, HingeInactiveBeyondMargin) {
  const Vector g =
      Unwrap(PerExampleGradient({{0, 2}, 0}, Vector{2, 1}, +1, HingeLoss()));
  EXPECT_EQ(g, (Vector{0, 0, 0}));
}

TEST(GradientTest, RejectsBadLabel) {
  EXPECT_FALSE(
      PerExampleGradient({{0, 0}, 0}, Vector{1, 1}, 0, HingeLoss()).ok());
}

// Central differences of the loss at step h.
Vector NumericGradient(const LinearObjective& obj, Vector theta,
                       std::span<const double> x, int y, double h) {
  Vector g(theta.size());
  for (size_t j = 0; j < theta.size(); ++j) {
    const double t = theta[j];
    theta[j] = t + h;
    const double up = obj.Loss(theta, x, y);
    theta[j] = t - h;
    const double down = obj.Loss(theta, x, y);
    theta[j] = t;
    g[j] = (up - down) / (2 * h);
  }
  return g;
}

double RelativeError(const Vector& a, const Vector& b) {
  double diff = 0.0, norm = 0.0;
  for (size_t j = 0; j < a.size(); ++j) {
    diff += (a[j] - b[j]) * (a[j] - b[j]);
    norm += b[j] * b[j];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-8);
}

TEST(GradientTest, MultinomialMatchesFiniteDifferences) {
  RandomStream::Generator g = RandomStream(5).MakeGenerator();
  const LinearObjective obj = LinearObjective::Multinomial(4, 6, true);
  for (int trial = 0; trial < 50; ++trial) {
    Vector theta(obj.num_params()), x(6);
    for (double& v : theta) v = g.NextGaussian();
    for (double& v : x) v = g.NextGaussian();
    const int y = static_cast<int>(g.UniformInt(4));
    Vector analytic(obj.num_params());
    obj.Gradient(theta, x, y, analytic);
    EXPECT_LE(RelativeError(analytic, NumericGradient(obj, theta, x, y, 1e-6)),
              1e-5);
  }
}

TEST(EmpiricalLossTest, TwoClusterValues) {
  const double mu = 100;
  const LabeledDataset d = Unwrap(LabeledDataset::FromRows(
      {{mu, 1}, {mu, 1}, {mu, -1}, {mu, -1}}, {1, 1, -1, -1}));
  EXPECT_EQ(Unwrap(EmpiricalLoss({{0, 1}, 0}, d, HingeLoss())), 0);
  EXPECT_EQ(Unwrap(EmpiricalLoss({{0, 0}, 0}, d, HingeLoss())), 1);
  EXPECT_EQ(Unwrap(EmpiricalLoss({{0, -1}, 0}, d, HingeLoss())), 2);
}

TEST(EmpiricalLossTest, MatchesObjectiveMean) {
  const LabeledDataset d = RandomDataset(3, 40, 5);
  const LinearModel m{{0.1, -0.2, 0.3, 0.4, -0.5}, 0.25};
  const LinearObjective obj = LinearObjective::Margin(LogisticLoss(), 5, true);
  Vector theta = m.w;
  theta.push_back(m.b);
  double s = 0.0;
  for (int i = 0; i < d.size(); ++i) s += obj.Loss(theta, d.row(i), d.label(i));
  EXPECT_NEAR(Unwrap(EmpiricalLoss(m, d, LogisticLoss())), s / d.size(),
              1e-15);
}

TEST(CheckNontrivialTest, Examples) {
  const LabeledDataset d = Unwrap(LabeledDataset::FromRows(
      {{2, 1}, {2, -1}}, {1, -1}));
  EXPECT_TRUE(CheckNontrivial({{0, 1}, 0}, d));
  EXPECT_FALSE(CheckNontrivial({{1, 0}, 0}, d));
  // Scores 0 and 2: product 0.
  EXPECT_TRUE(CheckNontrivial({{0, 1}, 1}, d));
}

TEST(AccuracyTest, TiesGoToPositiveAndLowestClass) {
  const LabeledDataset b =
      Unwrap(LabeledDataset::FromRows({{0, 0}, {0, 0}}, {1, -1}));
  EXPECT_EQ(Unwrap(Accuracy(LinearModel{{1, 1}, 0}, b)), 0.5);

  const LabeledDataset m = Unwrap(LabeledDataset::FromRows(
      {{1, 0}, {0, 0}}, {0, 1}, LabelMode::kMulticlass, 2));
  MulticlassModel model{2, 2, {0, 0, 0, 0}, {0, 0}};
  // All scores tie: both rows predict class 0.
  EXPECT_EQ(Unwrap(Accuracy(model, m)), 0.5);
}

TEST(LabeledDatasetTest, Validation) {
  EXPECT_FALSE(LabeledDataset::Create({1, 2, 3}, 2, 2, {1, -1},
                                      LabelMode::kBinary)
                   .ok());
  EXPECT_FALSE(
      LabeledDataset::Create({1, 2}, 1, 2, {0}, LabelMode::kBinary).ok());
  EXPECT_FALSE(LabeledDataset::Create({1, 2}, 1, 2, {3},
                                      LabelMode::kMulticlass, 3)
                   .ok());
  EXPECT_FALSE(LabeledDataset::Create({3, 4}, 1, 2, {1}, LabelMode::kBinary,
                                      2, 4.9)
                   .ok());
  const LabeledDataset ok = Unwrap(
      LabeledDataset::Create({3, 4}, 1, 2, {1}, LabelMode::kBinary, 2, 5.0));
  EXPECT_EQ(ok.MaxRowNorm(), 5.0);
}

}  // namespace
}  // namespace dpsgdf
