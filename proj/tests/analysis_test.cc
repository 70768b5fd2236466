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

#include "dpsgdf/analysis.h"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "dpsgdf/random.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpsgdf {
namespace {

using ::dpsgdf::testing::RandomDataset;
using ::dpsgdf::testing::Unwrap;

TEST(CounterexampleTest, SmallInstance) {
  const LabeledDataset d = Unwrap(MakeCounterexample({2, 4}));
  ASSERT_EQ(d.size(), 4);
  const std::vector<std::vector<double>> rows = {
      {2, 1}, {2, 1}, {2, -1}, {2, -1}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(std::vector<double>(d.row(i).begin(), d.row(i).end()), rows[i]);
  }
  EXPECT_EQ(d.labels(), (std::vector<int>{1, 1, -1, -1}));
  const LabeledDataset m =
      Unwrap(MakeCounterexample({2, 4, CounterexampleVariant::kMinus}));
  EXPECT_EQ(m.labels(), (std::vector<int>{-1, -1, 1, 1}));
  EXPECT_EQ(m.features(), d.features());
}

TEST(CounterexampleTest, DiameterIsTwo) {
  for (double mu : {0.5, 2.0, 100.0, 1e4}) {
    for (auto v : {CounterexampleVariant::kPlus, CounterexampleVariant::kMinus}) {
      EXPECT_EQ(Diameter(Unwrap(MakeCounterexample({mu, 10, v}))), 2.0);
    }
  }
}

TEST(CounterexampleTest, RejectsOddOrTinyN) {
  EXPECT_FALSE(MakeCounterexample({100, 63}).ok());
  EXPECT_FALSE(MakeCounterexample({100, 0}).ok());
  EXPECT_FALSE(MakeCounterexample({0, 64}).ok());
}

TEST(ExcessLossTest, Examples) {
  const LabeledDataset d = Unwrap(MakeCounterexample({100, 64}));
  EXPECT_EQ(Unwrap(ExcessLoss({{0, 1}, 0}, d, HingeLoss(), 0)), 0);
  EXPECT_EQ(Unwrap(ExcessLoss({{0, 0}, 0}, d, HingeLoss(), 0)), 1);
}

TEST(ExcessLossTest, LowerBoundedByMarginDeficit) {
  const LabeledDataset d = Unwrap(MakeCounterexample({100, 64}));
  RandomStream::Generator g = RandomStream(1).MakeGenerator();
  for (int trial = 0; trial < 1000; ++trial) {
    const LinearModel m{{0.05 * g.NextGaussian(), 2 * g.NextGaussian()}, 0};
    EXPECT_GE(Unwrap(ExcessLoss(m, d, HingeLoss(), 0)),
              std::max(1 - m.w[1], 0.0) - 1e-12);
  }
}

TEST(DesignRankTest, Examples) {
  const LabeledDataset same =
      Unwrap(LabeledDataset::FromRows({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}},
                                      {1, -1, 1}));
  EXPECT_EQ(Unwrap(DesignRank(same)).rank, 1);
  EXPECT_EQ(Unwrap(DesignRank(Unwrap(MakeCounterexample({100, 64})))).rank, 2);
  for (int d : {1, 4, 9}) {
    EXPECT_EQ(Unwrap(DesignRank(RandomDataset(d, 3 * d, d))).rank, d);
  }
}

// Independent oracle: eigenvalues of the Gram matrix X^T X.
int GramRank(const LabeledDataset& data) {
  Eigen::MatrixXd x(data.size(), data.dim());
  for (int i = 0; i < data.size(); ++i) {
    for (int j = 0; j < data.dim(); ++j) x(i, j) = data.row(i)[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.transpose() * x);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  int r = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) r += ev(i) > 1e-10 * top;
  return r;
}

TEST(DesignRankTest, AgreesWithGramOracleOnLowRankData) {
  RandomStream::Generator g = RandomStream(2).MakeGenerator();
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(g.UniformInt(40));
    const int d = 1 + static_cast<int>(g.UniformInt(10));
    const int k = 1 + static_cast<int>(g.UniformInt(std::min(n, d)));
    // X = A B with A n x k, B k x d.
    Eigen::MatrixXd a(n, k), b(k, d);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g.NextGaussian();
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g.NextGaussian();
    const Eigen::MatrixXd x = a * b;
    std::vector<Vector> rows(n, Vector(d));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) rows[i][j] = x(i, j);
    }
    const LabeledDataset data =
        Unwrap(LabeledDataset::FromRows(rows, std::vector<int>(n, 1)));
    const RankReport rep = Unwrap(DesignRank(data));
    EXPECT_EQ(rep.rank, k);
    EXPECT_EQ(rep.rank, GramRank(data));
    EXPECT_LE(rep.rank, std::min(n, d));
  }
}

TEST(DesignRankTest, Seminorm) {
  const LabeledDataset d = Unwrap(LabeledDataset::FromRows(
      {{1, 0, 0}, {2, 0, 0}, {0, 3, 0}}, {1, 1, -1}));
  EXPECT_NEAR(*Unwrap(DesignRank(d, 0, Vector{3, 4, 12})).seminorm, 5.0,
              1e-12);
  RandomStream::Generator g = RandomStream(3).MakeGenerator();
  const LabeledDataset r = RandomDataset(4, 5, 8);
  for (int trial = 0; trial < 50; ++trial) {
    Vector v(8);
    for (double& x : v) x = g.NextGaussian();
    EXPECT_LE(*Unwrap(DesignRank(r, 0, v)).seminorm, Norm2(v) * (1 + 1e-12));
  }
  EXPECT_FALSE(DesignRank(d, 0, Vector{1, 2}).ok());
}

TEST(AppendOnesTest, AddsConstantColumn) {
  const LabeledDataset d = Unwrap(MakeCounterexample({3, 2}));
  const LabeledDataset a = Unwrap(AppendOnes(d));
  EXPECT_EQ(a.dim(), 3);
  EXPECT_EQ(a.row(1)[2], 1.0);
  EXPECT_EQ(a.row(1)[1], -1.0);
}

TEST(SeparationExperimentTest, BothSucceedOutsideFailureRegime) {
  SeparationConfig c;
  c.mu = 2;
  c.n = 1000;
  c.budget = Unwrap(PrivacyBudget::Create(1, 1e-5));
  c.seeds = 10;
  const SeparationReport r = Unwrap(SeparationExperiment(c));
  EXPECT_LE(r.best_dpsgd.worst_variant_excess, 0.1);
  EXPECT_LE(r.best_dpsgdf.worst_variant_excess, 0.1);
  EXPECT_TRUE(r.ledger_within_budget);
  EXPECT_EQ(r.rows.size(), 2u * 2 * 18);
}

// Full-batch noiseless gradient descent on the bias-free hinge problem.
double FullBatchExcess(const LabeledDataset& d, double clip, double lr,
                       int steps) {
  LinearModel m{{0, 0}, 0};
  for (int t = 0; t < steps; ++t) {
    Vector g(2, 0.0);
    for (int i = 0; i < d.size(); ++i) {
      Vector e = Unwrap(PerExampleGradient(m, d.row(i), d.label(i), HingeLoss()));
      e.pop_back();
      ClipInPlace(e, clip);
      g[0] += e[0] / d.size();
      g[1] += e[1] / d.size();
    }
    m.w[0] -= lr * g[0];
    m.w[1] -= lr * g[1];
  }
  return Unwrap(ExcessLoss(m, d, HingeLoss(), 0));
}

TEST(SeparationExperimentTest, ZeroNoiseLimit) {
  SeparationConfig c;
  c.seeds = 20;
  const SeparationReport r = Unwrap(SeparationExperiment(c));
  EXPECT_LE(r.best_dpsgdf.worst_variant_excess, 1e-3);
  // The instance is solvable by noiseless full-batch descent on this grid...
  const LabeledDataset d = Unwrap(MakeCounterexample({100, 64}));
  EXPECT_LE(FullBatchExcess(d, 10, 1, 50), 1e-3);
  // ...but batches drawn with replacement are unbalanced between the two
  // clusters, and each imbalance moves w1 by O(mu) times the step, so even
  // without noise the sampled iterates stay far from the optimum.
  EXPECT_GE(r.best_dpsgd.worst_variant_excess, 0.1);
}

TEST(SeparationExperimentTest, CsvLayout) {
  SeparationConfig c;
  c.seeds = 2;
  c.clip_norms = {1};
  c.step_sizes = {0.25};
  c.step_counts = {10};
  std::ostringstream out;
  WriteSeparationCsv(Unwrap(SeparationExperiment(c)), out);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line,
            "algorithm,variant,clip,lr,steps,seed_count,mean_excess,std_excess");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(SeparationExperimentTest, RejectsBadConfig) {
  SeparationConfig c;
  c.seeds = 0;
  EXPECT_FALSE(SeparationExperiment(c).ok());
  c.seeds = 1;
  c.n = 7;
  EXPECT_FALSE(SeparationExperiment(c).ok());
}

}  // namespace
}  // namespace dpsgdf
