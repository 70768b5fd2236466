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

// The two-cluster hinge instance on which plain DPSGD fails, design-matrix
// diagnostics, and the Monte-Carlo experiment comparing DPSGD with DPSGD-F.

#ifndef DPSGDF_ANALYSIS_H_
#define DPSGDF_ANALYSIS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsgdf/core.h"
#include "dpsgdf/mechanisms.h"

namespace dpsgdf {

// kPlus:  n/2 rows (mu, 1) labeled +1 and n/2 rows (mu, -1) labeled -1.
// kMinus: same features, labels negated.
enum class CounterexampleVariant { kPlus, kMinus };

struct CounterexampleSpec {
  double mu = 100.0;
  int n = 64;
  CounterexampleVariant variant = CounterexampleVariant::kPlus;
};

absl::StatusOr<LabeledDataset> MakeCounterexample(
    const CounterexampleSpec& spec);

// L(model) - optimum, floored at 0 when within 1e-9 below it.
absl::StatusOr<double> ExcessLoss(const LinearModel& model,
                                  const LabeledDataset& data,
                                  const LossSpec& loss, double optimum_value);

// Largest pairwise l2 distance between rows.
double Diameter(const LabeledDataset& data);

struct RankReport {
  int rank = 0;
  std::vector<double> singular_values;  // descending
  // ||M v||_2 for the projector M onto the row span; set when a probe vector
  // was supplied.
  std::optional<double> seminorm;
};

// Default relative tolerance 1e-9 * max(n, d).
double DefaultRankTolerance(int n, int d);

// rank = #{sigma_i > tol_factor * sigma_max}. tol_factor <= 0 selects
// DefaultRankTolerance().
absl::StatusOr<RankReport> DesignRank(const LabeledDataset& data,
                                      double tol_factor = 0.0,
                                      std::optional<Vector> probe =
                                          std::nullopt);

// Rows (x_i, 1): the design used by the rank terms of the error bounds.
absl::StatusOr<LabeledDataset> AppendOnes(const LabeledDataset& data);

enum class Algorithm { kDpsgd, kDpsgdf };
std::string AlgorithmName(Algorithm a);

struct SeparationConfig {
  double mu = 100.0;
  int n = 64;
  PrivacyBudget budget = PrivacyBudget::Unlimited();
  std::vector<double> clip_norms = {0.1, 1.0, 10.0};
  std::vector<double> step_sizes = {0.0625, 0.25, 1.0};
  std::vector<int> step_counts = {50, 200};
  // 0 selects n (sampling with replacement).
  int batch_size = 0;
  int seeds = 200;
  uint64_t base_seed = 20230101;
  std::array<double, 3> budget_fractions = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  // 0 selects the instance radius sqrt(mu^2 + 1).
  double feature_norm = 0.0;
  bool skip_quantile = false;
};

struct SeparationRow {
  Algorithm algorithm;
  CounterexampleVariant variant;
  double clip_norm;
  double step_size;
  int steps;
  int seed_count;
  double mean_excess;
  double std_excess;
};

struct SeparationBest {
  // Grid-minimal value of max over the two variants of the mean excess.
  double worst_variant_excess = 0.0;
  double excess_plus = 0.0;
  double excess_minus = 0.0;
  double clip_norm = 0.0;
  double step_size = 0.0;
  int steps = 0;
};

struct SeparationReport {
  std::vector<SeparationRow> rows;
  SeparationBest best_dpsgd;
  SeparationBest best_dpsgdf;
  // Every DPSGD-F run charged at most the input budget.
  bool ledger_within_budget = true;
  int dpsgdf_runs = 0;
};

// For every grid point and both variants, trains each algorithm over
// `seeds` seeds and records the mean excess hinge loss (optimum 0). DPSGD
// trains bias-free (w1, w2); DPSGD-F uses its augmented bias.
absl::StatusOr<SeparationReport> SeparationExperiment(
    const SeparationConfig& config);

// CSV with header algorithm,variant,clip,lr,steps,seed_count,mean_excess,
// std_excess.
void WriteSeparationCsv(const SeparationReport& report, std::ostream& out);

}  // namespace dpsgdf

#endif  // DPSGDF_ANALYSIS_H_
