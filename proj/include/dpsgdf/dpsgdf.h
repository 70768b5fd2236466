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

// DPSGD with private feature preprocessing, end to end.
//
// The input rows are first rescaled to a fixed norm R0 (a public, per-row
// map). The returned model scores that rescaled input, so predictions on new
// data go through NormalizeRows(data, feature_norm) first.

#ifndef DPSGDF_DPSGDF_H_
#define DPSGDF_DPSGDF_H_

#include <array>

#include "absl/status/statusor.h"
#include "dpsgdf/core.h"
#include "dpsgdf/dpsgd.h"
#include "dpsgdf/mechanisms.h"
#include "dpsgdf/preprocess.h"

namespace dpsgdf {

struct DpsgdfConfig {
  TrainConfig train;
  // (mean, quantile, sgd) shares of the budget.
  std::array<double, 3> budget_fractions = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  double feature_norm = 1.0;
  bool skip_quantile = false;
  int grid_size = kDefaultQuantileGrid;
};

// Fractions for a preprocessing budget eps_f out of eps: (eps_f/2, eps_f/2,
// eps - eps_f) / eps.
absl::StatusOr<std::array<double, 3>> FeatureBudgetFractions(double eps_f,
                                                             double epsilon);

struct DpsgdfResult {
  LinearModel model;
  // Bias-free parameter trained on the augmented rows, length d + 1.
  Vector augmented_theta;
  PreprocessState state;
  TrainTrace trace;
  PrivacyLedger ledger;
  double feature_norm = 1.0;
};

struct DpsgdfMulticlassResult {
  MulticlassModel model;
  PreprocessState state;
  TrainTrace trace;
  PrivacyLedger ledger;
  double feature_norm = 1.0;
};

// Maps an augmented bias-free parameter (w, v) back to the input space:
// w_prv = w, b_prv = tau v - w . mu_hat.
LinearModel BackMap(std::span<const double> augmented_theta,
                    std::span<const double> mu_hat, double tau);

absl::StatusOr<DpsgdfResult> DpsgdfTrain(const LabeledDataset& data,
                                         const LossSpec& loss,
                                         const DpsgdfConfig& config,
                                         const PrivacyBudget& budget);

absl::StatusOr<DpsgdfMulticlassResult> DpsgdfTrainMulticlass(
    const LabeledDataset& data, const DpsgdfConfig& config,
    const PrivacyBudget& budget);

// Order-of-magnitude diagnostics with unit leading constants.
//
// DPSGD-F: G t diam sqrt(rank log(1/delta))/(n eps)
//          + (G t R + phi0) log(n)/(n eps)
double TheoreticalBoundDpsgdf(double lipschitz, double theta_norm,
                              double diam, double radius, int rank, int n,
                              const PrivacyBudget& budget, double phi0);
// DPSGD:   2 G t R sqrt(rank log(1/delta))/(n eps)
double TheoreticalBoundDpsgd(double lipschitz, double theta_norm,
                             double radius, int rank, int n,
                             const PrivacyBudget& budget);

}  // namespace dpsgdf

#endif  // DPSGDF_DPSGDF_H_
