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

// Private feature preprocessing: private mean, private quantile of the
// distances to that mean, translation with a constant bias feature, and
// feature clipping.

#ifndef DPSGDF_PREPROCESS_H_
#define DPSGDF_PREPROCESS_H_

#include <vector>

#include "absl/status/statusor.h"
#include "dpsgdf/core.h"
#include "dpsgdf/mechanisms.h"
#include "dpsgdf/random.h"

namespace dpsgdf {

struct PreprocessState {
  Vector mu_hat;
  double tau = 0.0;
  // Rows whose augmented norm exceeded sqrt(2) tau and were clipped.
  int clipped_count = 0;
  bool quantile_skipped = false;
  PrivacyLedger ledger;
};

// n x (d+1) rows (x_i - mu_hat, tau), optionally clipped to sqrt(2) tau.
struct AugmentedDataset {
  LabeledDataset data;
  double tau;
};

// Scales every nonzero row to l2 norm exactly `norm`.
absl::StatusOr<LabeledDataset> NormalizeRows(const LabeledDataset& data,
                                             double norm);

// Mean of the rows rescaled to norm `norm_bound`, plus Gaussian noise
// calibrated to l2 sensitivity 2 norm_bound / n.
absl::StatusOr<Vector> PrivateMean(const LabeledDataset& data,
                                   const PrivacyBudget& budget,
                                   double norm_bound,
                                   const RandomStream& stream);

std::vector<double> DistanceSet(const LabeledDataset& data,
                                std::span<const double> mu_hat);

absl::StatusOr<AugmentedDataset> TranslateAugment(
    const LabeledDataset& data, const PreprocessState& state);

// Rows replaced by Clip(row, sqrt(2) tau). Returns the number clipped through
// `clipped` when non-null.
absl::StatusOr<AugmentedDataset> FeatureClip(const AugmentedDataset& aug,
                                             int* clipped = nullptr);

struct PreprocessOptions {
  // Row norm used for the private mean.
  double feature_norm = 1.0;
  int grid_size = kDefaultQuantileGrid;
  // Skip the quantile and clipping steps; the bias feature is then
  // `feature_norm` and rows keep their translated norms.
  bool skip_quantile = false;
  // Overrides DefaultTargetRank() when > 0.
  int target_rank = 0;
};

// Mean, distances, quantile, translate-augment and clip. The quantile range
// is the dataset radius (hint, or max row norm) plus ||mu_hat||. A
// non-positive tau is replaced by range / grid_size.
absl::StatusOr<AugmentedDataset> RunPreprocess(
    const LabeledDataset& data, const PrivacyBudget& mean_budget,
    const PrivacyBudget& quantile_budget, const PreprocessOptions& options,
    const RandomStream& stream, PreprocessState* state);

}  // namespace dpsgdf

#endif  // DPSGDF_PREPROCESS_H_
