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
#include <numbers>
#include <utility>

#include "absl/strings/str_cat.h"

namespace dpsgdf {
namespace {

constexpr uint64_t kMeanStream = 0;
constexpr uint64_t kQuantileStream = 1;

}  // namespace

absl::StatusOr<LabeledDataset> NormalizeRows(const LabeledDataset& data,
                                             double norm) {
  if (!(norm > 0.0)) {
    return absl::InvalidArgumentError("normalization norm must be positive");
  }
  std::vector<double> features = data.features();
  const int d = data.dim();
  for (int i = 0; i < data.size(); ++i) {
    std::span<double> row(features.data() + static_cast<size_t>(i) * d, d);
    const double r = Norm2(row);
    if (r == 0.0) continue;
    const double scale = norm / r;
    for (double& v : row) v *= scale;
  }
  return data.WithFeatures(std::move(features), d, norm);
}

absl::StatusOr<Vector> PrivateMean(const LabeledDataset& data,
                                   const PrivacyBudget& budget,
                                   double norm_bound,
                                   const RandomStream& stream) {
  if (!(norm_bound > 0.0)) {
    return absl::InvalidArgumentError("norm bound must be positive");
  }
  const int n = data.size();
  const int d = data.dim();
  Vector mean(d, 0.0);
  for (int i = 0; i < n; ++i) {
    std::span<const double> x = data.row(i);
    const double r = Norm2(x);
    if (r == 0.0) continue;
    const double scale = norm_bound / r;
    for (int j = 0; j < d; ++j) mean[j] += scale * x[j];
  }
  for (double& v : mean) v /= n;

  absl::StatusOr<double> sigma =
      GaussianMechanismSigma(2.0 * norm_bound / n, budget);
  if (!sigma.ok()) return sigma.status();
  const Vector noise = GaussianNoise(stream, d, *sigma);
  for (int j = 0; j < d; ++j) mean[j] += noise[j];
  return mean;
}

std::vector<double> DistanceSet(const LabeledDataset& data,
                                std::span<const double> mu_hat) {
  std::vector<double> out(data.size());
  const int d = data.dim();
  for (int i = 0; i < data.size(); ++i) {
    std::span<const double> x = data.row(i);
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
      const double diff = x[j] - mu_hat[j];
      s += diff * diff;
    }
    out[i] = std::sqrt(s);
  }
  return out;
}

absl::StatusOr<AugmentedDataset> TranslateAugment(
    const LabeledDataset& data, const PreprocessState& state) {
  if (!(state.tau > 0.0)) {
    return absl::InvalidArgumentError("tau must be positive");
  }
  const int d = data.dim();
  if (state.mu_hat.size() != static_cast<size_t>(d)) {
    return absl::InvalidArgumentError("mean has the wrong dimension");
  }
  std::vector<double> features(static_cast<size_t>(data.size()) * (d + 1));
  for (int i = 0; i < data.size(); ++i) {
    std::span<const double> x = data.row(i);
    double* out = features.data() + static_cast<size_t>(i) * (d + 1);
    for (int j = 0; j < d; ++j) out[j] = x[j] - state.mu_hat[j];
    out[d] = state.tau;
  }
  absl::StatusOr<LabeledDataset> aug =
      data.WithFeatures(std::move(features), d + 1);
  if (!aug.ok()) return aug.status();
  return AugmentedDataset{*std::move(aug), state.tau};
}

absl::StatusOr<AugmentedDataset> FeatureClip(const AugmentedDataset& aug,
                                             int* clipped) {
  const double bound = std::numbers::sqrt2 * aug.tau;
  std::vector<double> features = aug.data.features();
  const int d = aug.data.dim();
  int count = 0;
  for (int i = 0; i < aug.data.size(); ++i) {
    std::span<double> row(features.data() + static_cast<size_t>(i) * d, d);
    if (Norm2(row) > bound) {
      ClipInPlace(row, bound);
      ++count;
    }
  }
  if (clipped != nullptr) *clipped = count;
  absl::StatusOr<LabeledDataset> out =
      aug.data.WithFeatures(std::move(features), d);
  if (!out.ok()) return out.status();
  return AugmentedDataset{*std::move(out), aug.tau};
}

absl::StatusOr<AugmentedDataset> RunPreprocess(
    const LabeledDataset& data, const PrivacyBudget& mean_budget,
    const PrivacyBudget& quantile_budget, const PreprocessOptions& options,
    const RandomStream& stream, PreprocessState* state) {
  PreprocessState local;
  PreprocessState& st = state != nullptr ? *state : local;
  st = PreprocessState{};

  absl::StatusOr<Vector> mu = PrivateMean(
      data, mean_budget, options.feature_norm, stream.Child(kMeanStream));
  if (!mu.ok()) return mu.status();
  st.mu_hat = *std::move(mu);
  st.ledger.Charge("private_mean", mean_budget);

  if (options.skip_quantile) {
    st.tau = options.feature_norm;
    st.quantile_skipped = true;
    return TranslateAugment(data, st);
  }

  const std::vector<double> distances = DistanceSet(data, st.mu_hat);
  const double radius = data.radius_hint().value_or(data.MaxRowNorm());
  const double range = radius + Norm2(st.mu_hat);
  const int rank = options.target_rank > 0
                       ? options.target_rank
                       : DefaultTargetRank(data.size(),
                                           quantile_budget.epsilon());
  absl::StatusOr<double> tau =
      PrivateQuantile(distances, rank, quantile_budget, range,
                      options.grid_size, stream.Child(kQuantileStream));
  if (!tau.ok()) return tau.status();
  st.ledger.Charge("private_quantile", quantile_budget);
  st.tau = *tau > 0.0 ? *tau : range / options.grid_size;

  absl::StatusOr<AugmentedDataset> aug = TranslateAugment(data, st);
  if (!aug.ok()) return aug.status();
  return FeatureClip(*aug, &st.clipped_count);
}

}  // namespace dpsgdf
