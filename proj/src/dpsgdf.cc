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

#include "dpsgdf/dpsgdf.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dpsgdf/objective.h"

namespace dpsgdf {
namespace {

// Preprocessing draws live under a child index no training step can reach.
constexpr uint64_t kPreprocessStream = uint64_t{1} << 63;

struct Prepared {
  AugmentedDataset aug;
  PreprocessState state;
  BudgetSplit split;
};

absl::StatusOr<Prepared> Prepare(const LabeledDataset& data,
                                 const DpsgdfConfig& config,
                                 const PrivacyBudget& budget) {
  absl::StatusOr<BudgetSplit> split =
      SplitBudget(budget, config.budget_fractions);
  if (!split.ok()) return split.status();
  absl::StatusOr<LabeledDataset> normalized =
      NormalizeRows(data, config.feature_norm);
  if (!normalized.ok()) return normalized.status();

  PreprocessOptions options;
  options.feature_norm = config.feature_norm;
  options.grid_size = config.grid_size;
  options.skip_quantile = config.skip_quantile;
  PreprocessState state;
  absl::StatusOr<AugmentedDataset> aug = RunPreprocess(
      *normalized, split->parts[0], split->parts[1], options,
      RandomStream(config.train.seed).Child(kPreprocessStream), &state);
  if (!aug.ok()) return aug.status();
  return Prepared{*std::move(aug), std::move(state), *std::move(split)};
}

}  // namespace

absl::StatusOr<std::array<double, 3>> FeatureBudgetFractions(double eps_f,
                                                             double epsilon) {
  if (!(eps_f > 0.0) || !(eps_f < epsilon)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "feature budget must lie in (0, epsilon), got ", eps_f));
  }
  const double f = eps_f / epsilon;
  return std::array<double, 3>{f / 2, f / 2, 1.0 - f};
}

LinearModel BackMap(std::span<const double> augmented_theta,
                    std::span<const double> mu_hat, double tau) {
  const size_t d = mu_hat.size();
  LinearModel m;
  m.w.assign(augmented_theta.begin(), augmented_theta.begin() + d);
  m.b = tau * augmented_theta[d] - Dot(m.w, mu_hat);
  return m;
}

absl::StatusOr<DpsgdfResult> DpsgdfTrain(const LabeledDataset& data,
                                         const LossSpec& loss,
                                         const DpsgdfConfig& config,
                                         const PrivacyBudget& budget) {
  if (data.mode() != LabelMode::kBinary) {
    return absl::InvalidArgumentError(
        "margin-loss training needs binary labels");
  }
  absl::StatusOr<Prepared> prep = Prepare(data, config, budget);
  if (!prep.ok()) return prep.status();

  const LinearObjective objective =
      LinearObjective::Margin(loss, prep->aug.data.dim(), /*with_bias=*/false);
  absl::StatusOr<TrainResult> trained = DpsgdTrain(
      prep->aug.data, objective, config.train, prep->split.parts[2]);
  if (!trained.ok()) return trained.status();

  DpsgdfResult out;
  out.model = BackMap(trained->theta, prep->state.mu_hat, prep->state.tau);
  out.augmented_theta = std::move(trained->theta);
  out.trace = std::move(trained->trace);
  out.ledger = prep->state.ledger;
  out.ledger.Charge("dpsgd", prep->split.parts[2]);
  out.state = std::move(prep->state);
  out.feature_norm = config.feature_norm;
  return out;
}

absl::StatusOr<DpsgdfMulticlassResult> DpsgdfTrainMulticlass(
    const LabeledDataset& data, const DpsgdfConfig& config,
    const PrivacyBudget& budget) {
  if (data.mode() != LabelMode::kMulticlass) {
    return absl::InvalidArgumentError("multiclass training needs class labels");
  }
  absl::StatusOr<Prepared> prep = Prepare(data, config, budget);
  if (!prep.ok()) return prep.status();

  const int d = data.dim();
  const int k = data.num_classes();
  const LinearObjective objective =
      LinearObjective::Multinomial(k, d + 1, /*with_bias=*/false);
  absl::StatusOr<TrainResult> trained = DpsgdTrain(
      prep->aug.data, objective, config.train, prep->split.parts[2]);
  if (!trained.ok()) return trained.status();

  DpsgdfMulticlassResult out;
  out.model.num_classes = k;
  out.model.dim = d;
  out.model.weights.resize(static_cast<size_t>(k) * d);
  out.model.bias.resize(k);
  for (int c = 0; c < k; ++c) {
    const LinearModel m = BackMap(
        std::span<const double>(trained->theta)
            .subspan(static_cast<size_t>(c) * (d + 1), d + 1),
        prep->state.mu_hat, prep->state.tau);
    std::copy(m.w.begin(), m.w.end(),
              out.model.weights.begin() + static_cast<size_t>(c) * d);
    out.model.bias[c] = m.b;
  }
  out.trace = std::move(trained->trace);
  out.ledger = prep->state.ledger;
  out.ledger.Charge("dpsgd", prep->split.parts[2]);
  out.state = std::move(prep->state);
  out.feature_norm = config.feature_norm;
  return out;
}

double TheoreticalBoundDpsgdf(double lipschitz, double theta_norm,
                              double diam, double radius, int rank, int n,
                              const PrivacyBudget& budget, double phi0) {
  const double n_eps = n * budget.epsilon();
  const double leading = lipschitz * theta_norm * diam *
                         std::sqrt(rank * std::log(1.0 / budget.delta())) /
                         n_eps;
  const double outliers =
      (lipschitz * theta_norm * radius + phi0) * std::log(n) / n_eps;
  return leading + outliers;
}

double TheoreticalBoundDpsgd(double lipschitz, double theta_norm,
                             double radius, int rank, int n,
                             const PrivacyBudget& budget) {
  return 2.0 * lipschitz * theta_norm * radius *
         std::sqrt(rank * std::log(1.0 / budget.delta())) /
         (n * budget.epsilon());
}

}  // namespace dpsgdf
