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

#include "dpsgdf/dpsgd.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace dpsgdf {
namespace {

constexpr uint64_t kBatchStream = 0;
constexpr uint64_t kNoiseStream = 1;
// Child index of the initialization stream; steps use [t, ...] with t >= 0.
constexpr uint64_t kInitStream = ~uint64_t{0};

absl::Status ValidateConfig(const TrainConfig& config, int num_params) {
  if (config.steps < 1) return absl::InvalidArgumentError("steps must be >= 1");
  if (!(config.step_size > 0.0) || !std::isfinite(config.step_size)) {
    return absl::InvalidArgumentError("step size must be positive");
  }
  if (!(config.clip_norm > 0.0)) {
    return absl::InvalidArgumentError("clip norm must be positive");
  }
  if (config.batch_size < 1) {
    return absl::InvalidArgumentError("batch size must be >= 1");
  }
  if (!config.init.empty() &&
      config.init.size() != static_cast<size_t>(num_params)) {
    return absl::InvalidArgumentError(
        absl::StrCat("init has ", config.init.size(), " entries, model has ",
                     num_params));
  }
  if (config.init_stddev < 0.0) {
    return absl::InvalidArgumentError("init stddev must be nonnegative");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<TrainResult> DpsgdTrain(
    const LabeledDataset& data, const LinearObjective& objective,
    const TrainConfig& config, const std::optional<PrivacyBudget>& budget) {
  const int p = objective.num_params();
  if (absl::Status s = ValidateConfig(config, p); !s.ok()) return s;
  if (data.dim() != objective.dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("objective expects dim ", objective.dim(),
                     ", dataset has dim ", data.dim()));
  }
  if (objective.multinomial() != (data.mode() == LabelMode::kMulticlass)) {
    return absl::InvalidArgumentError("label mode does not match objective");
  }
  const int n = data.size();

  TrainResult result;
  TrainTrace& trace = result.trace;
  if (budget.has_value() && !budget->unlimited()) {
    absl::StatusOr<double> sigma =
        DpsgdSigma(config.steps, config.clip_norm, n, *budget);
    if (!sigma.ok()) return sigma.status();
    trace.sigma = *sigma;
    const int min_batch = MinBatchSize(n, config.steps, budget->epsilon());
    if (config.batch_size < min_batch) {
      if (config.enforce_min_batch) {
        return absl::FailedPreconditionError(absl::StrCat(
            "batch size ", config.batch_size, " is below the minimum ",
            min_batch, " required for the privacy guarantee"));
      }
      trace.batch_below_minimum = true;
    }
  }

  const RandomStream root(config.seed);
  Vector theta(p, 0.0);
  if (!config.init.empty()) {
    theta = config.init;
  } else if (config.init_stddev > 0.0) {
    theta = GaussianNoise(root.Child(kInitStream), p, config.init_stddev);
  }

  const double batch = config.batch_size;
  const double noise_scale = trace.sigma / std::sqrt(batch);
  std::vector<int> indices(config.batch_size);
  Vector grad(p);
  Vector sum(p, 0.0);
  trace.steps.reserve(config.steps);

  for (int t = 0; t < config.steps; ++t) {
    const RandomStream step = root.Child(static_cast<uint64_t>(t));
    RandomStream::Generator sampler = step.Child(kBatchStream).MakeGenerator();
    for (int& i : indices) i = static_cast<int>(sampler.UniformInt(n));

    ClippedGradientSum(objective, theta, data, indices, config.clip_norm,
                       grad, config.execution);
    for (double& g : grad) g /= batch;
    const double clipped_norm = Norm2(grad);

    const Vector noise = GaussianNoise(step.Child(kNoiseStream), p,
                                       noise_scale);
    for (int j = 0; j < p; ++j) theta[j] -= config.step_size * (grad[j] + noise[j]);

    for (int j = 0; j < p; ++j) {
      if (!(std::abs(theta[j]) <= kDivergenceLimit)) {
        return absl::InternalError(absl::StrCat(
            "parameter ", j, " reached ", theta[j], " at step ", t + 1,
            "; training diverged"));
      }
      sum[j] += theta[j];
    }
    trace.steps.push_back(
        {t + 1, clipped_norm, Norm2(noise), Norm2(theta)});
    if (config.record_iterates) trace.iterates.push_back(theta);
  }

  result.theta = std::move(sum);
  for (double& v : result.theta) v /= config.steps;
  return result;
}

absl::StatusOr<LinearTrainResult> DpsgdTrainLinear(
    const LabeledDataset& data, const LossSpec& loss,
    const TrainConfig& config, const std::optional<PrivacyBudget>& budget,
    bool with_bias) {
  const LinearObjective objective =
      LinearObjective::Margin(loss, data.dim(), with_bias);
  absl::StatusOr<TrainResult> r = DpsgdTrain(data, objective, config, budget);
  if (!r.ok()) return r.status();
  return LinearTrainResult{objective.ToLinearModel(r->theta),
                           std::move(r->trace)};
}

Vector NoisyClippedMean(std::span<const Vector> gradients, double clip_norm,
                        double sigma, const RandomStream& stream) {
  const size_t p = gradients.front().size();
  Vector mean(p, 0.0);
  Vector scratch;
  for (const Vector& g : gradients) {
    scratch = g;
    if (!std::isinf(clip_norm)) ClipInPlace(scratch, clip_norm);
    for (size_t j = 0; j < p; ++j) mean[j] += scratch[j];
  }
  const double b = static_cast<double>(gradients.size());
  for (double& v : mean) v /= b;
  const Vector noise =
      GaussianNoise(stream, static_cast<int>(p), sigma / std::sqrt(b));
  for (size_t j = 0; j < p; ++j) mean[j] += noise[j];
  return mean;
}

}  // namespace dpsgdf
