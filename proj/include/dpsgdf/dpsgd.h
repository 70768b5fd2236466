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

// Mini-batch DPSGD with per-example clipping, Gaussian noise on the clipped
// mean and an averaged-iterate output.

#ifndef DPSGDF_DPSGD_H_
#define DPSGDF_DPSGD_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsgdf/core.h"
#include "dpsgdf/kernels.h"
#include "dpsgdf/mechanisms.h"
#include "dpsgdf/objective.h"
#include "dpsgdf/random.h"

namespace dpsgdf {

struct TrainConfig {
  int steps = 1;
  double step_size = 1.0;
  // May be +infinity when training without privacy.
  double clip_norm = 1.0;
  int batch_size = 1;
  uint64_t seed = 0;
  // Empty means theta_0 = 0.
  Vector init;
  // When > 0 and `init` is empty, theta_0 ~ N(0, init_stddev^2 I).
  double init_stddev = 0.0;
  // Reject batch sizes below MinBatchSize() under a finite budget. Turning
  // this off voids the privacy claim; the run proceeds with a warning in the
  // trace.
  bool enforce_min_batch = true;
  bool record_iterates = false;
  Execution execution = Execution::kOpenMP;
};

struct StepRecord {
  int step;
  double clipped_mean_norm;
  double noise_norm;
  double param_norm;
};

struct TrainTrace {
  double sigma = 0.0;
  bool batch_below_minimum = false;
  std::vector<StepRecord> steps;
  // theta_1..theta_T, only when TrainConfig::record_iterates is set.
  std::vector<Vector> iterates;
};

struct TrainResult {
  Vector theta;  // averaged iterate (1/T) sum_{t=1..T} theta_t
  TrainTrace trace;
};

// Parameters whose magnitude exceeds this abort training.
inline constexpr double kDivergenceLimit = 1e12;

// Runs T steps of DPSGD on `objective`. Without a budget sigma = 0.
//
// Per step t: draw B indices with replacement from stream (seed, [t, 0]),
// sum the clipped per-example gradients, divide by B, add one
// N(0, sigma^2/B I) draw from stream (seed, [t, 1]) and take a step.
// Equivalent in distribution to adding N(0, sigma^2 I) per example inside
// the sum.
absl::StatusOr<TrainResult> DpsgdTrain(
    const LabeledDataset& data, const LinearObjective& objective,
    const TrainConfig& config,
    const std::optional<PrivacyBudget>& budget = std::nullopt);

// Binary margin-loss convenience wrapper returning (w, b).
struct LinearTrainResult {
  LinearModel model;
  TrainTrace trace;
};
absl::StatusOr<LinearTrainResult> DpsgdTrainLinear(
    const LabeledDataset& data, const LossSpec& loss,
    const TrainConfig& config,
    const std::optional<PrivacyBudget>& budget = std::nullopt,
    bool with_bias = true);

// (1/|G|) sum_i clip(g_i, C) plus one N(0, sigma^2/|G| I) draw from stream.
Vector NoisyClippedMean(std::span<const Vector> gradients, double clip_norm,
                        double sigma, const RandomStream& stream);

}  // namespace dpsgdf

#endif  // DPSGDF_DPSGD_H_
