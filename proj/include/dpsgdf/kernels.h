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

// Data-parallel inner loops. Each kernel has a serial reference and an
// OpenMP path. Both reduce in the same canonical order: examples are grouped
// into consecutive blocks of kReduceBlock, each block is summed left to
// right, and block partials are summed left to right. The result is therefore
// bitwise identical across policies and thread counts.

#ifndef DPSGDF_KERNELS_H_
#define DPSGDF_KERNELS_H_

#include <span>

#include "dpsgdf/core.h"
#include "dpsgdf/objective.h"

namespace dpsgdf {

enum class Execution { kSerial, kOpenMP };

inline constexpr int kReduceBlock = 64;

// out = sum over i in `indices` of clip(grad_i(theta), clip_norm), with
// out.size() == objective.num_params(). An infinite clip norm disables
// clipping.
void ClippedGradientSum(const LinearObjective& objective,
                        std::span<const double> theta,
                        const LabeledDataset& data,
                        std::span<const int> indices, double clip_norm,
                        std::span<double> out,
                        Execution exec = Execution::kOpenMP);

// Sum of per-example losses over all rows.
double LossSum(const LinearObjective& objective, std::span<const double> theta,
               const LabeledDataset& data,
               Execution exec = Execution::kOpenMP);

// Number of rows whose predicted label equals the true label.
int CorrectCount(const LinearObjective& objective,
                 std::span<const double> theta, const LabeledDataset& data,
                 Execution exec = Execution::kOpenMP);

}  // namespace dpsgdf

#endif  // DPSGDF_KERNELS_H_
