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

#include "dpsgdf/kernels.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dpsgdf {
namespace {

int NumBlocks(int count) { return (count + kReduceBlock - 1) / kReduceBlock; }

// Block b of the clipped-gradient sum. Shared by both policies so the
// floating-point operation sequence is identical.
void GradientBlock(const LinearObjective& objective,
                   std::span<const double> theta, const LabeledDataset& data,
                   std::span<const int> indices, double clip_norm, int block,
                   std::span<double> scratch, std::span<double> partial) {
  std::fill(partial.begin(), partial.end(), 0.0);
  const int begin = block * kReduceBlock;
  const int end =
      std::min(begin + kReduceBlock, static_cast<int>(indices.size()));
  for (int k = begin; k < end; ++k) {
    const int i = indices[k];
    objective.Gradient(theta, data.row(i), data.label(i), scratch);
    if (!std::isinf(clip_norm)) ClipInPlace(scratch, clip_norm);
    for (size_t j = 0; j < partial.size(); ++j) partial[j] += scratch[j];
  }
}

double LossBlock(const LinearObjective& objective,
                 std::span<const double> theta, const LabeledDataset& data,
                 int block) {
  double s = 0.0;
  const int begin = block * kReduceBlock;
  const int end = std::min(begin + kReduceBlock, data.size());
  for (int i = begin; i < end; ++i) {
    s += objective.Loss(theta, data.row(i), data.label(i));
  }
  return s;
}

void SumPartials(const std::vector<double>& partials, int blocks,
                 std::span<double> out) {
  const size_t p = out.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (int b = 0; b < blocks; ++b) {
    for (size_t j = 0; j < p; ++j) out[j] += partials[b * p + j];
  }
}

}  // namespace

void ClippedGradientSum(const LinearObjective& objective,
                        std::span<const double> theta,
                        const LabeledDataset& data,
                        std::span<const int> indices, double clip_norm,
                        std::span<double> out, Execution exec) {
  const size_t p = objective.num_params();
  const int blocks = NumBlocks(static_cast<int>(indices.size()));
  std::vector<double> partials(blocks * p);

  if (exec == Execution::kSerial) {
    std::vector<double> scratch(p);
    for (int b = 0; b < blocks; ++b) {
      GradientBlock(objective, theta, data, indices, clip_norm, b, scratch,
                    std::span<double>(partials).subspan(b * p, p));
    }
  } else {
#pragma omp parallel
    {
      std::vector<double> scratch(p);
#pragma omp for schedule(static)
      for (int b = 0; b < blocks; ++b) {
        GradientBlock(objective, theta, data, indices, clip_norm, b, scratch,
                      std::span<double>(partials).subspan(b * p, p));
      }
    }
  }
  SumPartials(partials, blocks, out);
}

double LossSum(const LinearObjective& objective, std::span<const double> theta,
               const LabeledDataset& data, Execution exec) {
  const int blocks = NumBlocks(data.size());
  std::vector<double> partials(blocks);
  if (exec == Execution::kSerial) {
    for (int b = 0; b < blocks; ++b) {
      partials[b] = LossBlock(objective, theta, data, b);
    }
  } else {
#pragma omp parallel for schedule(static)
    for (int b = 0; b < blocks; ++b) {
      partials[b] = LossBlock(objective, theta, data, b);
    }
  }
  double total = 0.0;
  for (double v : partials) total += v;
  return total;
}

int CorrectCount(const LinearObjective& objective,
                 std::span<const double> theta, const LabeledDataset& data,
                 Execution exec) {
  int correct = 0;
  const int n = data.size();
  if (exec == Execution::kSerial) {
    for (int i = 0; i < n; ++i) {
      correct += objective.Predict(theta, data.row(i)) == data.label(i);
    }
  } else {
#pragma omp parallel for reduction(+ : correct) schedule(static)
    for (int i = 0; i < n; ++i) {
      correct += objective.Predict(theta, data.row(i)) == data.label(i);
    }
  }
  return correct;
}

}  // namespace dpsgdf
