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

#ifndef DPSGDF_OBJECTIVE_H_
#define DPSGDF_OBJECTIVE_H_

#include <span>

#include "dpsgdf/core.h"

namespace dpsgdf {

// A linear predictor written as one flat parameter vector theta, which is
// what the optimizer and the gradient kernels operate on.
//
// Margin layout: (w_1..w_d[, b]).
// Multinomial layout: K consecutive blocks (w_k1..w_kd[, b_k]).
class LinearObjective {
 public:
  static LinearObjective Margin(LossSpec loss, int dim, bool with_bias);
  static LinearObjective Multinomial(int num_classes, int dim,
                                     bool with_bias);

  bool multinomial() const { return num_classes_ > 0; }
  int num_classes() const { return num_classes_; }
  int dim() const { return dim_; }
  bool with_bias() const { return with_bias_; }
  int num_params() const;
  const LossSpec& loss() const { return loss_; }

  // out must have num_params() entries; it is overwritten.
  void Gradient(std::span<const double> theta, std::span<const double> x,
                int label, std::span<double> out) const;
  double Loss(std::span<const double> theta, std::span<const double> x,
              int label) const;
  int Predict(std::span<const double> theta, std::span<const double> x) const;

  LinearModel ToLinearModel(std::span<const double> theta) const;
  MulticlassModel ToMulticlassModel(std::span<const double> theta) const;

 private:
  LinearObjective() = default;

  double Score(std::span<const double> block,
               std::span<const double> x) const;

  LossSpec loss_;
  int dim_ = 0;
  int num_classes_ = 0;  // 0 for margin losses
  bool with_bias_ = true;
};

}  // namespace dpsgdf

#endif  // DPSGDF_OBJECTIVE_H_
