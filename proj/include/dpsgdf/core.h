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

// Shared vocabulary: labeled datasets, margin losses, linear models and the
// empirical risk they induce.

#ifndef DPSGDF_CORE_H_
#define DPSGDF_CORE_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpsgdf {

using Vector = std::vector<double>;

enum class LabelMode { kBinary, kMulticlass };

// Immutable n x d feature matrix (row-major) with one label per row.
//
// Binary datasets carry labels in {-1, +1}. Multiclass datasets carry labels
// in [0, num_classes). The optional radius hint is a public upper bound on the
// l2 norm of every row; Create() rejects rows that exceed it.
class LabeledDataset {
 public:
  static absl::StatusOr<LabeledDataset> Create(
      std::vector<double> features, int num_rows, int dim,
      std::vector<int> labels, LabelMode mode, int num_classes = 2,
      std::optional<double> radius_hint = std::nullopt);

  // Convenience for small binary datasets given as rows.
  static absl::StatusOr<LabeledDataset> FromRows(
      const std::vector<Vector>& rows, std::vector<int> labels,
      LabelMode mode = LabelMode::kBinary, int num_classes = 2,
      std::optional<double> radius_hint = std::nullopt);

  int size() const { return num_rows_; }
  int dim() const { return dim_; }
  LabelMode mode() const { return mode_; }
  int num_classes() const { return num_classes_; }
  std::optional<double> radius_hint() const { return radius_hint_; }

  std::span<const double> row(int i) const {
    return std::span<const double>(features_).subspan(
        static_cast<size_t>(i) * dim_, dim_);
  }
  int label(int i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<double>& features() const { return features_; }

  // Largest row norm; used when no radius hint was supplied.
  double MaxRowNorm() const;

  // Same labels and label domain, new feature matrix of the given width.
  absl::StatusOr<LabeledDataset> WithFeatures(
      std::vector<double> features, int dim,
      std::optional<double> radius_hint = std::nullopt) const;

 private:
  LabeledDataset() = default;

  std::vector<double> features_;
  std::vector<int> labels_;
  int num_rows_ = 0;
  int dim_ = 0;
  LabelMode mode_ = LabelMode::kBinary;
  int num_classes_ = 2;
  std::optional<double> radius_hint_;
};

// A margin loss l(h, y) = phi(y * h) with phi convex and non-increasing.
struct LossSpec {
  std::string name;
  double (*phi)(double);
  // Subderivative. For the hinge, the kink at z = 1 uses the strict
  // indicator 1{z < 1}, so phi_prime(1) = 0.
  double (*phi_prime)(double);
  double lipschitz;
  double phi_at_zero;
};

LossSpec HingeLoss();
LossSpec LogisticLoss();
absl::StatusOr<LossSpec> LossByName(std::string_view name);

struct LinearModel {
  Vector w;
  double b = 0.0;
};

// K-class linear scorer: scores_k = weights[k] . x + bias[k].
struct MulticlassModel {
  int num_classes = 0;
  int dim = 0;
  Vector weights;  // num_classes x dim, row-major
  Vector bias;     // num_classes
};

double Norm2(std::span<const double> x);
double Dot(std::span<const double> a, std::span<const double> b);

// min{1, c / ||x||} * x. The zero vector maps to itself.
absl::StatusOr<Vector> Clip(std::span<const double> x, double c);

// Unchecked in-place clip used on hot paths. Leaves x bit-for-bit untouched
// when ||x|| <= c.
void ClipInPlace(std::span<double> x, double c);

absl::StatusOr<double> MarginScore(const LinearModel& model,
                                   std::span<const double> x);

// Gradient of phi(y * (w.x + b)) with respect to (w, b), length d + 1.
absl::StatusOr<Vector> PerExampleGradient(const LinearModel& model,
                                          std::span<const double> x, int y,
                                          const LossSpec& loss);

absl::StatusOr<double> EmpiricalLoss(const LinearModel& model,
                                     const LabeledDataset& data,
                                     const LossSpec& loss);

// True iff some pair of rows receives scores whose product is <= 0.
bool CheckNontrivial(const LinearModel& model, const LabeledDataset& data);

// Mean multinomial cross-entropy.
absl::StatusOr<double> EmpiricalLoss(const MulticlassModel& model,
                                     const LabeledDataset& data);

// Fraction of rows classified correctly. Binary: sign of the score with ties
// going to +1. Multiclass: argmax with ties going to the lowest class index.
absl::StatusOr<double> Accuracy(const LinearModel& model,
                                const LabeledDataset& data);
absl::StatusOr<double> Accuracy(const MulticlassModel& model,
                                const LabeledDataset& data);

}  // namespace dpsgdf

#endif  // DPSGDF_CORE_H_
