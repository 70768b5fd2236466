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

#include "dpsgdf/core.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dpsgdf/objective.h"

namespace dpsgdf {
namespace {

double HingePhi(double z) { return std::max(1.0 - z, 0.0); }
double HingePhiPrime(double z) { return z < 1.0 ? -1.0 : 0.0; }

// log(1 + exp(-z)) without overflow on either tail.
double LogisticPhi(double z) {
  if (z > 0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}
double LogisticPhiPrime(double z) {
  if (z > 0) {
    const double e = std::exp(-z);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(z));
}

bool AllFinite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(),
                     [](double v) { return std::isfinite(v); });
}

absl::Status CheckBinaryLabel(int y) {
  if (y != 1 && y != -1) {
    return absl::InvalidArgumentError(
        absl::StrCat("binary label must be -1 or +1, got ", y));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<LabeledDataset> LabeledDataset::Create(
    std::vector<double> features, int num_rows, int dim,
    std::vector<int> labels, LabelMode mode, int num_classes,
    std::optional<double> radius_hint) {
  if (num_rows < 1 || dim < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("dataset needs n >= 1 and d >= 1, got n=", num_rows,
                     " d=", dim));
  }
  if (features.size() != static_cast<size_t>(num_rows) * dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature buffer has ", features.size(),
                     " entries, expected ", num_rows, "x", dim));
  }
  if (labels.size() != static_cast<size_t>(num_rows)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "got ", labels.size(), " labels for ", num_rows, " rows"));
  }
  if (!AllFinite(features)) {
    return absl::InvalidArgumentError("features contain non-finite values");
  }
  if (mode == LabelMode::kBinary) {
    num_classes = 2;
    for (int y : labels) {
      if (absl::Status s = CheckBinaryLabel(y); !s.ok()) return s;
    }
  } else {
    if (num_classes < 2) {
      return absl::InvalidArgumentError("multiclass needs >= 2 classes");
    }
    for (int y : labels) {
      if (y < 0 || y >= num_classes) {
        return absl::InvalidArgumentError(absl::StrCat(
            "label ", y, " outside [0, ", num_classes, ")"));
      }
    }
  }
  if (radius_hint.has_value() && !(*radius_hint >= 0.0)) {
    return absl::InvalidArgumentError("radius hint must be nonnegative");
  }

  LabeledDataset out;
  out.features_ = std::move(features);
  out.labels_ = std::move(labels);
  out.num_rows_ = num_rows;
  out.dim_ = dim;
  out.mode_ = mode;
  out.num_classes_ = num_classes;
  out.radius_hint_ = radius_hint;
  if (radius_hint.has_value()) {
    const double slack = *radius_hint * (1.0 + 1e-12);
    for (int i = 0; i < num_rows; ++i) {
      if (Norm2(out.row(i)) > slack) {
        return absl::InvalidArgumentError(absl::StrCat(
            "row ", i, " has norm ", Norm2(out.row(i)),
            " above the radius hint ", *radius_hint));
      }
    }
  }
  return out;
}

absl::StatusOr<LabeledDataset> LabeledDataset::FromRows(
    const std::vector<Vector>& rows, std::vector<int> labels, LabelMode mode,
    int num_classes, std::optional<double> radius_hint) {
  if (rows.empty()) return absl::InvalidArgumentError("no rows");
  const size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (const Vector& r : rows) {
    if (r.size() != dim) return absl::InvalidArgumentError("ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Create(std::move(flat), static_cast<int>(rows.size()),
                static_cast<int>(dim), std::move(labels), mode, num_classes,
                radius_hint);
}

double LabeledDataset::MaxRowNorm() const {
  double best = 0.0;
  for (int i = 0; i < num_rows_; ++i) best = std::max(best, Norm2(row(i)));
  return best;
}

absl::StatusOr<LabeledDataset> LabeledDataset::WithFeatures(
    std::vector<double> features, int dim,
    std::optional<double> radius_hint) const {
  return Create(std::move(features), num_rows_, dim, labels_, mode_,
                num_classes_, radius_hint);
}

LossSpec HingeLoss() {
  return LossSpec{"hinge", &HingePhi, &HingePhiPrime, 1.0, 1.0};
}

LossSpec LogisticLoss() {
  return LossSpec{"logistic", &LogisticPhi, &LogisticPhiPrime, 1.0,
                  std::log(2.0)};
}

absl::StatusOr<LossSpec> LossByName(std::string_view name) {
  if (name == "hinge") return HingeLoss();
  if (name == "logistic") return LogisticLoss();
  return absl::InvalidArgumentError(
      absl::StrCat("unknown loss '", std::string(name), "'"));
}

double Norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

absl::StatusOr<Vector> Clip(std::span<const double> x, double c) {
  if (!(c > 0.0)) {
    return absl::InvalidArgumentError("clip norm must be positive");
  }
  if (!AllFinite(x)) {
    return absl::InvalidArgumentError("cannot clip a non-finite vector");
  }
  Vector out(x.begin(), x.end());
  ClipInPlace(out, c);
  return out;
}

void ClipInPlace(std::span<double> x, double c) {
  const double norm = Norm2(x);
  if (norm <= c) return;
  const double scale = c / norm;
  for (double& v : x) v *= scale;
  // Rounding can leave the result an ulp above c; shrink until it is not, so
  // that clipping is idempotent.
  constexpr double kShrink = 1.0 - std::numeric_limits<double>::epsilon();
  while (Norm2(x) > c) {
    for (double& v : x) v *= kShrink;
  }
}

absl::StatusOr<double> MarginScore(const LinearModel& model,
                                   std::span<const double> x) {
  if (model.w.size() != x.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("model has dim ", model.w.size(), ", input has dim ",
                     x.size()));
  }
  return Dot(model.w, x) + model.b;
}

absl::StatusOr<Vector> PerExampleGradient(const LinearModel& model,
                                          std::span<const double> x, int y,
                                          const LossSpec& loss) {
  if (absl::Status s = CheckBinaryLabel(y); !s.ok()) return s;
  if (!AllFinite(x) || !AllFinite(model.w) || !std::isfinite(model.b)) {
    return absl::InvalidArgumentError("non-finite model or input");
  }
  absl::StatusOr<double> h = MarginScore(model, x);
  if (!h.ok()) return h.status();
  const double coef = loss.phi_prime(y * *h) * y;
  Vector g(x.size() + 1);
  for (size_t j = 0; j < x.size(); ++j) g[j] = coef * x[j];
  g[x.size()] = coef;
  return g;
}

absl::StatusOr<double> EmpiricalLoss(const LinearModel& model,
                                     const LabeledDataset& data,
                                     const LossSpec& loss) {
  if (data.mode() != LabelMode::kBinary) {
    return absl::InvalidArgumentError("margin loss needs binary labels");
  }
  if (model.w.size() != static_cast<size_t>(data.dim())) {
    return absl::InvalidArgumentError("model/dataset dimension mismatch");
  }
  double total = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    total += loss.phi(data.label(i) * (Dot(model.w, data.row(i)) + model.b));
  }
  return total / data.size();
}

bool CheckNontrivial(const LinearModel& model, const LabeledDataset& data) {
  if (model.w.size() != static_cast<size_t>(data.dim())) return false;
  bool nonneg = false;
  bool nonpos = false;
  for (int i = 0; i < data.size(); ++i) {
    const double h = Dot(model.w, data.row(i)) + model.b;
    if (h >= 0.0) nonneg = true;
    if (h <= 0.0) nonpos = true;
  }
  return nonneg && nonpos;
}

namespace {

absl::Status CheckMulticlass(const MulticlassModel& model,
                             const LabeledDataset& data) {
  if (data.mode() != LabelMode::kMulticlass ||
      data.num_classes() != model.num_classes || data.dim() != model.dim) {
    return absl::InvalidArgumentError("model/dataset shape mismatch");
  }
  return absl::OkStatus();
}

Vector ClassScores(const MulticlassModel& model, std::span<const double> x) {
  Vector s(model.num_classes);
  for (int k = 0; k < model.num_classes; ++k) {
    s[k] = Dot(std::span<const double>(model.weights)
                   .subspan(static_cast<size_t>(k) * model.dim, model.dim),
               x) +
           model.bias[k];
  }
  return s;
}

}  // namespace

absl::StatusOr<double> EmpiricalLoss(const MulticlassModel& model,
                                     const LabeledDataset& data) {
  if (absl::Status s = CheckMulticlass(model, data); !s.ok()) return s;
  double total = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const Vector s = ClassScores(model, data.row(i));
    const double m = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double v : s) z += std::exp(v - m);
    total += m + std::log(z) - s[data.label(i)];
  }
  return total / data.size();
}

absl::StatusOr<double> Accuracy(const LinearModel& model,
                                const LabeledDataset& data) {
  if (data.mode() != LabelMode::kBinary ||
      model.w.size() != static_cast<size_t>(data.dim())) {
    return absl::InvalidArgumentError("model/dataset shape mismatch");
  }
  int correct = 0;
  for (int i = 0; i < data.size(); ++i) {
    const int pred = Dot(model.w, data.row(i)) + model.b >= 0.0 ? 1 : -1;
    correct += pred == data.label(i);
  }
  return static_cast<double>(correct) / data.size();
}

absl::StatusOr<double> Accuracy(const MulticlassModel& model,
                                const LabeledDataset& data) {
  if (absl::Status s = CheckMulticlass(model, data); !s.ok()) return s;
  int correct = 0;
  for (int i = 0; i < data.size(); ++i) {
    const Vector s = ClassScores(model, data.row(i));
    const int pred =
        static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
    correct += pred == data.label(i);
  }
  return static_cast<double>(correct) / data.size();
}

// ---------------------------------------------------------------------------
// LinearObjective

LinearObjective LinearObjective::Margin(LossSpec loss, int dim,
                                        bool with_bias) {
  LinearObjective obj;
  obj.loss_ = std::move(loss);
  obj.dim_ = dim;
  obj.num_classes_ = 0;
  obj.with_bias_ = with_bias;
  return obj;
}

LinearObjective LinearObjective::Multinomial(int num_classes, int dim,
                                             bool with_bias) {
  LinearObjective obj;
  obj.loss_ = LossSpec{"multinomial", nullptr, nullptr, std::sqrt(2.0),
                       std::log(static_cast<double>(num_classes))};
  obj.dim_ = dim;
  obj.num_classes_ = num_classes;
  obj.with_bias_ = with_bias;
  return obj;
}

int LinearObjective::num_params() const {
  const int block = dim_ + (with_bias_ ? 1 : 0);
  return multinomial() ? block * num_classes_ : block;
}

double LinearObjective::Score(std::span<const double> block,
                              std::span<const double> x) const {
  double s = 0.0;
  for (int j = 0; j < dim_; ++j) s += block[j] * x[j];
  if (with_bias_) s += block[dim_];
  return s;
}

void LinearObjective::Gradient(std::span<const double> theta,
                               std::span<const double> x, int label,
                               std::span<double> out) const {
  const int block = dim_ + (with_bias_ ? 1 : 0);
  if (!multinomial()) {
    const double coef = loss_.phi_prime(label * Score(theta, x)) * label;
    for (int j = 0; j < dim_; ++j) out[j] = coef * x[j];
    if (with_bias_) out[dim_] = coef;
    return;
  }
  // Softmax probabilities minus the one-hot label, times (x, 1).
  double m = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < num_classes_; ++k) {
    out[static_cast<size_t>(k) * block] =
        Score(theta.subspan(static_cast<size_t>(k) * block, block), x);
    m = std::max(m, out[static_cast<size_t>(k) * block]);
  }
  double z = 0.0;
  for (int k = 0; k < num_classes_; ++k) {
    z += std::exp(out[static_cast<size_t>(k) * block] - m);
  }
  for (int k = 0; k < num_classes_; ++k) {
    const size_t off = static_cast<size_t>(k) * block;
    const double coef =
        std::exp(out[off] - m) / z - (k == label ? 1.0 : 0.0);
    for (int j = 0; j < dim_; ++j) out[off + j] = coef * x[j];
    if (with_bias_) out[off + dim_] = coef;
  }
}

double LinearObjective::Loss(std::span<const double> theta,
                             std::span<const double> x, int label) const {
  if (!multinomial()) return loss_.phi(label * Score(theta, x));
  const int block = dim_ + (with_bias_ ? 1 : 0);
  double m = -std::numeric_limits<double>::infinity();
  Vector s(num_classes_);
  for (int k = 0; k < num_classes_; ++k) {
    s[k] = Score(theta.subspan(static_cast<size_t>(k) * block, block), x);
    m = std::max(m, s[k]);
  }
  double z = 0.0;
  for (double v : s) z += std::exp(v - m);
  return m + std::log(z) - s[label];
}

int LinearObjective::Predict(std::span<const double> theta,
                             std::span<const double> x) const {
  if (!multinomial()) return Score(theta, x) >= 0.0 ? 1 : -1;
  const int block = dim_ + (with_bias_ ? 1 : 0);
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < num_classes_; ++k) {
    const double s =
        Score(theta.subspan(static_cast<size_t>(k) * block, block), x);
    if (s > best_score) {
      best_score = s;
      best = k;
    }
  }
  return best;
}

LinearModel LinearObjective::ToLinearModel(
    std::span<const double> theta) const {
  LinearModel m;
  m.w.assign(theta.begin(), theta.begin() + dim_);
  m.b = with_bias_ ? theta[dim_] : 0.0;
  return m;
}

MulticlassModel LinearObjective::ToMulticlassModel(
    std::span<const double> theta) const {
  const int block = dim_ + (with_bias_ ? 1 : 0);
  MulticlassModel m;
  m.num_classes = num_classes_;
  m.dim = dim_;
  m.weights.resize(static_cast<size_t>(num_classes_) * dim_);
  m.bias.assign(num_classes_, 0.0);
  for (int k = 0; k < num_classes_; ++k) {
    for (int j = 0; j < dim_; ++j) {
      m.weights[static_cast<size_t>(k) * dim_ + j] =
          theta[static_cast<size_t>(k) * block + j];
    }
    if (with_bias_) m.bias[k] = theta[static_cast<size_t>(k) * block + dim_];
  }
  return m;
}

}  // namespace dpsgdf
