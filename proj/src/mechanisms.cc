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

#include "dpsgdf/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "absl/strings/str_cat.h"

namespace dpsgdf {

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be > 0, got ", epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return PrivacyBudget(epsilon, delta);
}

PrivacyBudget PrivacyBudget::Unlimited() {
  return PrivacyBudget(std::numeric_limits<double>::infinity(), 0.5);
}

bool PrivacyBudget::unlimited() const { return std::isinf(epsilon_); }

double BudgetSplit::EpsilonSum() const {
  double s = 0.0;
  for (const PrivacyBudget& p : parts) s += p.epsilon();
  return s;
}

double BudgetSplit::DeltaSum() const {
  double s = 0.0;
  for (const PrivacyBudget& p : parts) s += p.delta();
  return s;
}

absl::StatusOr<BudgetSplit> SplitBudget(const PrivacyBudget& total,
                                        std::span<const double> fractions) {
  if (fractions.empty()) {
    return absl::InvalidArgumentError("no budget fractions");
  }
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("budget fraction must be positive, got ", f));
    }
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    return absl::InvalidArgumentError(
        absl::StrCat("budget fractions sum to ", sum, ", expected 1"));
  }
  BudgetSplit split{total, {}};
  for (double f : fractions) {
    // Normalizing by the sum keeps the parts from overshooting the parent
    // when the fractions sum to 1 + O(1e-16).
    const double share = f / sum;
    absl::StatusOr<PrivacyBudget> part =
        total.unlimited() ? PrivacyBudget::Unlimited()
                          : PrivacyBudget::Create(total.epsilon() * share,
                                                  total.delta() * share);
    if (!part.ok()) return part.status();
    split.parts.push_back(*part);
  }
  return split;
}

void PrivacyLedger::Charge(std::string mechanism,
                           const PrivacyBudget& budget) {
  entries_.push_back({std::move(mechanism), budget.epsilon(),
                      budget.unlimited() ? 0.0 : budget.delta()});
}

double PrivacyLedger::EpsilonSpent() const {
  double s = 0.0;
  for (const Entry& e : entries_) s += e.epsilon;
  return s;
}

double PrivacyLedger::DeltaSpent() const {
  double s = 0.0;
  for (const Entry& e : entries_) s += e.delta;
  return s;
}

bool PrivacyLedger::WithinBudget(const PrivacyBudget& total) const {
  if (total.unlimited()) return true;
  return EpsilonSpent() <= total.epsilon() * (1.0 + 1e-12) &&
         DeltaSpent() <= total.delta() * (1.0 + 1e-12);
}

absl::StatusOr<double> DpsgdSigma(int steps, double clip_norm, int n,
                                  const PrivacyBudget& budget) {
  if (steps < 1 || n < 1 || !(clip_norm > 0.0)) {
    return absl::InvalidArgumentError(
        "steps, clip norm and n must be positive");
  }
  if (budget.unlimited()) return 0.0;
  if (std::isinf(clip_norm)) {
    return absl::InvalidArgumentError(
        "an infinite clip norm has unbounded sensitivity");
  }
  const double nd = n;
  const double eps = budget.epsilon();
  const double var = 8.0 * steps * clip_norm * clip_norm *
                     std::log(1.0 / budget.delta()) / (nd * nd * eps * eps);
  return std::sqrt(var);
}

int MinBatchSize(int n, int steps, double epsilon) {
  if (std::isinf(epsilon)) return 1;
  const double b = n * std::sqrt(epsilon / (4.0 * steps));
  return static_cast<int>(std::ceil(std::max(b, 1.0)));
}

absl::StatusOr<double> GaussianMechanismSigma(double l2_sensitivity,
                                              const PrivacyBudget& budget) {
  if (!(l2_sensitivity >= 0.0)) {
    return absl::InvalidArgumentError("sensitivity must be nonnegative");
  }
  if (budget.unlimited()) return 0.0;
  return l2_sensitivity * std::sqrt(2.0 * std::log(1.25 / budget.delta())) /
         budget.epsilon();
}

Vector GaussianNoise(const RandomStream& stream, int dim, double sigma) {
  Vector out(dim, 0.0);
  if (sigma == 0.0) return out;
  RandomStream::Generator gen = stream.MakeGenerator();
  for (double& v : out) v = sigma * gen.NextGaussian();
  return out;
}

int DefaultTargetRank(int n, double epsilon) {
  if (std::isinf(epsilon)) return n;
  const double slack = std::ceil(100.0 / epsilon * std::log(n));
  const double rank = n - slack;
  return static_cast<int>(std::clamp(rank, 1.0, static_cast<double>(n)));
}

absl::StatusOr<double> PrivateQuantile(std::span<const double> values,
                                       int target_rank,
                                       const PrivacyBudget& budget,
                                       double range, int grid_size,
                                       const RandomStream& stream) {
  const int n = static_cast<int>(values.size());
  if (n == 0) return absl::InvalidArgumentError("quantile of empty input");
  if (target_rank < 1 || target_rank > n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "target rank ", target_rank, " outside [1, ", n, "]"));
  }
  if (!(range > 0.0) || grid_size < 2) {
    return absl::InvalidArgumentError(
        "quantile needs a positive range and >= 2 grid points");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> utility(grid_size);
  auto grid_point = [&](int k) { return range * k / (grid_size - 1); };
  for (int k = 0; k < grid_size; ++k) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(),
                                        grid_point(k)) -
                       sorted.begin();
    utility[k] = -std::abs(static_cast<double>(count - target_rank));
  }

  if (budget.unlimited()) {
    const auto best = std::max_element(utility.begin(), utility.end());
    return grid_point(static_cast<int>(best - utility.begin()));
  }

  // P(k) proportional to exp(eps * u_k / 2).
  const double half_eps = budget.epsilon() / 2.0;
  const double u_max = *std::max_element(utility.begin(), utility.end());
  std::vector<double> cumulative(grid_size);
  double total = 0.0;
  for (int k = 0; k < grid_size; ++k) {
    total += std::exp(half_eps * (utility[k] - u_max));
    cumulative[k] = total;
  }
  RandomStream::Generator gen = stream.MakeGenerator();
  const double target = gen.NextUniform() * total;
  const auto it =
      std::upper_bound(cumulative.begin(), cumulative.end(), target);
  const int k = std::min(static_cast<int>(it - cumulative.begin()),
                         grid_size - 1);
  return grid_point(k);
}

}  // namespace dpsgdf
