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

#ifndef DPSGDF_MECHANISMS_H_
#define DPSGDF_MECHANISMS_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsgdf/core.h"
#include "dpsgdf/random.h"

namespace dpsgdf {

// (epsilon, delta)-DP budget. epsilon may be +infinity, which every
// mechanism here treats as the zero-noise limit.
class PrivacyBudget {
 public:
  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);
  static PrivacyBudget Unlimited();

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  bool unlimited() const;

 private:
  PrivacyBudget(double epsilon, double delta)
      : epsilon_(epsilon), delta_(delta) {}

  double epsilon_;
  double delta_;
};

// Basic-composition split of a parent budget: part i gets (f_i eps, f_i delta).
struct BudgetSplit {
  PrivacyBudget total;
  std::vector<PrivacyBudget> parts;

  double EpsilonSum() const;
  double DeltaSum() const;
};

absl::StatusOr<BudgetSplit> SplitBudget(const PrivacyBudget& total,
                                        std::span<const double> fractions);

// Record of what each mechanism actually charged, composed additively.
class PrivacyLedger {
 public:
  struct Entry {
    std::string mechanism;
    double epsilon;
    double delta;
  };

  void Charge(std::string mechanism, const PrivacyBudget& budget);
  double EpsilonSpent() const;
  double DeltaSpent() const;
  bool WithinBudget(const PrivacyBudget& total) const;
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

// sigma = sqrt(8 T C^2 log(1/delta) / (n^2 eps^2)). Returns 0 for an
// unlimited budget.
absl::StatusOr<double> DpsgdSigma(int steps, double clip_norm, int n,
                                  const PrivacyBudget& budget);

// ceil(max{n sqrt(eps / (4T)), 1}). Unlimited budgets return 1.
int MinBatchSize(int n, int steps, double epsilon);

// Classical Gaussian mechanism scale sens * sqrt(2 log(1.25/delta)) / eps.
absl::StatusOr<double> GaussianMechanismSigma(double l2_sensitivity,
                                              const PrivacyBudget& budget);

// i.i.d. N(0, sigma^2) coordinates drawn from the given stream.
Vector GaussianNoise(const RandomStream& stream, int dim, double sigma);

inline constexpr int kDefaultQuantileGrid = 1024;

// n - ceil((100 / eps) log n), clamped to [1, n]; n for unlimited budgets.
int DefaultTargetRank(int n, double epsilon);

// Exponential mechanism over the uniform grid t_k = R k / (grid_size - 1),
// k = 0..grid_size-1, with utility -|#{v <= t_k} - target_rank|
// (sensitivity 1). Ties in the zero-noise limit go to the smallest k.
absl::StatusOr<double> PrivateQuantile(std::span<const double> values,
                                       int target_rank,
                                       const PrivacyBudget& budget,
                                       double range, int grid_size,
                                       const RandomStream& stream);

}  // namespace dpsgdf

#endif  // DPSGDF_MECHANISMS_H_
