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

#include "dpsgdf/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpsgdf/dpsgd.h"
#include "dpsgdf/dpsgdf.h"
#include "dpsgdf/preprocess.h"

namespace dpsgdf {

absl::StatusOr<LabeledDataset> MakeCounterexample(
    const CounterexampleSpec& spec) {
  if (spec.n < 2 || spec.n % 2 != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("counterexample needs an even n >= 2, got ", spec.n));
  }
  if (!(spec.mu > 0.0)) {
    return absl::InvalidArgumentError("mu must be positive");
  }
  const int half = spec.n / 2;
  const int sign = spec.variant == CounterexampleVariant::kPlus ? 1 : -1;
  std::vector<double> features;
  std::vector<int> labels;
  features.reserve(2 * spec.n);
  for (int i = 0; i < spec.n; ++i) {
    const bool upper = i < half;
    features.push_back(spec.mu);
    features.push_back(upper ? 1.0 : -1.0);
    labels.push_back(upper ? sign : -sign);
  }
  return LabeledDataset::Create(std::move(features), spec.n, 2,
                                std::move(labels), LabelMode::kBinary, 2,
                                std::sqrt(spec.mu * spec.mu + 1.0));
}

absl::StatusOr<double> ExcessLoss(const LinearModel& model,
                                  const LabeledDataset& data,
                                  const LossSpec& loss, double optimum_value) {
  absl::StatusOr<double> l = EmpiricalLoss(model, data, loss);
  if (!l.ok()) return l.status();
  const double gap = *l - optimum_value;
  if (gap < 0.0 && gap >= -1e-9) return 0.0;
  return gap;
}

double Diameter(const LabeledDataset& data) {
  double best = 0.0;
  const int d = data.dim();
  for (int i = 0; i < data.size(); ++i) {
    for (int k = i + 1; k < data.size(); ++k) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) {
        const double diff = data.row(i)[j] - data.row(k)[j];
        s += diff * diff;
      }
      best = std::max(best, s);
    }
  }
  return std::sqrt(best);
}

double DefaultRankTolerance(int n, int d) { return 1e-9 * std::max(n, d); }

absl::StatusOr<RankReport> DesignRank(const LabeledDataset& data,
                                      double tol_factor,
                                      std::optional<Vector> probe) {
  const int n = data.size();
  const int d = data.dim();
  if (probe.has_value() && probe->size() != static_cast<size_t>(d)) {
    return absl::InvalidArgumentError("probe vector has the wrong dimension");
  }
  if (tol_factor <= 0.0) tol_factor = DefaultRankTolerance(n, d);

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      x(data.features().data(), n, d);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();

  RankReport report;
  report.singular_values.assign(s.data(), s.data() + s.size());
  const double threshold = s.size() > 0 ? tol_factor * s(0) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > threshold) ++report.rank;
  }
  if (probe.has_value()) {
    Eigen::Map<const Eigen::VectorXd> v(probe->data(), d);
    const Eigen::MatrixXd basis = svd.matrixV().leftCols(report.rank);
    report.seminorm = (basis.transpose() * v).norm();
  }
  return report;
}

absl::StatusOr<LabeledDataset> AppendOnes(const LabeledDataset& data) {
  const int d = data.dim();
  std::vector<double> features(static_cast<size_t>(data.size()) * (d + 1));
  for (int i = 0; i < data.size(); ++i) {
    std::copy(data.row(i).begin(), data.row(i).end(),
              features.begin() + static_cast<size_t>(i) * (d + 1));
    features[static_cast<size_t>(i) * (d + 1) + d] = 1.0;
  }
  return data.WithFeatures(std::move(features), d + 1);
}

std::string AlgorithmName(Algorithm a) {
  return a == Algorithm::kDpsgd ? "dpsgd" : "dpsgdf";
}

namespace {

struct SeedOutcome {
  double excess = 0.0;
  bool within_budget = true;
  absl::Status status;
};

SeedOutcome RunOneSeed(Algorithm algo, const LabeledDataset& data,
                       const LabeledDataset& normalized,
                       const SeparationConfig& config, double clip_norm,
                       double step_size, int steps, uint64_t seed) {
  SeedOutcome out;
  const LossSpec hinge = HingeLoss();
  TrainConfig train;
  train.steps = steps;
  train.step_size = step_size;
  train.clip_norm = clip_norm;
  train.batch_size = config.batch_size > 0 ? config.batch_size : config.n;
  train.seed = seed;
  // The outer loop already runs seeds in parallel.
  train.execution = Execution::kSerial;

  if (algo == Algorithm::kDpsgd) {
    absl::StatusOr<LinearTrainResult> r = DpsgdTrainLinear(
        data, hinge, train, config.budget, /*with_bias=*/false);
    if (!r.ok()) {
      out.status = r.status();
      return out;
    }
    absl::StatusOr<double> e = ExcessLoss(r->model, data, hinge, 0.0);
    if (!e.ok()) {
      out.status = e.status();
      return out;
    }
    out.excess = *e;
    return out;
  }

  DpsgdfConfig fc;
  fc.train = train;
  fc.budget_fractions = config.budget_fractions;
  fc.feature_norm = config.feature_norm > 0.0
                        ? config.feature_norm
                        : std::sqrt(config.mu * config.mu + 1.0);
  fc.skip_quantile = config.skip_quantile;
  absl::StatusOr<DpsgdfResult> r = DpsgdfTrain(data, hinge, fc, config.budget);
  if (!r.ok()) {
    out.status = r.status();
    return out;
  }
  absl::StatusOr<double> e = ExcessLoss(r->model, normalized, hinge, 0.0);
  if (!e.ok()) {
    out.status = e.status();
    return out;
  }
  out.excess = *e;
  out.within_budget = r->ledger.WithinBudget(config.budget);
  return out;
}

}  // namespace

absl::StatusOr<SeparationReport> SeparationExperiment(
    const SeparationConfig& config) {
  if (config.seeds < 1) return absl::InvalidArgumentError("need >= 1 seed");
  if (config.clip_norms.empty() || config.step_sizes.empty() ||
      config.step_counts.empty()) {
    return absl::InvalidArgumentError("grid lists must be non-empty");
  }
  std::vector<LabeledDataset> data;
  std::vector<LabeledDataset> normalized;
  const double feature_norm = config.feature_norm > 0.0
                                  ? config.feature_norm
                                  : std::sqrt(config.mu * config.mu + 1.0);
  for (CounterexampleVariant v :
       {CounterexampleVariant::kPlus, CounterexampleVariant::kMinus}) {
    absl::StatusOr<LabeledDataset> d =
        MakeCounterexample({config.mu, config.n, v});
    if (!d.ok()) return d.status();
    absl::StatusOr<LabeledDataset> nd = NormalizeRows(*d, feature_norm);
    if (!nd.ok()) return nd.status();
    data.push_back(*std::move(d));
    normalized.push_back(*std::move(nd));
  }

  SeparationReport report;
  for (Algorithm algo : {Algorithm::kDpsgd, Algorithm::kDpsgdf}) {
    SeparationBest best;
    best.worst_variant_excess = std::numeric_limits<double>::infinity();
    for (double clip : config.clip_norms) {
      for (double lr : config.step_sizes) {
        for (int steps : config.step_counts) {
          std::array<double, 2> means{};
          for (int v = 0; v < 2; ++v) {
            std::vector<SeedOutcome> outcomes(config.seeds);
#pragma omp parallel for schedule(dynamic)
            for (int s = 0; s < config.seeds; ++s) {
              outcomes[s] = RunOneSeed(algo, data[v], normalized[v], config,
                                       clip, lr, steps, config.base_seed + s);
            }
            double sum = 0.0;
            for (const SeedOutcome& o : outcomes) {
              if (!o.status.ok()) return o.status;
              sum += o.excess;
              if (algo == Algorithm::kDpsgdf) {
                ++report.dpsgdf_runs;
                report.ledger_within_budget &= o.within_budget;
              }
            }
            const double mean = sum / config.seeds;
            double ss = 0.0;
            for (const SeedOutcome& o : outcomes) {
              ss += (o.excess - mean) * (o.excess - mean);
            }
            const double sd =
                config.seeds > 1 ? std::sqrt(ss / (config.seeds - 1)) : 0.0;
            means[v] = mean;
            report.rows.push_back(
                {algo,
                 v == 0 ? CounterexampleVariant::kPlus
                        : CounterexampleVariant::kMinus,
                 clip, lr, steps, config.seeds, mean, sd});
          }
          const double worst = std::max(means[0], means[1]);
          if (worst < best.worst_variant_excess) {
            best = {worst, means[0], means[1], clip, lr, steps};
          }
        }
      }
    }
    (algo == Algorithm::kDpsgd ? report.best_dpsgd : report.best_dpsgdf) =
        best;
  }
  return report;
}

void WriteSeparationCsv(const SeparationReport& report, std::ostream& out) {
  out << "algorithm,variant,clip,lr,steps,seed_count,mean_excess,std_excess\n";
  for (const SeparationRow& r : report.rows) {
    out << absl::StrFormat(
        "%s,%s,%g,%g,%d,%d,%.10g,%.10g\n", AlgorithmName(r.algorithm),
        r.variant == CounterexampleVariant::kPlus ? "D_plus" : "D_minus",
        r.clip_norm, r.step_size, r.steps, r.seed_count, r.mean_excess,
        r.std_excess);
  }
}

}  // namespace dpsgdf
