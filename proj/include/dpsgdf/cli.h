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

// Library side of the dpsgdf command-line tool: single training runs,
// hyperparameter grids and the two-cluster separation experiment. Each
// command returns a process exit code and reports problems as one line on
// `err`.

#ifndef DPSGDF_CLI_H_
#define DPSGDF_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsgdf/core.h"
#include "dpsgdf/mechanisms.h"

namespace dpsgdf {

// Training inputs. `data` is either a numeric CSV file or a directory with
// train-images-idx3-ubyte / train-labels-idx1-ubyte (and optionally the
// t10k-* test pair). Without test data, accuracy is measured on the
// training set.
struct DataOptions {
  std::string data;
  std::string test_data;
  int label_column = -1;
};

struct LoadedData {
  std::string name;
  LabeledDataset train;
  LabeledDataset test;
};

absl::StatusOr<LoadedData> LoadData(const DataOptions& options);

struct TrainOptions {
  DataOptions data;
  std::string algo = "dpsgd";
  // Margin loss for binary data; multiclass data always uses multinomial
  // logistic loss.
  std::string loss = "logistic";
  double epsilon = 1.0;
  double delta = 1e-5;
  int batch = 256;
  double lr = 1.0;
  int epochs = 1;
  double clip = 1.0;
  uint64_t seed = 0;
  bool skip_quantile = false;
  // Preprocessing epsilon for dpsgdf. Unset splits the budget in thirds.
  std::optional<double> eps_f;
  double feature_norm = 1.0;
  bool allow_small_batch = false;
  // Run the per-step kernels on OpenMP threads.
  bool parallel = true;
};

struct MetricsRow {
  std::string algo;
  std::string dataset;
  double epsilon = 0.0;
  double delta = 0.0;
  double eps_f = 0.0;
  int batch = 0;
  double lr = 0.0;
  int epochs = 0;
  double clip = 0.0;
  uint64_t seed = 0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  double wall_ms = 0.0;
  std::string manifest_hash;
};

inline constexpr char kMetricsHeader[] =
    "algo,dataset,epsilon,delta,eps_f,batch,lr,epochs,clip,seed,train_loss,"
    "test_accuracy,wall_ms,manifest_hash";

std::string FormatMetricsRow(const MetricsRow& row);

// T = ceil(epochs * n / batch).
int StepsForEpochs(int epochs, int n, int batch);

struct RunOutput {
  MetricsRow row;
  std::string manifest_text;
  // What the DPSGD-F preprocessing and training charged; unset for dpsgd.
  std::optional<PrivacyLedger> ledger;
};

// Trains and evaluates one configuration on already loaded data.
absl::StatusOr<RunOutput> TrainOnce(const TrainOptions& options,
                                    const LoadedData& data);

// Appends one metrics row to `out_csv` (header written when the file is new)
// and writes the manifest next to it, or to `manifest_path` when given.
int RunTrain(const TrainOptions& options, const std::string& out_csv,
             const std::string& manifest_path, std::ostream& out,
             std::ostream& err);

// Grid file: one "key = v1, v2, ..." per line, '#' starts a comment.
// Keys: batch_sizes, learning_rates, epochs, eps_f, clip, seeds.
struct GridSpec {
  std::vector<int> batch_sizes;
  std::vector<double> learning_rates;
  std::vector<int> epoch_counts;
  std::vector<double> eps_f;  // dpsgdf only; empty means the default split
  std::vector<double> clip_norms = {1.0};
  std::vector<uint64_t> seeds = {0};
};

absl::StatusOr<GridSpec> ParseGridSpec(const std::string& text);

// Grid points in output order: eps_f, batch, lr, epochs, clip, then seed
// varies fastest.
std::vector<TrainOptions> ExpandGrid(const TrainOptions& base,
                                     const GridSpec& grid);

// Runs every grid point on `jobs` workers and appends rows to `out_csv` in
// grid order. Rows already present in `out_csv` are verified and skipped.
// Prints the configuration with the best seed-averaged test accuracy.
int RunGrid(const TrainOptions& base, const std::string& grid_path,
            const std::string& out_csv, int jobs, std::ostream& out,
            std::ostream& err);

struct CounterexampleOptions {
  double mu = 100.0;
  int n = 64;
  double epsilon = 1.0;
  double delta = 1e-5;
  int seeds = 200;
  std::vector<double> clip_norms = {0.1, 1.0, 10.0};
  std::vector<double> step_sizes = {0.0625, 0.25, 1.0};
  std::vector<int> step_counts = {50, 200};
  int batch = 0;
  bool skip_quantile = false;
};

int RunCounterexample(const CounterexampleOptions& options,
                      const std::string& out_csv, std::ostream& out,
                      std::ostream& err);

}  // namespace dpsgdf

#endif  // DPSGDF_CLI_H_
