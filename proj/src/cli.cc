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

#include "dpsgdf/cli.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "dpsgdf/analysis.h"
#include "dpsgdf/data_io.h"
#include "dpsgdf/dpsgd.h"
#include "dpsgdf/dpsgdf.h"
#include "dpsgdf/mechanisms.h"
#include "dpsgdf/objective.h"
#include "dpsgdf/preprocess.h"

namespace dpsgdf {
namespace {

namespace fs = std::filesystem;

std::string Num(double v) { return absl::StrFormat("%.15g", v); }

absl::StatusOr<LabeledDataset> LoadPath(const std::string& path,
                                        const std::string& idx_prefix,
                                        int label_column) {
  if (fs::is_directory(path)) {
    const fs::path dir(path);
    return LoadIdxPair((dir / (idx_prefix + "-images-idx3-ubyte")).string(),
                       (dir / (idx_prefix + "-labels-idx1-ubyte")).string(),
                       /*normalize=*/true);
  }
  return LoadCsvFeatures(path, label_column);
}

absl::Status ValidateOptions(const TrainOptions& o) {
  if (o.algo != "dpsgd" && o.algo != "dpsgdf") {
    return absl::InvalidArgumentError(
        absl::StrCat("--algo must be dpsgd or dpsgdf, got '", o.algo, "'"));
  }
  if (!(o.epsilon > 0.0)) {
    return absl::InvalidArgumentError("--epsilon must be > 0");
  }
  if (!(o.delta > 0.0 && o.delta < 1.0)) {
    return absl::InvalidArgumentError("--delta must lie in (0, 1)");
  }
  if (o.batch < 1) return absl::InvalidArgumentError("--batch must be >= 1");
  if (!(o.lr > 0.0)) return absl::InvalidArgumentError("--lr must be > 0");
  if (o.epochs < 1) return absl::InvalidArgumentError("--epochs must be >= 1");
  if (!(o.clip > 0.0)) return absl::InvalidArgumentError("--clip must be > 0");
  if (!(o.feature_norm > 0.0)) {
    return absl::InvalidArgumentError("--feature-norm must be > 0");
  }
  if (o.eps_f.has_value()) {
    if (o.algo != "dpsgdf") {
      return absl::InvalidArgumentError("--eps-f only applies to dpsgdf");
    }
    if (!(*o.eps_f > 0.0 && *o.eps_f < o.epsilon)) {
      return absl::InvalidArgumentError("--eps-f must lie in (0, epsilon)");
    }
  }
  return absl::OkStatus();
}

std::array<double, 3> Fractions(const TrainOptions& o) {
  if (o.eps_f.has_value()) {
    absl::StatusOr<std::array<double, 3>> f =
        FeatureBudgetFractions(*o.eps_f, o.epsilon);
    if (f.ok()) return *f;
  }
  return DpsgdfConfig().budget_fractions;
}

double DisplayedEpsF(const TrainOptions& o) {
  if (o.algo != "dpsgdf") return 0.0;
  if (o.eps_f.has_value()) return *o.eps_f;
  const std::array<double, 3> f = Fractions(o);
  return (f[0] + f[1]) * o.epsilon;
}

// Columns algo..seed: everything that identifies a grid point.
std::string RowKey(const MetricsRow& r) {
  return absl::StrCat(r.algo, ",", r.dataset, ",", Num(r.epsilon), ",",
                      Num(r.delta), ",", Num(r.eps_f), ",", r.batch, ",",
                      Num(r.lr), ",", r.epochs, ",", Num(r.clip), ",",
                      r.seed);
}

MetricsRow KeyRow(const TrainOptions& o, const std::string& dataset) {
  MetricsRow r;
  r.algo = o.algo;
  r.dataset = dataset;
  r.epsilon = o.epsilon;
  r.delta = o.delta;
  r.eps_f = DisplayedEpsF(o);
  r.batch = o.batch;
  r.lr = o.lr;
  r.epochs = o.epochs;
  r.clip = o.clip;
  r.seed = o.seed;
  return r;
}

struct Evaluation {
  double train_loss;
  double test_accuracy;
};

absl::StatusOr<Evaluation> EvaluateLinear(const LinearModel& model,
                                          const LabeledDataset& train,
                                          const LabeledDataset& test,
                                          const LossSpec& loss) {
  absl::StatusOr<double> l = EmpiricalLoss(model, train, loss);
  if (!l.ok()) return l.status();
  absl::StatusOr<double> a = Accuracy(model, test);
  if (!a.ok()) return a.status();
  return Evaluation{*l, *a};
}

absl::StatusOr<Evaluation> EvaluateMulticlass(const MulticlassModel& model,
                                              const LabeledDataset& train,
                                              const LabeledDataset& test) {
  absl::StatusOr<double> l = EmpiricalLoss(model, train);
  if (!l.ok()) return l.status();
  absl::StatusOr<double> a = Accuracy(model, test);
  if (!a.ok()) return a.status();
  return Evaluation{*l, *a};
}

fs::path ManifestDir(const std::string& out_csv) {
  return fs::path(out_csv + ".manifests");
}

absl::Status WriteRunManifest(const RunOutput& run, const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) return absl::InternalError(ec.message());
  const std::string& t = run.manifest_text;
  return WriteFileBytes(path.string(), std::vector<uint8_t>(t.begin(), t.end()));
}

// Complete data lines of an existing metrics CSV. A trailing line without a
// newline (an interrupted write) is dropped from the file.
absl::StatusOr<std::vector<std::string>> ReadCompletedRows(
    const std::string& path) {
  std::vector<std::string> rows;
  if (!fs::exists(path)) return rows;
  absl::StatusOr<std::vector<uint8_t>> bytes = ReadFileBytes(path);
  if (!bytes.ok()) return bytes.status();
  std::string text(bytes->begin(), bytes->end());
  if (text.empty()) return rows;
  const size_t last_newline = text.rfind('\n');
  const std::string complete =
      last_newline == std::string::npos ? "" : text.substr(0, last_newline + 1);
  if (complete.size() != text.size()) {
    absl::Status s = WriteFileBytes(
        path, std::vector<uint8_t>(complete.begin(), complete.end()));
    if (!s.ok()) return s;
  }
  std::vector<std::string> lines =
      absl::StrSplit(complete, '\n', absl::SkipEmpty());
  if (lines.empty()) return rows;
  if (lines.front() != kMetricsHeader) {
    return absl::FailedPreconditionError(
        absl::StrCat(path, " exists with an unexpected header"));
  }
  rows.assign(lines.begin() + 1, lines.end());
  return rows;
}

absl::Status AppendLine(const std::string& path, const std::string& line,
                        bool with_header) {
  std::ofstream f(path, std::ios::app);
  if (!f) return absl::InternalError(absl::StrCat("cannot write ", path));
  if (with_header) f << kMetricsHeader << "\n";
  f << line << "\n";
  f.flush();
  return f ? absl::OkStatus()
           : absl::InternalError(absl::StrCat("write failed: ", path));
}

bool NeedsHeader(const std::string& path) {
  std::error_code ec;
  return !fs::exists(path, ec) || fs::file_size(path, ec) == 0;
}

template <typename T>
absl::StatusOr<std::vector<T>> ParseList(absl::string_view key,
                                         absl::string_view value) {
  std::vector<T> out;
  for (absl::string_view cell : absl::StrSplit(value, ',')) {
    cell = absl::StripAsciiWhitespace(cell);
    T v{};
    bool ok;
    if constexpr (std::is_floating_point_v<T>) {
      ok = absl::SimpleAtod(cell, &v) && v > 0.0 && std::isfinite(v);
    } else if constexpr (std::is_unsigned_v<T>) {
      ok = absl::SimpleAtoi(cell, &v);
    } else {
      ok = absl::SimpleAtoi(cell, &v) && v > 0;
    }
    if (!ok) {
      return absl::InvalidArgumentError(absl::StrCat(
          "grid key '", key, "': bad value '", cell, "'"));
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

absl::StatusOr<LoadedData> LoadData(const DataOptions& options) {
  if (options.data.empty()) return absl::InvalidArgumentError("--data is required");
  absl::StatusOr<LabeledDataset> train =
      LoadPath(options.data, "train", options.label_column);
  if (!train.ok()) return train.status();

  std::optional<LabeledDataset> test;
  if (!options.test_data.empty()) {
    absl::StatusOr<LabeledDataset> t =
        LoadPath(options.test_data, "t10k", options.label_column);
    if (!t.ok()) return t.status();
    test = *std::move(t);
  } else if (fs::is_directory(options.data) &&
             fs::exists(fs::path(options.data) / "t10k-images-idx3-ubyte")) {
    absl::StatusOr<LabeledDataset> t =
        LoadPath(options.data, "t10k", options.label_column);
    if (!t.ok()) return t.status();
    test = *std::move(t);
  }
  if (test.has_value() &&
      (test->dim() != train->dim() || test->mode() != train->mode())) {
    return absl::InvalidArgumentError(
        "test data does not match the training data's shape or label type");
  }
  if (test.has_value() && test->mode() == LabelMode::kMulticlass &&
      test->num_classes() > train->num_classes()) {
    return absl::InvalidArgumentError("test data has unseen classes");
  }
  std::string name = fs::path(options.data).filename().string();
  if (name.empty()) {
    name = fs::path(options.data).parent_path().filename().string();
  }
  LoadedData out{name, *train, test.has_value() ? *test : *train};
  return out;
}

std::string FormatMetricsRow(const MetricsRow& r) {
  return absl::StrCat(RowKey(r), ",", absl::StrFormat("%.10g", r.train_loss),
                      ",", absl::StrFormat("%.10g", r.test_accuracy), ",",
                      absl::StrFormat("%.3f", r.wall_ms), ",",
                      r.manifest_hash);
}

int StepsForEpochs(int epochs, int n, int batch) {
  const int64_t total = static_cast<int64_t>(epochs) * n;
  return static_cast<int>((total + batch - 1) / batch);
}

absl::StatusOr<RunOutput> TrainOnce(const TrainOptions& options,
                                    const LoadedData& data) {
  if (absl::Status s = ValidateOptions(options); !s.ok()) return s;
  absl::StatusOr<PrivacyBudget> budget =
      PrivacyBudget::Create(options.epsilon, options.delta);
  if (!budget.ok()) return budget.status();

  const auto start = std::chrono::steady_clock::now();
  const LabeledDataset& train = data.train;
  const bool binary = train.mode() == LabelMode::kBinary;
  const int steps = StepsForEpochs(options.epochs, train.size(), options.batch);

  TrainConfig config;
  config.steps = steps;
  config.step_size = options.lr;
  config.clip_norm = options.clip;
  config.batch_size = options.batch;
  config.seed = options.seed;
  config.enforce_min_batch = !options.allow_small_batch;
  config.execution = options.parallel ? Execution::kOpenMP : Execution::kSerial;

  LossSpec loss = LogisticLoss();
  if (binary) {
    absl::StatusOr<LossSpec> l = LossByName(options.loss);
    if (!l.ok()) return l.status();
    loss = *l;
  }

  absl::StatusOr<Evaluation> eval = absl::UnknownError("not evaluated");
  std::optional<PrivacyLedger> ledger;
  if (options.algo == "dpsgd") {
    if (binary) {
      absl::StatusOr<LinearTrainResult> r =
          DpsgdTrainLinear(train, loss, config, *budget, /*with_bias=*/true);
      if (!r.ok()) return r.status();
      eval = EvaluateLinear(r->model, train, data.test, loss);
    } else {
      const LinearObjective objective = LinearObjective::Multinomial(
          train.num_classes(), train.dim(), /*with_bias=*/true);
      absl::StatusOr<TrainResult> r =
          DpsgdTrain(train, objective, config, *budget);
      if (!r.ok()) return r.status();
      eval = EvaluateMulticlass(objective.ToMulticlassModel(r->theta), train,
                                data.test);
    }
  } else {
    DpsgdfConfig fc;
    fc.train = config;
    fc.budget_fractions = Fractions(options);
    fc.feature_norm = options.feature_norm;
    fc.skip_quantile = options.skip_quantile;
    // The model scores rows rescaled to feature_norm.
    absl::StatusOr<LabeledDataset> train_n =
        NormalizeRows(train, options.feature_norm);
    if (!train_n.ok()) return train_n.status();
    absl::StatusOr<LabeledDataset> test_n =
        NormalizeRows(data.test, options.feature_norm);
    if (!test_n.ok()) return test_n.status();
    if (binary) {
      absl::StatusOr<DpsgdfResult> r = DpsgdfTrain(train, loss, fc, *budget);
      if (!r.ok()) return r.status();
      ledger = r->ledger;
      eval = EvaluateLinear(r->model, *train_n, *test_n, loss);
    } else {
      absl::StatusOr<DpsgdfMulticlassResult> r =
          DpsgdfTrainMulticlass(train, fc, *budget);
      if (!r.ok()) return r.status();
      ledger = r->ledger;
      eval = EvaluateMulticlass(r->model, *train_n, *test_n);
    }
  }
  if (!eval.ok()) return eval.status();
  const double wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();

  RunManifest manifest;
  manifest.seed = options.seed;
  manifest.algorithm = options.algo;
  manifest.epsilon = options.epsilon;
  manifest.delta = options.delta;
  manifest.dataset_fingerprint = DatasetFingerprint(train);
  manifest.software_version = kSoftwareVersion;
  manifest.wall_ms = wall_ms;
  auto& c = manifest.config;
  c["dataset"] = data.name;
  c["test_fingerprint"] = DatasetFingerprint(data.test);
  c["loss"] = binary ? loss.name : "multinomial_logistic";
  c["batch"] = absl::StrCat(options.batch);
  c["lr"] = Num(options.lr);
  c["epochs"] = absl::StrCat(options.epochs);
  c["steps"] = absl::StrCat(steps);
  c["clip"] = Num(options.clip);
  c["allow_small_batch"] = options.allow_small_batch ? "1" : "0";
  if (options.algo == "dpsgdf") {
    const std::array<double, 3> f = Fractions(options);
    c["budget_fractions"] =
        absl::StrCat(Num(f[0]), ";", Num(f[1]), ";", Num(f[2]));
    c["feature_norm"] = Num(options.feature_norm);
    c["skip_quantile"] = options.skip_quantile ? "1" : "0";
    c["epsilon_spent"] = absl::StrFormat("%.17g", ledger->EpsilonSpent());
    c["delta_spent"] = absl::StrFormat("%.17g", ledger->DeltaSpent());
  }

  RunOutput out;
  out.row = KeyRow(options, data.name);
  out.row.train_loss = eval->train_loss;
  out.row.test_accuracy = eval->test_accuracy;
  out.row.wall_ms = wall_ms;
  out.row.manifest_hash = manifest.RunHash();
  out.manifest_text = FormatManifest(manifest);
  out.ledger = std::move(ledger);
  return out;
}

int RunTrain(const TrainOptions& options, const std::string& out_csv,
             const std::string& manifest_path, std::ostream& out,
             std::ostream& err) {
  if (absl::Status s = ValidateOptions(options); !s.ok()) {
    err << "error: " << s.message() << "\n";
    return 2;
  }
  absl::StatusOr<LoadedData> data = LoadData(options.data);
  if (!data.ok()) {
    err << "error: " << data.status().message() << "\n";
    return 1;
  }
  absl::StatusOr<RunOutput> run = TrainOnce(options, *data);
  if (!run.ok()) {
    err << "error: " << run.status().message() << "\n";
    return 1;
  }
  const std::string line = FormatMetricsRow(run->row);
  if (!out_csv.empty()) {
    if (absl::Status s = AppendLine(out_csv, line, NeedsHeader(out_csv));
        !s.ok()) {
      err << "error: " << s.message() << "\n";
      return 1;
    }
  }
  const fs::path mpath =
      !manifest_path.empty()
          ? fs::path(manifest_path)
          : out_csv.empty()
                ? fs::path()
                : ManifestDir(out_csv) / (run->row.manifest_hash + ".manifest");
  if (!mpath.empty()) {
    if (absl::Status s = WriteRunManifest(*run, mpath); !s.ok()) {
      err << "error: " << s.message() << "\n";
      return 1;
    }
  }
  out << kMetricsHeader << "\n" << line << "\n";
  return 0;
}

absl::StatusOr<GridSpec> ParseGridSpec(const std::string& text) {
  GridSpec spec;
  bool have_batch = false, have_lr = false, have_epochs = false;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = line.substr(0, line.find('#'));
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find_first_of("=:");
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("grid line ", line_no, ": expected key = values"));
    }
    const std::string key(absl::StripAsciiWhitespace(line.substr(0, eq)));
    const absl::string_view value = line.substr(eq + 1);
    absl::Status status;
    auto assign = [&](auto& field, auto parsed) {
      if (!parsed.ok()) {
        status = parsed.status();
      } else {
        field = *std::move(parsed);
      }
    };
    if (key == "batch_sizes") {
      assign(spec.batch_sizes, ParseList<int>(key, value));
      have_batch = true;
    } else if (key == "learning_rates") {
      assign(spec.learning_rates, ParseList<double>(key, value));
      have_lr = true;
    } else if (key == "epochs") {
      assign(spec.epoch_counts, ParseList<int>(key, value));
      have_epochs = true;
    } else if (key == "eps_f") {
      assign(spec.eps_f, ParseList<double>(key, value));
    } else if (key == "clip") {
      assign(spec.clip_norms, ParseList<double>(key, value));
    } else if (key == "seeds") {
      assign(spec.seeds, ParseList<uint64_t>(key, value));
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("grid line ", line_no, ": unknown key '", key, "'"));
    }
    if (!status.ok()) return status;
  }
  if (!have_batch || !have_lr || !have_epochs) {
    return absl::InvalidArgumentError(
        "grid needs batch_sizes, learning_rates and epochs");
  }
  return spec;
}

std::vector<TrainOptions> ExpandGrid(const TrainOptions& base,
                                     const GridSpec& grid) {
  std::vector<std::optional<double>> eps_f_values;
  if (base.algo == "dpsgdf" && !grid.eps_f.empty()) {
    eps_f_values.assign(grid.eps_f.begin(), grid.eps_f.end());
  } else {
    eps_f_values.push_back(base.eps_f);
  }
  std::vector<TrainOptions> points;
  for (const std::optional<double>& ef : eps_f_values) {
    for (int batch : grid.batch_sizes) {
      for (double lr : grid.learning_rates) {
        for (int epochs : grid.epoch_counts) {
          for (double clip : grid.clip_norms) {
            for (uint64_t seed : grid.seeds) {
              TrainOptions o = base;
              o.eps_f = ef;
              o.batch = batch;
              o.lr = lr;
              o.epochs = epochs;
              o.clip = clip;
              o.seed = seed;
              points.push_back(std::move(o));
            }
          }
        }
      }
    }
  }
  return points;
}

int RunGrid(const TrainOptions& base, const std::string& grid_path,
            const std::string& out_csv, int jobs, std::ostream& out,
            std::ostream& err) {
  absl::StatusOr<std::vector<uint8_t>> grid_bytes = ReadFileBytes(grid_path);
  if (!grid_bytes.ok()) {
    err << "error: " << grid_bytes.status().message() << "\n";
    return 1;
  }
  absl::StatusOr<GridSpec> grid =
      ParseGridSpec(std::string(grid_bytes->begin(), grid_bytes->end()));
  if (!grid.ok()) {
    err << "error: " << grid.status().message() << "\n";
    return 2;
  }
  const std::vector<TrainOptions> points = ExpandGrid(base, *grid);
  for (const TrainOptions& p : points) {
    if (absl::Status s = ValidateOptions(p); !s.ok()) {
      err << "error: " << s.message() << "\n";
      return 2;
    }
  }
  if (out_csv.empty()) {
    err << "error: grid needs an output CSV\n";
    return 2;
  }
  absl::StatusOr<LoadedData> data = LoadData(base.data);
  if (!data.ok()) {
    err << "error: " << data.status().message() << "\n";
    return 1;
  }

  absl::StatusOr<std::vector<std::string>> done = ReadCompletedRows(out_csv);
  if (!done.ok()) {
    err << "error: " << done.status().message() << "\n";
    return 1;
  }
  if (done->size() > points.size()) {
    err << "error: " << out_csv << " has more rows than the grid\n";
    return 1;
  }
  std::vector<std::string> lines(points.size());
  for (size_t i = 0; i < done->size(); ++i) {
    const std::string key = RowKey(KeyRow(points[i], data->name));
    if (!absl::StartsWith((*done)[i], key + ",")) {
      err << "error: row " << i + 1 << " of " << out_csv
          << " does not match the grid; refusing to resume\n";
      return 1;
    }
    lines[i] = (*done)[i];
  }
  if (!done->empty()) {
    out << "resuming after " << done->size() << " completed rows\n";
  }

  const size_t first = done->size();
  jobs = std::max(1, jobs);
  std::vector<std::optional<absl::StatusOr<RunOutput>>> results(points.size());
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<size_t> next{first};
  std::atomic<bool> stop{false};
  auto worker = [&] {
    for (size_t i = next++; i < points.size() && !stop; i = next++) {
      TrainOptions p = points[i];
      // Parallelism comes from the pool; keep each run single-threaded.
      if (jobs > 1) p.parallel = false;
      absl::StatusOr<RunOutput> r = TrainOnce(p, *data);
      std::lock_guard<std::mutex> lock(mu);
      results[i] = std::move(r);
      ready.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs && first + j < points.size(); ++j) {
    pool.emplace_back(worker);
  }

  int exit_code = 0;
  bool header = NeedsHeader(out_csv);
  for (size_t i = first; i < points.size(); ++i) {
    absl::StatusOr<RunOutput> r = absl::UnknownError("");
    {
      std::unique_lock<std::mutex> lock(mu);
      ready.wait(lock, [&] { return results[i].has_value(); });
      r = *std::move(results[i]);
    }
    absl::Status s = r.status();
    if (s.ok()) {
      lines[i] = FormatMetricsRow(r->row);
      s = WriteRunManifest(
          *r, ManifestDir(out_csv) / (r->row.manifest_hash + ".manifest"));
    }
    if (s.ok()) s = AppendLine(out_csv, lines[i], header);
    if (!s.ok()) {
      err << "error: grid point " << i + 1 << ": " << s.message() << "\n";
      stop = true;
      exit_code = 1;
      break;
    }
    header = false;
    out << lines[i] << "\n";
  }
  for (std::thread& t : pool) t.join();
  if (exit_code != 0) return exit_code;

  // Average test accuracy over seeds; the first configuration in grid order
  // wins ties.
  std::vector<std::string> config_order;
  std::map<std::string, std::pair<double, int>> totals;
  std::map<std::string, size_t> first_row;
  for (size_t i = 0; i < points.size(); ++i) {
    TrainOptions key_opts = points[i];
    key_opts.seed = 0;
    const std::string key = RowKey(KeyRow(key_opts, data->name));
    std::vector<absl::string_view> cells = absl::StrSplit(lines[i], ',');
    double acc = 0.0;
    if (cells.size() < 12 || !absl::SimpleAtod(cells[11], &acc)) {
      err << "error: malformed row " << i + 1 << "\n";
      return 1;
    }
    if (!totals.count(key)) {
      config_order.push_back(key);
      first_row[key] = i;
    }
    totals[key].first += acc;
    totals[key].second += 1;
  }
  const std::string* best = nullptr;
  double best_mean = -1.0;
  for (const std::string& key : config_order) {
    const double mean = totals[key].first / totals[key].second;
    if (mean > best_mean) {
      best_mean = mean;
      best = &key;
    }
  }
  out << "best: " << lines[first_row[*best]] << "\n";
  out << absl::StrFormat("best mean test accuracy: %.6f over %d seed(s)\n",
                         best_mean, totals[*best].second);
  return 0;
}

int RunCounterexample(const CounterexampleOptions& options,
                      const std::string& out_csv, std::ostream& out,
                      std::ostream& err) {
  if (!(options.epsilon > 0.0)) {
    err << "error: --epsilon must be > 0\n";
    return 2;
  }
  if (options.n < 2 || options.n % 2 != 0) {
    err << "error: --n must be an even integer >= 2\n";
    return 2;
  }
  absl::StatusOr<PrivacyBudget> budget =
      PrivacyBudget::Create(options.epsilon, options.delta);
  if (!budget.ok()) {
    err << "error: " << budget.status().message() << "\n";
    return 2;
  }
  SeparationConfig config;
  config.mu = options.mu;
  config.n = options.n;
  config.budget = *budget;
  config.clip_norms = options.clip_norms;
  config.step_sizes = options.step_sizes;
  config.step_counts = options.step_counts;
  config.batch_size = options.batch;
  config.seeds = options.seeds;
  config.skip_quantile = options.skip_quantile;
  absl::StatusOr<SeparationReport> report = SeparationExperiment(config);
  if (!report.ok()) {
    err << "error: " << report.status().message() << "\n";
    return 1;
  }
  if (!out_csv.empty()) {
    std::ofstream f(out_csv);
    if (!f) {
      err << "error: cannot write " << out_csv << "\n";
      return 1;
    }
    WriteSeparationCsv(*report, f);
  }
  for (Algorithm a : {Algorithm::kDpsgd, Algorithm::kDpsgdf}) {
    const SeparationBest& b =
        a == Algorithm::kDpsgd ? report->best_dpsgd : report->best_dpsgdf;
    out << absl::StrFormat(
        "%-6s best mean excess %.6f (D_plus %.6f, D_minus %.6f) at clip=%g "
        "lr=%g steps=%d\n",
        AlgorithmName(a), b.worst_variant_excess, b.excess_plus,
        b.excess_minus, b.clip_norm, b.step_size, b.steps);
  }
  out << "dpsgdf ledger within budget: "
      << (report->ledger_within_budget ? "yes" : "no") << " ("
      << report->dpsgdf_runs << " runs)\n";
  return 0;
}

}  // namespace dpsgdf
