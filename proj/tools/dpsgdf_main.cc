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

#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "dpsgdf/cli.h"

namespace {

void AddTrainFlags(CLI::App* app, dpsgdf::TrainOptions& o, double& eps_f,
                   bool with_grid_fields) {
  app->add_option("--algo", o.algo, "dpsgd or dpsgdf")
      ->check(CLI::IsMember({"dpsgd", "dpsgdf"}));
  app->add_option("--data", o.data.data,
                  "CSV file or directory with IDX files")
      ->required();
  app->add_option("--test-data", o.data.test_data,
                  "CSV file or IDX directory used for test accuracy");
  app->add_option("--label-column", o.data.label_column,
                  "CSV label column; negative counts from the end");
  app->add_option("--loss", o.loss, "hinge or logistic (binary data)");
  app->add_option("--epsilon", o.epsilon);
  app->add_option("--delta", o.delta);
  app->add_option("--eps-f", eps_f,
                  "dpsgdf preprocessing epsilon; default splits in thirds");
  app->add_option("--feature-norm", o.feature_norm,
                  "dpsgdf row normalization radius");
  app->add_flag("--skip-quantile", o.skip_quantile,
                "dpsgdf without the quantile and feature clipping steps");
  app->add_flag("--allow-small-batch", o.allow_small_batch,
                "permit batches below the minimum (voids the guarantee)");
  if (!with_grid_fields) {
    app->add_option("--batch", o.batch);
    app->add_option("--lr", o.lr);
    app->add_option("--epochs", o.epochs);
    app->add_option("--clip", o.clip);
    app->add_option("--seed", o.seed);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private linear models with DPSGD and DPSGD-F"};
  app.require_subcommand(1);

  dpsgdf::TrainOptions train;
  double train_eps_f = 0.0;
  std::string train_out = "metrics.csv";
  std::string train_manifest;
  CLI::App* train_cmd = app.add_subcommand("train", "Train one configuration");
  AddTrainFlags(train_cmd, train, train_eps_f, /*with_grid_fields=*/false);
  train_cmd->add_option("--out", train_out, "metrics CSV to append to");
  train_cmd->add_option("--manifest", train_manifest, "manifest path");

  dpsgdf::TrainOptions grid;
  double grid_eps_f = 0.0;
  std::string grid_file;
  std::string grid_out = "grid.csv";
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  CLI::App* grid_cmd = app.add_subcommand("grid", "Run a hyperparameter grid");
  AddTrainFlags(grid_cmd, grid, grid_eps_f, /*with_grid_fields=*/true);
  grid_cmd->add_option("--grid", grid_file, "grid file")->required();
  grid_cmd->add_option("--out", grid_out, "grid CSV (resumed if present)");
  grid_cmd->add_option("--jobs", jobs, "worker threads");

  dpsgdf::CounterexampleOptions cx;
  std::string cx_out;
  CLI::App* cx_cmd = app.add_subcommand(
      "counterexample", "DPSGD vs DPSGD-F on the two-cluster instance");
  cx_cmd->add_option("--mu", cx.mu);
  cx_cmd->add_option("--n", cx.n);
  cx_cmd->add_option("--epsilon", cx.epsilon);
  cx_cmd->add_option("--delta", cx.delta);
  cx_cmd->add_option("--seeds", cx.seeds);
  cx_cmd->add_option("--clips", cx.clip_norms)->delimiter(',');
  cx_cmd->add_option("--lrs", cx.step_sizes)->delimiter(',');
  cx_cmd->add_option("--steps", cx.step_counts)->delimiter(',');
  cx_cmd->add_option("--batch", cx.batch, "0 means n");
  cx_cmd->add_flag("--skip-quantile", cx.skip_quantile);
  cx_cmd->add_option("--out", cx_out, "report CSV");

  CLI11_PARSE(app, argc, argv);

  if (train_cmd->parsed()) {
    if (train_cmd->count("--eps-f") > 0) train.eps_f = train_eps_f;
    return dpsgdf::RunTrain(train, train_out, train_manifest, std::cout,
                            std::cerr);
  }
  if (grid_cmd->parsed()) {
    if (grid_cmd->count("--eps-f") > 0) grid.eps_f = grid_eps_f;
    return dpsgdf::RunGrid(grid, grid_file, grid_out, jobs, std::cout,
                           std::cerr);
  }
  return dpsgdf::RunCounterexample(cx, cx_out, std::cout, std::cerr);
}
