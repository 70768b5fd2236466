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

// Serial reference vs OpenMP for the per-step kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "dpsgdf/core.h"
#include "dpsgdf/kernels.h"
#include "dpsgdf/objective.h"
#include "dpsgdf/random.h"

namespace dpsgdf {
namespace {

struct Fixture {
  LabeledDataset data;
  LinearObjective objective;
  Vector theta;
  std::vector<int> indices;
};

Fixture MakeFixture(int n, int d, int classes) {
  RandomStream::Generator gen = RandomStream(7).MakeGenerator();
  std::vector<double> x(static_cast<size_t>(n) * d);
  for (double& v : x) v = gen.NextGaussian();
  std::vector<int> y(n);
  for (int& v : y) v = static_cast<int>(gen.UniformInt(classes));
  LinearObjective obj = LinearObjective::Multinomial(classes, d, true);
  Vector theta(obj.num_params());
  for (double& v : theta) v = 0.01 * gen.NextGaussian();
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  return Fixture{*LabeledDataset::Create(std::move(x), n, d, std::move(y),
                                         LabelMode::kMulticlass, classes),
                 obj, std::move(theta), std::move(idx)};
}

void BM_ClippedGradientSum(benchmark::State& state) {
  static const Fixture f = MakeFixture(4096, 784, 10);
  const auto exec = static_cast<Execution>(state.range(0));
  const int batch = static_cast<int>(state.range(1));
  Vector out(f.objective.num_params());
  for (auto _ : state) {
    ClippedGradientSum(f.objective, f.theta, f.data,
                       std::span<const int>(f.indices).first(batch), 1.0, out,
                       exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_ClippedGradientSum)
    ->ArgNames({"omp", "batch"})
    ->ArgsProduct({{0, 1}, {256, 1024, 4096}});

void BM_LossSum(benchmark::State& state) {
  static const Fixture f = MakeFixture(4096, 784, 10);
  const auto exec = static_cast<Execution>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(LossSum(f.objective, f.theta, f.data, exec));
  }
  state.SetItemsProcessed(state.iterations() * f.data.size());
}
BENCHMARK(BM_LossSum)->ArgName("omp")->Arg(0)->Arg(1);

}  // namespace
}  // namespace dpsgdf

BENCHMARK_MAIN();
