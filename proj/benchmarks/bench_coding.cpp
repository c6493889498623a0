#include <benchmark/benchmark.h>

#include <random>

#include "sparsemine/classifier.hpp"
#include "sparsemine/sparse_coding.hpp"
#include "sparsemine/stats_metrics.hpp"

namespace {

using namespace sparsemine;

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

Dictionary unit_dictionary(Index rows, Index atoms) {
  Matrix d = gaussian(rows, atoms, 1);
  d.colwise().normalize();
  return Dictionary(d);
}

void BM_Omp(benchmark::State& state) {
  const Index atoms = state.range(0);
  const Dictionary d = unit_dictionary(211, atoms);
  const Vector y = gaussian(211, 1, 2).col(0);
  const StopRule stop = StopRule::sparsity(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(omp(y, d, stop));
}
BENCHMARK(BM_Omp)->Args({192, 3})->Args({192, 10})->Args({600, 10});

void BM_BatchOmp(benchmark::State& state) {
  const Dictionary d = unit_dictionary(211, 192);
  const Matrix y = gaussian(211, state.range(0), 3);
  const StopRule stop = StopRule::sparsity(3);
  for (auto _ : state) benchmark::DoNotOptimize(batch_omp(y, d, stop, static_cast<unsigned>(state.range(1))));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BatchOmp)->Args({900, 1})->Args({900, 4})->Unit(benchmark::kMillisecond);

void BM_LassoCd(benchmark::State& state) {
  const Dictionary d = unit_dictionary(211, 192);
  const Vector y = gaussian(211, 1, 4).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(lasso_cd(y, d, 0.1 * y.norm()));
}
BENCHMARK(BM_LassoCd);

void BM_Similarity(benchmark::State& state) {
  const Matrix m = gaussian(211, 2, 5);
  for (auto _ : state) benchmark::DoNotOptimize(similarity(m.col(0), m.col(1)));
}
BENCHMARK(BM_Similarity);

void BM_SvmBinary(benchmark::State& state) {
  const Index n = state.range(0);
  Matrix x = gaussian(20, n, 6);
  std::vector<int> labels;
  for (Index j = 0; j < n; ++j) {
    const int label = j % 2 == 0 ? 1 : -1;
    x(0, j) += 1.5 * label;
    labels.push_back(label);
  }
  for (auto _ : state) benchmark::DoNotOptimize(svm_train_binary(x, labels, SvmParams{}));
}
BENCHMARK(BM_SvmBinary)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
