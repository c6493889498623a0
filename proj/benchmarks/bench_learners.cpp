#include <benchmark/benchmark.h>

#include "sparsemine/dictionary_learning.hpp"
#include "sparsemine/gpr_synth.hpp"

namespace {

using namespace sparsemine;

const Matrix& training_set() {
  static const Matrix y = generate_survey(SurveyLayout::standard(60, 15), PulseParams{}, 11).profiles;
  return y;
}

template <Learner L>
void BM_Learn(benchmark::State& state) {
  TrainConfig c;
  c.atoms = state.range(0);
  c.seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(learn(L, training_set(), c));
}

BENCHMARK_TEMPLATE(BM_Learn, Learner::ksvd)->Arg(192)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK_TEMPLATE(BM_Learn, Learner::odl)->Arg(192)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK_TEMPLATE(BM_Learn, Learner::cbwlsu)->Arg(192)->Unit(benchmark::kMillisecond)->Iterations(3);
BENCHMARK_TEMPLATE(BM_Learn, Learner::dominodl)->Arg(96)->Arg(192)->Unit(benchmark::kMillisecond);

void BM_GenerateSurvey(benchmark::State& state) {
  const SurveyLayout layout = SurveyLayout::standard();
  for (auto _ : state) benchmark::DoNotOptimize(generate_survey(layout, PulseParams{}, 1));
}
BENCHMARK(BM_GenerateSurvey)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
