#include <benchmark/benchmark.h>

#include "ctlscape/controllability.hpp"
#include "ctlscape/random.hpp"
#include "ctlscape/survey.hpp"

using namespace ctlscape;

namespace {

Landscape qutrit_landscape() {
  const auto sys = sample_random_quantum_system(3, 1);
  Rng rng = make_rng(2);
  return Landscape(sys, Objective::gate_fidelity(haar_unitary(3, rng)));
}

SurveyConfig survey_config() {
  SurveyConfig cfg;
  cfg.intervals = 18;
  cfg.starts = 16;
  cfg.seed = 3;
  return cfg;
}

SliceSpec slice_spec() {
  Rng rng = make_rng(4);
  SliceSpec spec{uniform_box(18, 1.0, rng), random_direction(18, rng), random_direction(18, rng)};
  spec.grid_points = 41;
  return spec;
}

// Arg 0 runs the serial reference; any other value is the OpenMP worker count.

void BM_Survey(benchmark::State& state) {
  const auto f = qutrit_landscape();
  const auto cfg = survey_config();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(workers == 0 ? survey_serial(f, cfg) : survey(f, cfg, workers));
  }
}
BENCHMARK(BM_Survey)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Measure(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        workers == 0 ? sample_controllability_measure_serial(SystemFamily::quantum, 3, 200, 5)
                     : sample_controllability_measure(SystemFamily::quantum, 3, 200, 5, workers));
  }
}
BENCHMARK(BM_Measure)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Slice(benchmark::State& state) {
  const auto f = qutrit_landscape();
  const auto spec = slice_spec();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(workers == 0 ? landscape_slice_serial(f, spec)
                                          : landscape_slice(f, spec, workers));
  }
}
BENCHMARK(BM_Slice)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
