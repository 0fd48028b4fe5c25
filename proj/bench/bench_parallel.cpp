// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include "ulearn/parallel.hpp"

using namespace ulearn;

namespace {

const KarpTables& tables() {
  static const KarpTables t(binary_relation_classes(3), 3);
  return t;
}

void BM_KarpSweepSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(karp_sweep_serial(tables(), {0, 1, 2}));
}

void BM_KarpSweepParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(karp_sweep_parallel(tables(), {0, 1, 2}));
}

struct SessionSetup {
  Family fam = Family::identity({StructureDescriptor::order("w"), StructureDescriptor::order("w*")});
  Learner learner = family_qss_learner(fam, 2, 4);
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7};
};

const SessionSetup& sessions() {
  static const SessionSetup s;
  return s;
}

void BM_SessionSweepSerial(benchmark::State& state) {
  const auto& s = sessions();
  for (auto _ : state)
    benchmark::DoNotOptimize(session_sweep_serial(s.fam, s.fam.base()[1], s.learner, state.range(0), s.seeds));
}

void BM_SessionSweepParallel(benchmark::State& state) {
  const auto& s = sessions();
  for (auto _ : state)
    benchmark::DoNotOptimize(session_sweep_parallel(s.fam, s.fam.base()[1], s.learner, state.range(0), s.seeds));
}

}  // namespace

BENCHMARK(BM_KarpSweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KarpSweepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SessionSweepSerial)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SessionSweepParallel)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
