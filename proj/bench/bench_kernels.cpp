#include <benchmark/benchmark.h>

#include <omp.h>

#include <random>
#include <vector>

#include "evfuse/kernels.hpp"
#include "evfuse/toymodel.hpp"

using namespace evfuse;

namespace {

struct Batch {
  Matrix x;
  EvidenceHead head;
  std::vector<std::size_t> labels;
};

Batch make_batch(std::size_t n, std::size_t d, std::size_t k) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> dist(0.0, 1.0);
  Batch b{Matrix(n, d), EvidenceHead::random(d, k, rng, 0.3), std::vector<std::size_t>(n)};
  for (double& v : b.x.data()) v = dist(rng);
  for (std::size_t i = 0; i < n; ++i) b.labels[i] = i % k;
  return b;
}

template <bool Parallel>
void BM_TrainStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Batch b = make_batch(n, 10, 5);
  Matrix z, e, dz, dw(10, 5);
  std::vector<double> db(5);
  std::vector<LossReport> reports(n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::forward(b.x, b.head, z, e);
      kernels::omp::backward(z, e, b.labels, 12, dz, reports);
      kernels::omp::accumulate(b.x, dz, dw, db);
    } else {
      kernels::serial::forward(b.x, b.head, z, e);
      kernels::serial::backward(z, e, b.labels, 12, dz, reports);
      kernels::serial::accumulate(b.x, dz, dw, db);
    }
    benchmark::DoNotOptimize(dw.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
  state.counters["threads"] = Parallel ? omp_get_max_threads() : 1;
}

template <Exec E>
void BM_InferBatch(benchmark::State& state) {
  SyntheticConfig cfg;
  cfg.samples_per_class = static_cast<std::size_t>(state.range(0)) / 5;
  const MultiViewDataset data = generate_dataset(cfg);
  const Pipeline p = make_pipeline(PipelineConfig{}, 5, 5);
  for (auto _ : state) {
    auto out = infer_batch(p, data, FusionStrategy::kCmam, E);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}

}  // namespace

BENCHMARK(BM_TrainStep<false>)->Name("train_step/serial")->RangeMultiplier(8)->Range(1 << 9, 1 << 18);
BENCHMARK(BM_TrainStep<true>)->Name("train_step/omp")->RangeMultiplier(8)->Range(1 << 9, 1 << 18);
BENCHMARK(BM_InferBatch<Exec::kSerial>)->Name("infer_batch/serial")->Arg(1000)->Arg(20000);
BENCHMARK(BM_InferBatch<Exec::kParallel>)->Name("infer_batch/omp")->Arg(1000)->Arg(20000);

BENCHMARK_MAIN();
