#include "mdt/cluster.hpp"
#include "mdt/datasets.hpp"
#include "mdt/learn.hpp"
#include "mdt/quality.hpp"
#include "mdt/time_select.hpp"
#include "mdt/trajectory.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace mdt;

namespace {

const ViewOperators& helix_ops(Index n) {
  static std::map<Index, ViewOperators> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_canonical_set(gen_helix_a(n))).first;
  return it->second;
}

void BM_CanonicalSet(benchmark::State& state) {
  const MultiViewDataset data = gen_helix_a(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_canonical_set(data));
}
BENCHMARK(BM_CanonicalSet)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_Compose(benchmark::State& state) {
  const OperatorSet set = OperatorSet::canonical(helix_ops(state.range(0)).operators);
  const Trajectory tau = sample_random_trajectory(2, {}, 10, 1);
  for (auto _ : state) benchmark::DoNotOptimize(compose(set, tau));
}
BENCHMARK(BM_Compose)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_DiffusionMap(benchmark::State& state) {
  const OperatorSet set = OperatorSet::canonical(helix_ops(state.range(0)).operators);
  const MDTOperator w = compose(set, sample_random_trajectory(2, {}, 10, 1));
  for (auto _ : state) benchmark::DoNotOptimize(diffusion_map(w, 2));
}
BENCHMARK(BM_DiffusionMap)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_EntropyCurve(benchmark::State& state) {
  const OperatorSet set = OperatorSet::canonical(helix_ops(150).operators);
  for (auto _ : state) benchmark::DoNotOptimize(entropy_curve(set, {}, 30));
}
BENCHMARK(BM_EntropyCurve)->Unit(benchmark::kMillisecond);

void BM_ContrastiveGradient(benchmark::State& state) {
  const ViewOperators& ops = helix_ops(150);
  const OperatorSet set = OperatorSet::canonical(ops.operators);
  const NeighborSets neigh = neighbor_sets(ops.kernels);
  const Matrix logits = Matrix::Zero(state.range(0), 2);
  const std::vector<double> lambdas{0.5, 0.5};
  Matrix grad;
  for (auto _ : state) benchmark::DoNotOptimize(contrastive_objective(set, logits, neigh, lambdas, &grad));
}
BENCHMARK(BM_ContrastiveGradient)->Arg(3)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const OperatorSet set = OperatorSet::canonical(helix_ops(300).operators);
  const DiffusionMap map = diffusion_map(compose(set, sample_random_trajectory(2, {}, 5, 2)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(map.embedding, 4, 0));
}
BENCHMARK(BM_KMeans)->Unit(benchmark::kMillisecond);

void BM_Ami(benchmark::State& state) {
  std::vector<int> a(3000);
  std::vector<int> b(3000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<int>(i % 7);
    b[i] = static_cast<int>((i * 31 / 7) % 5);
  }
  const PartitionLabels pa = PartitionLabels::from_raw(a);
  const PartitionLabels pb = PartitionLabels::from_raw(b);
  for (auto _ : state) benchmark::DoNotOptimize(ami(pa, pb));
}
BENCHMARK(BM_Ami);

}  // namespace

BENCHMARK_MAIN();
