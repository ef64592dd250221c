// Micro-benchmarks for the hot paths: row generation, detector absorption,
// truncated sampling, and one exact divergence scan.

#include <benchmark/benchmark.h>

#include "plantlab/detectors.hpp"
#include "plantlab/divergence.hpp"
#include "plantlab/stream.hpp"

namespace {

using namespace plantlab;

ProblemSpec biclique_spec() {
  ProblemSpec spec;
  spec.kind = ProblemKind::Biclique;
  spec.n = 256;
  spec.m = 256;
  spec.k = 16;
  spec.q = 0.5;
  return spec;
}

ProblemSpec sparse_mean_spec() {
  ProblemSpec spec;
  spec.kind = ProblemKind::SparseMean;
  spec.n = 256;
  spec.d = 1024;
  spec.t = 1024;
  spec.k = 64;
  spec.ell = 16;
  spec.q = 0.25;
  spec.alpha = 0.5;
  return spec;
}

void BM_BinaryRowFill(benchmark::State& state) {
  const auto handle = make_stream(biclique_spec(), Arm::Planted, 42);
  Row row;
  long long i = 0;
  for (auto _ : state) {
    handle.source->fill_row(i, row);
    benchmark::DoNotOptimize(row.bits.data());
    i = (i + 1) % handle.source->rows();
  }
  state.SetItemsProcessed(state.iterations() * handle.source->cols());
}
BENCHMARK(BM_BinaryRowFill);

void BM_GaussianRowFill(benchmark::State& state) {
  const auto handle = make_stream(sparse_mean_spec(), Arm::Planted, 42);
  Row row;
  long long i = 0;
  for (auto _ : state) {
    handle.source->fill_row(i, row);
    benchmark::DoNotOptimize(row.reals.data());
    i = (i + 1) % handle.source->rows();
  }
  state.SetItemsProcessed(state.iterations() * handle.source->cols());
}
BENCHMARK(BM_GaussianRowFill);

void BM_EdgeCountAbsorb(benchmark::State& state) {
  const auto spec = biclique_spec();
  const auto handle = make_stream(spec, Arm::Planted, 42);
  Row row;
  handle.source->fill_row(0, row);
  auto det = edge_count_detector(spec.m, spec.n, spec.q, spec.k);
  for (auto _ : state) {
    det->absorb(row);
    benchmark::DoNotOptimize(det.get());
  }
  state.SetItemsProcessed(state.iterations() * row.width());
}
BENCHMARK(BM_EdgeCountAbsorb);

void BM_BlockSquareAbsorb(benchmark::State& state) {
  const auto spec = sparse_mean_spec();
  const auto handle = make_stream(spec, Arm::Planted, 42);
  Row row;
  handle.source->fill_row(0, row);
  auto det = block_square_detector(spec.d, spec.ell, spec.alpha, spec.n);
  for (auto _ : state) {
    det->absorb(row);
    benchmark::DoNotOptimize(det.get());
  }
  state.SetItemsProcessed(state.iterations() * row.width());
}
BENCHMARK(BM_BlockSquareAbsorb);

void BM_TruncatedBlockSample(benchmark::State& state) {
  TruncationSpec trunc;
  trunc.kind = TruncKind::TypicalWeight;
  trunc.law = TruncLaw::Conditional;
  trunc.C = 1.0;
  trunc.n = 1024;
  trunc.m = 1024;
  trunc.t = 256;
  trunc.q = 0.5;
  RowRng rng(42);
  for (auto _ : state) {
    auto block = sample_truncated_bits(trunc, {}, rng);
    benchmark::DoNotOptimize(block.data());
  }
  state.SetItemsProcessed(state.iterations() * trunc.t);
}
BENCHMARK(BM_TruncatedBlockSample);

void BM_KlScanPoint(benchmark::State& state) {
  const long long n = state.range(0);
  for (auto _ : state) {
    auto rows = kl_binomial_gaussian_scan({n});
    benchmark::DoNotOptimize(rows.data());
  }
}
BENCHMARK(BM_KlScanPoint)->Arg(1024)->Arg(16384);

}  // namespace

BENCHMARK_MAIN();
