// Compares the OpenMP kernels against the serial reference implementations
// across problem sizes. Run with --benchmark_filter to narrow.

#include <benchmark/benchmark.h>

#include "csikit/clustering.hpp"
#include "csikit/kernels.hpp"
#include "csikit/rng.hpp"

using namespace csikit;

namespace {

Matrix random_points(std::size_t n, std::size_t d) {
  Rng rng(1234);
  Matrix m(n, d);
  for (auto& v : m.data) v = rng.gaussian();
  return m;
}

std::vector<int> random_labels(std::size_t n, std::size_t k) {
  Rng rng(99);
  std::vector<int> labels(n);
  for (std::size_t c = 0; c < k; ++c) labels[c] = static_cast<int>(c);
  for (std::size_t i = k; i < n; ++i) labels[i] = static_cast<int>(rng.uniform_index(k));
  return labels;
}

constexpr std::size_t kDim = 4;
constexpr std::size_t kClusters = 3;

void bm_pairwise_serial(benchmark::State& state) {
  Matrix pts = random_points(static_cast<std::size_t>(state.range(0)), kDim);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::pairwise_sq_dist(pts));
}

void bm_pairwise_parallel(benchmark::State& state) {
  Matrix pts = random_points(static_cast<std::size_t>(state.range(0)), kDim);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::pairwise_sq_dist(pts));
}

void bm_silhouette_serial(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Matrix pts = random_points(n, kDim);
  auto labels = random_labels(n, kClusters);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::serial::silhouette_samples(pts, labels, kClusters));
}

void bm_silhouette_parallel(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Matrix pts = random_points(n, kDim);
  auto labels = random_labels(n, kClusters);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::silhouette_samples(pts, labels, kClusters));
}

void bm_assign_serial(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Matrix pts = random_points(n, kDim);
  Matrix centers = random_points(kClusters, kDim);
  std::vector<int> labels(n);
  for (auto _ : state) {
    kernels::serial::assign_nearest(pts, centers, labels);
    benchmark::DoNotOptimize(labels.data());
  }
}

void bm_assign_parallel(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Matrix pts = random_points(n, kDim);
  Matrix centers = random_points(kClusters, kDim);
  std::vector<int> labels(n);
  for (auto _ : state) {
    kernels::assign_nearest(pts, centers, labels);
    benchmark::DoNotOptimize(labels.data());
  }
}

void bm_kmeans_full(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  FeatureMatrix fm;
  fm.values = random_points(n, kDim);
  for (std::size_t c = 0; c < kDim; ++c) fm.column_names.push_back("c" + std::to_string(c));
  for (std::size_t r = 0; r < n; ++r) fm.row_ids.push_back("r" + std::to_string(r));
  KmeansOptions opts;
  opts.restarts = 8;
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(fm, kClusters, 7, opts));
}

}  // namespace

BENCHMARK(bm_pairwise_serial)->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(bm_pairwise_parallel)->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(bm_silhouette_serial)->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(bm_silhouette_parallel)->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(bm_assign_serial)->Arg(1024)->Arg(4096)->Arg(16384);
BENCHMARK(bm_assign_parallel)->Arg(1024)->Arg(4096)->Arg(16384);
BENCHMARK(bm_kmeans_full)->Arg(512)->Arg(2048);

BENCHMARK_MAIN();
