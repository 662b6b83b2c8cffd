// Serial reference vs OpenMP kernels. Each pair runs on identical inputs;
// the Args are problem sizes.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "unicorn/kernels/kernels.hpp"

using namespace unicorn;

namespace {

std::vector<double> uniform(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<int> labels(std::size_t n, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, k - 1);
  std::vector<int> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

template <bool Parallel>
void distances(benchmark::State& state) {
  const auto nq = std::size_t(state.range(0)), nr = std::size_t(state.range(1)), dim = std::size_t(64);
  const auto q = uniform(nq * dim, 1), r = uniform(nr * dim, 2);
  std::vector<double> out(nq * nr);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::pairwise_sq_distances(q, r, dim, out);
    else kernels::serial::pairwise_sq_distances(q, r, dim, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(nq * nr));
}

template <bool Parallel>
void cooccurrence(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto p = labels(n, 4, 3), r = labels(n, 4, 4);
  for (auto _ : state) {
    auto c = Parallel ? kernels::label_cooccurrence(p, r, 4) : kernels::serial::label_cooccurrence(p, r, 4);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(n));
}

template <bool Parallel>
void concordance(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto risk = uniform(n, 5), time = uniform(n, 6);
  std::vector<std::uint8_t> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = std::uint8_t(i % 3 != 0);
  for (auto _ : state) {
    auto c = Parallel ? kernels::concordance_pairs(risk, ev, time) : kernels::serial::concordance_pairs(risk, ev, time);
    benchmark::DoNotOptimize(c);
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(n * n));
}

}  // namespace

BENCHMARK(distances<false>)->Name("pairwise_sq_distances/serial")->Args({64, 512})->Args({512, 2048});
BENCHMARK(distances<true>)->Name("pairwise_sq_distances/omp")->Args({64, 512})->Args({512, 2048});
BENCHMARK(cooccurrence<false>)->Name("label_cooccurrence/serial")->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(cooccurrence<true>)->Name("label_cooccurrence/omp")->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(concordance<false>)->Name("concordance_pairs/serial")->Arg(500)->Arg(4000);
BENCHMARK(concordance<true>)->Name("concordance_pairs/omp")->Arg(500)->Arg(4000);

BENCHMARK_MAIN();
