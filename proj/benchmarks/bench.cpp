#include <benchmark/benchmark.h>

#include "formalcr/local_algebra.hpp"
#include "formalcr/mapping.hpp"
#include "formalcr/random.hpp"

using namespace formalcr;

namespace {

const Gaussian TWO_I(Rational(0), Rational(2));

TruncatedSeries dense(const ContextPtr& c, int K, std::uint64_t seed) {
  SeededRng rng(seed);
  auto f = TruncatedSeries::zero(c, K);
  for (unsigned d = 1; d <= static_cast<unsigned>(K); ++d)
    for (const auto& m : monomials_of_degree(c->size(), d))
      f.add_term(m, Gaussian(Rational(rng.uniform(-9, 9)), Rational(rng.uniform(-9, 9))));
  return f;
}

ManifoldPtr sphere(int n, int K) {
  auto c = manifold_context(n, 1);
  auto q = TruncatedSeries::variable(c, "wb1", K);
  for (int i = 1; i <= n; ++i)
    q = q + TWO_I * TruncatedSeries::variable(c, "z" + std::to_string(i), K) *
                TruncatedSeries::variable(c, "zb" + std::to_string(i), K);
  return FormalGenericSubmanifold::create(n, 1, {q});
}

}  // namespace

static void BM_Multiply(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  auto c = manifold_context(1, 1);
  auto a = dense(c, K, 1), b = dense(c, K, 2);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_Multiply)->Arg(4)->Arg(6)->Arg(8);

static void BM_Compose(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  auto c = manifold_context(1, 1);
  auto f = dense(c, K, 3);
  SeriesVec sub = {dense(c, K, 4), dense(c, K, 5), dense(c, K, 6)};
  for (auto _ : state) benchmark::DoNotOptimize(compose(f, sub));
}
BENCHMARK(BM_Compose)->Arg(4)->Arg(6)->Arg(8);

static void BM_Codimension(benchmark::State& state) {
  const unsigned a = static_cast<unsigned>(state.range(0));
  auto c = make_context(std::vector<std::string>{"x", "y", "z"});
  std::vector<TruncatedSeries> gens;
  for (std::size_t i = 0; i < 3; ++i) gens.push_back(power(TruncatedSeries::variable(c, i, 16), a));
  gens.push_back(TruncatedSeries::variable(c, 0, 16) * TruncatedSeries::variable(c, 1, 16));
  const IdealPresentation ideal(c, gens);
  for (auto _ : state) benchmark::DoNotOptimize(codimension(ideal, 16));
}
BENCHMARK(BM_Codimension)->Arg(2)->Arg(3)->Arg(4);

static void BM_SegreMaps(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto M = sphere(n, 8);  // fresh manifold: Segre maps are memoised per object
    benchmark::DoNotOptimize(M->segre(M->segre_bound()));
  }
}
BENCHMARK(BM_SegreMaps)->Arg(1)->Arg(2);

static void BM_GenerateTriple(benchmark::State& state) {
  TripleSpec spec;
  spec.n = static_cast<int>(state.range(0));
  spec.d = static_cast<int>(state.range(1));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    spec.seed = seed++;
    benchmark::DoNotOptimize(generate_audit_triple(spec));
  }
}
BENCHMARK(BM_GenerateTriple)->Args({1, 1})->Args({2, 1})->Args({1, 2})->Unit(benchmark::kMillisecond);

static void BM_Audit(benchmark::State& state) {
  TripleSpec spec;
  spec.n = static_cast<int>(state.range(0));
  spec.d = static_cast<int>(state.range(1));
  const auto g = generate_audit_triple(spec);
  for (auto _ : state) benchmark::DoNotOptimize(implication_audit(g.pair));
}
BENCHMARK(BM_Audit)->Args({1, 1})->Args({2, 1})->Args({1, 2})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
