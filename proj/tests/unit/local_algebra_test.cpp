#include <gtest/gtest.h>

#include "formalcr/errors.hpp"
#include "formalcr/local_algebra.hpp"
#include "oracles.hpp"

using namespace formalcr;

namespace {

ContextPtr vars(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  return make_context(names);
}

TruncatedSeries mono(const ContextPtr& c, const oracle::Exps& e, int K) {
  Monomial m;
  for (std::size_t i = 0; i < e.size(); ++i) m.set(i, e[i]);
  return TruncatedSeries::monomial(c, m, Gaussian(1), K);
}

}  // namespace

TEST(Codimension, HandComputedIdeals) {
  auto c = vars(2);
  auto x = TruncatedSeries::variable(c, 0, 12), y = TruncatedSeries::variable(c, 1, 12);
  auto r = codimension(IdealPresentation(c, {power(x, 2) - power(y, 2), x * y}), 12);
  ASSERT_TRUE(r.finite());
  EXPECT_EQ(r.dimension, 4u);  // 1, x, y, x^2
  EXPECT_TRUE(r.value_is_exact);

  auto s = codimension(IdealPresentation(c, {power(x, 2), power(y, 3)}), 12);
  ASSERT_TRUE(s.finite());
  EXPECT_EQ(s.dimension, 6u);
  EXPECT_EQ(s.standard_monomials.size(), 6u);
}

TEST(Codimension, AxisWitnessForExactGenerators) {
  auto c = vars(2);
  auto x = TruncatedSeries::variable(c, 0, 12), y = TruncatedSeries::variable(c, 1, 12);
  auto r = codimension(IdealPresentation(c, {x * y}), 12);
  EXPECT_FALSE(r.finite());
  EXPECT_TRUE(r.infinite_certified);
  EXPECT_FALSE(r.infinite_witness.empty());
}

TEST(Codimension, InexactGeneratorsNeverCertifyInfinite) {
  auto c = vars(2);
  auto x = TruncatedSeries::variable(c, 0, 12), y = TruncatedSeries::variable(c, 1, 12);
  auto g = x * y;
  g.set_exact(false);
  auto r = codimension(IdealPresentation(c, {g}), 10);
  EXPECT_FALSE(r.finite());
  EXPECT_FALSE(r.infinite_certified);
}

TEST(Codimension, InsufficientPrecisionIsRejected) {
  auto c = vars(1);
  auto g = TruncatedSeries::variable(c, 0, 4);
  g.set_exact(false);
  EXPECT_THROW(codimension(IdealPresentation(c, {g}), 12), PreconditionError);
  EXPECT_EQ(supported_cutoff(IdealPresentation(c, {g}), 12), 5u);
}

// Monomial ideals containing a pure power of every variable: the
// codimension is the number of exponents under the staircase.
TEST(Codimension, MatchesBruteForceStaircase) {
  SeededRng rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = static_cast<std::size_t>(1 + trial % 3);
    auto c = vars(n);
    std::vector<oracle::Exps> gens;
    unsigned box = 0;
    for (std::size_t i = 0; i < n; ++i) {
      oracle::Exps e(n, 0);
      e[i] = static_cast<unsigned>(rng.uniform(1, n == 3 ? 4 : 6));
      box = std::max(box, e[i]);
      gens.push_back(e);
    }
    const int extra = static_cast<int>(rng.uniform(0, 3));
    for (int k = 0; k < extra; ++k) {
      oracle::Exps e(n, 0);
      for (auto& v : e) v = static_cast<unsigned>(rng.uniform(0, 3));
      if (std::accumulate(e.begin(), e.end(), 0u) == 0) continue;
      gens.push_back(e);
    }
    std::vector<TruncatedSeries> series;
    for (const auto& e : gens) series.push_back(mono(c, e, 16));
    auto r = codimension(IdealPresentation(c, series), 16);
    ASSERT_TRUE(r.finite()) << "trial " << trial;
    EXPECT_EQ(r.dimension, oracle::staircase_count(gens, n, box)) << "trial " << trial;
  }
}

TEST(Codimension, InvariantUnderUnitMultiplesAndLinearChange) {
  // (x^2, y^3) after x -> x + y and multiplying a generator by 1 + x
  auto c = vars(2);
  auto x = TruncatedSeries::variable(c, 0, 14), y = TruncatedSeries::variable(c, 1, 14);
  auto one = TruncatedSeries::constant(c, Gaussian(1), 14);
  auto r = codimension(IdealPresentation(c, {power(x + y, 2) * (one + x), power(y, 3)}), 14);
  ASSERT_TRUE(r.finite());
  EXPECT_EQ(r.dimension, 6u);
}

TEST(GenericRank, EvaluationAgreesWithSymbolicMinors) {
  SeededRng rng(44);
  auto c = vars(3);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t r = static_cast<std::size_t>(rng.uniform(1, 4));
    const std::size_t k = static_cast<std::size_t>(rng.uniform(1, 4));
    const std::size_t s = static_cast<std::size_t>(rng.uniform(1, 4));
    // A (r x k) times B (k x s): rank at most k
    SeriesMatrix A(c, r, k, 6), B(c, k, s, 6);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < k; ++j) A(i, j) = oracle::random_series(rng, c, 6, 0, 2, 2);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < s; ++j) B(i, j) = oracle::random_series(rng, c, 6, 0, 2, 2);
    SeriesMatrix P(c, r, s, 6);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < s; ++j) {
        auto acc = TruncatedSeries::zero(c, 6);
        for (std::size_t l = 0; l < k; ++l) acc = acc + A(i, l) * B(l, j);
        P(i, j) = acc;
      }
    const auto sym = symbolic_rank(P);
    EXPECT_EQ(evaluation_rank(P), sym) << "trial " << trial;
    EXPECT_LE(sym, std::min({r, k, s}));
    EXPECT_EQ(generic_rank(P).lower_bound, sym);
  }
}

TEST(LocalDimension, KnownIdeals) {
  auto c = vars(3);
  auto x1 = TruncatedSeries::variable(c, 0, 8), x2 = TruncatedSeries::variable(c, 1, 8),
       x3 = TruncatedSeries::variable(c, 2, 8);
  EXPECT_TRUE(local_dimension_is(IdealPresentation(c, {x3}), 2).is_true());
  EXPECT_TRUE(local_dimension_is(IdealPresentation(c, {x1, x2}), 1).is_true());
  EXPECT_TRUE(local_dimension_is(IdealPresentation(c, {x1 * x2}), 2).is_true());
  EXPECT_FALSE(local_dimension_is(IdealPresentation(c, {x1 * x2}), 1).is_true());
}
