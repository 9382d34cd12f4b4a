#include <gtest/gtest.h>

#include "formalcr/errors.hpp"
#include "formalcr/series.hpp"
#include "oracles.hpp"

using namespace formalcr;
using oracle::Poly;

namespace {

const Gaussian I = Gaussian::imaginary_unit();

TruncatedSeries var(const ContextPtr& c, const char* name, int K = 8) { return TruncatedSeries::variable(c, name, K); }

}  // namespace

TEST(Gaussian, CanonicalText) {
  EXPECT_EQ(Gaussian(oracle::ratio(3, 4)).to_string(), "3/4");
  EXPECT_EQ(Gaussian(Rational(0), Rational(-2)).to_string(), "-2*i");
  EXPECT_EQ(Gaussian(oracle::ratio(1, 2), Rational(-3)).to_string(), "(1/2 - 3*i)");
  EXPECT_EQ(Gaussian(Rational(0), Rational(1)).to_string(), "i");
}

TEST(Gaussian, FieldOperations) {
  const Gaussian a(Rational(2), Rational(3));
  const Gaussian b(Rational(1), Rational(-1));
  EXPECT_EQ(a * b, Gaussian(Rational(5), Rational(1)));
  EXPECT_EQ((a / b) * b, a);
  EXPECT_EQ(a.conj(), Gaussian(Rational(2), Rational(-3)));
  EXPECT_EQ(a.norm(), Rational(13));
}

TEST(Series, ConjugateFlipsImaginaryParts) {
  auto c = manifold_context(1, 1);
  auto z = var(c, "z1"), chi = var(c, "zb1");
  auto f = Gaussian(Rational(2), Rational(3)) * (z * chi);
  auto g = conjugate(f);
  EXPECT_EQ(g.coefficient((z * chi).terms().begin()->first), Gaussian(Rational(2), Rational(-3)));
  auto h = I * z + Gaussian(Rational(1), Rational(-1)) * power(chi, 2);
  EXPECT_TRUE(conjugate(conjugate(h)) == h);
}

TEST(Series, DerivativeAndDeterminant) {
  auto c = make_context(std::vector<std::string>{"x", "y"});
  auto x = var(c, "x"), y = var(c, "y");
  auto d = differentiate(power(x, 2) * y, 0);
  EXPECT_TRUE(d.same_terms(Gaussian(2) * (x * y)));
  EXPECT_TRUE(d.exact());

  auto zc = make_context(std::vector<std::string>{"z", "w"});
  auto z = var(zc, "z"), w = var(zc, "w");
  SeriesMatrix m(2, 2, {z, w, w, z});
  EXPECT_TRUE(determinant(m).same_terms(power(z, 2) - power(w, 2)));
}

TEST(Series, DifferentiateInexactLosesOneDegree) {
  auto c = make_context(std::vector<std::string>{"x"});
  auto x = var(c, "x", 4);
  auto f = invert_unit(TruncatedSeries::constant(c, Gaussian(1), 4) - x);  // 1 + x + ... + x^4, inexact
  auto d = differentiate(f, 0);
  EXPECT_FALSE(d.exact());
  EXPECT_EQ(d.truncation(), 3);
}

TEST(Series, MultiplicationMatchesSchoolbookOracle) {
  SeededRng rng(7);
  auto c = make_context(std::vector<std::string>{"a", "b", "c"});
  for (int trial = 0; trial < 40; ++trial) {
    auto f = oracle::random_series(rng, c, 6, 0, 5, 6);
    auto g = oracle::random_series(rng, c, 6, 0, 5, 6);
    auto p = oracle::from_series(f) * oracle::from_series(g);
    EXPECT_TRUE(oracle::same(p, f * g, 6));
    EXPECT_TRUE(oracle::same(oracle::from_series(f) + oracle::from_series(g), f + g, 6));
  }
}

TEST(Series, ProductExactnessTracksDroppedTerms) {
  auto c = make_context(std::vector<std::string>{"x"});
  auto x = var(c, "x", 4);
  EXPECT_TRUE((power(x, 2) * power(x, 2)).exact());
  EXPECT_FALSE((power(x, 3) * power(x, 2)).exact());
}

TEST(Series, InvertUnitGeometric) {
  auto c = manifold_context(1, 1);
  auto t = var(c, "z1") * var(c, "zb1");
  auto one = TruncatedSeries::constant(c, Gaussian(1), 8);
  auto inv = invert_unit(one - I * t);
  EXPECT_FALSE(inv.exact());
  // 1/(1 - i t) = sum (i t)^k
  auto expect = TruncatedSeries::zero(c, 8);
  for (unsigned k = 0; k <= 4; ++k) expect = expect + power(I * t, k);
  EXPECT_TRUE(inv.same_terms(expect));
  EXPECT_THROW(invert_unit(t), PreconditionError);
}

TEST(Series, ComposeMatchesNaiveExpansion) {
  SeededRng rng(11);
  auto src = make_context(std::vector<std::string>{"u", "v"});
  auto dst = make_context(std::vector<std::string>{"x", "y", "z"});
  for (int trial = 0; trial < 25; ++trial) {
    auto f = oracle::random_series(rng, src, 7, 0, 4, 5);
    SeriesVec sub = {oracle::random_series(rng, dst, 7, 1, 3, 3), oracle::random_series(rng, dst, 7, 1, 3, 3)};
    auto got = compose(f, sub);
    auto want = oracle::compose(oracle::from_series(f), {oracle::from_series(sub[0]), oracle::from_series(sub[1])});
    EXPECT_TRUE(oracle::same(want, got, 7)) << f.to_string();
  }
}

TEST(Series, ComposeRejectsConstantSubstitution) {
  auto c = make_context(std::vector<std::string>{"x"});
  auto x = var(c, "x");
  SeriesVec sub = {x + TruncatedSeries::constant(c, Gaussian(1), 8)};
  EXPECT_THROW(compose(power(x, 2), sub), PreconditionError);
}

TEST(Series, ReverseInvertsWithParameters) {
  auto c = make_context(std::vector<std::string>{"p", "u"});
  auto p = var(c, "p"), u = var(c, "u");
  // F(p, u) = u + p u + u^2 ; invert in u with p as parameter
  SeriesVec F = {u + p * u + power(u, 2)};
  std::vector<std::size_t> inv = {1};
  auto y = reverse(F, inv);
  SeriesVec back = {p, y[0]};
  auto r = compose(F, back);
  EXPECT_TRUE(r[0].same_terms(u.truncated(8)));
  EXPECT_FALSE(y[0].exact());
}

TEST(Series, PrintOrderIsAscendingDegree) {
  auto c = manifold_context(1, 1);
  auto f = var(c, "wb1") + Gaussian(Rational(0), Rational(2)) * var(c, "z1") * var(c, "zb1");
  EXPECT_EQ(f.to_string(), "wb1 + 2*i*z1*zb1");
  EXPECT_EQ(TruncatedSeries::zero(c, 8).to_string(), "0");
}

TEST(Series, EmbedAndSetToZero) {
  auto a = make_context(std::vector<std::string>{"x", "y"});
  auto b = make_context(std::vector<std::string>{"s", "x", "y"});
  auto f = var(a, "x") * var(a, "y") + var(a, "y");
  std::vector<std::size_t> map = {1, 2};
  auto g = embed(f, b, map);
  EXPECT_EQ(g.to_string(), "y + x*y");
  std::vector<std::size_t> zero = {0};
  EXPECT_EQ(set_to_zero(f, zero).to_string(), "y");
}
