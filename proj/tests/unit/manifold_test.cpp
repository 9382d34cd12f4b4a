#include <gtest/gtest.h>

#include "formalcr/errors.hpp"
#include "formalcr/manifold.hpp"
#include "oracles.hpp"

using namespace formalcr;

namespace {

const Gaussian I = Gaussian::imaginary_unit();
const Gaussian TWO_I(Rational(0), Rational(2));

struct Vars {
  ContextPtr c;
  int K;
  TruncatedSeries v(const std::string& name) const { return TruncatedSeries::variable(c, name, K); }
};

ManifoldPtr power_hypersurface(unsigned k, int K = 8) {
  Vars m{manifold_context(1, 1), K};
  return FormalGenericSubmanifold::create(1, 1, {m.v("wb1") + TWO_I * power(m.v("z1") * m.v("zb1"), k)});
}

ManifoldPtr sphere(int n, int K = 8) {
  Vars m{manifold_context(n, 1), K};
  auto q = m.v("wb1");
  for (int i = 1; i <= n; ++i) q = q + TWO_I * m.v("z" + std::to_string(i)) * m.v("zb" + std::to_string(i));
  return FormalGenericSubmanifold::create(n, 1, {q});
}

}  // namespace

TEST(Manifold, SphereIsRealAndNormal) {
  auto M = sphere(1);
  EXPECT_TRUE(M->reality().is_true());
  EXPECT_TRUE(M->normality().is_true());
  EXPECT_TRUE(M->exact());
}

TEST(Manifold, NonRealSeriesIsRejected) {
  Vars m{manifold_context(1, 1), 8};
  EXPECT_THROW(FormalGenericSubmanifold::create(1, 1, {m.v("wb1") + m.v("z1") * m.v("zb1")}), InputRejected);
}

TEST(Manifold, NonNormalSeriesIsRejected) {
  Vars m{manifold_context(1, 1), 8};
  // real (rho = w - wb - i(z^2 + zb^2)) but not normal
  auto q = m.v("wb1") + I * (power(m.v("z1"), 2) + power(m.v("zb1"), 2));
  EXPECT_TRUE(verify_reality(1, 1, {q}).is_true());
  EXPECT_FALSE(verify_normal_form(1, 1, {q}).is_true());
  EXPECT_THROW(FormalGenericSubmanifold::create(1, 1, {q}), InputRejected);
}

TEST(Segre, FirstTwoMapsOfTheSphere) {
  auto M = sphere(1);
  const auto& s1 = M->segre(1);
  ASSERT_EQ(s1.u.size(), 1u);
  EXPECT_TRUE(s1.u[0].is_zero());
  const auto& s2 = M->segre(2);
  auto t1 = TruncatedSeries::variable(s2.context, 0, 8), t2 = TruncatedSeries::variable(s2.context, 1, 8);
  EXPECT_TRUE(s2.u[0].same_terms(TWO_I * t1 * t2));
  // u^3 = Q(t3, t2, conj(u^2)) = -2i t1 t2 + 2i t2 t3
  const auto& s3 = M->segre(3);
  auto a = TruncatedSeries::variable(s3.context, 0, 8), b = TruncatedSeries::variable(s3.context, 1, 8),
       c = TruncatedSeries::variable(s3.context, 2, 8);
  EXPECT_TRUE(s3.u[0].same_terms(TWO_I * (b * c) - TWO_I * (a * b)));
}

TEST(GraphSolve, ImplicitHypersurfaceMatchesGeometricSeries) {
  // w - wb - 2i z zb w wb = 0  =>  w = wb / (1 - 2i z zb wb)
  Vars c{complexified_context(1, 1), 8};
  auto rho = c.v("w1") - c.v("wb1") - TWO_I * c.v("z1") * c.v("zb1") * c.v("w1") * c.v("wb1");
  auto sol = graph_solve(1, 1, {rho});
  Vars m{manifold_context(1, 1), 8};
  auto x = TWO_I * m.v("z1") * m.v("zb1") * m.v("wb1");
  auto expect = TruncatedSeries::zero(m.c, 8);
  for (unsigned k = 0; k <= 3; ++k) expect = expect + m.v("wb1") * power(x, k);
  EXPECT_TRUE(sol.Q0[0].same_terms(expect.truncated(8)));
}

TEST(GraphSolve, SingularSplitIsReported) {
  Vars c{complexified_context(1, 1), 8};
  auto rho = c.v("w1") - c.v("wb1") - TWO_I * c.v("z1") * c.v("zb1");
  EXPECT_THROW(graph_solve(1, 1, {rho}, {0}), PreconditionError);
}

TEST(Normalize, ProducesVerifiedNormalFormAndIsIdempotent) {
  Vars c{complexified_context(1, 1), 8};
  auto rho = c.v("w1") - c.v("wb1") - TWO_I * c.v("z1") * c.v("zb1") - I * (power(c.v("z1"), 2) + power(c.v("zb1"), 2));
  auto sol = graph_solve(1, 1, {rho});
  auto norm = normalize(1, 1, sol.Q0);
  EXPECT_FALSE(norm.was_normal);
  EXPECT_TRUE(verify_reality(1, 1, norm.manifold->Q()).is_true());
  EXPECT_TRUE(verify_normal_form(1, 1, norm.manifold->Q()).is_true());
  auto again = normalize(1, 1, norm.manifold->Q());
  EXPECT_TRUE(again.was_normal);
  EXPECT_TRUE(again.manifold->Q()[0].same_terms(norm.manifold->Q()[0]));
  // change and inverse_change are mutually inverse in w
  Vars a{ambient_context(1, 1), 8};
  SeriesVec sub = {a.v("z1"), norm.inverse_change[0]};
  EXPECT_TRUE(compose(norm.change, sub)[0].same_terms(a.v("w1")));
}

TEST(FiniteType, SphereAndLeviFlat) {
  EXPECT_TRUE(is_finite_type(*sphere(1)).is_true());
  EXPECT_TRUE(is_finite_type(*sphere(2)).is_true());
  Vars m{manifold_context(1, 1), 8};
  auto flat = FormalGenericSubmanifold::create(1, 1, {m.v("wb1")});
  EXPECT_FALSE(is_finite_type(*flat).is_true());
}

TEST(FiniteType, CriteriaAgreeAndSubspaceVanishes) {
  for (auto M : {sphere(1), sphere(2), power_hypersurface(2), power_hypersurface(3)}) {
    auto r = finite_type_report(*M);
    EXPECT_EQ(r.segre_rank.value, r.u_rank.value);
    EXPECT_EQ(r.segre_rank.value, r.restriction.value);
    for (int m = 1; 2 * m <= 2 * M->d() + 2; ++m) EXPECT_TRUE(segre_vanishes_on_W(*M, m).is_true()) << m;
  }
}

TEST(EssentialType, PowerFamily) {
  for (unsigned k = 1; k <= 4; ++k) {
    auto e = essential_type(*power_hypersurface(k), 12);
    ASSERT_TRUE(e.finite());
    EXPECT_EQ(e.dimension, k);
  }
  Vars m{manifold_context(1, 1), 8};
  auto flat = FormalGenericSubmanifold::create(1, 1, {m.v("wb1")});
  EXPECT_FALSE(essential_type(*flat, 12).finite());
}

// For rigid hypersurfaces with n = 1 the essential ideal is generated by
// the chi-coefficients of z^a, so the codimension is their minimal order.
TEST(EssentialType, MatchesMinimalOrderOracleOnRigidHypersurfaces) {
  SeededRng rng(31);
  Vars m{manifold_context(1, 1), 8};
  for (int trial = 0; trial < 30; ++trial) {
    auto phi = TruncatedSeries::zero(m.c, 8);
    for (int t = 0; t < 3; ++t) {
      const unsigned a = static_cast<unsigned>(rng.uniform(1, 3)), b = static_cast<unsigned>(rng.uniform(1, 3));
      const Rational r(rng.uniform(-3, 3));
      if (r == 0) continue;
      // r (z^a chi^b + z^b chi^a) keeps phi Hermitian
      phi = phi + Gaussian(r) * (power(m.v("z1"), a) * power(m.v("zb1"), b) + power(m.v("z1"), b) * power(m.v("zb1"), a));
    }
    auto M = FormalGenericSubmanifold::create(1, 1, {m.v("wb1") + TWO_I * phi});
    unsigned best = 100;
    for (const auto& [mono, c] : phi.terms())
      if (mono[0] >= 1) best = std::min(best, mono[1]);
    auto e = essential_type(*M, 12);
    if (best == 100) {
      EXPECT_FALSE(e.finite());
    } else {
      ASSERT_TRUE(e.finite());
      EXPECT_EQ(e.dimension, best);
    }
  }
}

TEST(FiniteNondegeneracy, SphereVersusQuartic) {
  auto s = is_finitely_nondegenerate(*sphere(1), 4);
  EXPECT_TRUE(s.verdict.is_true());
  EXPECT_EQ(s.order, 1);
  EXPECT_TRUE(is_finitely_nondegenerate(*power_hypersurface(2), 4).verdict.is_false());
}
