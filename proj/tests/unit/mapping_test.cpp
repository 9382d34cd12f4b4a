#include <gtest/gtest.h>

#include "formalcr/errors.hpp"
#include "formalcr/mapping.hpp"
#include "oracles.hpp"

using namespace formalcr;

namespace {

const Gaussian I = Gaussian::imaginary_unit();
const Gaussian TWO_I(Rational(0), Rational(2));

TruncatedSeries mv(const std::string& name, int n = 1, int d = 1) {
  return TruncatedSeries::variable(manifold_context(n, d), name, 8);
}
TruncatedSeries av(const std::string& name, int n = 1, int d = 1) {
  return TruncatedSeries::variable(ambient_context(n, d), name, 8);
}

ManifoldPtr power_hypersurface(unsigned k) {
  return FormalGenericSubmanifold::create(1, 1, {mv("wb1") + TWO_I * power(mv("z1") * mv("zb1"), k)});
}

FormalMapPair power_pair(unsigned k) {
  return attach(power_hypersurface(k), power_hypersurface(1), {power(av("z1"), k)}, {av("w1")});
}

// Im w = |z1|^2 + |z2 w|^2 onto the sphere of C^3 by (z1, z2 w, w).
FormalMapPair non_finite_pair() {
  auto C = complexified_context(2, 1);
  auto c = [&](const char* s) { return TruncatedSeries::variable(C, s, 8); };
  auto rho = c("w1") - c("wb1") - TWO_I * c("z1") * c("zb1") - TWO_I * c("z2") * c("zb2") * c("w1") * c("wb1");
  auto norm = normalize(2, 1, graph_solve(2, 1, {rho}).Q0);
  EXPECT_TRUE(norm.was_normal);
  auto target = FormalGenericSubmanifold::create(
      2, 1, {mv("wb1", 2) + TWO_I * (mv("z1", 2) * mv("zb1", 2) + mv("z2", 2) * mv("zb2", 2))});
  return attach(norm.manifold, target, {av("z1", 2), av("z2", 2) * av("w1", 2)}, {av("w1", 2)});
}

}  // namespace

TEST(Attach, QuarticToSphere) {
  auto p = power_pair(2);
  EXPECT_TRUE(p.maps_into.is_true());
  for (const auto& r : p.residual) EXPECT_TRUE(r.is_zero());
}

TEST(Attach, WrongMapKeepsWitness) {
  auto p = attach(power_hypersurface(1), power_hypersurface(1), {Gaussian(2) * av("z1")}, {av("w1")});
  EXPECT_TRUE(p.maps_into.is_false());
  EXPECT_FALSE(p.maps_into.evidence.empty());
}

TEST(Attach, MapMustFixOrigin) {
  auto one = TruncatedSeries::constant(ambient_context(1, 1), Gaussian(1), 8);
  EXPECT_THROW(attach(power_hypersurface(1), power_hypersurface(1), {av("z1") + one}, {av("w1")}), InputRejected);
}

TEST(Predicates, PowerFamily) {
  for (unsigned k = 2; k <= 4; ++k) {
    auto p = power_pair(k);
    auto cr = cr_transversality_report(p);
    EXPECT_TRUE(cr.det_criterion.is_true());
    EXPECT_TRUE(cr.rank_criterion.is_true());
    EXPECT_TRUE(cr.kernel_criterion.is_true());
    auto f = finite(p, 12);
    ASSERT_TRUE(f.codim.finite());
    EXPECT_EQ(f.codim.dimension, k);
    auto s = segre_finite(p, 12);
    ASSERT_TRUE(s.codim.finite());
    EXPECT_EQ(s.codim.dimension, k);
    EXPECT_TRUE(not_totally_degenerate(p).is_true());
    EXPECT_TRUE(jacobian_nonzero(p.H()).is_true());
    EXPECT_TRUE(is_biholomorphic(p.H()).is_false());
  }
}

TEST(Predicates, NonFiniteExample) {
  auto p = non_finite_pair();
  EXPECT_TRUE(p.maps_into.is_true());
  EXPECT_TRUE(is_cr_transversal(p).is_true());
  EXPECT_TRUE(jacobian_nonzero(p.H()).is_true());
  EXPECT_TRUE(finite(p, 12).verdict.is_false());
  EXPECT_TRUE(segre_finite(p, 12).verdict.is_false());
  EXPECT_TRUE(transversally_regular(p).is_true());
  EXPECT_TRUE(not_totally_degenerate(p).is_false());
}

TEST(Predicates, TransversalButNotCrTransversal) {
  auto R2 = FormalGenericSubmanifold::create(0, 2, {mv("wb1", 0, 2), mv("wb2", 0, 2)});
  SeriesVec H = {av("w1", 0, 2), I * av("w1", 0, 2)};
  EXPECT_TRUE(is_transversal_raw(*R2, H).is_true());
  EXPECT_TRUE(is_cr_transversal_raw(*R2, H).is_false());
}

TEST(Reflection, HoldsOnFixturesForAllLengths) {
  for (auto p : {power_pair(2), power_pair(3), non_finite_pair()})
    for (int k = 1; k <= 2 * p.target->d() + 2; ++k)
      EXPECT_TRUE(reflection_identity_residual(p, k).is_true()) << k;
}

TEST(Audit, QuarticIdentityPasses) {
  auto rep = implication_audit(power_pair(2));
  EXPECT_EQ(rep.count(AuditStatus::Violated), 0u);
  bool found = false;
  for (const auto& c : rep.checks)
    if (c.name == "essential-type-multiplicity") {
      found = true;
      EXPECT_EQ(c.status, AuditStatus::Passed);
    }
  EXPECT_TRUE(found);
  EXPECT_EQ(rep.predicates.source_ess.dimension, 2u);
  EXPECT_EQ(rep.predicates.target_ess.dimension, 1u);
}

TEST(Audit, RequiresCertifiedMappingInto) {
  auto p = attach(power_hypersurface(1), power_hypersurface(1), {Gaussian(2) * av("z1")}, {av("w1")});
  EXPECT_THROW(implication_audit(p), PreconditionError);
}

TEST(Generator, SeededTriplesAreReproducible) {
  TripleSpec spec;
  spec.seed = 17;
  auto a = generate_audit_triple(spec);
  auto b = generate_audit_triple(spec);
  EXPECT_TRUE(a.pair.maps_into.is_true());
  ASSERT_EQ(a.pair.F.size(), b.pair.F.size());
  EXPECT_TRUE(a.pair.F[0] == b.pair.F[0]);
  EXPECT_TRUE(a.pair.source->Q()[0] == b.pair.source->Q()[0]);
}
