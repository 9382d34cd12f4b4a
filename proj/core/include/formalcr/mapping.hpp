#pragma once

// Formal holomorphic maps H = (F, G) between generic submanifolds of the same
// dimension, the predicates attached to them, reflection identities, and the
// implication audit.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "formalcr/local_algebra.hpp"
#include "formalcr/manifold.hpp"

namespace formalcr {

struct FormalMapPair {
  ManifoldPtr source;
  ManifoldPtr target;
  SeriesVec F;  // n series over ambient_context(n, d)
  SeriesVec G;  // d series over ambient_context(n, d)
  SeriesVec residual;  // G(z,Q) - Qt(F(z,Q), Fbar, Gbar) over the source manifold context
  Verdict maps_into;

  SeriesVec H() const;  // (F, G)
};

/// Builds the pair and verifies the mapping-into identity. Succeeds even when
/// the identity fails; maps_into then carries the witness.
FormalMapPair attach(ManifoldPtr source, ManifoldPtr target, SeriesVec F, SeriesVec G);

struct CRTransversalityReport {
  Verdict det_criterion;     // det dG/dw (0) != 0
  Verdict rank_criterion;    // rank [-dQt/dz(0) | I] H'(0) = d
  Verdict kernel_criterion;  // ker drho_t(0) + H'(0) C^N = C^N
  Verdict combined;
};

CRTransversalityReport cr_transversality_report(const FormalMapPair& pair);
Verdict is_cr_transversal(const FormalMapPair& pair);

/// Variants that need no source manifold: H is a list of N series over any
/// context with N variables (the domain C^N), `target` the image manifold.
Verdict is_cr_transversal_raw(const FormalGenericSubmanifold& target, const SeriesVec& H);
Verdict is_transversal_raw(const FormalGenericSubmanifold& target, const SeriesVec& H);
Verdict is_transversal(const FormalMapPair& pair);

Verdict not_totally_degenerate(const FormalMapPair& pair);

struct FinitenessResult {
  Verdict verdict;
  CodimensionResult codim;
};

/// m_H: codimension of I(F(z, 0)) in C[[z]].
FinitenessResult segre_finite(const FormalMapPair& pair, unsigned cutoff);
/// mult(H): codimension of I(H) in C[[Z]].
FinitenessResult finite(const FormalMapPair& pair, unsigned cutoff);
FinitenessResult finite_raw(const SeriesVec& H, unsigned cutoff);

Verdict transversally_regular(const FormalMapPair& pair, const DimensionPolicy& policy = {});

/// det dH/dZ is not identically zero.
Verdict jacobian_nonzero(const SeriesVec& H);

/// det H'(0) != 0 (constant-term linear algebra, always certified).
Verdict is_biholomorphic(const SeriesVec& H);

/// H o v^k against the target Segre map fed with F o v^j and its conjugates;
/// also checks G o v^1 = 0.
Verdict reflection_identity_residual(const FormalMapPair& pair, int k);

// ---- audit -----------------------------------------------------------------

struct AnalysisOptions {
  unsigned cutoff = 12;
  std::uint64_t seed = 0;
  int nondegeneracy_order = 4;
};

struct PredicateReport {
  Verdict maps_into;
  CRTransversalityReport cr;
  Verdict transversal;
  Verdict not_totally_degenerate;
  FinitenessResult segre_finite;
  FinitenessResult finite;
  Verdict transversally_regular;
  Verdict jacobian_nonzero;
  Verdict biholomorphic;
  Verdict source_finite_type;
  Verdict target_finite_type;
  CodimensionResult source_ess;
  CodimensionResult target_ess;
  Verdict source_ess_finite;
  Verdict target_ess_finite;
  NondegeneracyResult source_fin_nondeg;
};

PredicateReport evaluate_predicates(const FormalMapPair& pair, const AnalysisOptions& options = {});

enum class AuditStatus { Passed, Skipped, Violated };
std::string to_string(AuditStatus s);

struct AuditInput {
  std::string label;
  Truth value;
  std::string detail;
};

struct AuditCheck {
  std::string name;
  std::vector<AuditInput> antecedents;
  std::vector<AuditInput> consequents;  // conjunction
  AuditStatus status = AuditStatus::Skipped;
};

struct AuditReport {
  PredicateReport predicates;
  std::vector<AuditCheck> checks;
  std::size_t count(AuditStatus s) const;
};

/// Requires pair.maps_into to be CertifiedTrue (PreconditionError otherwise).
AuditReport implication_audit(const FormalMapPair& pair, const AnalysisOptions& options = {});

struct TripleSpec {
  int n = 1;
  int d = 1;
  int truncation = 8;
  std::uint64_t seed = 0;
  unsigned max_retries = 8;
};

struct GeneratedTriple {
  FormalMapPair pair;
  std::uint64_t seed_used = 0;
  unsigned attempts = 0;
};

/// Random rigid real target Qt = tau + 2i phi(z, chi), random H with
/// det dG/dw (0) != 0, and M = H^{-1}(Mt) solved and normalized.
GeneratedTriple generate_audit_triple(const TripleSpec& spec);

}  // namespace formalcr
