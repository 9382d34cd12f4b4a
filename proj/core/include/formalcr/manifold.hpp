#pragma once

// Formal generic submanifolds w = Q(z, zb, wb) of C^N in normal coordinates,
// their Segre mappings, and submanifold invariants.

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "formalcr/local_algebra.hpp"
#include "formalcr/series.hpp"
#include "formalcr/verdict.hpp"

namespace formalcr {

/// u^k and v^k = (t^k, u^k) over segre_context(n, k).
struct SegreMapping {
  int k = 0;
  ContextPtr context;
  SeriesVec u;  // d series
  SeriesVec v;  // N series: t^k block followed by u
};

class FormalGenericSubmanifold;
using ManifoldPtr = std::shared_ptr<const FormalGenericSubmanifold>;

class FormalGenericSubmanifold {
public:
  /// Wraps Q (d series over manifold_context(n, d)). Verifies reality and
  /// normality; throws InputRejected if either is certified false.
  static ManifoldPtr create(int n, int d, SeriesVec Q);

  int n() const { return n_; }
  int d() const { return d_; }
  int N() const { return n_ + d_; }
  const SeriesVec& Q() const { return Q_; }
  const ContextPtr& context() const { return ctx_; }
  int truncation() const { return truncation_; }
  bool exact() const;

  const Verdict& reality() const { return reality_; }
  const Verdict& normality() const { return normality_; }

  /// k-th Segre mapping, memoised. 1 <= k <= max(2d+2, 4).
  const SegreMapping& segre(int k) const;
  int segre_bound() const { return std::max(2 * d_ + 2, 4); }

  FormalGenericSubmanifold(int n, int d, SeriesVec Q);  // use create()

private:
  int n_;
  int d_;
  SeriesVec Q_;
  ContextPtr ctx_;
  int truncation_;
  Verdict reality_;
  Verdict normality_;

  mutable std::mutex segre_mutex_;
  mutable std::map<int, std::shared_ptr<const SegreMapping>> segre_cache_;
};

/// Reality identity Q(z, chi, Qbar(chi, z, w)) = w up to truncation.
Verdict verify_reality(int n, int d, const SeriesVec& Q);
/// Normality Q(0, chi, tau) = Q(z, 0, tau) = tau up to truncation.
Verdict verify_normal_form(int n, int d, const SeriesVec& Q);

/// Solves rho(z, w, zb, wb) = 0 for w as series Q0(z, zb, wb).
/// `rho` lives in complexified_context(n, d). `split` names which d of the
/// N holomorphic variables play the role of w (in order); the remaining ones
/// become z in their original order, and the conjugate variables follow the
/// same permutation. Throws PreconditionError if d rho/dw (0) is singular.
struct GraphSolution {
  SeriesVec Q0;                    // over manifold_context(n, d)
  std::vector<std::size_t> order;  // new Z position -> original Z index
};
GraphSolution graph_solve(int n, int d, const SeriesVec& rho, const std::vector<std::size_t>& split);
GraphSolution graph_solve(int n, int d, const SeriesVec& rho);  // split = w1..wd

/// Result of bringing a real submanifold into normal coordinates.
struct Normalization {
  ManifoldPtr manifold;
  /// New coordinates as series of the old ones over ambient_context(n, d):
  /// (z, w) -> (z, w'), the d entries are w'(z, w).
  SeriesVec change;
  /// Old w as series of the new coordinates (z, w').
  SeriesVec inverse_change;
  bool was_normal = false;
};

Normalization normalize(int n, int d, const SeriesVec& Q0);

// ---- invariants ------------------------------------------------------------

struct FiniteTypeReport {
  Verdict segre_rank;   // Rk v^{d+1} = N
  Verdict u_rank;       // Rk u^{d+1} = d
  Verdict restriction;  // d x d minor of du^{2m}/dt'(t', 0) nonvanishing on W'
  Verdict combined;
};

FiniteTypeReport finite_type_report(const FormalGenericSubmanifold& M, const RankPolicy& policy = {});
Verdict is_finite_type(const FormalGenericSubmanifold& M, const RankPolicy& policy = {});

/// u^{2m} restricted to W (t^{2m} = 0, t^{2m-j} = t^j) vanishes.
Verdict segre_vanishes_on_W(const FormalGenericSubmanifold& M, int m);

/// Restriction of a series over segre_context(n, 2m) to W', expressed over
/// segre_context(n, m): drops t^{2m} and identifies t^{2m-j} with t^j.
TruncatedSeries restrict_to_W(const TruncatedSeries& f, int n, int m, const ContextPtr& target);

/// Ess_0(M): codimension of the ideal generated by the z-coefficients of
/// Q(z, chi, 0) in C[[chi]].
CodimensionResult essential_type(const FormalGenericSubmanifold& M, unsigned cutoff);

/// Essentially finite iff essential_type is finite.
Verdict essentially_finite(const CodimensionResult& ess);

struct NondegeneracyResult {
  Verdict verdict;
  int order = -1;  // minimal k0 when CertifiedTrue
};

NondegeneracyResult is_finitely_nondegenerate(const FormalGenericSubmanifold& M, int max_order);

}  // namespace formalcr
