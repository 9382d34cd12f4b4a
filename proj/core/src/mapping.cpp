#include "formalcr/mapping.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "formalcr/errors.hpp"
#include "formalcr/linalg.hpp"
#include "formalcr/random.hpp"

namespace formalcr {

namespace {

std::vector<std::size_t> range(std::size_t from, std::size_t count) {
  std::vector<std::size_t> v(count);
  std::iota(v.begin(), v.end(), from);
  return v;
}

std::string first_term(const TruncatedSeries& f) {
  auto terms = f.sorted_terms();
  if (terms.empty()) return "0";
  return TruncatedSeries::monomial(f.context(), terms.front().first, terms.front().second, f.truncation())
      .to_string();
}

Verdict residual_verdict(const SeriesVec& residual, const std::string& what) {
  for (std::size_t j = 0; j < residual.size(); ++j) {
    if (!residual[j].is_zero())
      return Verdict::no(what + " residual has term " + first_term(residual[j]) + " in component " +
                         std::to_string(j + 1));
  }
  int K = std::numeric_limits<int>::max();
  bool exact = true;
  for (const auto& r : residual) {
    if (!r.exact()) {
      exact = false;
      K = std::min(K, r.truncation());
    }
  }
  if (exact) return Verdict::yes(what + " residual vanishes identically");
  return Verdict::yes(what + " residual vanishes through degree " + std::to_string(K));
}

// Nonzero jet -> true, exact zero -> false, vanishing inexact jet -> unknown.
Verdict nonvanishing(const TruncatedSeries& f, const std::string& what) {
  if (!f.is_zero()) return Verdict::yes(what + " has term " + first_term(f));
  if (f.exact()) return Verdict::no(what + " vanishes identically");
  return Verdict::unknown(what + " vanishes through degree " + std::to_string(f.truncation()));
}

// H'(0) for N series over a context with N variables.
GaussMatrix linear_part(const SeriesVec& H) {
  const std::size_t N = H.size();
  GaussMatrix J(N, N);
  for (std::size_t r = 0; r < N; ++r) {
    if (H[r].context()->size() != N) throw StructuralError("map must have as many components as variables");
    for (std::size_t c = 0; c < N; ++c) J(r, c) = H[r].coefficient(Monomial::unit(c));
  }
  return J;
}

// [-dQt/dz(0) | I], the differential of w - Qt at 0.
GaussMatrix target_differential(const FormalGenericSubmanifold& target) {
  const std::size_t n = static_cast<std::size_t>(target.n());
  const std::size_t d = static_cast<std::size_t>(target.d());
  GaussMatrix R(d, n + d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) R(j, i) = -target.Q()[j].coefficient(Monomial::unit(i));
    R(j, n + j) = Gaussian(1);
  }
  return R;
}

Verdict rank_verdict(std::size_t r, std::size_t want, const std::string& what) {
  const std::string text = what + " has rank " + std::to_string(r);
  return r == want ? Verdict::yes(text) : Verdict::no(text + " < " + std::to_string(want));
}

Verdict kernel_criterion(const FormalGenericSubmanifold& target, const GaussMatrix& Hp) {
  const std::size_t N = static_cast<std::size_t>(target.N());
  std::vector<GaussRow> rows = nullspace(target_differential(target));
  const GaussMatrix Ht = Hp.transpose();
  for (std::size_t c = 0; c < N; ++c) {
    GaussRow row(N);
    for (std::size_t r = 0; r < N; ++r) row[r] = Ht(c, r);
    rows.push_back(row);
  }
  return rank_verdict(rank(GaussMatrix::from_rows(rows, N)), N, "T^{1,0} Mt + dH(C^N)");
}

Verdict rank_criterion(const FormalGenericSubmanifold& target, const GaussMatrix& Hp) {
  const GaussMatrix A = target_differential(target) * Hp;
  return rank_verdict(rank(A), static_cast<std::size_t>(target.d()), "d(rho_t) H'(0)");
}

Verdict truth_agreement(const std::vector<const Verdict*>& vs, const std::string& what) {
  for (const Verdict* v : vs)
    if (v->value != vs.front()->value)
      throw InternalInconsistency(what + " criteria disagree: " + vs.front()->evidence + " vs " + v->evidence);
  return *vs.front();
}

FinitenessResult finiteness(const ContextPtr& ctx, std::vector<TruncatedSeries> gens, unsigned cutoff,
                            const std::string& what) {
  IdealPresentation ideal(ctx, std::move(gens));
  FinitenessResult out;
  out.codim = codimension(ideal, supported_cutoff(ideal, cutoff));
  if (out.codim.finite()) {
    out.verdict = Verdict::yes(what + " = " + std::to_string(out.codim.dimension) + " (certified at degree " +
                               std::to_string(out.codim.certificate_degree) + ")");
  } else if (out.codim.infinite_certified) {
    out.verdict = Verdict::no("infinite codimension: " + out.codim.infinite_witness);
  } else {
    out.verdict = Verdict::unknown("not finite up to degree " + std::to_string(out.codim.cutoff_used));
  }
  return out;
}

void check_map_shape(const FormalGenericSubmanifold& M, const SeriesVec& F, const SeriesVec& G) {
  const ContextPtr amb = ambient_context(M.n(), M.d());
  if (static_cast<int>(F.size()) != M.n() || static_cast<int>(G.size()) != M.d())
    throw StructuralError("map needs n components F and d components G");
  for (const auto* v : {&F, &G})
    for (const auto& s : *v) {
      if (!same_context(s.context(), amb)) throw StructuralError("map components must live in (z, w)");
      if (!s.constant_term().is_zero()) throw InputRejected("map must send 0 to 0");
    }
}

}  // namespace

SeriesVec FormalMapPair::H() const {
  SeriesVec out = F;
  out.insert(out.end(), G.begin(), G.end());
  return out;
}

FormalMapPair attach(ManifoldPtr source, ManifoldPtr target, SeriesVec F, SeriesVec G) {
  if (!source || !target) throw StructuralError("attach: missing manifold");
  if (source->n() != target->n() || source->d() != target->d())
    throw StructuralError("attach: source and target must have the same n and d");
  check_map_shape(*source, F, G);
  const std::size_t n = static_cast<std::size_t>(source->n());
  const std::size_t d = static_cast<std::size_t>(source->d());
  const ContextPtr& Mc = source->context();
  const int K = source->truncation();

  SeriesVec sub;
  for (std::size_t i = 0; i < n; ++i) sub.push_back(TruncatedSeries::variable(Mc, i, K));
  for (const auto& q : source->Q()) sub.push_back(q);
  const SeriesVec Fq = compose(F, sub);
  const SeriesVec Gq = compose(G, sub);

  std::vector<std::size_t> to_bar(n + d);
  for (std::size_t i = 0; i < n; ++i) to_bar[i] = n + i;
  for (std::size_t j = 0; j < d; ++j) to_bar[n + j] = 2 * n + j;
  SeriesVec args = Fq;
  for (auto& s : embed(conjugate(F), Mc, to_bar)) args.push_back(s);
  for (auto& s : embed(conjugate(G), Mc, to_bar)) args.push_back(s);
  const SeriesVec rhs = compose(target->Q(), args);

  FormalMapPair pair;
  pair.source = std::move(source);
  pair.target = std::move(target);
  pair.F = std::move(F);
  pair.G = std::move(G);
  for (std::size_t j = 0; j < d; ++j) pair.residual.push_back(Gq[j] - rhs[j]);
  pair.maps_into = residual_verdict(pair.residual, "mapping-into");
  return pair;
}

// ---- transversality --------------------------------------------------------

CRTransversalityReport cr_transversality_report(const FormalMapPair& pair) {
  CRTransversalityReport rep;
  const std::size_t n = static_cast<std::size_t>(pair.source->n());
  const std::size_t d = static_cast<std::size_t>(pair.source->d());
  const GaussMatrix Hp = linear_part(pair.H());
  GaussMatrix Gw(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) Gw(r, c) = Hp(n + r, n + c);
  const Gaussian det = determinant(Gw);
  rep.det_criterion = det.is_zero() ? Verdict::no("det dG/dw (0) = 0")
                                    : Verdict::yes("det dG/dw (0) = " + det.to_string());
  rep.rank_criterion = rank_criterion(*pair.target, Hp);
  rep.kernel_criterion = kernel_criterion(*pair.target, Hp);
  if (pair.maps_into.is_true()) {
    rep.combined = truth_agreement({&rep.det_criterion, &rep.rank_criterion, &rep.kernel_criterion},
                                   "CR transversality");
  } else {
    rep.combined = rep.rank_criterion;
  }
  return rep;
}

Verdict is_cr_transversal(const FormalMapPair& pair) { return cr_transversality_report(pair).combined; }

Verdict is_cr_transversal_raw(const FormalGenericSubmanifold& target, const SeriesVec& H) {
  if (static_cast<int>(H.size()) != target.N()) throw StructuralError("map needs N components");
  const GaussMatrix Hp = linear_part(H);
  const Verdict a = rank_criterion(target, Hp);
  const Verdict b = kernel_criterion(target, Hp);
  return truth_agreement({&a, &b}, "CR transversality");
}

Verdict is_transversal_raw(const FormalGenericSubmanifold& target, const SeriesVec& H) {
  if (static_cast<int>(H.size()) != target.N()) throw StructuralError("map needs N components");
  const GaussMatrix A = target_differential(target) * linear_part(H);
  return rank_verdict(real_rank_of_split(A), static_cast<std::size_t>(target.d()), "[Re A | -Im A]");
}

Verdict is_transversal(const FormalMapPair& pair) { return is_transversal_raw(*pair.target, pair.H()); }

// ---- degeneracy and finiteness ---------------------------------------------

Verdict not_totally_degenerate(const FormalMapPair& pair) {
  const std::size_t n = static_cast<std::size_t>(pair.source->n());
  const std::size_t d = static_cast<std::size_t>(pair.source->d());
  if (n == 0) return Verdict::yes("no z variables: empty determinant is 1");
  SeriesVec F0;
  for (const auto& f : pair.F) F0.push_back(set_to_zero(f, range(n, d)));
  return nonvanishing(determinant(jacobian(F0, range(0, n))), "det dF/dz (z, 0)");
}

FinitenessResult segre_finite(const FormalMapPair& pair, unsigned cutoff) {
  const std::size_t n = static_cast<std::size_t>(pair.source->n());
  const std::size_t d = static_cast<std::size_t>(pair.source->d());
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("z" + std::to_string(i));
  const ContextPtr Z = make_context(names);
  std::vector<std::size_t> map(n + d, 0);
  for (std::size_t i = 0; i < n; ++i) map[i] = i;
  std::vector<TruncatedSeries> gens;
  for (const auto& f : pair.F) gens.push_back(embed(set_to_zero(f, range(n, d)), Z, map));
  return finiteness(Z, std::move(gens), cutoff, "m_H");
}

FinitenessResult finite_raw(const SeriesVec& H, unsigned cutoff) {
  if (H.empty()) throw StructuralError("empty map");
  return finiteness(H.front().context(), H, cutoff, "mult(H)");
}

FinitenessResult finite(const FormalMapPair& pair, unsigned cutoff) { return finite_raw(pair.H(), cutoff); }

Verdict transversally_regular(const FormalMapPair& pair, const DimensionPolicy& policy) {
  if (pair.source->d() == 1) return nonvanishing(pair.G.front(), "G");
  const std::size_t N = static_cast<std::size_t>(pair.source->N());
  const std::size_t d = static_cast<std::size_t>(pair.source->d());
  return local_dimension_is(IdealPresentation(pair.G.front().context(), pair.G), N - d, policy);
}

Verdict jacobian_nonzero(const SeriesVec& H) {
  if (H.empty()) throw StructuralError("empty map");
  return nonvanishing(determinant(jacobian(H, range(0, H.size()))), "det dH/dZ");
}

Verdict is_biholomorphic(const SeriesVec& H) {
  const Gaussian det = determinant(linear_part(H));
  if (det.is_zero()) return Verdict::no("det H'(0) = 0");
  return Verdict::yes("det H'(0) = " + det.to_string());
}

// ---- reflection identities -------------------------------------------------

Verdict reflection_identity_residual(const FormalMapPair& pair, int k) {
  const FormalGenericSubmanifold& M = *pair.source;
  const std::size_t n = static_cast<std::size_t>(M.n());
  if (k < 1 || k > M.segre_bound())
    throw PreconditionError("reflection identity index outside 1.." + std::to_string(M.segre_bound()));

  SeriesVec residual = compose(pair.G, M.segre(1).v);
  const SegreMapping& S = M.segre(k);
  SeriesVec lhs = compose(pair.G, S.v);
  if (n == 0) {
    for (auto& s : lhs) residual.push_back(s);
    return residual_verdict(residual, "reflection identity k=" + std::to_string(k));
  }
  // Slot j of the target map receives F o v^j, conjugated when j and k differ
  // in parity.
  SeriesVec sub;
  for (int j = 1; j <= k; ++j) {
    const SegreMapping& Sj = M.segre(j);
    SeriesVec Fj = embed(compose(pair.F, Sj.v), S.context, range(0, Sj.context->size()));
    if ((k - j) % 2 != 0) Fj = conjugate(Fj);
    for (auto& s : Fj) sub.push_back(s);
  }
  const SeriesVec rhs = compose(pair.target->segre(k).u, sub);
  for (std::size_t j = 0; j < lhs.size(); ++j) residual.push_back(lhs[j] - rhs[j]);
  return residual_verdict(residual, "reflection identity k=" + std::to_string(k));
}

// ---- predicates and audit --------------------------------------------------

PredicateReport evaluate_predicates(const FormalMapPair& pair, const AnalysisOptions& options) {
  PredicateReport p;
  p.maps_into = pair.maps_into;
  p.cr = cr_transversality_report(pair);
  p.transversal = is_transversal(pair);
  p.not_totally_degenerate = not_totally_degenerate(pair);
  p.segre_finite = segre_finite(pair, options.cutoff);
  p.finite = finite(pair, options.cutoff);
  DimensionPolicy dp;
  dp.seed = derive_seed(options.seed, 11);
  dp.cutoff = options.cutoff;
  p.transversally_regular = transversally_regular(pair, dp);
  p.jacobian_nonzero = jacobian_nonzero(pair.H());
  p.biholomorphic = is_biholomorphic(pair.H());
  RankPolicy rp;
  rp.seed = derive_seed(options.seed, 12);
  p.source_finite_type = is_finite_type(*pair.source, rp);
  p.target_finite_type = is_finite_type(*pair.target, rp);
  p.source_ess = essential_type(*pair.source, options.cutoff);
  p.target_ess = essential_type(*pair.target, options.cutoff);
  p.source_ess_finite = essentially_finite(p.source_ess);
  p.target_ess_finite = essentially_finite(p.target_ess);
  int order = options.nondegeneracy_order;
  if (!pair.source->exact()) order = std::min(order, pair.source->truncation() - 1);
  p.source_fin_nondeg = is_finitely_nondegenerate(*pair.source, order);
  return p;
}

std::string to_string(AuditStatus s) {
  switch (s) {
    case AuditStatus::Passed: return "PASSED";
    case AuditStatus::Skipped: return "SKIPPED";
    case AuditStatus::Violated: return "VIOLATED";
  }
  return "?";
}

std::size_t AuditReport::count(AuditStatus s) const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [s](const AuditCheck& c) { return c.status == s; }));
}

namespace {

// Closed integer range known to contain a codimension.
struct Range {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

std::optional<Range> range_of(const CodimensionResult& c) {
  if (!c.finite()) return std::nullopt;
  if (c.value_is_exact) return Range{c.dimension, c.dimension};
  return Range{1, c.dimension};
}

std::string show(const std::optional<Range>& r) {
  if (!r) return "?";
  if (r->lo == r->hi) return std::to_string(r->lo);
  return "[" + std::to_string(r->lo) + "," + std::to_string(r->hi) + "]";
}

AuditInput equality(const std::string& label, const std::optional<Range>& lhs, const std::optional<Range>& a,
                    const std::optional<Range>& b) {
  AuditInput in{label, Truth::Unknown, ""};
  if (!lhs || !a || !b) {
    in.detail = show(lhs) + " = " + show(a) + "*" + show(b) + ": not all finite";
    return in;
  }
  const Range rhs{a->lo * b->lo, a->hi * b->hi};
  in.detail = show(lhs) + " = " + show(a) + "*" + show(b);
  if (lhs->lo == lhs->hi && rhs.lo == rhs.hi && lhs->lo == rhs.lo) {
    in.value = Truth::CertifiedTrue;
  } else if (lhs->hi < rhs.lo || rhs.hi < lhs->lo) {
    in.value = Truth::CertifiedFalse;
  }
  return in;
}

AuditInput input(const std::string& label, const Verdict& v) { return {label, v.value, v.evidence}; }

AuditStatus judge(const AuditCheck& c) {
  auto all_true = std::all_of(c.antecedents.begin(), c.antecedents.end(),
                              [](const AuditInput& a) { return a.value == Truth::CertifiedTrue; });
  auto any_false = std::any_of(c.consequents.begin(), c.consequents.end(),
                               [](const AuditInput& a) { return a.value == Truth::CertifiedFalse; });
  if (all_true && any_false) return AuditStatus::Violated;
  auto unknown = [](const AuditInput& a) { return a.value == Truth::Unknown; };
  if (std::any_of(c.antecedents.begin(), c.antecedents.end(), unknown) ||
      std::any_of(c.consequents.begin(), c.consequents.end(), unknown))
    return AuditStatus::Skipped;
  return AuditStatus::Passed;
}

Truth iff(Truth a, Truth b) {
  if (a == Truth::Unknown || b == Truth::Unknown) return Truth::Unknown;
  return a == b ? Truth::CertifiedTrue : Truth::CertifiedFalse;
}

}  // namespace

AuditReport implication_audit(const FormalMapPair& pair, const AnalysisOptions& options) {
  if (!pair.maps_into.is_true())
    throw PreconditionError("audit needs a verified mapping-into residual: " + pair.maps_into.evidence);
  AuditReport rep;
  rep.predicates = evaluate_predicates(pair, options);
  const PredicateReport& p = rep.predicates;

  const AuditInput jac = input("Jac H != 0", p.jacobian_nonzero);
  const AuditInput ft_src = input("M finite type", p.source_finite_type);
  const AuditInput ft_tgt = input("Mt finite type", p.target_finite_type);
  const AuditInput ntd = input("H not totally degenerate", p.not_totally_degenerate);
  const AuditInput fin = input("H finite", p.finite.verdict);
  const AuditInput sf = input("H Segre finite", p.segre_finite.verdict);
  const AuditInput cr = input("H CR transversal", p.cr.combined);
  const AuditInput tr = input("H transversal", p.transversal);
  const AuditInput treg = input("H transversally regular", p.transversally_regular);
  const AuditInput ef_src = input("M essentially finite", p.source_ess_finite);
  const AuditInput ef_tgt = input("Mt essentially finite", p.target_ess_finite);
  const AuditInput fnd = input("M finitely nondegenerate", p.source_fin_nondeg.verdict);
  const AuditInput bih = input("H biholomorphic", p.biholomorphic);

  const auto m_h = range_of(p.segre_finite.codim);
  const auto mult = range_of(p.finite.codim);
  const auto ess_src = range_of(p.source_ess);
  const auto ess_tgt = range_of(p.target_ess);
  const std::optional<Range> one = Range{1, 1};

  AuditInput mh_le_mult{"m_H <= mult(H)", Truth::Unknown, show(m_h) + " <= " + show(mult)};
  if (m_h && mult) {
    if (m_h->hi <= mult->lo) mh_le_mult.value = Truth::CertifiedTrue;
    else if (m_h->lo > mult->hi) mh_le_mult.value = Truth::CertifiedFalse;
  }
  AuditInput mh_eq_mult = equality("m_H = mult(H)", m_h, mult, one);
  AuditInput ess_mult = equality("Ess(M) = mult(H) Ess(Mt)", ess_src, mult, ess_tgt);
  AuditInput ess_mh = equality("Ess(M) = m_H Ess(Mt)", ess_src, m_h, ess_tgt);
  AuditInput ess_eq = equality("Ess(M) = Ess(Mt)", ess_src, one, ess_tgt);

  AuditInput criteria{"CR criteria agree", Truth::CertifiedTrue,
                      "det: " + to_string(p.cr.det_criterion.value) + ", rank: " +
                          to_string(p.cr.rank_criterion.value) + ", kernel: " +
                          to_string(p.cr.kernel_criterion.value)};
  if (p.cr.det_criterion.value != p.cr.rank_criterion.value ||
      p.cr.rank_criterion.value != p.cr.kernel_criterion.value)
    criteria.value = Truth::CertifiedFalse;

  AuditInput ess_iff{"Ess(M) = Ess(Mt) iff H biholomorphic", iff(ess_eq.value, bih.value),
                     ess_eq.detail + "; " + bih.detail};

  auto add = [&](std::string name, std::vector<AuditInput> ante, std::vector<AuditInput> cons) {
    AuditCheck c{std::move(name), std::move(ante), std::move(cons), AuditStatus::Skipped};
    c.status = judge(c);
    rep.checks.push_back(std::move(c));
  };

  add("jacobian-pushes-finite-type", {jac, ft_src}, {ft_tgt});
  add("ntd-pulls-finite-type", {ntd, ft_tgt}, {ft_src, jac});
  add("finite-implies-segre-finite", {fin}, {sf, mh_le_mult, treg});
  add("segre-finite-implies-ntd", {sf}, {ntd});
  add("segre-finite-cr-transversal-implies-finite", {sf, cr}, {fin, mh_eq_mult});
  add("finite-implies-cr-transversal", {ft_tgt, fin}, {cr});
  add("segre-finite-implies-finite-cr-transversal", {ft_tgt, sf}, {fin, cr});
  if (pair.source->d() == 1) {
    add("hypersurface-ntd-implies-cr-transversal", {ft_tgt, ntd}, {cr});
  } else {
    AuditCheck c{"hypersurface-ntd-implies-cr-transversal", {}, {}, AuditStatus::Skipped};
    c.consequents.push_back({"applies to d = 1 only", Truth::Unknown, "d = " + std::to_string(pair.source->d())});
    rep.checks.push_back(std::move(c));
  }
  add("cr-transversality-criteria-agree", {}, {criteria});
  add("cr-transversal-implies-transversal", {cr}, {tr});
  add("transversal-implies-cr-transversal", {tr}, {cr});
  add("essentially-finite-regular-implies-segre-finite", {ef_src, treg}, {sf});
  add("essential-type-multiplicity", {ef_src, ft_tgt, treg}, {fin, cr, ef_tgt, ess_mult});
  add("essential-type-equality-iff-biholomorphic", {ef_src, ft_tgt, treg}, {ess_iff});
  add("segre-multiplicity-from-source", {cr, ef_src}, {ef_tgt, sf, ess_mh});
  add("segre-multiplicity-from-target", {cr, ef_tgt, sf}, {ef_src, ess_mh});
  add("nondegenerate-finite-implies-biholomorphic", {fnd, ft_src, fin}, {bih});
  return rep;
}

// ---- generator -------------------------------------------------------------

namespace {

Gaussian small_gaussian(SeededRng& rng, long h) {
  return Gaussian(Rational(rng.uniform(-h, h)), Rational(rng.uniform(-h, h)));
}

// Real phi(z, chi) with every term containing both z and chi.
TruncatedSeries random_hermitian(SeededRng& rng, const ContextPtr& Mc, std::size_t n, int K, unsigned max_deg) {
  TruncatedSeries phi(Mc, K, true);
  std::vector<Monomial> zs;
  for (unsigned deg = 1; deg < max_deg; ++deg)
    for (const auto& m : monomials_of_degree(n, deg)) zs.push_back(m);
  auto shift = [&](const Monomial& m) {
    Monomial out;
    for (std::size_t i = 0; i < n; ++i)
      if (m[i] > 0) out.set(n + i, m[i]);
    return out;
  };
  for (std::size_t a = 0; a < zs.size(); ++a) {
    for (std::size_t b = a; b < zs.size(); ++b) {
      if (zs[a].degree() + zs[b].degree() > max_deg) continue;
      // Leading Levi-form terms are kept more often than higher ones.
      const bool low = zs[a].degree() == 1 && zs[b].degree() == 1;
      if (rng.uniform(0, low ? 3 : 5) != 0) continue;
      Gaussian c = small_gaussian(rng, 2);
      if (a == b) c = Gaussian(c.re());
      if (c.is_zero()) continue;
      phi.add_term(zs[a] * shift(zs[b]), c);
      if (a != b) phi.add_term(zs[b] * shift(zs[a]), c.conj());
    }
  }
  return phi;
}

TruncatedSeries random_polynomial(SeededRng& rng, const ContextPtr& amb, int K, unsigned max_deg) {
  TruncatedSeries f(amb, K, true);
  for (unsigned deg = 2; deg <= max_deg; ++deg)
    for (const auto& m : monomials_of_degree(amb->size(), deg))
      if (rng.uniform(0, 3) == 0) f.add_term(m, small_gaussian(rng, 1));
  return f;
}

}  // namespace

GeneratedTriple generate_audit_triple(const TripleSpec& spec) {
  const int n = spec.n;
  const int d = spec.d;
  const int K = spec.truncation;
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t dd = static_cast<std::size_t>(d);
  const std::size_t N = nn + dd;
  const ContextPtr Mc = manifold_context(n, d);
  const ContextPtr amb = ambient_context(n, d);
  const ContextPtr C = complexified_context(n, d);

  for (unsigned attempt = 0; attempt < spec.max_retries; ++attempt) {
    const std::uint64_t seed = derive_seed(spec.seed, attempt);
    SeededRng rng(seed);

    SeriesVec Qt;
    const Gaussian two_i(Rational(0), Rational(2));
    for (std::size_t j = 0; j < dd; ++j) {
      TruncatedSeries tau = TruncatedSeries::variable(Mc, 2 * nn + j, K);
      Qt.push_back(tau + two_i * random_hermitian(rng, Mc, nn, K, 4));
    }
    ManifoldPtr target;
    try {
      target = FormalGenericSubmanifold::create(n, d, Qt);
    } catch (const InputRejected&) {
      continue;
    }

    SeriesVec F, G;
    const bool identity = rng.uniform(0, 7) == 0;
    for (std::size_t r = 0; r < N; ++r) {
      TruncatedSeries h = identity ? TruncatedSeries::variable(amb, r, K) : random_polynomial(rng, amb, K, 3);
      if (!identity) {
        // Linear part: z-rows may be degenerate, the w-block of G is drawn
        // until invertible below.
        for (std::size_t c = 0; c < N; ++c) {
          if (r < nn && rng.uniform(0, 2) == 0) continue;
          if (r >= nn && c < nn && rng.uniform(0, 1) == 0) continue;
          const Gaussian g = small_gaussian(rng, 1);
          if (!g.is_zero()) h.add_term(Monomial::unit(c), g);
        }
      }
      (r < nn ? F : G).push_back(h);
    }
    GaussMatrix Gw(dd, dd);
    for (std::size_t r = 0; r < dd; ++r)
      for (std::size_t c = 0; c < dd; ++c) Gw(r, c) = G[r].coefficient(Monomial::unit(nn + c));
    if (determinant(Gw).is_zero()) continue;

    // rho(Z, zeta) = G(Z) - Qt(F(Z), Fbar(zeta), Gbar(zeta)).
    const auto prefix = range(0, N);
    const auto bar = range(N, N);
    SeriesVec args = embed(F, C, prefix);
    for (auto& s : embed(conjugate(F), C, bar)) args.push_back(s);
    for (auto& s : embed(conjugate(G), C, bar)) args.push_back(s);
    const SeriesVec rhs = compose(Qt, args);
    const SeriesVec GC = embed(G, C, prefix);
    SeriesVec rho;
    for (std::size_t j = 0; j < dd; ++j) rho.push_back(GC[j] - rhs[j]);

    Normalization norm;
    try {
      norm = normalize(n, d, graph_solve(n, d, rho).Q0);
    } catch (const PreconditionError&) {
      continue;
    } catch (const InputRejected&) {
      continue;
    }
    SeriesVec sub;
    for (std::size_t i = 0; i < nn; ++i) sub.push_back(TruncatedSeries::variable(amb, i, K));
    for (auto& s : norm.inverse_change) sub.push_back(s);
    GeneratedTriple out;
    out.pair = attach(norm.manifold, target, compose(F, sub), compose(G, sub));
    if (!out.pair.maps_into.is_true())
      throw InternalInconsistency("generated pullback does not map into its target: " + out.pair.maps_into.evidence);
    out.seed_used = seed;
    out.attempts = attempt + 1;
    return out;
  }
  throw PreconditionError("generate_audit_triple: no valid triple after " + std::to_string(spec.max_retries) +
                          " attempts");
}

}  // namespace formalcr
