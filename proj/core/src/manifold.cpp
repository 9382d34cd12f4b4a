#include "formalcr/manifold.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "formalcr/errors.hpp"
#include "formalcr/linalg.hpp"

namespace formalcr {

namespace {

// Manifold context layout: z (0..n-1), zb (n..2n-1), wb (2n..2n+d-1).
// Complexified layout: z (0..n-1), w (n..N-1), zb (N..N+n-1), wb (N+n..2N-1).

int precision_of(const SeriesVec& v) {
  bool all_exact = true;
  int cap = 0;
  int k = std::numeric_limits<int>::max();
  for (const auto& s : v) {
    cap = std::max(cap, s.truncation());
    if (!s.exact()) {
      all_exact = false;
      k = std::min(k, s.truncation());
    }
  }
  return all_exact ? cap : k;
}

std::string first_term(const TruncatedSeries& f) {
  auto terms = f.sorted_terms();
  if (terms.empty()) return "0";
  return TruncatedSeries::monomial(f.context(), terms.front().first, terms.front().second, f.truncation())
      .to_string();
}

std::vector<std::size_t> range(std::size_t from, std::size_t count) {
  std::vector<std::size_t> v(count);
  std::iota(v.begin(), v.end(), from);
  return v;
}

SeriesVec variables_of(const ContextPtr& ctx, std::span<const std::size_t> idx, int K) {
  SeriesVec out;
  for (auto i : idx) out.push_back(TruncatedSeries::variable(ctx, i, K));
  return out;
}

// Residual verdict: vanishing jet -> true, otherwise false with a witness.
Verdict residual_verdict(const SeriesVec& residual, const std::string& what) {
  for (std::size_t j = 0; j < residual.size(); ++j) {
    if (!residual[j].is_zero()) {
      return Verdict::no(what + " residual has term " + first_term(residual[j]) + " in component " +
                         std::to_string(j + 1));
    }
  }
  const bool exact = std::all_of(residual.begin(), residual.end(), [](const auto& s) { return s.exact(); });
  if (exact) return Verdict::yes(what + " residual vanishes identically");
  return Verdict::yes(what + " residual vanishes through degree " + std::to_string(precision_of(residual)));
}

// Embeds the conjugate of Q (over the manifold context) into the
// complexified context as Qbar(chi, z, w).
SeriesVec qbar_chi_z_w(int n, int d, const SeriesVec& Q, const ContextPtr& C) {
  const std::size_t N = static_cast<std::size_t>(n + d);
  std::vector<std::size_t> map(static_cast<std::size_t>(2 * n + d));
  for (int i = 0; i < n; ++i) {
    map[static_cast<std::size_t>(i)] = N + static_cast<std::size_t>(i);  // z slot <- zb
    map[static_cast<std::size_t>(n + i)] = static_cast<std::size_t>(i);  // zb slot <- z
  }
  for (int j = 0; j < d; ++j) map[static_cast<std::size_t>(2 * n + j)] = static_cast<std::size_t>(n + j);
  return embed(conjugate(Q), C, map);
}

}  // namespace

// ---- verification ----------------------------------------------------------

Verdict verify_reality(int n, int d, const SeriesVec& Q) {
  const ContextPtr C = complexified_context(n, d);
  const int K = precision_of(Q);
  const std::size_t N = static_cast<std::size_t>(n + d);
  SeriesVec qbar = qbar_chi_z_w(n, d, Q, C);
  SeriesVec sub;
  for (int i = 0; i < n; ++i) sub.push_back(TruncatedSeries::variable(C, static_cast<std::size_t>(i), K));
  for (int i = 0; i < n; ++i) sub.push_back(TruncatedSeries::variable(C, N + static_cast<std::size_t>(i), K));
  for (int j = 0; j < d; ++j) sub.push_back(qbar[static_cast<std::size_t>(j)]);
  SeriesVec residual;
  for (int j = 0; j < d; ++j) {
    residual.push_back(compose(Q[static_cast<std::size_t>(j)], sub) -
                       TruncatedSeries::variable(C, static_cast<std::size_t>(n + j), K));
  }
  return residual_verdict(residual, "reality");
}

Verdict verify_normal_form(int n, int d, const SeriesVec& Q) {
  const auto zs = range(0, static_cast<std::size_t>(n));
  const auto chis = range(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  SeriesVec residual;
  for (int j = 0; j < d; ++j) {
    const auto& q = Q[static_cast<std::size_t>(j)];
    const auto tau = TruncatedSeries::variable(q.context(), static_cast<std::size_t>(2 * n + j), q.truncation());
    residual.push_back(set_to_zero(q, zs) - tau);
    residual.push_back(set_to_zero(q, chis) - tau);
  }
  return residual_verdict(residual, "normality");
}

// ---- FormalGenericSubmanifold ----------------------------------------------

FormalGenericSubmanifold::FormalGenericSubmanifold(int n, int d, SeriesVec Q)
    : n_(n), d_(d), Q_(std::move(Q)), ctx_(manifold_context(n, d)) {
  if (n < 0 || d < 1) throw StructuralError("manifold needs n >= 0 and d >= 1");
  if (static_cast<int>(Q_.size()) != d) throw StructuralError("Q must have d components");
  for (auto& q : Q_) {
    if (!same_context(q.context(), ctx_)) throw StructuralError("Q must live in the (z, zb, wb) context");
    if (!q.constant_term().is_zero()) throw InputRejected("Q(0) != 0");
  }
  truncation_ = precision_of(Q_);
  reality_ = verify_reality(n, d, Q_);
  normality_ = verify_normal_form(n, d, Q_);
}

ManifoldPtr FormalGenericSubmanifold::create(int n, int d, SeriesVec Q) {
  auto m = std::make_shared<FormalGenericSubmanifold>(n, d, std::move(Q));
  if (m->reality_.is_false()) throw InputRejected("not a formal real submanifold: " + m->reality_.evidence);
  if (m->normality_.is_false()) throw InputRejected("not in normal coordinates: " + m->normality_.evidence);
  return m;
}

bool FormalGenericSubmanifold::exact() const {
  return std::all_of(Q_.begin(), Q_.end(), [](const auto& q) { return q.exact(); });
}

const SegreMapping& FormalGenericSubmanifold::segre(int k) const {
  if (k < 1 || k > segre_bound())
    throw PreconditionError("Segre mapping index " + std::to_string(k) + " outside 1.." +
                            std::to_string(segre_bound()));
  std::lock_guard<std::mutex> lock(segre_mutex_);
  if (auto it = segre_cache_.find(k); it != segre_cache_.end()) return *it->second;

  int start = 1;
  for (int j = k - 1; j >= 1; --j) {
    if (segre_cache_.count(j)) {
      start = j + 1;
      break;
    }
  }
  const std::size_t n = static_cast<std::size_t>(n_);
  for (int j = start; j <= k; ++j) {
    auto S = std::make_shared<SegreMapping>();
    S->k = j;
    S->context = segre_context(n_, j);
    const int K = truncation_;
    if (j == 1) {
      for (int c = 0; c < d_; ++c) S->u.push_back(TruncatedSeries::zero(S->context, K));
    } else {
      const SegreMapping& prev = *segre_cache_.at(j - 1);
      const auto prefix = range(0, prev.context->size());
      SeriesVec ubar = embed(conjugate(prev.u), S->context, prefix);
      SeriesVec sub;
      for (std::size_t i = 0; i < n; ++i)
        sub.push_back(TruncatedSeries::variable(S->context, (j - 1) * n + i, K));
      for (std::size_t i = 0; i < n; ++i)
        sub.push_back(TruncatedSeries::variable(S->context, (j - 2) * n + i, K));
      for (auto& s : ubar) sub.push_back(s);
      S->u = compose(Q_, sub);
    }
    for (std::size_t i = 0; i < n; ++i)
      S->v.push_back(TruncatedSeries::variable(S->context, (j - 1) * n + i, truncation_));
    for (auto& s : S->u) S->v.push_back(s);
    segre_cache_[j] = std::move(S);
  }
  return *segre_cache_.at(k);
}

// ---- graph solving ---------------------------------------------------------

GraphSolution graph_solve(int n, int d, const SeriesVec& rho) {
  std::vector<std::size_t> split;
  for (int j = 0; j < d; ++j) split.push_back(static_cast<std::size_t>(n + j));
  return graph_solve(n, d, rho, split);
}

GraphSolution graph_solve(int n, int d, const SeriesVec& rho0, const std::vector<std::size_t>& split) {
  const std::size_t N = static_cast<std::size_t>(n + d);
  const ContextPtr C = complexified_context(n, d);
  if (static_cast<int>(rho0.size()) != d) throw StructuralError("graph_solve: need d defining series");
  for (const auto& r : rho0)
    if (!same_context(r.context(), C)) throw StructuralError("graph_solve: rho must live in (z, w, zb, wb)");
  if (static_cast<int>(split.size()) != d) throw StructuralError("graph_solve: split must name d variables");
  std::vector<bool> chosen(N, false);
  for (auto s : split) {
    if (s >= N || chosen[s]) throw StructuralError("graph_solve: invalid split");
    chosen[s] = true;
  }
  GraphSolution sol;
  for (std::size_t i = 0; i < N; ++i)
    if (!chosen[i]) sol.order.push_back(i);
  for (auto s : split) sol.order.push_back(s);
  std::vector<std::size_t> map(2 * N);
  for (std::size_t p = 0; p < N; ++p) {
    map[sol.order[p]] = p;
    map[N + sol.order[p]] = N + p;
  }
  const SeriesVec rho = embed(rho0, C, map);
  for (const auto& r : rho)
    if (!r.constant_term().is_zero()) throw PreconditionError("graph_solve: rho(0) != 0");

  const std::size_t dd = static_cast<std::size_t>(d);
  GaussMatrix A(dd, dd);
  for (std::size_t r = 0; r < dd; ++r)
    for (std::size_t c = 0; c < dd; ++c) A(r, c) = rho[r].coefficient(Monomial::unit(static_cast<std::size_t>(n) + c));
  auto Ainv = inverse(A);
  if (!Ainv) {
    throw PreconditionError("graph_solve: d rho/dw (0) has rank " + std::to_string(rank(A)) + " < " +
                            std::to_string(d) + "; choose a different wSplit");
  }

  const ContextPtr Mc = manifold_context(n, d);
  const int K = precision_of(rho);
  SeriesVec W(dd, TruncatedSeries::zero(Mc, K));
  auto residual = [&]() {
    SeriesVec sub;
    for (int i = 0; i < n; ++i) sub.push_back(TruncatedSeries::variable(Mc, static_cast<std::size_t>(i), K));
    for (auto& w : W) sub.push_back(w);
    for (int i = 0; i < n + d; ++i)
      sub.push_back(TruncatedSeries::variable(Mc, static_cast<std::size_t>(n + i), K));
    return compose(rho, sub);
  };
  // Graded phase: W is right through degree p-1 before step p.
  for (int p = 1; p <= K; ++p) {
    SeriesVec sub;
    for (int i = 0; i < n; ++i) sub.push_back(TruncatedSeries::variable(Mc, static_cast<std::size_t>(i), p));
    for (auto& w : W) sub.push_back(w.truncated(p));
    for (int i = 0; i < n + d; ++i)
      sub.push_back(TruncatedSeries::variable(Mc, static_cast<std::size_t>(n + i), p));
    SeriesVec R;
    for (const auto& r : rho) R.push_back(compose(r.truncated(p), sub));
    for (std::size_t r = 0; r < dd; ++r) {
      TruncatedSeries s = W[r];
      for (std::size_t c = 0; c < dd; ++c) {
        if ((*Ainv)(r, c).is_zero()) continue;
        TruncatedSeries corr = (*Ainv)(r, c) * R[c];
        corr.set_exact(true);
        s = s - corr.truncated(K);
      }
      W[r] = s.truncated(K);
    }
  }
  for (int iter = 0; iter <= K + 1; ++iter) {
    SeriesVec R = residual();
    if (std::all_of(R.begin(), R.end(), [](const auto& s) { return s.is_zero(); })) {
      const bool exact = std::all_of(R.begin(), R.end(), [](const auto& s) { return s.exact(); }) &&
                         std::all_of(W.begin(), W.end(), [](const auto& s) { return s.exact(); });
      for (auto& w : W) w.set_exact(exact);
      sol.Q0 = W;
      return sol;
    }
    SeriesVec next;
    for (std::size_t r = 0; r < dd; ++r) {
      TruncatedSeries s = W[r];
      for (std::size_t c = 0; c < dd; ++c)
        if (!(*Ainv)(r, c).is_zero()) s = s - (*Ainv)(r, c) * R[c];
      next.push_back(s.truncated(K));
    }
    W = std::move(next);
  }
  throw InternalInconsistency("graph_solve: Newton iteration did not converge within the truncation");
}

// ---- normalization ---------------------------------------------------------

Normalization normalize(int n, int d, const SeriesVec& Q0) {
  const ContextPtr Mc = manifold_context(n, d);
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t dd = static_cast<std::size_t>(d);
  if (Q0.size() != dd) throw StructuralError("normalize: Q must have d components");
  for (const auto& q : Q0) {
    if (!same_context(q.context(), Mc)) throw StructuralError("normalize: Q must live in (z, zb, wb)");
    if (!q.constant_term().is_zero()) throw InputRejected("normalize: Q(0) != 0");
  }
  const Verdict real = verify_reality(n, d, Q0);
  if (real.is_false()) throw InputRejected("not a formal real submanifold: " + real.evidence);

  const ContextPtr amb = ambient_context(n, d);
  const int K = precision_of(Q0);
  Normalization out;
  if (verify_normal_form(n, d, Q0).is_true()) {
    out.manifold = FormalGenericSubmanifold::create(n, d, Q0);
    for (std::size_t j = 0; j < dd; ++j) {
      out.change.push_back(TruncatedSeries::variable(amb, nn + j, K));
      out.inverse_change.push_back(TruncatedSeries::variable(amb, nn + j, K));
    }
    out.was_normal = true;
    return out;
  }

  // Step 1: a holomorphic change w = psi(w') making Q(0, 0, u) = u.
  // phi(u) = Q0(0, 0, u) is an involution up to conjugation (phi o phibar =
  // id), and psi is the fixed point of psi -> (psi + phi o psibar) / 2.
  std::vector<std::string> unames;
  for (int j = 1; j <= d; ++j) unames.push_back("u" + std::to_string(j));
  const ContextPtr U = make_context(unames);
  const auto zchi = range(0, 2 * nn);
  std::vector<std::size_t> wb_to_u(2 * nn + dd, 0);
  for (std::size_t j = 0; j < dd; ++j) wb_to_u[2 * nn + j] = j;
  SeriesVec phi;
  for (const auto& q : Q0) phi.push_back(embed(set_to_zero(q, zchi), U, wb_to_u));

  GaussMatrix Phi(dd, dd);
  for (std::size_t r = 0; r < dd; ++r)
    for (std::size_t c = 0; c < dd; ++c) Phi(r, c) = phi[r].coefficient(Monomial::unit(c));

  std::optional<Gaussian> cpick;
  for (long k = 0; k <= 2 * d + 1 && !cpick; ++k) {
    const Gaussian c(Rational(1), Rational(k));
    GaussMatrix L(dd, dd);
    for (std::size_t r = 0; r < dd; ++r)
      for (std::size_t s = 0; s < dd; ++s) L(r, s) = c.conj() * Phi(r, s) + (r == s ? c : Gaussian(0));
    if (!determinant(L).is_zero()) cpick = c;
  }
  if (!cpick) throw InputRejected("normalize: the tau-linear part of Q(0,0,tau) is degenerate");

  const Gaussian half(Rational(1, 2));
  SeriesVec psi;
  {
    SeriesVec scaled;
    for (std::size_t j = 0; j < dd; ++j) scaled.push_back(cpick->conj() * TruncatedSeries::variable(U, j, K));
    SeriesVec phic = compose(phi, scaled);
    for (std::size_t j = 0; j < dd; ++j)
      psi.push_back((half * ((*cpick) * TruncatedSeries::variable(U, j, K) + phic[j])).truncated(K));
  }
  for (int iter = 0; iter <= K + 1; ++iter) {
    SeriesVec t = compose(phi, conjugate(psi));
    bool fixed = true;
    for (std::size_t j = 0; j < dd; ++j)
      if (!(t[j] - psi[j]).is_zero()) fixed = false;
    if (fixed) break;
    for (std::size_t j = 0; j < dd; ++j) psi[j] = (half * (psi[j] + t[j])).truncated(K);
  }
  const auto uidx = range(0, dd);
  SeriesVec psi_inv = reverse(psi, uidx);

  // Q1(z, chi, tau') = psi^{-1}(Q0(z, chi, psibar(tau'))).
  std::vector<std::size_t> u_to_wb(dd);
  for (std::size_t j = 0; j < dd; ++j) u_to_wb[j] = 2 * nn + j;
  SeriesVec sub = variables_of(Mc, zchi, K);
  for (auto& s : embed(conjugate(psi), Mc, u_to_wb)) sub.push_back(s);
  SeriesVec Q1 = compose(psi_inv, compose(Q0, sub));

  // Step 2: w'' = g(z, w') where g(z, .) inverts u -> Q1(z, 0, u).
  const auto chis = range(nn, nn);
  std::vector<std::size_t> m_to_amb(2 * nn + dd);
  for (std::size_t i = 0; i < nn; ++i) {
    m_to_amb[i] = i;
    m_to_amb[nn + i] = i;  // unused: chi terms are dropped first
  }
  for (std::size_t j = 0; j < dd; ++j) m_to_amb[2 * nn + j] = nn + j;
  SeriesVec h;
  for (const auto& q : Q1) h.push_back(embed(set_to_zero(q, chis), amb, m_to_amb));
  const auto widx = range(nn, dd);
  SeriesVec g = reverse(h, widx);

  // Q(z, chi, tau) = g(z, Q1(z, chi, Q1bar(chi, 0, tau))).
  std::vector<std::size_t> swap_map(2 * nn + dd);
  for (std::size_t i = 0; i < nn; ++i) {
    swap_map[i] = nn + i;
    swap_map[nn + i] = i;
  }
  for (std::size_t j = 0; j < dd; ++j) swap_map[2 * nn + j] = 2 * nn + j;
  SeriesVec S;
  for (const auto& q : conjugate(Q1)) S.push_back(embed(set_to_zero(q, chis), Mc, swap_map));
  SeriesVec sub2 = variables_of(Mc, zchi, K);
  for (auto& s : S) sub2.push_back(s);
  SeriesVec inner = compose(Q1, sub2);
  SeriesVec sub3 = variables_of(Mc, range(0, nn), K);
  for (auto& s : inner) sub3.push_back(s);
  SeriesVec Q = compose(g, sub3);

  const Verdict normal = verify_normal_form(n, d, Q);
  if (!normal.is_true()) throw InternalInconsistency("normalize: result is not normal: " + normal.evidence);
  out.manifold = FormalGenericSubmanifold::create(n, d, Q);

  // change: w' = g(z, psi^{-1}(w)); inverse: w = psi(h(z, w')).
  std::vector<std::size_t> u_to_w(dd);
  for (std::size_t j = 0; j < dd; ++j) u_to_w[j] = nn + j;
  SeriesVec sub4 = variables_of(amb, range(0, nn), K);
  for (auto& s : embed(psi_inv, amb, u_to_w)) sub4.push_back(s);
  out.change = compose(g, sub4);
  out.inverse_change = compose(psi, h);
  return out;
}

// ---- finite type -----------------------------------------------------------

TruncatedSeries restrict_to_W(const TruncatedSeries& f, int n, int m, const ContextPtr& target) {
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t mm = static_cast<std::size_t>(m);
  const auto last = range((2 * mm - 1) * nn, nn);
  TruncatedSeries g = set_to_zero(f, last);
  std::vector<std::size_t> map(2 * mm * nn, 0);
  for (std::size_t b = 1; b <= 2 * mm - 1; ++b) {
    const std::size_t tb = b <= mm ? b : 2 * mm - b;
    for (std::size_t i = 0; i < nn; ++i) map[(b - 1) * nn + i] = (tb - 1) * nn + i;
  }
  return embed(g, target, map);
}

Verdict segre_vanishes_on_W(const FormalGenericSubmanifold& M, int m) {
  const SegreMapping& S = M.segre(2 * m);
  const ContextPtr target = segre_context(M.n(), m);
  SeriesVec r;
  for (const auto& u : S.u) r.push_back(restrict_to_W(u, M.n(), m, target));
  return residual_verdict(r, "u^" + std::to_string(2 * m) + " on W");
}

FiniteTypeReport finite_type_report(const FormalGenericSubmanifold& M, const RankPolicy& policy) {
  FiniteTypeReport rep;
  if (M.n() == 0) {
    const Verdict no = Verdict::no("CR dimension 0: there are no CR vector fields");
    rep.segre_rank = rep.u_rank = rep.restriction = rep.combined = no;
    return rep;
  }
  const int k = M.d() + 1;
  const SegreMapping& S = M.segre(k);
  const auto all = range(0, S.context->size());
  rep.segre_rank = generic_rank(jacobian(S.v, all), policy).full_rank;
  rep.u_rank = generic_rank(jacobian(S.u, all), policy).full_rank;

  const int m = M.d() + 1;
  const SegreMapping& S2 = M.segre(2 * m);
  const auto tprime = range(0, static_cast<std::size_t>((2 * m - 1) * M.n()));
  const SeriesMatrix J = jacobian(S2.u, tprime);
  const ContextPtr target = segre_context(M.n(), m);
  std::vector<TruncatedSeries> entries;
  for (std::size_t r = 0; r < J.rows(); ++r)
    for (std::size_t c = 0; c < J.cols(); ++c) entries.push_back(restrict_to_W(J(r, c), M.n(), m, target));
  rep.restriction = generic_rank(SeriesMatrix(J.rows(), J.cols(), std::move(entries)), policy).full_rank;

  const Verdict* all3[] = {&rep.segre_rank, &rep.u_rank, &rep.restriction};
  bool any_true = false, any_false = false;
  for (const Verdict* v : all3) {
    any_true |= v->is_true();
    any_false |= v->is_false();
  }
  if (any_true && any_false) {
    throw InternalInconsistency("finite type criteria disagree: Rk v = " + to_string(rep.segre_rank.value) +
                                ", Rk u = " + to_string(rep.u_rank.value) +
                                ", restriction = " + to_string(rep.restriction.value));
  }
  if (any_true) {
    rep.combined = Verdict::yes("Rk v^" + std::to_string(k) + " = " + std::to_string(M.N()) + ": " +
                                rep.segre_rank.evidence);
  } else if (any_false) {
    rep.combined = Verdict::no("all " + std::to_string(M.N()) + "-minors of dv^" + std::to_string(k) +
                               "/dt vanish identically");
  } else {
    rep.combined = Verdict::unknown("not finite type up to degree " + std::to_string(M.truncation()) +
                                    " (" + rep.segre_rank.evidence + ")");
  }
  rep.combined.seed = policy.seed;
  return rep;
}

Verdict is_finite_type(const FormalGenericSubmanifold& M, const RankPolicy& policy) {
  return finite_type_report(M, policy).combined;
}

// ---- essential type --------------------------------------------------------

CodimensionResult essential_type(const FormalGenericSubmanifold& M, unsigned cutoff) {
  const std::size_t nn = static_cast<std::size_t>(M.n());
  std::vector<VariableInfo> vars;
  for (std::size_t i = 1; i <= nn; ++i) vars.push_back({"zb" + std::to_string(i), VariableRole::Chi, 0});
  const ContextPtr X = make_context(std::move(vars));

  // q^j_alpha(chi): coefficient of z^alpha in Q_j(z, chi, 0).
  std::map<std::pair<std::size_t, std::vector<unsigned>>, TruncatedSeries> gens;
  for (std::size_t j = 0; j < M.Q().size(); ++j) {
    const auto& q = M.Q()[j];
    for (const auto& [m, c] : q.terms()) {
      bool has_tau = false;
      for (std::size_t t = 0; t < static_cast<std::size_t>(M.d()); ++t)
        if (m[2 * nn + t] > 0) has_tau = true;
      if (has_tau) continue;
      std::vector<unsigned> alpha(nn);
      unsigned adeg = 0;
      Monomial chi;
      for (std::size_t i = 0; i < nn; ++i) {
        alpha[i] = m[i];
        adeg += m[i];
        if (m[nn + i] > 0) chi.set(i, m[nn + i]);
      }
      if (adeg == 0) continue;
      const int K = q.exact() ? q.truncation() : q.truncation() - static_cast<int>(adeg);
      auto key = std::make_pair(j, alpha);
      auto it = gens.find(key);
      if (it == gens.end()) it = gens.emplace(key, TruncatedSeries(X, K, q.exact())).first;
      it->second.add_term(chi, c);
    }
  }
  std::vector<TruncatedSeries> all;
  for (auto& [key, g] : gens) all.push_back(g);

  if (M.exact()) return codimension(IdealPresentation(X, all), cutoff);

  // Only generators known through degree D-1 may be used at degree D; the
  // generator set is then a truncation of the true one, so the value found
  // is an upper bound unless it is 1.
  for (unsigned D = 1; D <= cutoff; ++D) {
    std::vector<TruncatedSeries> usable;
    for (const auto& g : all)
      if (g.exact() || g.truncation() + 1 >= static_cast<int>(D)) usable.push_back(g);
    CodimensionResult r = codimension(IdealPresentation(X, usable), D, D);
    if (r.finite()) {
      r.cutoff_used = cutoff;
      r.value_is_exact = r.dimension == 1;
      return r;
    }
  }
  CodimensionResult r;
  r.cutoff_used = cutoff;
  return r;
}

Verdict essentially_finite(const CodimensionResult& ess) {
  if (ess.finite()) {
    return Verdict::yes(std::string("Ess_0 ") + (ess.value_is_exact ? "= " : "<= ") +
                        std::to_string(ess.dimension) + " (certified at degree " +
                        std::to_string(ess.certificate_degree) + ")");
  }
  if (ess.infinite_certified) return Verdict::no("essential ideal has infinite codimension: " + ess.infinite_witness);
  return Verdict::unknown("essential ideal not of finite codimension up to degree " +
                          std::to_string(ess.cutoff_used));
}

// ---- finite nondegeneracy --------------------------------------------------

NondegeneracyResult is_finitely_nondegenerate(const FormalGenericSubmanifold& M, int max_order) {
  NondegeneracyResult res;
  const std::size_t nn = static_cast<std::size_t>(M.n());
  const std::size_t dd = static_cast<std::size_t>(M.d());
  const std::size_t N = nn + dd;
  if (!M.exact() && max_order >= M.truncation())
    throw PreconditionError("finite nondegeneracy: order " + std::to_string(max_order) +
                            " needs truncation > order (have " + std::to_string(M.truncation()) + ")");

  // Vectors d_chi^alpha r_j (0): the z-part is -alpha! * coeff of z_i chi^alpha
  // in Q_j; alpha = 0 also contributes e_j in the w-part.
  std::map<unsigned, std::vector<GaussRow>> by_order;
  unsigned max_chi_degree = 0;
  for (std::size_t j = 0; j < dd; ++j) {
    GaussRow base(N);
    base[nn + j] = Gaussian(1);
    by_order[0].push_back(base);
    std::map<std::vector<unsigned>, GaussRow> rows;
    for (const auto& [m, c] : M.Q()[j].terms()) {
      unsigned zdeg = 0;
      std::size_t zi = 0;
      bool has_tau = false;
      for (std::size_t i = 0; i < nn; ++i) {
        zdeg += m[i];
        if (m[i] > 0) zi = i;
      }
      for (std::size_t t = 0; t < dd; ++t)
        if (m[2 * nn + t] > 0) has_tau = true;
      if (zdeg != 1 || has_tau) continue;
      std::vector<unsigned> alpha(nn);
      Rational fact(1);
      for (std::size_t i = 0; i < nn; ++i) {
        alpha[i] = m[nn + i];
        for (unsigned e = 2; e <= alpha[i]; ++e) fact *= e;
      }
      auto& row = rows.try_emplace(alpha, GaussRow(N)).first->second;
      row[zi] -= Gaussian(fact) * c;
    }
    for (auto& [alpha, row] : rows) {
      const unsigned deg = std::accumulate(alpha.begin(), alpha.end(), 0u);
      max_chi_degree = std::max(max_chi_degree, deg);
      by_order[deg].push_back(row);
    }
  }
  std::vector<GaussRow> span;
  for (int k = 0; k <= max_order; ++k) {
    auto it = by_order.find(static_cast<unsigned>(k));
    if (it != by_order.end()) span.insert(span.end(), it->second.begin(), it->second.end());
    if (rank(GaussMatrix::from_rows(span, N)) == N) {
      res.order = k;
      res.verdict = Verdict::yes("derivatives of order <= " + std::to_string(k) + " span C^" + std::to_string(N));
      return res;
    }
  }
  const std::size_t r = span.empty() ? 0 : rank(GaussMatrix::from_rows(span, N));
  if (M.exact() && static_cast<unsigned>(max_order) >= max_chi_degree) {
    res.verdict = Verdict::no("span has rank " + std::to_string(r) + " < " + std::to_string(N) +
                              " and Q has no further z-linear terms");
  } else {
    res.verdict = Verdict::unknown("not finitely nondegenerate up to order " + std::to_string(max_order) +
                                   " (rank " + std::to_string(r) + ")");
  }
  return res;
}

}  // namespace formalcr
