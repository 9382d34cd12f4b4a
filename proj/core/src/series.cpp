#include "formalcr/series.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>

#include "formalcr/errors.hpp"
#include "formalcr/linalg.hpp"

namespace formalcr {

namespace {

struct Precision {
  int truncation;
  bool exact;
};

// Exact operands are polynomials known in full, so only inexact operands
// limit the truncation of a result.
Precision combine(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.exact() && b.exact()) return {std::max(a.truncation(), b.truncation()), true};
  if (a.exact()) return {b.truncation(), false};
  if (b.exact()) return {a.truncation(), false};
  return {std::min(a.truncation(), b.truncation()), false};
}

void require_same_context(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (!same_context(a.context(), b.context()))
    throw StructuralError("series live in different variable contexts");
}

void accumulate(TruncatedSeries::TermMap& into, const Monomial& m, const Gaussian& c) {
  auto [it, inserted] = into.try_emplace(m, c);
  if (!inserted) it->second += c;
}

void prune(TruncatedSeries::TermMap& terms) {
  for (auto it = terms.begin(); it != terms.end();) {
    if (it->second.is_zero())
      it = terms.erase(it);
    else
      ++it;
  }
}

// Product truncated at degree K. Sets `dropped` when some product term of
// degree > K was discarded.
TruncatedSeries::TermMap product_terms(const TruncatedSeries& a, const TruncatedSeries& b, int K,
                                       bool& dropped) {
  TruncatedSeries::TermMap out;
  dropped = false;
  if (a.is_zero() || b.is_zero() || K < 0) {
    if (K < 0 && !a.is_zero() && !b.is_zero()) dropped = true;
    return out;
  }
  std::vector<std::vector<std::pair<Monomial, const Gaussian*>>> by_degree;
  for (const auto& [m, c] : b.terms()) {
    const unsigned d = m.degree();
    if (by_degree.size() <= d) by_degree.resize(d + 1);
    by_degree[d].emplace_back(m, &c);
  }
  const unsigned bmin = *b.order();
  for (const auto& [ma, ca] : a.terms()) {
    const int da = static_cast<int>(ma.degree());
    const int budget = K - da;
    if (budget < static_cast<int>(bmin)) {
      dropped = true;
      continue;
    }
    const std::size_t top = std::min<std::size_t>(by_degree.size() - 1, static_cast<std::size_t>(budget));
    if (top + 1 < by_degree.size()) dropped = true;
    for (std::size_t d = bmin; d <= top; ++d) {
      for (const auto& [mb, cb] : by_degree[d]) {
        auto [it, inserted] = out.try_emplace(ma * mb);
        it->second.add_product(ca, *cb);
      }
    }
  }
  prune(out);
  return out;
}

}  // namespace

// ---- TruncatedSeries -------------------------------------------------------

TruncatedSeries::TruncatedSeries(ContextPtr ctx, int truncation, bool exact)
    : ctx_(std::move(ctx)), truncation_(truncation), exact_(exact) {
  if (!ctx_) throw StructuralError("series without a variable context");
  if (truncation_ < -1) throw PreconditionError("truncation must be >= -1");
}

TruncatedSeries TruncatedSeries::zero(ContextPtr ctx, int truncation, bool exact) {
  return TruncatedSeries(std::move(ctx), truncation, exact);
}

TruncatedSeries TruncatedSeries::constant(ContextPtr ctx, const Gaussian& c, int truncation) {
  TruncatedSeries s(std::move(ctx), truncation, true);
  s.add_term(Monomial{}, c);
  return s;
}

TruncatedSeries TruncatedSeries::variable(ContextPtr ctx, std::size_t index, int truncation) {
  if (index >= ctx->size()) throw StructuralError("variable index out of range");
  TruncatedSeries s(std::move(ctx), truncation, true);
  s.add_term(Monomial::unit(index), Gaussian(1));
  return s;
}

TruncatedSeries TruncatedSeries::variable(ContextPtr ctx, std::string_view name, int truncation) {
  const std::size_t i = ctx->index_of(name);
  return variable(std::move(ctx), i, truncation);
}

TruncatedSeries TruncatedSeries::monomial(ContextPtr ctx, const Monomial& m, const Gaussian& c,
                                          int truncation) {
  TruncatedSeries s(std::move(ctx), truncation, true);
  s.add_term(m, c);
  return s;
}

std::optional<unsigned> TruncatedSeries::order() const {
  std::optional<unsigned> best;
  for (const auto& [m, c] : terms_) {
    const unsigned d = m.degree();
    if (!best || d < *best) best = d;
  }
  return best;
}

std::optional<unsigned> TruncatedSeries::order_lower_bound() const {
  if (auto o = order()) return o;
  if (exact_) return std::nullopt;
  return static_cast<unsigned>(truncation_ + 1);
}

unsigned TruncatedSeries::max_degree() const {
  unsigned best = 0;
  for (const auto& [m, c] : terms_) best = std::max(best, m.degree());
  return best;
}

Gaussian TruncatedSeries::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Gaussian(0) : it->second;
}

std::vector<std::pair<Monomial, Gaussian>> TruncatedSeries::sorted_terms() const {
  std::vector<std::pair<Monomial, Gaussian>> out(terms_.begin(), terms_.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return PrintOrder{}(a.first, b.first); });
  return out;
}

std::string TruncatedSeries::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : sorted_terms()) {
    std::string piece;
    if (m.is_one()) {
      piece = c.to_string();
    } else if (c.is_one()) {
      piece = m.to_string(*ctx_);
    } else if (c == Gaussian(-1)) {
      piece = "-" + m.to_string(*ctx_);
    } else {
      piece = c.to_string() + "*" + m.to_string(*ctx_);
    }
    if (first) {
      out = piece;
      first = false;
    } else if (piece.front() == '-') {
      out += " - " + piece.substr(1);
    } else {
      out += " + " + piece;
    }
  }
  return out;
}

void TruncatedSeries::add_term(const Monomial& m, const Gaussian& c) {
  if (c.is_zero()) return;
  if (static_cast<int>(m.degree()) > truncation_) {
    exact_ = false;
    return;
  }
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

TruncatedSeries TruncatedSeries::truncated(int truncation) const {
  if (truncation >= truncation_) {
    TruncatedSeries s = *this;
    if (exact_) s.truncation_ = truncation;
    return s;
  }
  TruncatedSeries s(ctx_, truncation, exact_);
  for (const auto& [m, c] : terms_) s.add_term(m, c);
  return s;
}

bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
  return same_context(a.ctx_, b.ctx_) && a.truncation_ == b.truncation_ && a.exact_ == b.exact_ &&
         a.terms_ == b.terms_;
}

bool TruncatedSeries::same_terms(const TruncatedSeries& other) const { return terms_ == other.terms_; }

// ---- SeriesMatrix ----------------------------------------------------------

SeriesMatrix::SeriesMatrix(ContextPtr ctx, std::size_t rows, std::size_t cols, int truncation)
    : ctx_(ctx), rows_(rows), cols_(cols) {
  entries_.reserve(rows * cols);
  for (std::size_t i = 0; i < rows * cols; ++i) entries_.emplace_back(ctx, truncation, true);
}

SeriesMatrix::SeriesMatrix(std::size_t rows, std::size_t cols, std::vector<TruncatedSeries> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) throw StructuralError("matrix entry count does not match shape");
  if (entries_.empty()) throw StructuralError("empty series matrix needs an explicit context");
  ctx_ = entries_.front().context();
  for (const auto& e : entries_)
    if (!same_context(e.context(), ctx_)) throw StructuralError("matrix entries in different contexts");
}

SeriesMatrix SeriesMatrix::submatrix(std::span<const std::size_t> rows,
                                     std::span<const std::size_t> cols) const {
  std::vector<TruncatedSeries> e;
  e.reserve(rows.size() * cols.size());
  for (auto r : rows)
    for (auto c : cols) e.push_back((*this)(r, c));
  if (e.empty()) return SeriesMatrix(ctx_, rows.size(), cols.size(), 0);
  return SeriesMatrix(rows.size(), cols.size(), std::move(e));
}

bool SeriesMatrix::all_exact() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.exact(); });
}

// ---- ring operations -------------------------------------------------------

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_context(a, b);
  const Precision p = combine(a, b);
  TruncatedSeries out(a.context(), p.truncation, p.exact);
  for (const auto& [m, c] : a.terms()) out.add_term(m, c);
  for (const auto& [m, c] : b.terms()) out.add_term(m, c);
  if (!p.exact) out.set_exact(false);
  return out;
}

TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) { return add(a, b); }

TruncatedSeries operator-(const TruncatedSeries& a) {
  TruncatedSeries out(a.context(), a.truncation(), a.exact());
  for (const auto& [m, c] : a.terms()) out.add_term(m, -c);
  return out;
}

TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_context(a, b);
  const Precision p = combine(a, b);
  TruncatedSeries out(a.context(), p.truncation, p.exact);
  for (const auto& [m, c] : a.terms()) out.add_term(m, c);
  for (const auto& [m, c] : b.terms()) out.add_term(m, -c);
  if (!p.exact) out.set_exact(false);
  return out;
}

TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_context(a, b);
  // An exact zero factor annihilates whatever the other factor hides.
  if (a.is_exact_zero() || b.is_exact_zero())
    return TruncatedSeries(a.context(), std::max(a.truncation(), b.truncation()), true);
  const Precision p = combine(a, b);
  bool dropped = false;
  TruncatedSeries out(a.context(), p.truncation, p.exact && true);
  TruncatedSeries::TermMap terms = product_terms(a, b, p.truncation, dropped);
  for (auto& [m, c] : terms) out.add_term(m, c);
  if (dropped || !p.exact) out.set_exact(false);
  return out;
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) { return mul(a, b); }

TruncatedSeries operator*(const Gaussian& c, const TruncatedSeries& a) {
  if (c.is_zero()) return TruncatedSeries(a.context(), a.truncation(), true);
  TruncatedSeries out(a.context(), a.truncation(), a.exact());
  for (const auto& [m, x] : a.terms()) out.add_term(m, c * x);
  return out;
}

TruncatedSeries power(const TruncatedSeries& a, unsigned exponent) {
  TruncatedSeries result = TruncatedSeries::constant(a.context(), Gaussian(1), a.truncation());
  TruncatedSeries base = a;
  while (exponent > 0) {
    if (exponent & 1u) result = mul(result, base);
    exponent >>= 1u;
    if (exponent > 0) base = mul(base, base);
  }
  return result;
}

TruncatedSeries conjugate(const TruncatedSeries& f) {
  TruncatedSeries out(f.context(), f.truncation(), f.exact());
  for (const auto& [m, c] : f.terms()) out.add_term(m, c.conj());
  return out;
}

SeriesVec conjugate(const SeriesVec& v) {
  SeriesVec out;
  out.reserve(v.size());
  for (const auto& f : v) out.push_back(conjugate(f));
  return out;
}

TruncatedSeries differentiate(const TruncatedSeries& f, std::size_t var) {
  if (var >= f.context()->size()) throw StructuralError("differentiation variable out of range");
  const int K = f.exact() ? f.truncation() : f.truncation() - 1;
  TruncatedSeries out(f.context(), K, f.exact());
  for (const auto& [m, c] : f.terms()) {
    const unsigned e = m[var];
    if (e == 0) continue;
    Monomial q = m;
    q.set(var, e - 1);
    out.add_term(q, c * Gaussian(static_cast<long>(e)));
  }
  return out;
}

TruncatedSeries invert_unit(const TruncatedSeries& f) {
  const Gaussian c = f.constant_term();
  if (c.is_zero()) throw PreconditionError("invert_unit: constant term is zero");
  const int K = f.truncation();
  const Gaussian cinv = Gaussian(1) / c;
  // 1/f = (1/c) * sum_j (-g)^j with g = f/c - 1 of order >= 1.
  TruncatedSeries g = cinv * f;
  g.add_term(Monomial{}, Gaussian(-1));
  g = (-g).truncated(K);
  g.set_exact(false);
  TruncatedSeries sum = TruncatedSeries::constant(f.context(), Gaussian(1), K);
  sum.set_exact(false);
  TruncatedSeries term = sum;
  for (int j = 1; j <= K; ++j) {
    term = mul(term, g);
    if (term.is_zero()) break;
    sum = sum + term;
  }
  TruncatedSeries out = cinv * sum;
  out.set_exact(false);
  return out;
}

Gaussian evaluate(const TruncatedSeries& f, std::span<const Gaussian> point) {
  if (point.size() != f.context()->size()) throw StructuralError("evaluation point has wrong dimension");
  std::vector<std::vector<Gaussian>> powers(point.size(), std::vector<Gaussian>{Gaussian(1)});
  auto pw = [&](std::size_t i, unsigned e) -> const Gaussian& {
    auto& v = powers[i];
    while (v.size() <= e) v.push_back(v.back() * point[i]);
    return v[e];
  };
  Gaussian total;
  for (const auto& [m, c] : f.terms()) {
    Gaussian t = c;
    for (std::size_t i = 0; i < point.size() && !t.is_zero(); ++i)
      if (m[i] > 0) t *= pw(i, m[i]);
    total += t;
  }
  return total;
}

// ---- substitutions ---------------------------------------------------------

TruncatedSeries compose(const TruncatedSeries& f, std::span<const TruncatedSeries> sub) {
  const std::size_t nv = f.context()->size();
  if (sub.size() != nv) throw StructuralError("substitution size does not match the series context");
  if (nv == 0) throw StructuralError("cannot compose a series over an empty context");
  const ContextPtr& target = sub[0].context();
  for (const auto& s : sub)
    if (!same_context(s.context(), target)) throw StructuralError("substituted series in different contexts");

  std::vector<bool> used(nv, false);
  for (const auto& [m, c] : f.terms())
    for (std::size_t i = 0; i < nv; ++i)
      if (m[i] > 0) used[i] = true;

  // Orders of the substitutes; nullopt = identically zero.
  std::vector<std::optional<unsigned>> ord(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    ord[i] = sub[i].order_lower_bound();
    if (used[i] && !sub[i].constant_term().is_zero())
      throw PreconditionError("compose: substitute for " + f.context()->name(i) +
                              " has a nonzero constant term");
  }

  bool exact = f.exact();
  int cap = f.truncation();
  int limit = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < nv; ++i) {
    if (!used[i]) continue;
    cap = std::max(cap, sub[i].truncation());
    if (!sub[i].exact()) {
      exact = false;
      limit = std::min(limit, sub[i].truncation());
    }
  }
  if (!f.exact()) {
    // Unknown terms of f have degree > K_f; after substitution their degree
    // is at least (K_f + 1) * (smallest order among substitutes).
    std::optional<unsigned> min_ord;
    for (std::size_t i = 0; i < nv; ++i)
      if (ord[i] && (!min_ord || *ord[i] < *min_ord)) min_ord = ord[i];
    if (min_ord) {
      const long bound = static_cast<long>(f.truncation() + 1) * static_cast<long>(*min_ord) - 1;
      limit = static_cast<int>(std::min<long>(limit, bound));
    }
  }
  const int K = std::min(cap, limit);

  bool dropped_any = false;
  std::vector<std::vector<std::optional<TruncatedSeries>>> pows(nv);
  auto pw = [&](std::size_t i, unsigned e) -> const TruncatedSeries& {
    auto& v = pows[i];
    if (v.empty()) {
      v.emplace_back(TruncatedSeries::constant(target, Gaussian(1), K));
      v.emplace_back(sub[i].truncated(K));
      v[1]->set_exact(true);
    }
    while (v.size() <= e) {
      bool dropped = false;
      TruncatedSeries next(target, K, true);
      for (auto& [m, c] : product_terms(*v.back(), *v[1], K, dropped)) next.add_term(m, c);
      dropped_any |= dropped;
      v.emplace_back(std::move(next));
    }
    return *v[e];
  };

  // Horner scheme over the variables: f = sum_e x_v^e f_e(x_{v+1}, ...), so
  // terms sharing a prefix of exponents share their partial products.
  // `budget` is the largest degree that can still reach the result.
  using TermRef = const std::pair<const Monomial, Gaussian>*;
  std::function<TruncatedSeries::TermMap(std::vector<TermRef>&, std::size_t, int)> horner =
      [&](std::vector<TermRef>& terms, std::size_t v, int budget) -> TruncatedSeries::TermMap {
    TruncatedSeries::TermMap out;
    if (v == nv) {
      Gaussian sum;
      for (TermRef t : terms) sum += t->second;
      if (!sum.is_zero()) out.emplace(Monomial{}, sum);
      return out;
    }
    std::map<unsigned, std::vector<TermRef>> groups;
    for (TermRef t : terms) groups[t->first[v]].push_back(t);
    for (auto& [e, group] : groups) {
      if (e == 0) {
        for (auto& [m, c] : horner(group, v + 1, budget)) accumulate(out, m, c);
        continue;
      }
      if (!ord[v]) continue;  // substitute is identically zero
      const int cost = static_cast<int>(e * *ord[v]);
      if (cost > budget) {
        dropped_any = true;
        continue;
      }
      TruncatedSeries child(target, budget - cost, true);
      for (auto& [m, c] : horner(group, v + 1, budget - cost)) child.add_term(m, c);
      if (child.is_zero()) continue;
      bool dropped = false;
      for (auto& [m, c] : product_terms(child, pw(v, e), budget, dropped)) accumulate(out, m, c);
      dropped_any |= dropped;
    }
    prune(out);
    return out;
  };
  std::vector<TermRef> all;
  all.reserve(f.terms().size());
  for (const auto& t : f.terms()) all.push_back(&t);
  TruncatedSeries::TermMap acc = horner(all, 0, K);
  for (std::size_t i = 0; i < nv; ++i)
    if (used[i] && !sub[i].is_zero() && static_cast<int>(sub[i].max_degree()) > K) dropped_any = true;
  if (dropped_any) exact = false;
  TruncatedSeries out(target, K, true);
  for (const auto& [m, c] : acc) out.add_term(m, c);
  if (!exact) out.set_exact(false);
  return out;
}

SeriesVec compose(const SeriesVec& f, std::span<const TruncatedSeries> substitution) {
  SeriesVec out;
  out.reserve(f.size());
  for (const auto& s : f) out.push_back(compose(s, substitution));
  return out;
}

TruncatedSeries embed(const TruncatedSeries& f, const ContextPtr& target,
                      std::span<const std::size_t> index_map) {
  const std::size_t nv = f.context()->size();
  if (index_map.size() != nv) throw StructuralError("embed: index map has wrong size");
  for (auto j : index_map)
    if (j >= target->size()) throw StructuralError("embed: target index out of range");
  TruncatedSeries out(target, f.truncation(), f.exact());
  for (const auto& [m, c] : f.terms()) {
    Monomial r;
    for (std::size_t i = 0; i < nv; ++i)
      if (m[i] > 0) r.set(index_map[i], r[index_map[i]] + m[i]);
    out.add_term(r, c);
  }
  return out;
}

SeriesVec embed(const SeriesVec& f, const ContextPtr& target, std::span<const std::size_t> index_map) {
  SeriesVec out;
  out.reserve(f.size());
  for (const auto& s : f) out.push_back(embed(s, target, index_map));
  return out;
}

TruncatedSeries set_to_zero(const TruncatedSeries& f, std::span<const std::size_t> vars) {
  TruncatedSeries out(f.context(), f.truncation(), f.exact());
  for (const auto& [m, c] : f.terms()) {
    bool keep = true;
    for (auto v : vars)
      if (m[v] > 0) keep = false;
    if (keep) out.add_term(m, c);
  }
  return out;
}

SeriesVec identity_substitution(const ContextPtr& source, const ContextPtr& target, int truncation) {
  SeriesVec out;
  out.reserve(source->size());
  for (std::size_t i = 0; i < source->size(); ++i) {
    auto j = target->find(source->name(i));
    if (j)
      out.push_back(TruncatedSeries::variable(target, *j, truncation));
    else
      out.push_back(TruncatedSeries::zero(target, truncation));
  }
  return out;
}

SeriesVec reverse(const SeriesVec& F, std::span<const std::size_t> inverted) {
  const std::size_t m = F.size();
  if (m == 0) return {};
  if (inverted.size() != m) throw StructuralError("reverse: system is not square");
  const ContextPtr& ctx = F[0].context();
  for (const auto& f : F) {
    if (!same_context(f.context(), ctx)) throw StructuralError("reverse: components in different contexts");
    if (!f.constant_term().is_zero()) throw PreconditionError("reverse: F(0) != 0");
  }
  GaussMatrix L(m, m);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) L(r, c) = F[r].coefficient(Monomial::unit(inverted[c]));
  auto Linv = inverse(L);
  if (!Linv) throw PreconditionError("reverse: linear part is singular (rank " + std::to_string(rank(L)) + ")");

  bool all_exact = true;
  int K = std::numeric_limits<int>::max();
  int cap = 0;
  for (const auto& f : F) {
    cap = std::max(cap, f.truncation());
    if (!f.exact()) {
      all_exact = false;
      K = std::min(K, f.truncation());
    }
  }
  if (all_exact) K = cap;

  auto apply_linv = [&](const SeriesVec& v) {
    SeriesVec out;
    for (std::size_t r = 0; r < m; ++r) {
      TruncatedSeries s(ctx, K, true);
      for (std::size_t c = 0; c < m; ++c)
        if (!(*Linv)(r, c).is_zero()) s = s + (*Linv)(r, c) * v[c];
      out.push_back(s.truncated(K));
    }
    return out;
  };

  SeriesVec u;
  for (std::size_t c = 0; c < m; ++c) u.push_back(TruncatedSeries::variable(ctx, inverted[c], K));
  SeriesVec y = apply_linv(u);
  SeriesVec sub;
  for (std::size_t i = 0; i < ctx->size(); ++i) sub.push_back(TruncatedSeries::variable(ctx, i, K));

  // y is right through degree p-1 before step p, so the residual only has
  // to be known through degree p; the working precision grows with p.
  for (int p = 1; p <= K; ++p) {
    for (std::size_t c = 0; c < m; ++c) sub[inverted[c]] = y[c];
    SeriesVec subp;
    for (const auto& s : sub) subp.push_back(s.truncated(p));
    SeriesVec resid;
    for (std::size_t r = 0; r < m; ++r) resid.push_back(compose(F[r].truncated(p), subp) - u[r].truncated(p));
    if (std::all_of(resid.begin(), resid.end(), [](const auto& s) { return s.is_zero(); })) continue;
    SeriesVec corr = apply_linv(resid);
    for (std::size_t c = 0; c < m; ++c) {
      corr[c].set_exact(true);
      y[c] = (y[c] - corr[c].truncated(K)).truncated(K);
    }
  }
  for (auto& s : y) {
    s = s.truncated(K);
    s.set_exact(false);
  }
  return y;
}

// ---- matrices --------------------------------------------------------------

TruncatedSeries determinant(const SeriesMatrix& m, std::size_t max_size) {
  if (m.rows() != m.cols()) throw StructuralError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n > max_size)
    throw PreconditionError("determinant: size " + std::to_string(n) + " exceeds bound " +
                            std::to_string(max_size));
  if (n == 0) return TruncatedSeries::constant(m.context(), Gaussian(1), 0);

  // minor(r, mask): determinant of rows r..n-1 against the columns in mask.
  std::map<unsigned, TruncatedSeries> memo;
  auto rec = [&](auto&& self, std::size_t r, unsigned mask) -> TruncatedSeries {
    if (r + 1 == n) {
      for (std::size_t c = 0; c < n; ++c)
        if (mask & (1u << c)) return m(r, c);
    }
    if (auto it = memo.find(mask); it != memo.end()) return it->second;
    std::optional<TruncatedSeries> acc;
    int sign = 1;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(mask & (1u << c))) continue;
      const TruncatedSeries& e = m(r, c);
      if (!e.is_exact_zero()) {
        TruncatedSeries term = mul(e, self(self, r + 1, mask & ~(1u << c)));
        if (sign < 0) term = -term;
        acc = acc ? *acc + term : term;
      }
      sign = -sign;
    }
    TruncatedSeries result = acc ? *acc : TruncatedSeries::zero(m.context(), m(r, 0).truncation());
    memo.emplace(mask, result);
    return result;
  };
  return rec(rec, 0, (1u << n) - 1);
}

SeriesMatrix jacobian(const SeriesVec& f, std::span<const std::size_t> vars) {
  std::vector<TruncatedSeries> e;
  e.reserve(f.size() * vars.size());
  for (const auto& fi : f)
    for (auto v : vars) e.push_back(differentiate(fi, v));
  if (e.empty()) {
    if (f.empty()) throw StructuralError("jacobian of an empty system");
    return SeriesMatrix(f[0].context(), f.size(), vars.size(), f[0].truncation());
  }
  return SeriesMatrix(f.size(), vars.size(), std::move(e));
}

}  // namespace formalcr
