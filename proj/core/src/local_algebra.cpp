#include "formalcr/local_algebra.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "formalcr/errors.hpp"
#include "formalcr/linalg.hpp"
#include "formalcr/random.hpp"

namespace formalcr {

IdealPresentation::IdealPresentation(ContextPtr ctx, std::vector<TruncatedSeries> gens)
    : context(std::move(ctx)), generators(std::move(gens)) {
  if (!context) throw StructuralError("ideal without a context");
  for (const auto& g : generators) {
    if (!same_context(g.context(), context)) throw StructuralError("ideal generator in a foreign context");
    if (!g.constant_term().is_zero())
      throw PreconditionError("ideal generator has a nonzero constant term (unit ideal)");
  }
}

std::optional<int> IdealPresentation::min_inexact_truncation() const {
  std::optional<int> k;
  for (const auto& g : generators)
    if (!g.exact() && (!k || g.truncation() < *k)) k = g.truncation();
  return k;
}

unsigned supported_cutoff(const IdealPresentation& ideal, unsigned requested) {
  if (auto k = ideal.min_inexact_truncation()) {
    const int limit = std::max(*k + 1, 1);
    return std::min<unsigned>(requested, static_cast<unsigned>(limit));
  }
  return requested;
}

namespace {

// ---- sparse echelon over a field --------------------------------------------

// Q(i) itself.
struct ExactField {
  using T = Gaussian;
  static bool zero(const T& x) { return x.is_zero(); }
  static T inv(const T& x) { return Gaussian(1) / x; }
  static T mul(const T& a, const T& b) { return a * b; }
  static T sub(const T& a, const T& b) { return a - b; }
  static T neg(const T& a) { return -a; }
};

// F_p with p = 1 mod 4, receiving Z_(p)[i] by sending i to a square root of
// -1. Used only to locate candidate certificates quickly; every finite
// answer is confirmed over Q(i).
struct ModField {
  using T = std::uint64_t;
  static constexpr T p = 4611686018427387817ull;
  static constexpr T sqrt_minus_one = 120863620846201794ull;
  static bool zero(T x) { return x == 0; }
  static T mul(T a, T b) { return static_cast<T>(static_cast<unsigned __int128>(a) * b % p); }
  static T sub(T a, T b) { return a >= b ? a - b : a + (p - b); }
  static T neg(T a) { return a == 0 ? 0 : p - a; }
  static T inv(T a) {
    T result = 1, base = a, e = p - 2;
    while (e) {
      if (e & 1) result = mul(result, base);
      base = mul(base, base);
      e >>= 1;
    }
    return result;
  }
  static std::optional<T> reduce(const Rational& q) {
    const T den = mpz_fdiv_ui(q.get_den_mpz_t(), p);
    if (den == 0) return std::nullopt;
    return mul(mpz_fdiv_ui(q.get_num_mpz_t(), p), inv(den));
  }
  static std::optional<T> reduce(const Gaussian& g) {
    auto re = reduce(g.re());
    auto im = reduce(g.im());
    if (!re || !im) return std::nullopt;
    return (*re + mul(*im, sqrt_minus_one)) % p;
  }
};

template <class Field>
using SparseRow = std::vector<std::pair<std::uint32_t, typename Field::T>>;

// a - f * b
template <class Field>
SparseRow<Field> axpy(const SparseRow<Field>& a, const typename Field::T& f, const SparseRow<Field>& b) {
  SparseRow<Field> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, Field::neg(Field::mul(f, b[j].second)));
      ++j;
    } else {
      auto v = Field::sub(a[i].second, Field::mul(f, b[j].second));
      if (!Field::zero(v)) out.emplace_back(a[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  return out;
}

template <class Field>
class SparseEchelon {
public:
  explicit SparseEchelon(std::size_t ncols) : pivots_(ncols) {}

  bool insert(SparseRow<Field> r) {
    while (!r.empty()) {
      const auto& p = pivots_[r.front().first];
      if (!p) break;
      const auto f = r.front().second;
      r = axpy<Field>(r, f, *p);
    }
    if (r.empty()) return false;
    const auto inv = Field::inv(r.front().second);
    for (auto& e : r) e.second = Field::mul(e.second, inv);
    const auto col = r.front().first;
    pivots_[col] = std::move(r);
    ++rank_;
    return true;
  }

  std::size_t rank() const { return rank_; }
  bool is_pivot(std::size_t col) const { return pivots_[col].has_value(); }

private:
  std::vector<std::optional<SparseRow<Field>>> pivots_;
  std::size_t rank_ = 0;
};

struct ColumnSpace {
  std::vector<Monomial> monomials;  // column order: ascending degree
  std::unordered_map<Monomial, std::uint32_t, MonomialHash> index;
  std::size_t top_start = 0;        // first column of the top degree
};

// Ascending degree keeps rows led by the initial forms of the generators,
// which stay sparse; descending order pivots on the noisy tails instead.
ColumnSpace columns_up_to(std::size_t nvars, unsigned top) {
  ColumnSpace cs;
  for (unsigned deg = 0; deg <= top; ++deg) {
    if (deg == top) cs.top_start = cs.monomials.size();
    for (auto& m : monomials_of_degree(nvars, deg)) {
      cs.index.emplace(m, static_cast<std::uint32_t>(cs.monomials.size()));
      cs.monomials.push_back(m);
    }
  }
  return cs;
}

// Monomials of degree <= bound in nvars variables.
std::vector<Monomial> monomials_up_to(std::size_t nvars, int bound) {
  std::vector<Monomial> out;
  for (int d = 0; d <= bound; ++d) {
    auto ms = monomials_of_degree(nvars, static_cast<unsigned>(d));
    out.insert(out.end(), ms.begin(), ms.end());
  }
  return out;
}

template <class Field>
struct Generator {
  const TruncatedSeries* series;
  unsigned order;
  std::vector<std::pair<Monomial, typename Field::T>> terms;  // sorted by degree
};

// Fills `ech` with rows x^beta * g reduced mod m^(top+1). A row is used only
// when its jet is fully known through degree `top`.
template <class Field>
void load_rows(SparseEchelon<Field>& ech, const ColumnSpace& cs, const std::vector<Generator<Field>>& gens,
               std::size_t nvars, unsigned top) {
  for (const auto& g : gens) {
    if (g.order > top) continue;
    const int max_beta = static_cast<int>(top - g.order);
    for (const auto& beta : monomials_up_to(nvars, max_beta)) {
      const int bdeg = static_cast<int>(beta.degree());
      if (!g.series->exact() && g.series->truncation() + bdeg < static_cast<int>(top)) continue;
      SparseRow<Field> row;
      for (const auto& [m, c] : g.terms) {
        if (static_cast<int>(m.degree()) + bdeg > static_cast<int>(top)) break;
        row.emplace_back(cs.index.at(m * beta), c);
      }
      std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      if (!row.empty()) ech.insert(std::move(row));
      if (ech.rank() == cs.monomials.size()) return;
    }
  }
}

// In echelon form the rows led by a top-degree column span exactly the
// intersection of the row space with the top block, so m^D lies in
// I + m^(D+1) iff every degree-D column is a pivot.
template <class Field>
bool certified_at(const std::vector<Generator<Field>>& gens, std::size_t nvars, unsigned D) {
  const ColumnSpace cols = columns_up_to(nvars, D);
  SparseEchelon<Field> ech(cols.monomials.size());
  load_rows(ech, cols, gens, nvars, D);
  for (std::size_t c = cols.top_start; c < cols.monomials.size(); ++c)
    if (!ech.is_pivot(c)) return false;
  return true;
}

std::optional<std::string> axis_witness(const IdealPresentation& ideal) {
  const auto& ctx = *ideal.context;
  for (const auto& g : ideal.generators)
    if (!g.exact()) return std::nullopt;
  for (std::size_t v = 0; v < ctx.size(); ++v) {
    bool vanishes = true;
    for (const auto& g : ideal.generators) {
      for (const auto& [m, c] : g.terms()) {
        if (m[v] == m.degree()) {
          vanishes = false;
          break;
        }
      }
      if (!vanishes) break;
    }
    if (vanishes) return "every generator vanishes on the " + ctx.name(v) + " axis";
  }
  return std::nullopt;
}

}  // namespace

CodimensionResult codimension(const IdealPresentation& ideal, unsigned cutoff, unsigned first_degree) {
  const std::size_t nvars = ideal.context->size();
  if (auto k = ideal.min_inexact_truncation(); k && *k + 1 < static_cast<int>(cutoff)) {
    throw PreconditionError("codimension: cutoff " + std::to_string(cutoff) +
                            " requires generator truncation >= " + std::to_string(cutoff - 1) +
                            " (have " + std::to_string(*k) + ")");
  }

  std::vector<Generator<ExactField>> gens;
  std::optional<std::vector<Generator<ModField>>> mod_gens(std::in_place);
  for (const auto& g : ideal.generators) {
    if (g.is_zero()) continue;
    auto terms = g.sorted_terms();
    if (mod_gens) {
      Generator<ModField> mg{&g, *g.order(), {}};
      for (const auto& [m, c] : terms) {
        auto r = ModField::reduce(c);
        if (!r) {
          mod_gens.reset();
          break;
        }
        if (*r != 0) mg.terms.emplace_back(m, *r);
      }
      if (mod_gens) mod_gens->push_back(std::move(mg));
    }
    gens.push_back({&g, *g.order(), std::move(terms)});
  }

  CodimensionResult res;
  res.cutoff_used = cutoff;
  for (unsigned D = std::max(first_degree, 1u); D <= cutoff; ++D) {
    if (mod_gens && !certified_at(*mod_gens, nvars, D)) continue;
    if (!certified_at(gens, nvars, D)) continue;

    // m^D is inside I, so the codimension is dim (R/m^D) / image(I).
    res.kind = CodimensionResult::Kind::Finite;
    res.certificate_degree = D;
    if (D == 1) {
      res.dimension = 1;
      res.standard_monomials = {Monomial{}};
      return res;
    }
    const ColumnSpace cols = columns_up_to(nvars, D - 1);
    SparseEchelon<ExactField> ech(cols.monomials.size());
    load_rows(ech, cols, gens, nvars, D - 1);
    for (std::size_t c = 0; c < cols.monomials.size(); ++c)
      if (!ech.is_pivot(c)) res.standard_monomials.push_back(cols.monomials[c]);
    std::sort(res.standard_monomials.begin(), res.standard_monomials.end(), PrintOrder{});
    res.dimension = res.standard_monomials.size();
    return res;
  }
  if (auto w = axis_witness(ideal)) {
    res.infinite_certified = true;
    res.infinite_witness = *w;
  }
  return res;
}

// ---- generic rank ----------------------------------------------------------

namespace {

struct EvalRank {
  std::size_t rank = 0;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  unsigned trial = 0;
};

GaussMatrix evaluate_matrix(const SeriesMatrix& a, const std::vector<Gaussian>& point) {
  GaussMatrix m(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m(r, c) = evaluate(a(r, c), point);
  return m;
}

std::vector<Gaussian> random_point(std::size_t nvars, std::uint64_t seed, long height) {
  SeededRng rng(seed);
  std::vector<Gaussian> p;
  p.reserve(nvars);
  for (std::size_t i = 0; i < nvars; ++i) p.emplace_back(rng.uniform(-height, height));
  return p;
}

EvalRank best_evaluation(const SeriesMatrix& a, const RankPolicy& policy) {
  EvalRank best;
  const std::size_t target = std::min(a.rows(), a.cols());
  const std::size_t nvars = a.context()->size();
  const unsigned trials = nvars == 0 ? 1 : std::max(1u, policy.trials);
  for (unsigned t = 0; t < trials; ++t) {
    const auto point = random_point(nvars, derive_seed(policy.seed, t), policy.height);
    const GaussMatrix m = evaluate_matrix(a, point);
    EchelonForm ec = row_echelon(m);
    if (ec.rank() > best.rank || (t == 0 && ec.rank() == 0)) {
      best.rank = ec.rank();
      best.cols = ec.pivots;
      best.rows = row_echelon(m.transpose()).pivots;
      best.trial = t;
    }
    if (best.rank == target) break;
  }
  return best;
}

std::string index_list(const std::vector<std::size_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + "]";
}

// Calls f(subset) for every k-subset of {0..n-1} in lexicographic order;
// stops when f returns true.
template <typename F>
bool for_each_subset(std::size_t n, std::size_t k, F&& f) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k > n) return false;
  while (true) {
    if (f(idx)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::size_t evaluation_rank(const SeriesMatrix& a, const RankPolicy& policy) {
  return best_evaluation(a, policy).rank;
}

std::size_t symbolic_rank(const SeriesMatrix& a) {
  for (std::size_t j = std::min(a.rows(), a.cols()); j > 0; --j) {
    bool found = for_each_subset(a.rows(), j, [&](const std::vector<std::size_t>& rows) {
      return for_each_subset(a.cols(), j, [&](const std::vector<std::size_t>& cols) {
        return !determinant(a.submatrix(rows, cols)).is_zero();
      });
    });
    if (found) return j;
  }
  return 0;
}

RankResult generic_rank(const SeriesMatrix& a, const RankPolicy& policy) {
  RankResult res;
  const std::size_t target = std::min(a.rows(), a.cols());
  if (target == 0) {
    res.full_rank = Verdict::yes("empty matrix");
    return res;
  }
  const EvalRank ev = best_evaluation(a, policy);
  const bool exact = a.all_exact();
  if (ev.rank > 0) {
    if (exact) {
      res.lower_bound = ev.rank;
      res.witness_rows = ev.rows;
      res.witness_cols = ev.cols;
    } else if (!determinant(a.submatrix(ev.rows, ev.cols)).is_zero()) {
      res.lower_bound = ev.rank;
      res.witness_rows = ev.rows;
      res.witness_cols = ev.cols;
    }
  }
  if (res.lower_bound == target) {
    std::ostringstream os;
    os << "minor rows " << index_list(ev.rows) << " cols " << index_list(ev.cols)
       << (exact ? " is nonzero at a seeded rational point" : " has a nonzero jet coefficient");
    res.full_rank = Verdict::yes(os.str());
    res.full_rank.seed = policy.seed;
    return res;
  }
  if (std::max(a.rows(), a.cols()) > policy.symbolic_bound) {
    res.full_rank = Verdict::unknown("evaluation rank " + std::to_string(ev.rank) + " < " +
                                     std::to_string(target) +
                                     "; matrix too large for exhaustive minors");
    res.full_rank.seed = policy.seed;
    return res;
  }
  bool all_minors_exact = true;
  bool found = for_each_subset(a.rows(), target, [&](const std::vector<std::size_t>& rows) {
    return for_each_subset(a.cols(), target, [&](const std::vector<std::size_t>& cols) {
      TruncatedSeries det = determinant(a.submatrix(rows, cols));
      if (!det.exact()) all_minors_exact = false;
      if (det.is_zero()) return false;
      res.witness_rows = rows;
      res.witness_cols = cols;
      return true;
    });
  });
  if (found) {
    res.lower_bound = target;
    res.full_rank = Verdict::yes("minor rows " + index_list(res.witness_rows) + " cols " +
                                 index_list(res.witness_cols) + " has a nonzero jet coefficient");
    return res;
  }
  if (all_minors_exact) {
    res.full_rank = Verdict::no("all " + std::to_string(target) + "x" + std::to_string(target) +
                                " minors vanish identically");
  } else {
    res.full_rank = Verdict::unknown("all " + std::to_string(target) + "x" + std::to_string(target) +
                                     " minor jets vanish up to truncation");
  }
  return res;
}

// ---- Krull dimension -------------------------------------------------------

namespace {

// Adjoins `count` random linear forms and reports whether the codimension is
// finite in some trial.
struct SectionOutcome {
  bool finite_somewhere = false;
  unsigned finite_trial = 0;
};

SectionOutcome section_test(const IdealPresentation& ideal, std::size_t count, const DimensionPolicy& policy,
                            std::uint64_t salt) {
  SectionOutcome out;
  const auto& ctx = ideal.context;
  const std::size_t nvars = ctx->size();
  const unsigned cutoff = supported_cutoff(ideal, policy.cutoff);
  const unsigned trials = count == 0 ? 1 : std::max(1u, policy.trials);
  int K = 0;
  for (const auto& g : ideal.generators) K = std::max(K, g.truncation());
  for (unsigned t = 0; t < trials; ++t) {
    SeededRng rng(derive_seed(policy.seed, salt * 1000 + t));
    std::vector<TruncatedSeries> gens = ideal.generators;
    for (std::size_t f = 0; f < count; ++f) {
      TruncatedSeries form(ctx, std::max(K, 1), true);
      while (form.is_zero()) {
        for (std::size_t v = 0; v < nvars; ++v)
          form.add_term(Monomial::unit(v), Gaussian(rng.uniform(-policy.height, policy.height)));
      }
      gens.push_back(std::move(form));
    }
    if (codimension(IdealPresentation(ctx, std::move(gens)), cutoff).finite()) {
      out.finite_somewhere = true;
      out.finite_trial = t;
      return out;
    }
  }
  return out;
}

}  // namespace

Verdict local_dimension_is(const IdealPresentation& ideal, std::size_t expected, const DimensionPolicy& policy) {
  const std::size_t nvars = ideal.context->size();
  if (expected > nvars) throw PreconditionError("expected dimension exceeds the number of variables");

  std::size_t nonzero = 0;
  for (const auto& g : ideal.generators)
    if (!g.is_exact_zero()) ++nonzero;
  const std::size_t lower = nvars > nonzero ? nvars - nonzero : 0;
  if (lower > expected) {
    Verdict v = Verdict::no("dimension >= " + std::to_string(lower) + " (" + std::to_string(nonzero) +
                            " nonzero generators in " + std::to_string(nvars) + " variables)");
    return v;
  }

  if (expected > 0) {
    const SectionOutcome below = section_test(ideal, expected - 1, policy, 1);
    if (below.finite_somewhere) {
      Verdict v = Verdict::no("finite codimension after " + std::to_string(expected - 1) +
                              " linear forms: dimension < " + std::to_string(expected));
      v.seed = policy.seed;
      return v;
    }
  }
  const SectionOutcome at = section_test(ideal, expected, policy, 2);
  if (!at.finite_somewhere) {
    Verdict v = Verdict::unknown("no trial with " + std::to_string(expected) +
                                 " random linear forms reached finite codimension");
    v.seed = policy.seed;
    return v;
  }
  if (lower >= expected) {
    Verdict v = Verdict::yes("finite codimension after " + std::to_string(expected) +
                             " linear forms and dimension >= " + std::to_string(lower));
    v.seed = policy.seed;
    return v;
  }
  Verdict v = Verdict::yes("finite codimension after " + std::to_string(expected) +
                           " random linear forms, never after " + std::to_string(expected - 1));
  v.seed = policy.seed;
  v.probabilistic = true;
  return v;
}

}  // namespace formalcr
