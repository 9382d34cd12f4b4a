#pragma once

// Sparse truncated multivariate formal power series over Q(i).
//
// A series stores the jet of degree <= truncation() of some formal power
// series. When exact() is set the stored terms are the whole series (a
// polynomial of degree <= truncation()). Every operation is jet-sound: the
// jet it returns is the true jet of the exact result, and exactness is kept
// only if no term was dropped along the way.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "formalcr/gaussian.hpp"
#include "formalcr/variables.hpp"

namespace formalcr {

class TruncatedSeries {
public:
  using TermMap = std::unordered_map<Monomial, Gaussian, MonomialHash>;

  TruncatedSeries(ContextPtr ctx, int truncation, bool exact = true);

  static TruncatedSeries zero(ContextPtr ctx, int truncation, bool exact = true);
  static TruncatedSeries constant(ContextPtr ctx, const Gaussian& c, int truncation);
  static TruncatedSeries variable(ContextPtr ctx, std::size_t index, int truncation);
  static TruncatedSeries variable(ContextPtr ctx, std::string_view name, int truncation);
  static TruncatedSeries monomial(ContextPtr ctx, const Monomial& m, const Gaussian& c,
                                  int truncation);

  const ContextPtr& context() const { return ctx_; }
  int truncation() const { return truncation_; }
  bool exact() const { return exact_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// True when no term is stored (the jet vanishes).
  bool is_zero() const { return terms_.empty(); }
  /// Jet vanishes and the series is exact, i.e. the series is identically 0.
  bool is_exact_zero() const { return exact_ && terms_.empty(); }

  /// Minimum total degree of a stored term; nullopt encodes +infinity.
  std::optional<unsigned> order() const;
  /// A lower bound on the order of the true series: the jet order when the
  /// jet is nonzero, truncation()+1 for a vanishing inexact jet, nullopt for
  /// the exact zero series.
  std::optional<unsigned> order_lower_bound() const;
  unsigned max_degree() const;

  Gaussian coefficient(const Monomial& m) const;
  Gaussian constant_term() const { return coefficient(Monomial{}); }

  /// Terms in print order (ascending degree).
  std::vector<std::pair<Monomial, Gaussian>> sorted_terms() const;

  /// Parseable expression, e.g. "wb1 + 2*i*z1*zb1". "0" for the zero jet.
  std::string to_string() const;

  /// Adds c to the coefficient of m (dropping it if above truncation, which
  /// clears exactness). Builder API; values are treated as immutable once
  /// handed out.
  void add_term(const Monomial& m, const Gaussian& c);
  void set_exact(bool exact) { exact_ = exact; }

  /// Lowers the truncation; exactness survives only when nothing is dropped.
  TruncatedSeries truncated(int truncation) const;

  /// Identical contexts, truncation, exactness, and term maps.
  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b);

  /// Same term maps (ignores truncation and exactness flags).
  bool same_terms(const TruncatedSeries& other) const;

private:
  ContextPtr ctx_;
  int truncation_;
  bool exact_;
  TermMap terms_;
};

using SeriesVec = std::vector<TruncatedSeries>;

/// Rectangular array of series over one context, row-major.
class SeriesMatrix {
public:
  SeriesMatrix(ContextPtr ctx, std::size_t rows, std::size_t cols, int truncation);
  SeriesMatrix(std::size_t rows, std::size_t cols, std::vector<TruncatedSeries> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const ContextPtr& context() const { return ctx_; }
  const TruncatedSeries& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }
  TruncatedSeries& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }

  SeriesMatrix submatrix(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const;
  bool all_exact() const;

private:
  ContextPtr ctx_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<TruncatedSeries> entries_;
};

// ---- ring operations -------------------------------------------------------

TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries operator-(const TruncatedSeries& a);
TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries operator*(const Gaussian& c, const TruncatedSeries& a);

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries power(const TruncatedSeries& a, unsigned exponent);

/// Coefficientwise complex conjugation (the bar operation on series).
TruncatedSeries conjugate(const TruncatedSeries& f);
SeriesVec conjugate(const SeriesVec& v);

/// Partial derivative. Inexact inputs lose one degree of truncation, since
/// the derivative's degree-K coefficient is not determined by a K-jet.
TruncatedSeries differentiate(const TruncatedSeries& f, std::size_t var);

/// 1/f for f(0) != 0; result is never marked exact.
TruncatedSeries invert_unit(const TruncatedSeries& f);

/// Value of the stored jet at a point (one coordinate per context variable).
Gaussian evaluate(const TruncatedSeries& f, std::span<const Gaussian> point);

// ---- substitutions ---------------------------------------------------------

/// Formal composition f(s_1, ..., s_m). substitution[i] replaces variable i
/// of f's context; all entries share one target context. Each entry must
/// have zero constant term.
TruncatedSeries compose(const TruncatedSeries& f, std::span<const TruncatedSeries> substitution);
SeriesVec compose(const SeriesVec& f, std::span<const TruncatedSeries> substitution);

/// Renames variables without arithmetic: variable i of f's context becomes
/// variable index_map[i] of `target`.
TruncatedSeries embed(const TruncatedSeries& f, const ContextPtr& target,
                      std::span<const std::size_t> index_map);
SeriesVec embed(const SeriesVec& f, const ContextPtr& target, std::span<const std::size_t> index_map);

/// Substitutes 0 for the listed variables (keeps the context).
TruncatedSeries set_to_zero(const TruncatedSeries& f, std::span<const std::size_t> vars);

/// Builds a substitution that maps every variable of `source` to the
/// same-named variable of `target`, then applies the overrides.
SeriesVec identity_substitution(const ContextPtr& source, const ContextPtr& target, int truncation);

/// Formal inverse of the square system u -> F(p, u), where `inverted` lists
/// the variables u and every other variable of the context is a parameter p.
/// Returns y(p, u) with F(p, y(p, u)) = u up to truncation. Requires F(0)=0
/// and an invertible linear part in u.
SeriesVec reverse(const SeriesVec& F, std::span<const std::size_t> inverted);

// ---- matrices --------------------------------------------------------------

inline constexpr std::size_t kDefaultDeterminantBound = 8;

/// Determinant by cofactor expansion with memoised minors.
TruncatedSeries determinant(const SeriesMatrix& m, std::size_t max_size = kDefaultDeterminantBound);

/// Jacobian d f_i / d x_vars[j].
SeriesMatrix jacobian(const SeriesVec& f, std::span<const std::size_t> vars);

}  // namespace formalcr
