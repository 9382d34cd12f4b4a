#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace formalcr {

/// Upper bound on the number of variables of any context. Segre mappings of
/// length k live in k*n variables, so this caps k*n.
inline constexpr std::size_t kMaxVariables = 32;

enum class VariableRole : std::uint8_t { Z, W, Chi, Tau, SegreBlock, Generic };

struct VariableInfo {
  std::string name;
  VariableRole role = VariableRole::Generic;
  int block = 0;  // Segre block index (1-based) for SegreBlock variables
};

/// Ordered list of distinct variables. Monomial exponent vectors index into
/// this order. Immutable once built; shared through ContextPtr.
class VariableContext {
public:
  explicit VariableContext(std::vector<VariableInfo> vars);

  std::size_t size() const { return vars_.size(); }
  const VariableInfo& operator[](std::size_t i) const { return vars_[i]; }
  const std::string& name(std::size_t i) const { return vars_[i].name; }
  const std::vector<VariableInfo>& variables() const { return vars_; }

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;  // throws StructuralError

  bool same_as(const VariableContext& other) const;

private:
  std::vector<VariableInfo> vars_;
};

using ContextPtr = std::shared_ptr<const VariableContext>;

bool same_context(const ContextPtr& a, const ContextPtr& b);

ContextPtr make_context(std::vector<VariableInfo> vars);
ContextPtr make_context(const std::vector<std::string>& names);

/// (z_1..z_n, w_1..w_d): holomorphic coordinates Z of C^N.
ContextPtr ambient_context(int n, int d);
/// (z_1..z_n, zb_1..zb_n, wb_1..wb_d): the variables (z, chi, tau) of Q.
ContextPtr manifold_context(int n, int d);
/// (z, w, zb, wb): variables (Z, zeta) of a complexified defining function.
ContextPtr complexified_context(int n, int d);
/// (t1_1..t1_n, ..., tk_1..tk_n): parameters of the k-th Segre mapping.
ContextPtr segre_context(int n, int k);

/// Exponent vector over at most kMaxVariables variables.
class Monomial {
public:
  Monomial() { e_.fill(0); }

  static Monomial unit(std::size_t var, unsigned power = 1);

  unsigned operator[](std::size_t i) const { return e_[i]; }
  void set(std::size_t i, unsigned value);

  unsigned degree() const {
    unsigned s = 0;
    for (auto v : e_) s += v;
    return s;
  }
  bool is_one() const { return degree() == 0; }

  Monomial operator*(const Monomial& o) const;
  bool divides(const Monomial& o) const;
  Monomial quotient(const Monomial& o) const;  // this / o; requires o | this

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.e_ == b.e_; }

  /// Graded lexicographic order: total degree first, then lexicographic on
  /// exponents (x1 > x2 > ...).
  friend bool grlex_less(const Monomial& a, const Monomial& b);

  std::size_t hash() const;

  /// Renders as "z1^2*zb1" using the context names; "1" for the unit.
  std::string to_string(const VariableContext& ctx) const;

private:
  std::array<std::uint8_t, kMaxVariables> e_;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

/// Ordering used for printing: ascending degree, then descending lex inside
/// a degree, so x^2 precedes x*y precedes y^2.
struct PrintOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// All monomials in `nvars` variables of total degree exactly `degree`, in
/// PrintOrder.
std::vector<Monomial> monomials_of_degree(std::size_t nvars, unsigned degree);

}  // namespace formalcr
