#include "formalcr/variables.hpp"

#include <algorithm>
#include <cstring>
#include <unordered_set>

#include "formalcr/errors.hpp"

namespace formalcr {

VariableContext::VariableContext(std::vector<VariableInfo> vars) : vars_(std::move(vars)) {
  if (vars_.size() > kMaxVariables) {
    throw StructuralError("context has " + std::to_string(vars_.size()) +
                          " variables; at most " + std::to_string(kMaxVariables) +
                          " are supported");
  }
  std::unordered_set<std::string> seen;
  for (const auto& v : vars_) {
    if (v.name.empty()) throw StructuralError("empty variable name");
    if (!seen.insert(v.name).second) throw StructuralError("duplicate variable name: " + v.name);
  }
}

std::optional<std::size_t> VariableContext::find(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t VariableContext::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw StructuralError("unknown variable: " + std::string(name));
}

bool VariableContext::same_as(const VariableContext& other) const {
  if (this == &other) return true;
  if (vars_.size() != other.vars_.size()) return false;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name != other.vars_[i].name) return false;
  }
  return true;
}

bool same_context(const ContextPtr& a, const ContextPtr& b) {
  return a == b || (a && b && a->same_as(*b));
}

ContextPtr make_context(std::vector<VariableInfo> vars) {
  return std::make_shared<const VariableContext>(std::move(vars));
}

ContextPtr make_context(const std::vector<std::string>& names) {
  std::vector<VariableInfo> vars;
  vars.reserve(names.size());
  for (const auto& n : names) vars.push_back({n, VariableRole::Generic, 0});
  return make_context(std::move(vars));
}

namespace {

void append_block(std::vector<VariableInfo>& out, const std::string& prefix, int count,
                  VariableRole role) {
  for (int i = 1; i <= count; ++i) out.push_back({prefix + std::to_string(i), role, 0});
}

}  // namespace

ContextPtr ambient_context(int n, int d) {
  std::vector<VariableInfo> v;
  append_block(v, "z", n, VariableRole::Z);
  append_block(v, "w", d, VariableRole::W);
  return make_context(std::move(v));
}

ContextPtr manifold_context(int n, int d) {
  std::vector<VariableInfo> v;
  append_block(v, "z", n, VariableRole::Z);
  append_block(v, "zb", n, VariableRole::Chi);
  append_block(v, "wb", d, VariableRole::Tau);
  return make_context(std::move(v));
}

ContextPtr complexified_context(int n, int d) {
  std::vector<VariableInfo> v;
  append_block(v, "z", n, VariableRole::Z);
  append_block(v, "w", d, VariableRole::W);
  append_block(v, "zb", n, VariableRole::Chi);
  append_block(v, "wb", d, VariableRole::Tau);
  return make_context(std::move(v));
}

ContextPtr segre_context(int n, int k) {
  std::vector<VariableInfo> v;
  for (int j = 1; j <= k; ++j) {
    for (int i = 1; i <= n; ++i) {
      v.push_back({"t" + std::to_string(j) + "_" + std::to_string(i), VariableRole::SegreBlock, j});
    }
  }
  return make_context(std::move(v));
}

Monomial Monomial::unit(std::size_t var, unsigned power) {
  Monomial m;
  m.set(var, power);
  return m;
}

void Monomial::set(std::size_t i, unsigned value) {
  if (i >= kMaxVariables) throw StructuralError("variable index out of range");
  if (value > 255) throw PreconditionError("exponent exceeds 255");
  e_[i] = static_cast<std::uint8_t>(value);
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVariables; ++i) {
    const unsigned s = unsigned(e_[i]) + unsigned(o.e_[i]);
    if (s > 255) throw PreconditionError("exponent exceeds 255");
    r.e_[i] = static_cast<std::uint8_t>(s);
  }
  return r;
}

bool Monomial::divides(const Monomial& o) const {
  for (std::size_t i = 0; i < kMaxVariables; ++i) {
    if (e_[i] > o.e_[i]) return false;
  }
  return true;
}

Monomial Monomial::quotient(const Monomial& o) const {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVariables; ++i) {
    if (o.e_[i] > e_[i]) throw PreconditionError("monomial quotient is not a monomial");
    r.e_[i] = static_cast<std::uint8_t>(e_[i] - o.e_[i]);
  }
  return r;
}

bool grlex_less(const Monomial& a, const Monomial& b) {
  const unsigned da = a.degree();
  const unsigned db = b.degree();
  if (da != db) return da < db;
  return a.e_ < b.e_;
}

std::size_t Monomial::hash() const {
  std::uint64_t words[kMaxVariables / 8];
  std::memcpy(words, e_.data(), sizeof(words));
  std::uint64_t h = 0x9E3779B97F4A7C15ull;
  for (auto w : words) {
    h ^= w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h ^ (h >> 31));
}

std::string Monomial::to_string(const VariableContext& ctx) const {
  std::string out;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (e_[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += ctx.name(i);
    if (e_[i] > 1) out += "^" + std::to_string(e_[i]);
  }
  return out.empty() ? std::string("1") : out;
}

bool PrintOrder::operator()(const Monomial& a, const Monomial& b) const {
  const unsigned da = a.degree();
  const unsigned db = b.degree();
  if (da != db) return da < db;
  return grlex_less(b, a);
}

namespace {

void enumerate(std::size_t nvars, std::size_t var, unsigned remaining, Monomial& cur,
               std::vector<Monomial>& out) {
  if (var + 1 == nvars) {
    cur.set(var, remaining);
    out.push_back(cur);
    cur.set(var, 0);
    return;
  }
  for (int e = static_cast<int>(remaining); e >= 0; --e) {
    cur.set(var, static_cast<unsigned>(e));
    enumerate(nvars, var + 1, remaining - static_cast<unsigned>(e), cur, out);
  }
  cur.set(var, 0);
}

}  // namespace

std::vector<Monomial> monomials_of_degree(std::size_t nvars, unsigned degree) {
  std::vector<Monomial> out;
  if (nvars == 0) {
    if (degree == 0) out.emplace_back();
    return out;
  }
  Monomial cur;
  enumerate(nvars, 0, degree, cur, out);
  return out;
}

}  // namespace formalcr
