#include "formalcr_cli/scenario.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "formalcr_cli/parser.hpp"

namespace formalcr::cli {

SchemaError::SchemaError(std::string path, const std::string& message)
    : InputRejected(path + ": " + message), path_(std::move(path)) {}

const ManifoldEntry& Scenario::manifold(const std::string& name) const {
  for (const auto& m : manifolds)
    if (m.name == name) return m;
  throw StructuralError("no manifold named '" + name + "'");
}

const MapEntry& Scenario::map(const std::string& name) const {
  for (const auto& m : maps)
    if (m.name == name) return m;
  throw StructuralError("no map named '" + name + "'");
}

namespace {

std::string key_path(const std::string& base, const std::string& key) { return base + "." + key; }
std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(key_path(path, key), "missing required field");
  return *it;
}

long read_int(const Json& v, const std::string& path, long lo, long hi) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi)
    throw SchemaError(path, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  return x;
}

std::uint64_t read_seed(const Json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw SchemaError(path, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

SeriesVec read_series_list(const Json& v, const std::string& path, std::size_t expected, const ContextPtr& ctx,
                           int K) {
  if (!v.is_array()) throw SchemaError(path, "expected an array of expression strings");
  if (v.size() != expected)
    throw SchemaError(path, "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
  SeriesVec out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = index_path(path, i);
    if (!v[i].is_string()) throw SchemaError(p, "expected an expression string");
    try {
      out.push_back(parse_series(v[i].get<std::string>(), ctx, K));
    } catch (const ParseError& e) {
      throw SchemaError(p, e.what());
    }
  }
  return out;
}

ManifoldEntry load_manifold(const std::string& name, const Json& m, const std::string& path, int n, int d, int K) {
  if (!m.is_object()) throw SchemaError(path, "expected an object");
  const std::size_t nn = static_cast<std::size_t>(n), dd = static_cast<std::size_t>(d);
  const ContextPtr amb = ambient_context(n, d);
  ManifoldEntry e;
  e.name = name;
  const bool hasQ = m.contains("Q");
  const bool hasRho = m.contains("defining");
  if (hasQ == hasRho) throw SchemaError(path, "give exactly one of \"Q\" or \"defining\"");

  SeriesVec Q0;
  e.order.resize(nn + dd);
  std::iota(e.order.begin(), e.order.end(), std::size_t{0});
  if (hasQ) {
    e.input = "Q";
    Q0 = read_series_list(m["Q"], key_path(path, "Q"), dd, manifold_context(n, d), K);
  } else {
    e.input = "defining";
    const SeriesVec rho = read_series_list(m["defining"], key_path(path, "defining"), dd, complexified_context(n, d), K);
    std::vector<std::size_t> split;
    if (m.contains("wSplit")) {
      const Json& ws = m["wSplit"];
      const std::string wp = key_path(path, "wSplit");
      if (!ws.is_array() || ws.size() != dd) throw SchemaError(wp, "expected " + std::to_string(dd) + " variable names");
      for (std::size_t i = 0; i < ws.size(); ++i) {
        if (!ws[i].is_string()) throw SchemaError(index_path(wp, i), "expected a variable name");
        auto idx = amb->find(ws[i].get<std::string>());
        if (!idx) throw SchemaError(index_path(wp, i), "unknown holomorphic variable '" + ws[i].get<std::string>() + "'");
        if (std::find(split.begin(), split.end(), *idx) != split.end())
          throw SchemaError(index_path(wp, i), "variable listed twice");
        split.push_back(*idx);
      }
    } else {
      for (std::size_t j = 0; j < dd; ++j) split.push_back(nn + j);
    }
    GraphSolution sol;
    try {
      sol = graph_solve(n, d, rho, split);
    } catch (const PreconditionError& ex) {
      throw SchemaError(key_path(path, "defining"), ex.what());
    }
    Q0 = sol.Q0;
    e.order = sol.order;
  }

  Normalization norm;
  try {
    norm = normalize(n, d, Q0);
  } catch (const InputRejected& ex) {
    throw SchemaError(path, ex.what());
  } catch (const PreconditionError& ex) {
    throw SchemaError(path, ex.what());
  }
  e.manifold = norm.manifold;
  e.was_normal = norm.was_normal;

  bool permuted = false;
  for (std::size_t p = 0; p < e.order.size(); ++p) permuted = permuted || e.order[p] != p;
  e.identity_change = norm.was_normal && !permuted;

  // Permuted coordinates Zp[p] = Z[order[p]], then (z, w) -> (z, change(z, w)).
  SeriesVec perm_of_orig;
  for (std::size_t p = 0; p < nn + dd; ++p) perm_of_orig.push_back(TruncatedSeries::variable(amb, e.order[p], K));
  SeriesVec newp;  // new coordinates as series of the permuted ones
  SeriesVec oldp;  // permuted coordinates as series of the new ones
  for (std::size_t i = 0; i < nn; ++i) {
    newp.push_back(TruncatedSeries::variable(amb, i, K));
    oldp.push_back(TruncatedSeries::variable(amb, i, K));
  }
  if (norm.was_normal) {
    for (std::size_t j = 0; j < dd; ++j) {
      newp.push_back(TruncatedSeries::variable(amb, nn + j, K));
      oldp.push_back(TruncatedSeries::variable(amb, nn + j, K));
    }
  } else {
    for (auto& s : norm.change) newp.push_back(s);
    for (auto& s : norm.inverse_change) oldp.push_back(s);
  }
  e.to_new = permuted ? compose(newp, perm_of_orig) : newp;
  e.to_old.assign(nn + dd, TruncatedSeries::zero(amb, K));
  for (std::size_t p = 0; p < nn + dd; ++p) e.to_old[e.order[p]] = oldp[p];
  return e;
}

}  // namespace

Scenario load_scenario(const Json& doc, const Overrides& ov) {
  const std::string root = "$";
  if (!doc.is_object()) throw SchemaError(root, "scenario must be a JSON object");
  static const std::set<std::string> known = {"n", "d", "truncation", "cutoff", "seed", "manifolds", "maps", "requests"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) throw SchemaError(key_path(root, it.key()), "unknown field");

  Scenario sc;
  sc.n = static_cast<int>(read_int(require(doc, "n", root), "$.n", 0, 8));
  sc.d = static_cast<int>(read_int(require(doc, "d", root), "$.d", 1, 8));
  if (sc.n + sc.d > 16) throw SchemaError(root, "n + d must be at most 16");
  if (doc.contains("truncation")) sc.settings.truncation = static_cast<int>(read_int(doc["truncation"], "$.truncation", 1, 40));
  if (doc.contains("cutoff")) sc.settings.cutoff = static_cast<unsigned>(read_int(doc["cutoff"], "$.cutoff", 1, 60));
  if (doc.contains("seed")) sc.settings.seed = read_seed(doc["seed"], "$.seed");
  if (ov.truncation) sc.settings.truncation = *ov.truncation;
  if (ov.cutoff) sc.settings.cutoff = *ov.cutoff;
  if (ov.seed) sc.settings.seed = *ov.seed;
  const int K = sc.settings.truncation;

  if (doc.contains("requests")) {
    const Json& r = doc["requests"];
    if (!r.is_array()) throw SchemaError("$.requests", "expected an array of request names");
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string p = index_path("$.requests", i);
      if (!r[i].is_string()) throw SchemaError(p, "expected a request name");
      const std::string name = r[i].get<std::string>();
      const auto& a = manifold_requests();
      const auto& b = map_requests();
      if (std::find(a.begin(), a.end(), name) == a.end() && std::find(b.begin(), b.end(), name) == b.end())
        throw SchemaError(p, "unknown request '" + name + "'");
      sc.requests.insert(name);
    }
  } else {
    for (const auto& r : manifold_requests()) sc.requests.insert(r);
    for (const auto& r : map_requests())
      if (r != "audit") sc.requests.insert(r);
  }
  if (ov.audit) sc.requests.insert("audit");

  if (doc.contains("manifolds")) {
    const Json& ms = doc["manifolds"];
    if (!ms.is_object()) throw SchemaError("$.manifolds", "expected an object keyed by manifold name");
    for (auto it = ms.begin(); it != ms.end(); ++it) {
      const std::string p = key_path("$.manifolds", it.key());
      int n = sc.n, d = sc.d;
      if (it->is_object() && it->contains("n")) n = static_cast<int>(read_int((*it)["n"], key_path(p, "n"), 0, 8));
      if (it->is_object() && it->contains("d")) d = static_cast<int>(read_int((*it)["d"], key_path(p, "d"), 1, 8));
      sc.manifolds.push_back(load_manifold(it.key(), *it, p, n, d, K));
    }
  }

  if (doc.contains("maps")) {
    const Json& ms = doc["maps"];
    if (!ms.is_object()) throw SchemaError("$.maps", "expected an object keyed by map name");
    for (auto it = ms.begin(); it != ms.end(); ++it) {
      const std::string p = key_path("$.maps", it.key());
      const Json& m = *it;
      if (!m.is_object()) throw SchemaError(p, "expected an object");
      MapEntry e;
      e.name = it.key();
      const Json& tj = require(m, "target", p);
      if (!tj.is_string()) throw SchemaError(key_path(p, "target"), "expected a manifold name");
      e.target = tj.get<std::string>();
      const ManifoldEntry* tgt = nullptr;
      for (const auto& me : sc.manifolds)
        if (me.name == e.target) tgt = &me;
      if (!tgt) throw SchemaError(key_path(p, "target"), "unknown manifold '" + e.target + "'");
      const ManifoldEntry* src = nullptr;
      if (m.contains("source") && !m["source"].is_null()) {
        if (!m["source"].is_string()) throw SchemaError(key_path(p, "source"), "expected a manifold name or null");
        e.source = m["source"].get<std::string>();
        for (const auto& me : sc.manifolds)
          if (me.name == *e.source) src = &me;
        if (!src) throw SchemaError(key_path(p, "source"), "unknown manifold '" + *e.source + "'");
      }
      const int n = tgt->manifold->n(), d = tgt->manifold->d();
      if (src && (src->manifold->n() != n || src->manifold->d() != d))
        throw SchemaError(p, "source and target have different (n, d)");
      const ContextPtr amb = ambient_context(n, d);
      e.F_input = read_series_list(m.contains("F") ? m["F"] : Json::array(), key_path(p, "F"),
                                   static_cast<std::size_t>(n), amb, K);
      e.G_input = read_series_list(require(m, "G", p), key_path(p, "G"), static_cast<std::size_t>(d), amb, K);
      SeriesVec H = e.F_input;
      for (auto& g : e.G_input) H.push_back(g);
      for (std::size_t r = 0; r < H.size(); ++r)
        if (!H[r].constant_term().is_zero())
          throw SchemaError(index_path(key_path(p, r < e.F_input.size() ? "F" : "G"),
                                       r < e.F_input.size() ? r : r - e.F_input.size()),
                            "map must fix the origin (nonzero constant term)");
      if (src && !src->identity_change) H = compose(H, src->to_old);
      if (!tgt->identity_change) H = compose(tgt->to_new, H);
      e.H = H;
      if (src) {
        SeriesVec F(H.begin(), H.begin() + n), G(H.begin() + n, H.end());
        e.pair = attach(src->manifold, tgt->manifold, F, G);
      }
      sc.maps.push_back(std::move(e));
    }
  }
  return sc;
}

}  // namespace formalcr::cli
