#include "formalcr_cli/report.hpp"

#include <sstream>

#include "formalcr/random.hpp"
#include "formalcr_cli/fixtures.hpp"

namespace formalcr::cli {

Json to_json(const Verdict& v) {
  Json j;
  j["value"] = to_string(v.value);
  j["evidence"] = v.evidence;
  if (v.seed) j["seed"] = *v.seed;
  if (v.probabilistic) j["probabilistic"] = true;
  return j;
}

Json to_json(const CodimensionResult& c, const VariableContext& ctx) {
  Json j;
  if (c.finite()) {
    j["kind"] = "Finite";
    j["dimension"] = c.dimension;
    j["exact"] = c.value_is_exact;
    j["certificateDegree"] = c.certificate_degree;
    Json mons = Json::array();
    for (const auto& m : c.standard_monomials) mons.push_back(m.to_string(ctx));
    j["standardMonomials"] = mons;
  } else {
    j["kind"] = "NotFiniteUpTo";
    j["cutoff"] = c.cutoff_used;
    j["infiniteCertified"] = c.infinite_certified;
    if (c.infinite_certified) j["witness"] = c.infinite_witness;
  }
  return j;
}

namespace {

ContextPtr named_context(const std::string& prefix, int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back(prefix + std::to_string(i));
  return make_context(names);
}

Json inputs_json(const std::vector<AuditInput>& in) {
  Json a = Json::array();
  for (const auto& x : in) {
    Json j;
    j["label"] = x.label;
    j["value"] = to_string(x.value);
    if (!x.detail.empty()) j["detail"] = x.detail;
    a.push_back(j);
  }
  return a;
}

Json series_json(const SeriesVec& v) {
  Json a = Json::array();
  for (const auto& s : v) a.push_back(s.to_string());
  return a;
}

Json finiteness_json(const FinitenessResult& r, const VariableContext& ctx) {
  Json j = to_json(r.verdict);
  j["codimension"] = to_json(r.codim, ctx);
  return j;
}

Json cr_json(const CRTransversalityReport& r) {
  Json j = to_json(r.combined);
  j["criteria"] = {{"determinant", to_json(r.det_criterion)},
                   {"rank", to_json(r.rank_criterion)},
                   {"kernel", to_json(r.kernel_criterion)}};
  return j;
}

Json manifold_json(const Scenario& sc, const ManifoldEntry& e) {
  const auto& M = *e.manifold;
  Json j;
  j["n"] = M.n();
  j["d"] = M.d();
  j["input"] = e.input;
  j["normalized"] = !e.was_normal;
  bool permuted = false;
  for (std::size_t p = 0; p < e.order.size(); ++p) permuted = permuted || e.order[p] != p;
  if (permuted) {
    const auto amb = ambient_context(M.n(), M.d());
    Json o = Json::array();
    for (auto idx : e.order) o.push_back(amb->name(idx));
    j["coordinateOrder"] = o;
  }
  if (!e.identity_change) j["coordinateChange"] = series_json(e.to_new);
  j["Q"] = series_json(M.Q());
  j["exact"] = M.exact();

  const std::uint64_t seed = sc.settings.seed;
  if (sc.wants("reality")) j["reality"] = to_json(M.reality());
  if (sc.wants("normality")) j["normality"] = to_json(M.normality());
  if (sc.wants("finite_type")) {
    RankPolicy rp;
    rp.seed = derive_seed(seed, 12);
    const auto ft = finite_type_report(M, rp);
    Json f = to_json(ft.combined);
    f["criteria"] = {{"segreRank", to_json(ft.segre_rank)},
                     {"uRank", to_json(ft.u_rank)},
                     {"restriction", to_json(ft.restriction)}};
    j["finiteType"] = f;
  }
  if (sc.wants("essential_type")) {
    const auto ess = essential_type(M, sc.settings.cutoff);
    Json f = to_json(essentially_finite(ess));
    f["codimension"] = to_json(ess, *named_context("zb", M.n()));
    j["essentialType"] = f;
  }
  if (sc.wants("finite_nondegeneracy")) {
    const auto r = is_finitely_nondegenerate(M, 4);
    Json f = to_json(r.verdict);
    if (r.verdict.is_true()) f["order"] = r.order;
    j["finiteNondegeneracy"] = f;
  }
  return j;
}

Json map_json(const Scenario& sc, const MapEntry& e, ReportTotals& totals) {
  Json j;
  j["source"] = e.source ? Json(*e.source) : Json(nullptr);
  j["target"] = e.target;
  j["H"] = series_json(e.H);
  const auto& tgt = *sc.manifold(e.target).manifold;
  const auto amb = ambient_context(tgt.n(), tgt.d());
  const unsigned cutoff = sc.settings.cutoff;
  DimensionPolicy dp;
  dp.seed = derive_seed(sc.settings.seed, 11);
  dp.cutoff = cutoff;

  if (!e.pair) {
    if (sc.wants("cr_transversal")) j["crTransversal"] = to_json(is_cr_transversal_raw(tgt, e.H));
    if (sc.wants("transversal")) j["transversal"] = to_json(is_transversal_raw(tgt, e.H));
    if (sc.wants("finite")) j["finite"] = finiteness_json(finite_raw(e.H, cutoff), *amb);
    if (sc.wants("jacobian")) j["jacobianNonzero"] = to_json(jacobian_nonzero(e.H));
    if (sc.wants("biholomorphic")) j["biholomorphic"] = to_json(is_biholomorphic(e.H));
    return j;
  }

  const FormalMapPair& pair = *e.pair;
  AnalysisOptions opts;
  opts.cutoff = cutoff;
  opts.seed = sc.settings.seed;
  std::optional<AuditReport> audit;
  if (sc.wants("audit") && pair.maps_into.is_true()) audit = implication_audit(pair, opts);
  const PredicateReport* pr = audit ? &audit->predicates : nullptr;

  if (sc.wants("maps_into")) j["mapsInto"] = to_json(pair.maps_into);
  if (sc.wants("cr_transversal")) j["crTransversal"] = cr_json(pr ? pr->cr : cr_transversality_report(pair));
  if (sc.wants("transversal")) j["transversal"] = to_json(pr ? pr->transversal : is_transversal(pair));
  if (sc.wants("not_totally_degenerate"))
    j["notTotallyDegenerate"] = to_json(pr ? pr->not_totally_degenerate : not_totally_degenerate(pair));
  if (sc.wants("segre_finite"))
    j["segreFinite"] = finiteness_json(pr ? pr->segre_finite : segre_finite(pair, cutoff), *named_context("z", tgt.n()));
  if (sc.wants("finite")) j["finite"] = finiteness_json(pr ? pr->finite : finite(pair, cutoff), *amb);
  if (sc.wants("transversally_regular"))
    j["transversallyRegular"] = to_json(pr ? pr->transversally_regular : transversally_regular(pair, dp));
  if (sc.wants("jacobian")) j["jacobianNonzero"] = to_json(pr ? pr->jacobian_nonzero : jacobian_nonzero(pair.H()));
  if (sc.wants("biholomorphic")) j["biholomorphic"] = to_json(pr ? pr->biholomorphic : is_biholomorphic(pair.H()));
  if (sc.wants("reflection")) {
    Json r = Json::array();
    for (int k = 1; k <= 2 * tgt.d() + 2; ++k) {
      Json x = to_json(reflection_identity_residual(pair, k));
      x["k"] = k;
      r.push_back(x);
    }
    j["reflection"] = r;
  }
  if (sc.wants("audit")) {
    if (audit) {
      j["audit"] = to_json(*audit);
      totals.passed += audit->count(AuditStatus::Passed);
      totals.skipped += audit->count(AuditStatus::Skipped);
      totals.violated += audit->count(AuditStatus::Violated);
    } else {
      j["audit"] = {{"ran", false}, {"reason", "map is not certified to send the source into the target"}};
    }
  }
  return j;
}

void render(const Json& j, int indent, std::ostringstream& os) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_structured() && !it->empty()) {
        os << pad << it.key() << ":\n";
        render(*it, indent + 1, os);
      } else {
        os << pad << it.key() << ": " << (it->is_string() ? it->get<std::string>() : it->dump()) << "\n";
      }
    }
  } else if (j.is_array()) {
    for (const auto& x : j) {
      if (x.is_structured() && !x.empty()) {
        os << pad << "-\n";
        render(x, indent + 1, os);
      } else {
        os << pad << "- " << (x.is_string() ? x.get<std::string>() : x.dump()) << "\n";
      }
    }
  } else {
    os << pad << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

}  // namespace

Json to_json(const AuditReport& a) {
  Json j;
  Json checks = Json::array();
  for (const auto& c : a.checks) {
    Json x;
    x["name"] = c.name;
    x["status"] = to_string(c.status);
    x["antecedents"] = inputs_json(c.antecedents);
    x["consequents"] = inputs_json(c.consequents);
    checks.push_back(x);
  }
  j["checks"] = checks;
  j["summary"] = {{"passed", a.count(AuditStatus::Passed)},
                  {"skipped", a.count(AuditStatus::Skipped)},
                  {"violated", a.count(AuditStatus::Violated)}};
  return j;
}

Json build_report(const Scenario& sc, ReportTotals* totals) {
  ReportTotals t;
  Json j;
  j["settings"] = {{"n", sc.n},
                   {"d", sc.d},
                   {"truncation", sc.settings.truncation},
                   {"cutoff", sc.settings.cutoff},
                   {"seed", sc.settings.seed}};
  Json ms = Json::object();
  for (const auto& m : sc.manifolds) ms[m.name] = manifold_json(sc, m);
  j["manifolds"] = ms;
  Json mp = Json::object();
  for (const auto& m : sc.maps) mp[m.name] = map_json(sc, m, t);
  j["maps"] = mp;
  if (sc.wants("audit")) j["auditSummary"] = {{"passed", t.passed}, {"skipped", t.skipped}, {"violated", t.violated}};
  if (totals) {
    totals->passed += t.passed;
    totals->skipped += t.skipped;
    totals->violated += t.violated;
  }
  return j;
}

Json fixtures_report(const Overrides& ov, ReportTotals* totals) {
  ReportTotals t;
  const Settings s;
  Json out;
  out["settings"] = {{"truncation", ov.truncation.value_or(s.truncation)},
                     {"cutoff", ov.cutoff.value_or(s.cutoff)},
                     {"seed", ov.seed.value_or(s.seed)}};
  Json list = Json::array();
  for (const auto& f : fixtures()) {
    Json r = build_report(load_scenario(f.scenario, ov), &t);
    r.erase("settings");
    list.push_back({{"name", f.name}, {"description", f.description}, {"report", r}});
  }
  out["fixtures"] = list;
  if (ov.audit) out["auditSummary"] = {{"passed", t.passed}, {"skipped", t.skipped}, {"violated", t.violated}};
  if (totals) {
    totals->passed += t.passed;
    totals->skipped += t.skipped;
    totals->violated += t.violated;
  }
  return out;
}

std::string render_text(const Json& report) {
  std::ostringstream os;
  render(report, 0, os);
  return os.str();
}

}  // namespace formalcr::cli
