// One PASS/FAIL line per acceptance criterion. Optional argv[1]: path of the
// formalcr executable, used to compare two real CLI runs byte for byte.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "formalcr/linalg.hpp"
#include "formalcr/local_algebra.hpp"
#include "formalcr/mapping.hpp"
#include "formalcr/random.hpp"
#include "formalcr_cli/fixtures.hpp"
#include "formalcr_cli/report.hpp"

using namespace formalcr;
using namespace formalcr::cli;

namespace {

struct Outcome {
  bool ok = true;
  std::vector<std::string> failures;
  std::string note;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (failures.size() < 8) failures.push_back(what);
    }
  }
};

void report(const std::string& name, const Outcome& o) {
  std::cout << (o.ok ? "PASS " : "FAIL ") << name;
  if (!o.note.empty()) std::cout << " (" << o.note << ")";
  std::cout << "\n";
  for (const auto& f : o.failures) std::cout << "    " << f << "\n";
  std::cout.flush();
}

bool is(const Verdict& v, Truth t) { return v.value == t; }
constexpr Truth T = Truth::CertifiedTrue;
constexpr Truth F = Truth::CertifiedFalse;
constexpr Truth U = Truth::Unknown;

const AuditCheck* find_check(const AuditReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

struct Corpus {
  std::vector<Scenario> fixtures;
  std::vector<GeneratedTriple> triples;
  double triple_seconds = 0;
  std::size_t violated = 0;
  std::size_t passed = 0;
};

// ---- fixture table -----------------------------------------------------------

void check_power_pair(Outcome& o, const Scenario& sc, unsigned k) {
  const auto& pair = *sc.map("H").pair;
  const std::string tag = "k=" + std::to_string(k) + ": ";
  auto rep = implication_audit(pair);
  const auto& p = rep.predicates;
  o.expect(is(pair.maps_into, T), tag + "mapping-into residual");
  o.expect(p.source_ess.finite() && p.source_ess.dimension == k, tag + "Ess(M) = k");
  o.expect(p.target_ess.finite() && p.target_ess.dimension == 1, tag + "Ess(Mt) = 1");
  o.expect(p.finite.codim.finite() && p.finite.codim.dimension == k, tag + "mult(H) = k");
  o.expect(p.segre_finite.codim.finite() && p.segre_finite.codim.dimension == k, tag + "m_H = k");
  o.expect(is(p.cr.combined, T), tag + "CR transversal");
  const AuditCheck* c = find_check(rep, "essential-type-multiplicity");
  o.expect(c && c->status == AuditStatus::Passed, tag + "Ess(M) = mult(H) Ess(Mt) audited PASSED");
  o.expect(p.source_ess.dimension == p.finite.codim.dimension * p.target_ess.dimension, tag + "k = k * 1");
}

Outcome fixture_table(Corpus& corpus) {
  Outcome o;
  for (const auto& f : fixtures()) corpus.fixtures.push_back(load_scenario(f.scenario));
  auto sc = [&](const std::string& name) -> const Scenario& {
    for (std::size_t i = 0; i < fixtures().size(); ++i)
      if (fixtures()[i].name == name) return corpus.fixtures[i];
    throw StructuralError(name);
  };

  check_power_pair(o, sc("quartic-to-sphere"), 2);
  check_power_pair(o, sc("power-family-k3"), 3);
  check_power_pair(o, sc("power-family-k4"), 4);

  {
    const auto& s = sc("collapse-into-levi-flat-type");
    const auto& pair = *s.map("H").pair;
    o.expect(is(pair.maps_into, T), "collapse: residual");
    o.expect(is(not_totally_degenerate(pair), T), "collapse: not totally degenerate");
    o.expect(is(is_cr_transversal(pair), F), "collapse: CR transversal false");
    o.expect(is(transversally_regular(pair), F), "collapse: transversally regular false");
    o.expect(is(is_finite_type(*pair.source), T), "collapse: M finite type");
    o.expect(is(is_finite_type(*pair.target), U), "collapse: Mt finite type not certified");
  }
  {
    const auto& s = sc("infinite-type-source");
    const auto& pair = *s.map("H").pair;
    o.expect(is(pair.maps_into, T), "infinite-type-source: residual");
    o.expect(is(jacobian_nonzero(pair.H()), T), "infinite-type-source: Jac nonzero");
    o.expect(!is_finite_type(*pair.source).is_true(), "infinite-type-source: M not finite type up to K");
    o.expect(is(is_finite_type(*pair.target), T), "infinite-type-source: Mt finite type");
  }
  {
    const auto& s = sc("transversal-not-cr-transversal");
    const auto& m = s.map("H");
    const auto& R2 = *s.manifold("R2").manifold;
    o.expect(is(is_transversal_raw(R2, m.H), T), "plane: transversal");
    o.expect(is(is_cr_transversal_raw(R2, m.H), F), "plane: CR transversal false");
  }
  {
    const auto& s = sc("segre-degenerate-not-finite");
    const auto& pair = *s.map("H").pair;
    o.expect(is(pair.maps_into, T), "not-finite: residual");
    o.expect(is(jacobian_nonzero(pair.H()), T), "not-finite: Jac nonzero");
    o.expect(is(is_cr_transversal(pair), T), "not-finite: CR transversal");
    const auto fin = finite(pair, 12);
    o.expect(!fin.codim.finite() && !fin.verdict.is_true(), "not-finite: not finite up to cutoff");
    o.expect(is(segre_finite(pair, 12).verdict, F), "not-finite: Segre finite false");
  }
  o.note = std::to_string(fixtures().size()) + " fixtures";
  return o;
}

// ---- generated triples -------------------------------------------------------

Outcome audit_triples(Corpus& corpus) {
  Outcome o;
  const std::array<std::pair<int, int>, 3> shapes = {{{1, 1}, {2, 1}, {1, 2}}};
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 100; ++i) {
    TripleSpec spec;
    spec.n = shapes[static_cast<std::size_t>(i % 3)].first;
    spec.d = shapes[static_cast<std::size_t>(i % 3)].second;
    spec.truncation = 8;
    spec.seed = static_cast<std::uint64_t>(i / 3);
    const std::string tag = "(" + std::to_string(spec.n) + "," + std::to_string(spec.d) + ") seed " +
                            std::to_string(spec.seed) + ": ";
    try {
      auto g = generate_audit_triple(spec);
      AnalysisOptions opts;
      opts.cutoff = 12;
      opts.seed = spec.seed;
      auto rep = implication_audit(g.pair, opts);
      corpus.violated += rep.count(AuditStatus::Violated);
      corpus.passed += rep.count(AuditStatus::Passed);
      for (const auto& c : rep.checks) o.expect(c.status != AuditStatus::Violated, tag + c.name + " VIOLATED");
      corpus.triples.push_back(std::move(g));
    } catch (const std::exception& e) {
      o.expect(false, tag + e.what());
    }
  }
  corpus.triple_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.expect(corpus.triple_seconds <= 600.0, "runtime above 10 minutes");
  std::ostringstream note;
  note.precision(1);
  note << std::fixed << corpus.triples.size() << " triples, " << corpus.passed << " checks passed, "
       << corpus.violated << " violated, " << corpus.triple_seconds << " s";
  o.note = note.str();
  return o;
}

// ---- reflection --------------------------------------------------------------

Outcome reflection(const Corpus& corpus) {
  Outcome o;
  std::size_t count = 0;
  auto run = [&](const FormalMapPair& p, const std::string& tag) {
    for (int k = 1; k <= 2 * p.target->d() + 2; ++k) {
      ++count;
      o.expect(reflection_identity_residual(p, k).is_true(), tag + " k=" + std::to_string(k));
    }
  };
  for (std::size_t i = 0; i < corpus.fixtures.size(); ++i)
    for (const auto& m : corpus.fixtures[i].maps)
      if (m.pair) run(*m.pair, fixtures()[i].name);
  for (const auto& t : corpus.triples) run(t.pair, "triple seed " + std::to_string(t.seed_used));
  o.note = std::to_string(count) + " identities";
  return o;
}

// ---- codimension and rank oracles --------------------------------------------

std::size_t staircase(const std::vector<std::vector<unsigned>>& gens, std::size_t n, unsigned box) {
  std::size_t count = 0;
  std::vector<unsigned> e(n, 0);
  for (;;) {
    bool under = true;
    for (const auto& g : gens) {
      bool div = true;
      for (std::size_t i = 0; i < n && div; ++i) div = g[i] <= e[i];
      if (div) {
        under = false;
        break;
      }
    }
    if (under) ++count;
    std::size_t i = 0;
    while (i < n && ++e[i] == box) e[i++] = 0;
    if (i == n) return count;
  }
}

// Both rank paths applied to the stored jets read as exact polynomials, with
// enough truncation headroom that no minor loses a product term.
SeriesMatrix as_polynomials(const SeriesMatrix& a) {
  std::vector<TruncatedSeries> entries;
  int top = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) top = std::max(top, a(i, j).truncation());
  const int K = top * static_cast<int>(std::min(a.rows(), a.cols())) + 1;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      TruncatedSeries e(a.context(), K, true);
      for (const auto& [m, c] : a(i, j).terms()) e.add_term(m, c);
      entries.push_back(e);
    }
  return SeriesMatrix(a.rows(), a.cols(), std::move(entries));
}

void rank_agreement(Outcome& o, const SeriesMatrix& a, const std::string& tag, std::size_t& count) {
  if (a.rows() == 0 || a.cols() == 0) return;
  const std::size_t r = std::min<std::size_t>(a.rows(), 4), c = std::min<std::size_t>(a.cols(), 4);
  std::vector<std::size_t> rows(r), cols(c);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  const SeriesMatrix sub = as_polynomials(a.submatrix(rows, cols));
  ++count;
  o.expect(evaluation_rank(sub) == symbolic_rank(sub), tag);
}

std::vector<ManifoldPtr> corpus_manifolds(const Corpus& corpus) {
  std::vector<ManifoldPtr> out;
  for (const auto& sc : corpus.fixtures)
    for (const auto& m : sc.manifolds) out.push_back(m.manifold);
  for (const auto& t : corpus.triples) {
    out.push_back(t.pair.source);
    out.push_back(t.pair.target);
  }
  return out;
}

Outcome codimension_and_rank(const Corpus& corpus) {
  Outcome o;
  SeededRng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = static_cast<std::size_t>(1 + trial % 3);
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
    const auto ctx = make_context(names);
    std::vector<std::vector<unsigned>> gens;
    unsigned box = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<unsigned> e(n, 0);
      e[i] = static_cast<unsigned>(rng.uniform(1, n == 3 ? 4 : 6));
      box = std::max(box, e[i]);
      gens.push_back(e);
    }
    for (long k = rng.uniform(0, 3); k > 0; --k) {
      std::vector<unsigned> e(n, 0);
      for (auto& v : e) v = static_cast<unsigned>(rng.uniform(0, 3));
      if (std::accumulate(e.begin(), e.end(), 0u) > 0) gens.push_back(e);
    }
    std::vector<TruncatedSeries> series;
    for (const auto& e : gens) {
      Monomial m;
      for (std::size_t i = 0; i < n; ++i) m.set(i, e[i]);
      series.push_back(TruncatedSeries::monomial(ctx, m, Gaussian(1), 16));
    }
    const auto r = codimension(IdealPresentation(ctx, series), 16);
    o.expect(r.finite() && r.dimension == staircase(gens, n, box), "monomial ideal " + std::to_string(trial));
  }

  std::size_t count = 0;
  for (const auto& M : corpus_manifolds(corpus)) {
    for (int k = 1; k <= std::min(M->segre_bound(), 3); ++k) {
      const auto& s = M->segre(k);
      std::vector<std::size_t> t(s.context->size());
      std::iota(t.begin(), t.end(), std::size_t{0});
      rank_agreement(o, jacobian(s.v, t), "Segre Jacobian k=" + std::to_string(k), count);
    }
  }
  for (const auto& tr : corpus.triples) {
    const auto H = tr.pair.H();
    std::vector<std::size_t> z(H.size());
    std::iota(z.begin(), z.end(), std::size_t{0});
    rank_agreement(o, jacobian(H, z), "map Jacobian", count);
  }
  o.note = "100 monomial ideals, " + std::to_string(count) + " rank comparisons";
  return o;
}

// ---- structural identities ---------------------------------------------------

Outcome structural(const Corpus& corpus) {
  Outcome o;
  std::size_t manifolds = 0, solved = 0;
  for (const auto& M : corpus_manifolds(corpus)) {
    ++manifolds;
    try {
      const auto ft = finite_type_report(*M);
      o.expect(ft.segre_rank.value == ft.u_rank.value, "Segre rank and u rank criteria disagree");
      o.expect(ft.segre_rank.value == ft.restriction.value, "restriction criterion disagrees");
    } catch (const InternalInconsistency& e) {
      o.expect(false, e.what());
    }
    for (int m = 1; 2 * m <= 2 * M->d() + 2; ++m)
      o.expect(segre_vanishes_on_W(*M, m).is_true(), "W-vanishing m=" + std::to_string(m));
  }

  SeededRng rng(43);
  auto g = [&]() {
    return Gaussian(Rational(rng.uniform(-5, 5)), Rational(rng.uniform(-5, 5)));
  };
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(2 + trial % 4);
    GaussMatrix C(n, n), U(n, n);
    GaussRow x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = g();
      y[i] = g();
      for (std::size_t j = 0; j < n; ++j) C(i, j) = g();
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) U(i, j) = C(i, j) + x[i] * y[j];
    o.expect(rank_one_update_determinant(C, x, y) == determinant(U), "rank-one determinant " + std::to_string(trial));
  }

  auto solved_check = [&](const ManifoldPtr& M, const std::string& tag) {
    ++solved;
    o.expect(M->reality().is_true() && M->normality().is_true(), tag + ": reality/normality");
    const auto again = normalize(M->n(), M->d(), M->Q());
    o.expect(again.was_normal, tag + ": normalize not idempotent");
    for (std::size_t j = 0; j < M->Q().size(); ++j)
      o.expect(again.manifold->Q()[j].same_terms(M->Q()[j]), tag + ": normalize changed Q");
  };
  for (std::size_t i = 0; i < corpus.fixtures.size(); ++i)
    for (const auto& m : corpus.fixtures[i].manifolds)
      if (m.input == "defining") solved_check(m.manifold, fixtures()[i].name + "/" + m.name);
  for (const auto& t : corpus.triples) solved_check(t.pair.source, "triple seed " + std::to_string(t.seed_used));

  o.note = std::to_string(manifolds) + " manifolds, 200 determinant instances, " + std::to_string(solved) +
           " solved manifolds";
  return o;
}

// ---- determinism -------------------------------------------------------------

std::string run_process(const std::string& cmd, int& rc) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    rc = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
  rc = pclose(p);
  return out;
}

Outcome determinism(const char* cli) {
  Outcome o;
  Overrides ov;
  ov.audit = true;
  ov.seed = 0;
  const std::string a = fixtures_report(ov).dump(2);
  const std::string b = fixtures_report(ov).dump(2);
  o.expect(a == b, "in-process fixture reports differ");
  if (cli) {
    const std::string cmd = std::string("\"") + cli + "\" --fixtures --audit --seed 0 --format json";
    int r1 = 0, r2 = 0;
    const std::string x = run_process(cmd, r1);
    const std::string y = run_process(cmd, r2);
    o.expect(r1 == 0 && r2 == 0, "CLI exit status");
    o.expect(!x.empty() && x == y, "CLI reports differ");
    o.expect(x == a + "\n", "CLI report differs from the library report");
    o.note = "two CLI runs, " + std::to_string(x.size()) + " bytes each";
  } else {
    o.note = "in-process only";
  }
  return o;
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    Outcome o;
    o.expect(false, std::string("exception: ") + e.what());
    return o;
  }
}

}  // namespace

int main(int argc, char** argv) {
  Corpus corpus;
  std::vector<std::pair<std::string, Outcome>> results;
  results.emplace_back("fixture-table", guarded([&] { return fixture_table(corpus); }));
  report(results.back().first, results.back().second);
  results.emplace_back("audit-of-generated-triples", guarded([&] { return audit_triples(corpus); }));
  report(results.back().first, results.back().second);
  results.emplace_back("reflection-identities", guarded([&] { return reflection(corpus); }));
  report(results.back().first, results.back().second);
  results.emplace_back("codimension-and-rank-oracles", guarded([&] { return codimension_and_rank(corpus); }));
  report(results.back().first, results.back().second);
  results.emplace_back("structural-identities", guarded([&] { return structural(corpus); }));
  report(results.back().first, results.back().second);
  results.emplace_back("report-determinism", guarded([&] { return determinism(argc > 1 ? argv[1] : nullptr); }));
  report(results.back().first, results.back().second);

  bool all = true;
  for (const auto& r : results) all = all && r.second.ok;
  return all ? 0 : 1;
}
