#pragma once

#include <string>

#include "formalcr_cli/scenario.hpp"

namespace formalcr::cli {

Json to_json(const Verdict& v);
Json to_json(const CodimensionResult& c, const VariableContext& ctx);
Json to_json(const AuditReport& a);

struct ReportTotals {
  std::size_t violated = 0;
  std::size_t passed = 0;
  std::size_t skipped = 0;
};

/// Evaluates every request of the scenario. Deterministic for a fixed
/// scenario and seed.
Json build_report(const Scenario& sc, ReportTotals* totals = nullptr);

/// Report over the built-in fixture corpus; settings come from the
/// overrides (defaults otherwise).
Json fixtures_report(const Overrides& overrides, ReportTotals* totals = nullptr);

/// Indented "key: value" rendering of a report.
std::string render_text(const Json& report);

}  // namespace formalcr::cli
