#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "formalcr_cli/report.hpp"

using namespace formalcr;
using namespace formalcr::cli;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitViolation = 2;

void emit(const Json& report, const std::string& format) {
  if (format == "text") std::cout << render_text(report);
  else std::cout << report.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formal CR geometry: invariants of generic submanifolds and maps between them"};
  std::string scenario_path;
  Overrides ov;
  std::string format = "json";
  bool run_fixtures = false;
  app.add_option("scenario", scenario_path, "scenario JSON file");
  app.add_option("--truncation", ov.truncation, "truncation order K")->check(CLI::Range(1, 40));
  app.add_option("--cutoff", ov.cutoff, "degree cutoff for codimension computations")->check(CLI::Range(1, 60));
  app.add_option("--seed", ov.seed, "seed for randomized rank and dimension tests");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "text"}));
  app.add_flag("--audit", ov.audit, "run the implication audit on every map");
  app.add_flag("--fixtures", run_fixtures, "run the built-in fixture corpus");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }
  if (run_fixtures == !scenario_path.empty()) {
    std::cerr << "error: give either a scenario file or --fixtures\n";
    return kExitInput;
  }

  ReportTotals totals;
  Json out;
  try {
    if (run_fixtures) {
      out = fixtures_report(ov, &totals);
    } else {
      std::ifstream in(scenario_path);
      if (!in) {
        std::cerr << "error: cannot read " << scenario_path << "\n";
        return kExitInput;
      }
      Json doc;
      try {
        doc = Json::parse(in);
      } catch (const Json::parse_error& e) {
        std::cerr << "error: " << scenario_path << ": invalid JSON: " << e.what() << "\n";
        return kExitInput;
      }
      out = build_report(load_scenario(doc, ov), &totals);
    }
  } catch (const InputRejected& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InternalInconsistency& e) {
    std::cerr << "internal inconsistency: " << e.what() << "\n";
    return kExitViolation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  emit(out, format);
  return totals.violated > 0 ? kExitViolation : kExitOk;
}
