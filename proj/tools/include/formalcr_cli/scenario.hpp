#pragma once

// Scenario files: manifolds given by normal-form Q or by a defining function
// to be solved, and maps between them, all as expression strings.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "formalcr/errors.hpp"
#include "formalcr/manifold.hpp"
#include "formalcr/mapping.hpp"
#include "json.hpp"

namespace formalcr::cli {

using Json = nlohmann::ordered_json;

/// Input error located at a JSON path such as "$.manifolds.M.Q[0]".
class SchemaError : public InputRejected {
public:
  SchemaError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

struct Settings {
  int truncation = 8;
  unsigned cutoff = 12;
  std::uint64_t seed = 0;
};

struct Overrides {
  std::optional<int> truncation;
  std::optional<unsigned> cutoff;
  std::optional<std::uint64_t> seed;
  bool audit = false;
};

struct ManifoldEntry {
  std::string name;
  std::string input;  // "Q" or "defining"
  ManifoldPtr manifold;
  bool was_normal = true;
  std::vector<std::size_t> order;  // new Z position -> original Z index
  SeriesVec to_new;  // new coordinates as series of the original ones
  SeriesVec to_old;  // original coordinates as series of the new ones
  bool identity_change = true;
};

struct MapEntry {
  std::string name;
  std::optional<std::string> source;  // empty: map from C^N without a source manifold
  std::string target;
  SeriesVec F_input, G_input;  // as given
  SeriesVec H;                 // in the normal coordinates of source and target
  std::optional<FormalMapPair> pair;
};

inline const std::vector<std::string>& manifold_requests() {
  static const std::vector<std::string> r = {"reality", "normality", "finite_type", "essential_type",
                                             "finite_nondegeneracy"};
  return r;
}
inline const std::vector<std::string>& map_requests() {
  static const std::vector<std::string> r = {"maps_into", "cr_transversal", "transversal",
                                             "not_totally_degenerate", "segre_finite", "finite",
                                             "transversally_regular", "jacobian", "biholomorphic",
                                             "reflection", "audit"};
  return r;
}

struct Scenario {
  int n = 0;
  int d = 0;
  Settings settings;
  std::vector<ManifoldEntry> manifolds;
  std::vector<MapEntry> maps;
  std::set<std::string> requests;

  bool wants(const std::string& r) const { return requests.count(r) != 0; }
  const ManifoldEntry& manifold(const std::string& name) const;
  const MapEntry& map(const std::string& name) const;
};

Scenario load_scenario(const Json& doc, const Overrides& overrides = {});

}  // namespace formalcr::cli
