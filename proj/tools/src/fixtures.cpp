#include "formalcr_cli/fixtures.hpp"

namespace formalcr::cli {

namespace {

Json power_pair(int k) {
  const std::string K = std::to_string(k);
  return Json::parse(R"json({"n": 1, "d": 1,
    "manifolds": {"M": {"Q": ["wb1 + 2*i*z1^)json" + K + "*zb1^" + K + R"json("]},
                  "Mt": {"Q": ["wb1 + 2*i*z1*zb1"]}},
    "maps": {"H": {"F": ["z1^)json" + K + R"json("], "G": ["w1"], "source": "M", "target": "Mt"}}})json");
}

std::vector<Fixture> build() {
  std::vector<Fixture> out;
  out.push_back({"quartic-to-sphere",
                 "Im w = |z|^4 mapped onto Im w = |z|^2 by z -> z^2",
                 power_pair(2)});
  for (int k = 3; k <= 4; ++k)
    out.push_back({"power-family-k" + std::to_string(k),
                   "Im w = |z|^(2k) mapped onto Im w = |z|^2 by z -> z^k", power_pair(k)});
  out.push_back({"collapse-into-levi-flat-type",
                 "sphere mapped by (z, w) -> (z, 0) into Im w = Re w |z|^2, which is of infinite type",
                 Json::parse(R"json({"n": 1, "d": 1,
    "manifolds": {"M": {"Q": ["wb1 + 2*i*z1*zb1"]},
                  "Mt": {"defining": ["w1 - wb1 - i*(w1 + wb1)*z1*zb1"]}},
    "maps": {"H": {"F": ["z1"], "G": ["0"], "source": "M", "target": "Mt"}}})json")});
  out.push_back({"infinite-type-source",
                 "Im w = |z w|^2, of infinite type, mapped to the sphere by (z w, w)",
                 Json::parse(R"json({"n": 1, "d": 1,
    "manifolds": {"M": {"defining": ["w1 - wb1 - 2*i*z1*zb1*w1*wb1"]},
                  "Mt": {"Q": ["wb1 + 2*i*z1*zb1"]}},
    "maps": {"H": {"F": ["z1*w1"], "G": ["w1"], "source": "M", "target": "Mt"}}})json")});
  out.push_back({"transversal-not-cr-transversal",
                 "map of C^2 into the totally real plane R^2 with image a complex line",
                 Json::parse(R"json({"n": 0, "d": 2,
    "manifolds": {"R2": {"Q": ["wb1", "wb2"]}},
    "maps": {"H": {"G": ["w1", "i*w1"], "source": null, "target": "R2"}}})json")});
  out.push_back({"segre-degenerate-not-finite",
                 "Im w = |z1|^2 + |z2 w|^2 mapped to the sphere in C^3 by (z1, z2 w, w)",
                 Json::parse(R"json({"n": 2, "d": 1,
    "manifolds": {"M": {"defining": ["w1 - wb1 - 2*i*z1*zb1 - 2*i*z2*zb2*w1*wb1"]},
                  "Mt": {"Q": ["wb1 + 2*i*(z1*zb1 + z2*zb2)"]}},
    "maps": {"H": {"F": ["z1", "z2*w1"], "G": ["w1"], "source": "M", "target": "Mt"}}})json")});
  return out;
}

}  // namespace

const std::vector<Fixture>& fixtures() {
  static const std::vector<Fixture> all = build();
  return all;
}

const Fixture& fixture(const std::string& name) {
  for (const auto& f : fixtures())
    if (f.name == name) return f;
  throw StructuralError("no fixture named '" + name + "'");
}

}  // namespace formalcr::cli
