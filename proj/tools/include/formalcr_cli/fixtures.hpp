#pragma once

#include <string>
#include <vector>

#include "formalcr_cli/scenario.hpp"

namespace formalcr::cli {

struct Fixture {
  std::string name;
  std::string description;
  Json scenario;
};

/// Built-in corpus of hand-checked manifolds and maps.
const std::vector<Fixture>& fixtures();
const Fixture& fixture(const std::string& name);

}  // namespace formalcr::cli
