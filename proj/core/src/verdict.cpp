#include "formalcr/verdict.hpp"

namespace formalcr {

std::string to_string(Truth t) {
  switch (t) {
    case Truth::CertifiedTrue:
      return "CertifiedTrue";
    case Truth::CertifiedFalse:
      return "CertifiedFalse";
    case Truth::Unknown:
      break;
  }
  return "UnknownAtTruncation";
}

}  // namespace formalcr
