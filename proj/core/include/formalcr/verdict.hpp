#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace formalcr {

enum class Truth { CertifiedTrue, CertifiedFalse, Unknown };

/// "CertifiedTrue", "CertifiedFalse", "UnknownAtTruncation".
std::string to_string(Truth t);

/// Three-valued answer with the certificate that justifies it.
struct Verdict {
  Truth value = Truth::Unknown;
  std::string evidence;
  std::optional<std::uint64_t> seed;  // set when randomness was involved
  bool probabilistic = false;         // true only when the answer may be wrong

  static Verdict yes(std::string evidence) { return {Truth::CertifiedTrue, std::move(evidence), {}, false}; }
  static Verdict no(std::string evidence) { return {Truth::CertifiedFalse, std::move(evidence), {}, false}; }
  static Verdict unknown(std::string evidence) { return {Truth::Unknown, std::move(evidence), {}, false}; }

  bool is_true() const { return value == Truth::CertifiedTrue; }
  bool is_false() const { return value == Truth::CertifiedFalse; }
  bool is_unknown() const { return value == Truth::Unknown; }
};

}  // namespace formalcr
