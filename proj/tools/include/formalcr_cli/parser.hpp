#pragma once

// Reader for series expressions such as "wb1 + 2*i*z1^2*zb1^2" or
// "wb1*(1 + i*z1*zb1)/(1 - i*z1*zb1)".
//
//   expr    := unary (('+' | '-') unary)*        (after the first, terms)
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := atom ('^' integer)?
//   atom    := number | 'i' | variable | '(' expr ')'
//   number  := digits ('.' digits)?
//
// Numbers are exact (0.25 is 1/4). Division by an exact nonzero constant is
// exact; division by any other unit is carried out by series inversion and
// makes the result inexact.

#include <cstddef>
#include <string>
#include <string_view>

#include "formalcr/errors.hpp"
#include "formalcr/series.hpp"

namespace formalcr::cli {

class ParseError : public InputRejected {
public:
  ParseError(std::size_t position, const std::string& message);
  std::size_t position() const { return position_; }
  const std::string& message() const { return message_; }

private:
  std::size_t position_;
  std::string message_;
};

TruncatedSeries parse_series(std::string_view text, const ContextPtr& ctx, int truncation);

}  // namespace formalcr::cli
