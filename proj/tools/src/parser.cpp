#include "formalcr_cli/parser.hpp"

#include <cctype>

namespace formalcr::cli {

ParseError::ParseError(std::size_t position, const std::string& message)
    : InputRejected("position " + std::to_string(position) + ": " + message),
      position_(position),
      message_(message) {}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

class Parser {
public:
  Parser(std::string_view text, ContextPtr ctx, int K) : s_(text), ctx_(std::move(ctx)), K_(K) {}

  TruncatedSeries run() {
    skip();
    if (pos_ == s_.size()) fail(pos_, "empty expression");
    auto r = expr();
    skip();
    if (pos_ != s_.size()) fail(pos_, std::string("unexpected '") + s_[pos_] + "'");
    return r;
  }

private:
  [[noreturn]] void fail(std::size_t at, const std::string& msg) { throw ParseError(at, msg); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  TruncatedSeries expr() {
    auto acc = term();
    for (;;) {
      if (eat('+')) acc = acc + term();
      else if (eat('-')) acc = acc - term();
      else return acc;
    }
  }

  TruncatedSeries term() {
    auto acc = unary();
    for (;;) {
      if (eat('*')) {
        acc = acc * unary();
      } else if (eat('/')) {
        skip();
        const std::size_t at = pos_;
        acc = divide(acc, unary(), at);
      } else {
        return acc;
      }
    }
  }

  TruncatedSeries divide(const TruncatedSeries& a, const TruncatedSeries& b, std::size_t at) {
    const Gaussian c = b.constant_term();
    if (c.is_zero()) fail(at, "division by a series with zero constant term");
    if (b.exact() && b.size() == 1) return (Gaussian(1) / c) * a;
    return a * invert_unit(b);
  }

  TruncatedSeries unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  TruncatedSeries power() {
    auto base = atom();
    if (eat('^')) {
      skip();
      const std::size_t at = pos_;
      if (pos_ >= s_.size() || !digit(s_[pos_])) fail(at, "exponent must be a nonnegative integer");
      unsigned long e = 0;
      while (pos_ < s_.size() && digit(s_[pos_])) {
        e = e * 10 + static_cast<unsigned long>(s_[pos_] - '0');
        if (e > 4096) fail(at, "exponent too large");
        ++pos_;
      }
      if (pos_ < s_.size() && (s_[pos_] == '.' || ident_char(s_[pos_])))
        fail(at, "exponent must be a nonnegative integer");
      return power_of(base, static_cast<unsigned>(e));
    }
    return base;
  }

  TruncatedSeries power_of(const TruncatedSeries& b, unsigned e) {
    if (e == 0) return TruncatedSeries::constant(ctx_, Gaussian(1), K_);
    return formalcr::power(b, e);
  }

  TruncatedSeries atom() {
    skip();
    if (pos_ >= s_.size()) fail(pos_, "unexpected end of expression");
    const std::size_t at = pos_;
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto r = expr();
      if (!eat(')')) fail(pos_, "expected ')'");
      return r;
    }
    if (digit(c)) return number();
    if (ident_start(c)) {
      while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
      const std::string name(s_.substr(at, pos_ - at));
      if (name == "i") return TruncatedSeries::constant(ctx_, Gaussian::imaginary_unit(), K_);
      auto idx = ctx_->find(name);
      if (!idx) fail(at, "unknown variable '" + name + "'");
      return TruncatedSeries::variable(ctx_, *idx, K_);
    }
    fail(at, std::string("unexpected '") + c + "'");
  }

  TruncatedSeries number() {
    const std::size_t at = pos_;
    std::string digits;
    std::size_t frac = 0;
    while (pos_ < s_.size() && digit(s_[pos_])) digits += s_[pos_++];
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      if (pos_ >= s_.size() || !digit(s_[pos_])) fail(at, "non-rational literal");
      while (pos_ < s_.size() && digit(s_[pos_])) {
        digits += s_[pos_++];
        ++frac;
      }
    }
    // 1e5, 0x10, 2i and friends are not rational literals in this grammar
    if (pos_ < s_.size() && (ident_char(s_[pos_]) || s_[pos_] == '.'))
      fail(at, "non-rational literal");
    mpz_class num(digits, 10);
    mpz_class den = 1;
    for (std::size_t k = 0; k < frac; ++k) den *= 10;
    Rational q(num, den);
    q.canonicalize();
    return TruncatedSeries::constant(ctx_, Gaussian(q), K_);
  }

  std::string_view s_;
  ContextPtr ctx_;
  int K_;
  std::size_t pos_ = 0;
};

}  // namespace

TruncatedSeries parse_series(std::string_view text, const ContextPtr& ctx, int truncation) {
  if (truncation < 0) throw PreconditionError("truncation must be nonnegative");
  return Parser(text, ctx, truncation).run();
}

}  // namespace formalcr::cli
