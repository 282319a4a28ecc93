#include <cctype>
#include <string>

#include "infoflow/expr.hpp"

namespace infoflow {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Expr run() {
    Expr e = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& message) const {
    SourceLocation loc;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++loc.line;
        loc.column = 1;
      } else {
        ++loc.column;
      }
    }
    throw ParseError(message, loc);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!consume(c)) fail(std::string("expected ") + what);
  }

  Expr expression() {
    Expr acc = term();
    while (true) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        acc = Expr::sum({acc, term()});
      } else if (c == '-') {
        ++pos_;
        acc = Expr::sum({acc, Expr::negate(term())});
      } else {
        return acc;
      }
    }
  }

  Expr term() {
    Expr acc = factor();
    while (true) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        acc = Expr::product({acc, factor()});
      } else if (c == '/') {
        ++pos_;
        acc = Expr::product({acc, Expr::power(factor(), -1)});
      } else {
        return acc;
      }
    }
  }

  Expr factor() {
    Expr base = atom();
    if (peek() == '^') {
      ++pos_;
      return Expr::power(std::move(base), integer());
    }
    return base;
  }

  long long integer() {
    skip_ws();
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("expected integer exponent");
    long long value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > 1'000'000) fail("exponent too large");
      ++pos_;
    }
    return negative ? -value : value;
  }

  Expr atom() {
    char c = peek();
    if (c == '\0') fail("unexpected end of input");
    if (c == '-') {
      ++pos_;
      return Expr::negate(atom());
    }
    if (c == '(') {
      ++pos_;
      Expr inner = expression();
      expect(')', "')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unknown token '") + c + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        fail("expected digits after decimal point");
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    return Expr::constant(rational_from_decimal(text_.substr(start, pos_ - start)));
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (name == "sqrt") {
      expect('(', "'(' after sqrt");
      Expr inner = expression();
      expect(')', "')'");
      return Expr::sqrt(std::move(inner));
    }
    return Expr::variable(std::move(name));
  }
};

}  // namespace

Expr parse_expr(const std::string& text) { return Parser(text).run(); }

}  // namespace infoflow
