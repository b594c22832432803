#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace critwave {

// A compiled arithmetic expression in the single variable `rho`.
//
// Grammar (usual precedence, `^` binds tightest and is right associative):
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | 'rho' | name '(' expr ')' | '(' expr ')'
// Supported functions: sin cos sinh cosh exp ln.
//
// parse() throws ParseError with a character position on bad input.
// Evaluation is reentrant and allocation free.
class Expression {
 public:
  static Expression parse(const std::string& source);

  double operator()(double rho) const;

  const std::string& source() const { return source_; }

 private:
  enum class Op : std::uint8_t {
    push_const,
    push_rho,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    sin,
    cos,
    sinh,
    cosh,
    exp,
    ln,
  };

  std::vector<Op> ops_;
  std::vector<double> consts_;
  std::string source_;

  friend class ExpressionParser;
};

}  // namespace critwave
