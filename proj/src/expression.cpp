#include "critwave/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>

#include "critwave/errors.hpp"

namespace critwave {

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

}  // namespace

class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& src) : src_(src) {}

  Expression run() {
    Expression out;
    out.source_ = src_;
    ops_ = &out.ops_;
    consts_ = &out.consts_;
    parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return out;
  }

 private:
  const std::string& src_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  int nest_ = 0;
  std::vector<Expression::Op>* ops_ = nullptr;
  std::vector<double>* consts_ = nullptr;

  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression error at position " + std::to_string(pos_) +
                     " in \"" + src_ + "\": " + what);
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])) != 0) {
      ++pos_;
    }
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  void emit(Op op) {
    ops_->push_back(op);
    if (op == Op::push_const || op == Op::push_rho) {
      ++depth_;
      if (depth_ > 64) fail("expression too deeply nested");
    } else if (op != Op::neg && op < Op::sin) {
      --depth_;  // binary operator pops one
    }
  }

  void emit_const(double value) {
    consts_->push_back(value);
    emit(Op::push_const);
  }

  void parse_expr() {
    parse_term();
    while (true) {
      if (eat('+')) {
        parse_term();
        emit(Op::add);
      } else if (eat('-')) {
        parse_term();
        emit(Op::sub);
      } else {
        return;
      }
    }
  }

  void parse_term() {
    parse_unary();
    while (true) {
      if (eat('*')) {
        parse_unary();
        emit(Op::mul);
      } else if (eat('/')) {
        parse_unary();
        emit(Op::div);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    // Bounds parser recursion; every nesting construct routes through here.
    if (++nest_ > 64) fail("expression too deeply nested");
    if (eat('-')) {
      parse_unary();
      emit(Op::neg);
    } else {
      parse_power();
    }
    --nest_;
  }

  void parse_power() {
    parse_atom();
    if (eat('^')) {
      parse_unary();
      emit(Op::pow);
    }
  }

  void parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expected operand");
    char c = src_[pos_];

    if (c == '(') {
      ++pos_;
      parse_expr();
      if (!eat(')')) fail("expected ')'");
      return;
    }

    if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
      parse_number();
      return;
    }

    if (std::isalpha(static_cast<unsigned char>(c)) != 0) {
      parse_name();
      return;
    }

    fail("unexpected character '" + std::string(1, c) + "'");
  }

  void parse_number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == begin) fail("bad numeric literal");
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    emit_const(value);
  }

  void parse_name() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && is_name_char(src_[pos_])) ++pos_;
    std::string name = src_.substr(start, pos_ - start);

    if (name == "rho") {
      emit(Op::push_rho);
      return;
    }
    if (name == "pi") {
      emit_const(3.14159265358979323846);
      return;
    }

    static const std::array<std::pair<const char*, Op>, 6> fns = {{
        {"sin", Op::sin},
        {"cos", Op::cos},
        {"sinh", Op::sinh},
        {"cosh", Op::cosh},
        {"exp", Op::exp},
        {"ln", Op::ln},
    }};
    for (const auto& [fname, op] : fns) {
      if (name == fname) {
        if (!eat('(')) fail("expected '(' after " + name);
        parse_expr();
        if (!eat(')')) fail("expected ')'");
        emit(op);
        return;
      }
    }
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }
};

Expression Expression::parse(const std::string& source) {
  return ExpressionParser(source).run();
}

double Expression::operator()(double rho) const {
  std::array<double, 64> stack;
  std::size_t top = 0;
  std::size_t next_const = 0;

  for (Op op : ops_) {
    switch (op) {
      case Op::push_const:
        stack[top++] = consts_[next_const++];
        break;
      case Op::push_rho:
        stack[top++] = rho;
        break;
      case Op::add:
        stack[top - 2] += stack[top - 1];
        --top;
        break;
      case Op::sub:
        stack[top - 2] -= stack[top - 1];
        --top;
        break;
      case Op::mul:
        stack[top - 2] *= stack[top - 1];
        --top;
        break;
      case Op::div:
        stack[top - 2] /= stack[top - 1];
        --top;
        break;
      case Op::pow:
        stack[top - 2] = std::pow(stack[top - 2], stack[top - 1]);
        --top;
        break;
      case Op::neg:
        stack[top - 1] = -stack[top - 1];
        break;
      case Op::sin:
        stack[top - 1] = std::sin(stack[top - 1]);
        break;
      case Op::cos:
        stack[top - 1] = std::cos(stack[top - 1]);
        break;
      case Op::sinh:
        stack[top - 1] = std::sinh(stack[top - 1]);
        break;
      case Op::cosh:
        stack[top - 1] = std::cosh(stack[top - 1]);
        break;
      case Op::exp:
        stack[top - 1] = std::exp(stack[top - 1]);
        break;
      case Op::ln:
        stack[top - 1] = std::log(stack[top - 1]);
        break;
    }
  }
  return stack[0];
}

}  // namespace critwave
