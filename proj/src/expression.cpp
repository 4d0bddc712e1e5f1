#include "bergman/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "bergman/error.hpp"

namespace bergman {

struct Expression::Node {
  enum class Kind { Number, VarS, VarU, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
  double value = 0.0;
  std::string fn;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(double s, double u) const {
    switch (kind) {
      case Kind::Number: return value;
      case Kind::VarS: return s;
      case Kind::VarU: return u;
      case Kind::Neg: return -args[0]->eval(s, u);
      case Kind::Add: return args[0]->eval(s, u) + args[1]->eval(s, u);
      case Kind::Sub: return args[0]->eval(s, u) - args[1]->eval(s, u);
      case Kind::Mul: return args[0]->eval(s, u) * args[1]->eval(s, u);
      case Kind::Div: return args[0]->eval(s, u) / args[1]->eval(s, u);
      case Kind::Pow: return std::pow(args[0]->eval(s, u), args[1]->eval(s, u));
      case Kind::Call: {
        const double a = args[0]->eval(s, u);
        if (fn == "exp") return std::exp(a);
        if (fn == "log") return std::log(a);
        if (fn == "sqrt") return std::sqrt(a);
        if (fn == "abs") return std::abs(a);
        if (fn == "sin") return std::sin(a);
        if (fn == "cos") return std::cos(a);
        return std::pow(a, args[1]->eval(s, u));  // pow
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, std::vector<NodePtr> args = {}, double value = 0.0, std::string fn = {}) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->args = std::move(args);
  n->value = value;
  n->fn = std::move(fn);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ConfigInvalid,
                "expression \"" + src_ + "\" at column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Kind::Add, {lhs, term()});
      else if (accept('-')) lhs = make(Kind::Sub, {lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Kind::Mul, {lhs, unary()});
      else if (accept('/')) lhs = make(Kind::Div, {lhs, unary()});
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Kind::Number, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const std::string id = src_.substr(start, pos_ - start);
      if (id == "s" || id == "r") return make(Kind::VarS);
      if (id == "u") return make(Kind::VarU);
      if (id == "pi") return make(Kind::Number, {}, std::numbers::pi);
      if (id == "e") return make(Kind::Number, {}, std::numbers::e);
      static const char* const unary_fns[] = {"exp", "log", "sqrt", "abs", "sin", "cos"};
      for (const char* f : unary_fns) {
        if (id == f) {
          if (!accept('(')) fail("expected '(' after " + id);
          NodePtr a = expr();
          if (!accept(')')) fail("expected ')'");
          return make(Kind::Call, {a}, 0.0, id);
        }
      }
      if (id == "pow") {
        if (!accept('(')) fail("expected '(' after pow");
        NodePtr a = expr();
        if (!accept(',')) fail("expected ',' in pow");
        NodePtr b = expr();
        if (!accept(')')) fail("expected ')'");
        return make(Kind::Call, {a, b}, 0.0, id);
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& source) : source_(source), root_(Parser(source_).parse()) {}

double Expression::operator()(double s, double u) const { return root_->eval(s, u); }

}  // namespace bergman
