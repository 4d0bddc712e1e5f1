#pragma once

#include <memory>
#include <string>

namespace bergman {

// Small arithmetic expression in one radial variable, used for custom weight
// and measure densities read from scenario files.
//
// Grammar: + - * / ^ (right associative), unary minus, parentheses, numbers,
// the constants `pi` and `e`, and the functions exp, log, sqrt, abs, sin, cos,
// pow(a, b). Variables: `s` or `r` (the radius) and `u` (= 1 - s). Writing the
// density in terms of `u` keeps precision near the boundary circle.
class Expression {
 public:
  struct Node;

  explicit Expression(const std::string& source);
  Expression(const Expression&) = default;
  Expression& operator=(const Expression&) = default;

  // Evaluates with s = 1 - u. Both are passed so that `u` never suffers the
  // cancellation of computing 1 - s.
  double operator()(double s, double u) const;

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace bergman
