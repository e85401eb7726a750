#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "boundcount/numerics.hpp"

namespace boundcount::expr {

// Value with first and second derivative with respect to r.
struct Dual2 {
  double v = 0.0;
  double d = 0.0;
  double dd = 0.0;
};

struct Node;
using Ast = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { constant, variable, unary, binary, call };
  Kind kind = Kind::constant;
  double value = 0.0;     // constant
  std::string name;       // variable or function name
  char op = 0;            // '-' for unary; + - * / ^ for binary
  std::vector<Ast> args;  // children
};

using Bindings = std::map<std::string, double, std::less<>>;

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : ConfigError(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& msg, double r)
      : std::domain_error(msg + " at r = " + std::to_string(r)), r_(r) {}
  [[nodiscard]] double radius() const { return r_; }

 private:
  double r_;
};

// Grammar, loosest to tightest:
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := ('-'|'+') unary | power
//   power := primary ('^' unary)?        (right associative)
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
Ast parse(std::string_view text);

// Fully parenthesised, round-trip exact rendering.
std::string print(const Ast& ast);

bool equal(const Ast& a, const Ast& b);

std::set<std::string> free_variables(const Ast& ast);

double evaluate(const Ast& ast, double r, const Bindings& bindings);

// Forward-mode second-order derivatives. min/max follow the active branch
// (ties take the left argument); abs uses sign(0) = 0.
Dual2 eval_with_derivatives(const Ast& ast, double r, const Bindings& bindings);

// Builders used by tests and the random AST generator.
Ast make_constant(double v);
Ast make_variable(std::string name);
Ast make_unary(char op, Ast child);
Ast make_binary(char op, Ast lhs, Ast rhs);
Ast make_call(std::string fn, std::vector<Ast> args);

// Function table: name -> arity.
const std::map<std::string, int, std::less<>>& functions();

}  // namespace boundcount::expr
