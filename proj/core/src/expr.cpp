#include "boundcount/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace boundcount::expr {

const std::map<std::string, int, std::less<>>& functions() {
  static const std::map<std::string, int, std::less<>> table{
      {"exp", 1}, {"log", 1}, {"sqrt", 1}, {"abs", 1}, {"sin", 1},
      {"cos", 1}, {"pow", 2}, {"min", 2},  {"max", 2}};
  return table;
}

Ast make_constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::constant;
  n->value = v;
  return n;
}

Ast make_variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::variable;
  n->name = std::move(name);
  return n;
}

Ast make_unary(char op, Ast child) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::unary;
  n->op = op;
  n->args = {std::move(child)};
  return n;
}

Ast make_binary(char op, Ast lhs, Ast rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::binary;
  n->op = op;
  n->args = {std::move(lhs), std::move(rhs)};
  return n;
}

Ast make_call(std::string fn, std::vector<Ast> args) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::call;
  n->name = std::move(fn);
  n->args = std::move(args);
  return n;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Ast run() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
    Ast e = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError("expected operator or end of input", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  Ast expr() {
    Ast lhs = term();
    for (;;) {
      if (accept('+')) lhs = make_binary('+', lhs, term());
      else if (accept('-')) lhs = make_binary('-', lhs, term());
      else return lhs;
    }
  }

  Ast term() {
    Ast lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make_binary('*', lhs, unary());
      else if (accept('/')) lhs = make_binary('/', lhs, unary());
      else return lhs;
    }
  }

  Ast unary() {
    if (accept('-')) {
      // A minus directly on a numeric literal is a negative constant, so
      // printed trees parse back to the same nodes. -2^2 is still -(2^2).
      skip();
      if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
        Ast lit = number();
        if (accept('^')) return make_unary('-', make_binary('^', lit, unary()));
        return make_constant(-lit->value);
      }
      return make_unary('-', unary());
    }
    if (accept('+')) return unary();
    return power();
  }

  Ast power() {
    Ast base = primary();
    if (accept('^')) return make_binary('^', base, unary());
    return base;
  }

  Ast primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("expected number, name or '('", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Ast e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (accept('(')) {
        auto it = functions().find(name);
        if (it == functions().end()) throw ParseError("unknown function '" + name + "'", start);
        std::vector<Ast> args{expr()};
        while (accept(',')) args.push_back(expr());
        expect(')');
        if (static_cast<int>(args.size()) != it->second)
          throw ParseError("function '" + name + "' takes " + std::to_string(it->second) +
                               " argument(s)",
                           start);
        return make_call(name, std::move(args));
      }
      return make_variable(std::move(name));
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Ast number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) throw ParseError("malformed number", start);
    return make_constant(v);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double lookup(const Node& n, double r, const Bindings& b) {
  if (n.name == "r") return r;
  auto it = b.find(n.name);
  if (it == b.end()) throw DomainError("unbound variable '" + n.name + "'", r);
  return it->second;
}

// Chain rule for a scalar function with value f0, slope f1 and curvature f2
// at the inner value u.
Dual2 chain(const Dual2& u, double f0, double f1, double f2) {
  return {f0, f1 * u.d, f2 * u.d * u.d + f1 * u.dd};
}

Dual2 mul(const Dual2& a, const Dual2& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}

// Quotient with the value computed as a true division, so that x/x == 1.
Dual2 quotient(const Dual2& a, const Dual2& c, double r) {
  if (c.v == 0.0) throw DomainError("division by zero", r);
  const double q = a.v / c.v;
  const double q1 = (a.d - q * c.d) / c.v;
  return {q, q1, (a.dd - 2.0 * q1 * c.d - q * c.dd) / c.v};
}

bool is_constant(const Dual2& a) { return a.d == 0.0 && a.dd == 0.0; }

Dual2 pow_dual(const Dual2& a, const Dual2& b, double r) {
  const double n = b.v;
  if (is_constant(b) && std::floor(n) == n) {
    // Integer exponent: valid for negative bases too.
    if (n == 0.0) return {1.0, 0.0, 0.0};
    if (a.v == 0.0 && n < 0.0) throw DomainError("zero to a negative power", r);
    const double f0 = std::pow(a.v, n);
    const double f1 = n * std::pow(a.v, n - 1.0);
    const double f2 = (n == 1.0) ? 0.0 : n * (n - 1.0) * std::pow(a.v, n - 2.0);
    return chain(a, f0, f1, f2);
  }
  if (is_constant(b)) {
    if (a.v < 0.0) throw DomainError("negative base to a non-integer power", r);
    if (a.v == 0.0) {
      if (n < 0.0) throw DomainError("zero to a negative power", r);
      return chain(a, 0.0, n > 1.0 ? 0.0 : INFINITY, n > 2.0 ? 0.0 : INFINITY);
    }
    return chain(a, std::pow(a.v, n), n * std::pow(a.v, n - 1.0), n * (n - 1.0) * std::pow(a.v, n - 2.0));
  }
  if (!(a.v > 0.0)) throw DomainError("non-positive base to a variable power", r);
  // a^b = exp(b log a)
  const double la = std::log(a.v);
  const Dual2 lg = chain(a, la, 1.0 / a.v, -1.0 / (a.v * a.v));
  const Dual2 e = mul(b, lg);
  const double ev = std::exp(e.v);
  return chain(e, ev, ev, ev);
}

Dual2 eval_d(const Node& n, double r, const Bindings& b) {
  switch (n.kind) {
    case Node::Kind::constant:
      return {n.value, 0.0, 0.0};
    case Node::Kind::variable:
      if (n.name == "r") return {r, 1.0, 0.0};
      return {lookup(n, r, b), 0.0, 0.0};
    case Node::Kind::unary: {
      Dual2 a = eval_d(*n.args[0], r, b);
      return {-a.v, -a.d, -a.dd};
    }
    case Node::Kind::binary: {
      Dual2 a = eval_d(*n.args[0], r, b);
      Dual2 c = eval_d(*n.args[1], r, b);
      switch (n.op) {
        case '+': return {a.v + c.v, a.d + c.d, a.dd + c.dd};
        case '-': return {a.v - c.v, a.d - c.d, a.dd - c.dd};
        case '*': return mul(a, c);
        case '/': return quotient(a, c, r);
        case '^': return pow_dual(a, c, r);
        default: break;
      }
      break;
    }
    case Node::Kind::call: {
      const std::string& f = n.name;
      Dual2 a = eval_d(*n.args[0], r, b);
      if (f == "exp") {
        const double e = std::exp(a.v);
        return chain(a, e, e, e);
      }
      if (f == "log") {
        if (!(a.v > 0.0)) throw DomainError("log of non-positive value", r);
        return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
      }
      if (f == "sqrt") {
        if (a.v < 0.0) throw DomainError("sqrt of negative value", r);
        const double s = std::sqrt(a.v);
        if (s == 0.0) return {0.0, INFINITY, -INFINITY};
        return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
      }
      if (f == "abs") {
        const double sg = (a.v > 0.0) - (a.v < 0.0);
        return {std::abs(a.v), sg * a.d, sg * a.dd};
      }
      if (f == "sin") return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v));
      if (f == "cos") return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v));
      Dual2 c = eval_d(*n.args[1], r, b);
      if (f == "pow") return pow_dual(a, c, r);
      if (f == "min") return (c.v < a.v) ? c : a;
      if (f == "max") return (c.v > a.v) ? c : a;
      break;
    }
  }
  throw DomainError("malformed expression node", r);
}

double eval_plain(const Node& n, double r, const Bindings& b) {
  switch (n.kind) {
    case Node::Kind::constant: return n.value;
    case Node::Kind::variable: return lookup(n, r, b);
    case Node::Kind::unary: return -eval_plain(*n.args[0], r, b);
    case Node::Kind::binary: {
      const double a = eval_plain(*n.args[0], r, b);
      const double c = eval_plain(*n.args[1], r, b);
      switch (n.op) {
        case '+': return a + c;
        case '-': return a - c;
        case '*': return a * c;
        case '/':
          if (c == 0.0) throw DomainError("division by zero", r);
          return a / c;
        case '^': return pow_dual({a, 0, 0}, {c, 0, 0}, r).v;
        default: break;
      }
      break;
    }
    case Node::Kind::call: {
      const std::string& f = n.name;
      const double a = eval_plain(*n.args[0], r, b);
      if (f == "exp") return std::exp(a);
      if (f == "log") {
        if (!(a > 0.0)) throw DomainError("log of non-positive value", r);
        return std::log(a);
      }
      if (f == "sqrt") {
        if (a < 0.0) throw DomainError("sqrt of negative value", r);
        return std::sqrt(a);
      }
      if (f == "abs") return std::abs(a);
      if (f == "sin") return std::sin(a);
      if (f == "cos") return std::cos(a);
      const double c = eval_plain(*n.args[1], r, b);
      if (f == "pow") return pow_dual({a, 0, 0}, {c, 0, 0}, r).v;
      if (f == "min") return (c < a) ? c : a;
      if (f == "max") return (c > a) ? c : a;
      break;
    }
  }
  throw DomainError("malformed expression node", r);
}

void print_to(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::constant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, std::signbit(n.value) ? "(%.17g)" : "%.17g", n.value);
      out += buf;
      return;
    }
    case Node::Kind::variable:
      out += n.name;
      return;
    case Node::Kind::unary:
      // Parenthesize a constant operand so it is not folded into a literal.
      out += n.args[0]->kind == Node::Kind::constant ? "(-(" : "(-";
      print_to(*n.args[0], out);
      out += n.args[0]->kind == Node::Kind::constant ? "))" : ")";
      return;
    case Node::Kind::binary:
      out += '(';
      print_to(*n.args[0], out);
      out += n.op;
      print_to(*n.args[1], out);
      out += ')';
      return;
    case Node::Kind::call:
      out += n.name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ',';
        print_to(*n.args[i], out);
      }
      out += ')';
      return;
  }
}

void collect(const Node& n, std::set<std::string>& vars) {
  if (n.kind == Node::Kind::variable) vars.insert(n.name);
  for (const Ast& a : n.args) collect(*a, vars);
}

}  // namespace

Ast parse(std::string_view text) { return Parser(text).run(); }

std::string print(const Ast& ast) {
  std::string out;
  print_to(*ast, out);
  return out;
}

bool equal(const Ast& a, const Ast& b) {
  if (a->kind != b->kind || a->op != b->op || a->name != b->name) return false;
  if (a->kind == Node::Kind::constant && a->value != b->value) return false;
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!equal(a->args[i], b->args[i])) return false;
  return true;
}

std::set<std::string> free_variables(const Ast& ast) {
  std::set<std::string> v;
  collect(*ast, v);
  return v;
}

double evaluate(const Ast& ast, double r, const Bindings& bindings) {
  return eval_plain(*ast, r, bindings);
}

Dual2 eval_with_derivatives(const Ast& ast, double r, const Bindings& bindings) {
  return eval_d(*ast, r, bindings);
}

}  // namespace boundcount::expr
