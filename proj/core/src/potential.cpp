#include "boundcount/potential.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace boundcount {

class Potential::Impl {
 public:
  virtual ~Impl() = default;
  [[nodiscard]] virtual VEval eval(double r) const = 0;

  PotentialKind kind = PotentialKind::expression;
  ParamMap params;
  double g = 1.0;
  double R = 1.0;
  int ell = 0;
  Potential bare;  // empty for bare potentials
  std::vector<double> edges;
  DecayHint decay;
  std::string canonical;
  std::string spec_text;
};

namespace {

using std::numbers::pi;

void fmt_param(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char tmp[40];
    std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) {
      out += tmp;
      return;
    }
  }
  out += buf;
}

std::string canonical_of(const std::string& head, const ParamMap& params,
                         const std::vector<std::string>& order) {
  std::string s = head + ":";
  bool first = true;
  for (const auto& k : order) {
    auto it = params.find(k);
    if (it == params.end()) continue;
    if (!first) s += ",";
    first = false;
    s += k + "=";
    fmt_param(s, it->second);
  }
  for (const auto& [k, v] : params) {
    if (std::find(order.begin(), order.end(), k) != order.end()) continue;
    if (!first) s += ",";
    first = false;
    s += k + "=";
    fmt_param(s, v);
  }
  return s;
}

double rmax_rule(double g, double R) { return R * std::max(40.0, 8.0 * std::log1p(std::max(g, 0.0))); }

class Morse final : public Potential::Impl {
 public:
  double alpha = 1.0;
  VEval eval(double r) const override {
    const double x = r / R;
    const double e1 = std::exp(-(x - alpha));
    const double e2 = e1 * e1;
    const double c = g * g / (R * R);
    return {-c * (2.0 * e1 - e2), -c / R * (-2.0 * e1 + 2.0 * e2), -c / (R * R) * (2.0 * e1 - 4.0 * e2)};
  }
};

class Exponential final : public Potential::Impl {
 public:
  VEval eval(double r) const override {
    const double c = g * g / (R * R) * std::exp(-r / R);
    return {-c, c / R, -c / (R * R)};
  }
};

class Yukawa final : public Potential::Impl {
 public:
  VEval eval(double r) const override {
    const double x = r / R;
    const double c = g * g / (R * R) * std::exp(-x);
    return {-c / x, c / R * (1.0 / x + 1.0 / (x * x)),
            -c / (R * R) * (1.0 / x + 2.0 / (x * x) + 2.0 / (x * x * x))};
  }
};

class SquareWell final : public Potential::Impl {
 public:
  VEval eval(double r) const override {
    if (r < R) return {-g * g / (R * R), 0.0, 0.0};
    return {};
  }
};

class Saturating final : public Potential::Impl {
 public:
  int ell_design = 0;
  double alpha = 1.0;
  VEval eval(double r) const override {
    const double x = r / R;
    if (x >= alpha) return {};
    const double c = g * g / (R * R);
    const int m = 4 * ell_design;
    if (m == 0) return {-c, 0.0, 0.0};
    const double xm2 = std::pow(x, m - 2);
    return {-c * xm2 * x * x, -c / R * m * xm2 * x, -c / (R * R) * m * (m - 1) * xm2};
  }
};

class Expression final : public Potential::Impl {
 public:
  expr::Ast ast;
  expr::Bindings bindings;
  VEval eval(double r) const override {
    expr::Dual2 d = expr::eval_with_derivatives(ast, r, bindings);
    return {d.v, d.d, d.dd};
  }
};

class Effective final : public Potential::Impl {
 public:
  VEval eval(double r) const override {
    VEval b = bare.eval(r);
    const double c = ell * (ell + 1.0);
    const double r2 = r * r;
    return {b.v + c / r2, b.d1 - 2.0 * c / (r2 * r), b.d2 + 6.0 * c / (r2 * r2)};
  }
};

double require(const ParamMap& p, const char* name) {
  auto it = p.find(name);
  if (it == p.end()) throw ConfigError(std::string("missing parameter '") + name + "'");
  if (!std::isfinite(it->second)) throw ConfigError(std::string("parameter '") + name + "' must be finite");
  return it->second;
}

void positive(double v, const char* name) {
  if (!(v > 0.0)) throw ConfigError(std::string("parameter '") + name + "' must be positive");
}

int nonneg_int(double v, const char* name) {
  if (!(v >= 0.0) || std::floor(v) != v || v > 1e6)
    throw ConfigError(std::string("parameter '") + name + "' must be a nonnegative integer");
  return static_cast<int>(v);
}

void only(const ParamMap& p, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("unknown parameter '" + k + "'");
  }
}

ParamMap normalize_aliases(ParamMap p) {
  auto rename = [&](const char* from, const char* to) {
    auto it = p.find(from);
    if (it == p.end()) return;
    if (p.count(to)) throw ConfigError(std::string("parameter '") + to + "' given twice");
    p[to] = it->second;
    p.erase(from);
  };
  rename("ell_design", "ell");
  rename("N_target", "N");
  rename("a", "alpha");
  return p;
}

}  // namespace

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::morse: return "morse";
    case PotentialKind::exponential: return "exponential";
    case PotentialKind::yukawa: return "yukawa";
    case PotentialKind::square_well: return "square_well";
    case PotentialKind::saturating: return "saturating";
    case PotentialKind::expression: return "expr";
  }
  return "?";
}

PotentialKind kind_from_string(std::string_view n) {
  if (n == "morse" || n == "M") return PotentialKind::morse;
  if (n == "exponential" || n == "exp" || n == "E") return PotentialKind::exponential;
  if (n == "yukawa" || n == "Y") return PotentialKind::yukawa;
  if (n == "square_well" || n == "square" || n == "sw") return PotentialKind::square_well;
  if (n == "saturating" || n == "sat") return PotentialKind::saturating;
  if (n == "expr") return PotentialKind::expression;
  throw ConfigError("unknown potential kind '" + std::string(n) + "'");
}

double saturating_alpha(double g, int ell, double delta, int n_target) {
  const double k = 2.0 * ell + 1.0;
  return std::pow(pi * k * (n_target + delta) / g, 1.0 / k);
}

namespace {
Potential build_builtin(PotentialKind kind, const ParamMap& raw, const std::string* spec_text) {
  const ParamMap params = normalize_aliases(raw);
  std::shared_ptr<Potential::Impl> impl;
  std::vector<std::string> order{"g", "R"};
  switch (kind) {
    case PotentialKind::morse: {
      only(params, {"g", "R", "alpha"});
      auto m = std::make_shared<Morse>();
      m->alpha = require(params, "alpha");
      impl = m;
      order.push_back("alpha");
      break;
    }
    case PotentialKind::exponential:
      only(params, {"g", "R"});
      impl = std::make_shared<Exponential>();
      break;
    case PotentialKind::yukawa:
      only(params, {"g", "R"});
      impl = std::make_shared<Yukawa>();
      break;
    case PotentialKind::square_well:
      only(params, {"g", "R"});
      impl = std::make_shared<SquareWell>();
      break;
    case PotentialKind::saturating: {
      only(params, {"g", "R", "ell", "delta", "N"});
      auto s = std::make_shared<Saturating>();
      s->ell_design = nonneg_int(require(params, "ell"), "ell");
      const double delta = require(params, "delta");
      if (!(delta >= 0.0 && delta < 0.5)) throw ConfigError("parameter 'delta' must lie in [0, 1/2)");
      (void)nonneg_int(require(params, "N"), "N");
      impl = s;
      order.insert(order.end(), {"ell", "delta", "N"});
      break;
    }
    case PotentialKind::expression:
      throw ConfigError("expression potentials are built with make_expression");
  }
  impl->kind = kind;
  impl->params = params;
  impl->g = require(params, "g");
  impl->R = require(params, "R");
  positive(impl->g, "g");
  positive(impl->R, "R");
  impl->decay = {DecayKind::exponential, 2.0, rmax_rule(impl->g, impl->R)};
  if (kind == PotentialKind::square_well) {
    impl->edges = {impl->R};
    impl->decay = {DecayKind::compact, 2.0, impl->R};
  }
  if (auto* s = dynamic_cast<Saturating*>(impl.get())) {
    s->alpha = saturating_alpha(impl->g, s->ell_design, params.at("delta"),
                                static_cast<int>(params.at("N")));
    impl->edges = {s->alpha * impl->R};
    impl->decay = {DecayKind::compact, 2.0, s->alpha * impl->R};
  }
  impl->canonical = canonical_of(to_string(kind), params, order);
  impl->spec_text = spec_text ? *spec_text : impl->canonical;
  return Potential(impl);
}

Potential build_expression(std::string_view text, const ParamMap& params, const std::string* spec_text) {
  auto e = std::make_shared<Expression>();
  e->ast = expr::parse(text);
  for (const auto& [k, v] : params) e->bindings[k] = v;
  for (const auto& v : expr::free_variables(e->ast))
    if (v != "r" && !params.count(v)) throw ConfigError("expression uses unbound variable '" + v + "'");
  if (params.count("r")) throw ConfigError("'r' is reserved for the radius");
  e->kind = PotentialKind::expression;
  e->params = params;
  e->g = params.count("g") ? params.at("g") : 1.0;
  e->R = params.count("R") ? params.at("R") : 1.0;
  positive(e->g, "g");
  positive(e->R, "R");
  e->decay = {DecayKind::exponential, 2.0, rmax_rule(e->g, e->R)};
  std::string head = "expr:'" + std::string(text) + "'";
  e->canonical = params.empty() ? head : canonical_of(head, params, {"g", "R"});
  e->spec_text = spec_text ? *spec_text : e->canonical;
  return Potential(e);
}
}  // namespace

Potential make_builtin(PotentialKind kind, const ParamMap& params) {
  return build_builtin(kind, params, nullptr);
}

Potential make_expression(std::string_view text, const ParamMap& params) {
  return build_expression(text, params, nullptr);
}

namespace {

ParamMap parse_params(std::string_view s, std::size_t base) {
  ParamMap out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t comma = s.find(',', i);
    if (comma == std::string_view::npos) comma = s.size();
    std::string_view item = s.substr(i, comma - i);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw ConfigError("expected key=value at offset " + std::to_string(base + i));
    std::string key(item.substr(0, eq));
    std::string_view val = item.substr(eq + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc() || ptr != val.data() + val.size() || val.empty())
      throw ConfigError("parameter '" + key + "' has a malformed value");
    if (out.count(key)) throw ConfigError("parameter '" + key + "' given twice");
    out[key] = v;
    i = comma + 1;
  }
  return out;
}

}  // namespace

Potential parse_potential_spec(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  Potential p;
  if (head == "expr") {
    if (colon == std::string_view::npos) throw ConfigError("expr spec needs an expression");
    std::string_view rest = spec.substr(colon + 1);
    std::string_view text, params;
    std::size_t params_at = 0;
    if (!rest.empty() && (rest[0] == '\'' || rest[0] == '"')) {
      const std::size_t close = rest.find(rest[0], 1);
      if (close == std::string_view::npos) throw ConfigError("unterminated quoted expression");
      text = rest.substr(1, close - 1);
      std::string_view tail = rest.substr(close + 1);
      if (!tail.empty()) {
        if (tail[0] != ':') throw ConfigError("expected ':' after the quoted expression");
        params = tail.substr(1);
        params_at = colon + 1 + close + 2;
      }
    } else {
      const std::size_t c2 = rest.find(':');
      text = rest.substr(0, c2);
      if (c2 != std::string_view::npos) {
        params = rest.substr(c2 + 1);
        params_at = colon + 1 + c2 + 1;
      }
    }
    const std::string verbatim(spec);
    p = build_expression(text, parse_params(params, params_at), &verbatim);
  } else {
    const std::string verbatim(spec);
    const PotentialKind kind = kind_from_string(head);
    ParamMap params;
    if (colon != std::string_view::npos) params = parse_params(spec.substr(colon + 1), colon + 1);
    p = build_builtin(kind, params, &verbatim);
  }
  return p;
}

VEval Potential::eval(double r) const { return impl_->eval(r); }
double Potential::value(double r) const { return impl_->eval(r).v; }
VEval Potential::eval_left(double r) const { return impl_->eval(std::nextafter(r, 0.0)); }
PotentialKind Potential::kind() const { return impl_->kind; }
const ParamMap& Potential::params() const { return impl_->params; }
double Potential::param(std::string_view name) const {
  auto it = impl_->params.find(name);
  if (it == impl_->params.end()) throw ConfigError("potential has no parameter '" + std::string(name) + "'");
  return it->second;
}
double Potential::g() const { return impl_->g; }
double Potential::R() const { return impl_->R; }
int Potential::ell_shift() const { return impl_->ell; }
const Potential& Potential::bare() const { return impl_->ell == 0 ? *this : impl_->bare; }
const std::vector<double>& Potential::edges() const { return impl_->edges; }
DecayHint Potential::decay() const { return impl_->decay; }
double Potential::r_max() const { return rmax_rule(impl_->g, impl_->R); }
std::string Potential::describe() const {
  if (impl_->ell == 0) return impl_->canonical;
  return impl_->canonical + "+l(l+1)/r^2[l=" + std::to_string(impl_->ell) + "]";
}
const std::string& Potential::spec_text() const { return impl_->spec_text; }

RealFn negative_part(const Potential& p) {
  return [p](double r) {
    const double v = p.value(r);
    return v < 0.0 ? v : 0.0;
  };
}

Potential effective_potential(const Potential& p, int ell) {
  if (ell < 0) throw ConfigError("angular momentum must be nonnegative");
  if (ell == 0) return p;
  const Potential& b = p.bare();
  auto e = std::make_shared<Effective>();
  e->kind = b.kind();
  e->params = b.params();
  e->g = b.g();
  e->R = b.R();
  e->ell = ell;
  e->bare = b;
  e->edges = b.edges();
  e->decay = b.decay();
  e->canonical = b.describe();
  e->spec_text = b.spec_text();
  return Potential(e);
}

}  // namespace boundcount
