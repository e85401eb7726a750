#include "boundcount/check.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "boundcount/report.hpp"
#include "json.hpp"

namespace boundcount {

namespace {

bool violates(LimitKind kind, long bound, long exact) {
  return kind == LimitKind::upper ? exact > bound : exact < bound;
}

void compare(SandwichStats& s, const std::string& pot, int ell, const LimitValue& v, long exact,
             const char* suite = "sandwich") {
  if (!v.applicable) return;
  ++s.statements;
  if (violates(v.kind, v.integer_statement, exact)) {
    std::ostringstream d;
    d << to_string(v.kind) << " statement " << v.integer_statement << " vs exact " << exact;
    if (v.raw) d << " (raw " << *v.raw << ")";
    s.violations.push_back({suite, pot, ell, v.id, v.integer_statement, exact, d.str()});
  }
}

bool near_integer(const std::optional<double>& raw) {
  return raw && std::isfinite(*raw) && std::abs(*raw - std::round(*raw)) < 1e-6;
}

// Counts and integer statements per channel, keyed for comparisons between
// runs that should agree.
std::map<std::string, long> fingerprint(const Potential& p, const Tolerances& tol, int l_top) {
  std::map<std::string, long> out;
  for (int l = 0; l <= l_top; ++l) {
    const std::string tag = std::to_string(l);
    out["N_" + tag] = count_partial_wave(p, l, tol).N;
    for (const auto& v : evaluate_all(make_channel(p, l, tol)))
      if (v.applicable && !near_integer(v.raw)) out[v.id + "_" + tag] = v.integer_statement;
  }
  return out;
}

void diff_fingerprints(const std::map<std::string, long>& a, const std::map<std::string, long>& b,
                       const std::string& suite, const std::string& pot, std::vector<Violation>& out) {
  for (const auto& [k, x] : a) {
    auto it = b.find(k);
    if (it == b.end() || it->second == x) continue;
    out.push_back({suite, pot, -1, k, it->second, x, "integer changed: " + std::to_string(x) + " -> " +
                                                         std::to_string(it->second)});
  }
}

std::string with_R(const std::string& family, double R) {
  std::string s = family;
  const auto at = s.find("R=1");
  if (at == std::string::npos) return s;
  char buf[32];
  std::snprintf(buf, sizeof buf, "R=%g", R);
  return s.replace(at, 3, buf);
}

}  // namespace

SandwichStats sandwich(const Potential& p, const Tolerances& tol, bool with_totals) {
  SandwichStats s;
  const std::string name = p.describe();
  const int L = find_L_exact(p, tol);
  for (int l = 0; l <= std::max(0, L + 1); ++l) {
    const long exact = count_partial_wave(p, l, tol).N;
    for (const auto& v : evaluate_all(make_channel(p, l, tol))) compare(s, name, l, v, exact);
  }
  if (with_totals) {
    for (const auto& v : l_bounds(p, tol)) compare(s, name, -1, v, L, "sandwich_L");
    const long N = total_count(p, tol);
    for (const auto& v : total_bounds(p, tol)) compare(s, name, -1, v, N, "sandwich_N");
  }
  return s;
}

std::optional<Violation> saturation_case(double g, int ell, double delta, int n_target, const Tolerances& tol) {
  const Potential p = make_builtin(PotentialKind::saturating, {{"g", g},
                                                             {"R", 1.0},
                                                             {"ell", static_cast<double>(ell)},
                                                             {"delta", delta},
                                                             {"N", static_cast<double>(n_target)}});
  const double alpha = saturating_alpha(g, ell, delta, n_target);
  const double k = 2.0 * ell + 1.0;
  const long expect = static_cast<long>(std::floor(g * std::pow(alpha, k) / (std::acos(-1.0) * k)));
  const long exact = count_partial_wave(p, ell, tol).N;
  if (exact != expect)
    return Violation{"saturation", p.describe(), ell, "exact", expect, exact, "exact count differs from N"};
  const LimitValue v = evaluate_limit("NLL4", make_channel(p, ell, tol));
  if (!v.applicable) return Violation{"saturation", p.describe(), ell, "NLL4", 0, exact, v.reason};
  if (v.integer_statement != expect)
    return Violation{"saturation", p.describe(), ell, "NLL4", v.integer_statement, exact, "NLL4 is not saturated"};
  return std::nullopt;
}

std::vector<std::string> random_expression_specs(unsigned seed, int count) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> depth(2.0, 30.0), range(0.5, 2.0), bump(0.5, 10.0);
  std::uniform_int_distribution<int> shape(0, 2), extra(0, 2);
  auto term = [&](bool attractive) {
    char buf[96];
    const double a = attractive ? depth(rng) : bump(rng);
    const double b = range(rng);
    const char sign = attractive ? '-' : '+';
    switch (shape(rng)) {
      case 0: std::snprintf(buf, sizeof buf, "%c%.4f*exp(-%.4f*r)", sign, a, b); break;
      case 1: std::snprintf(buf, sizeof buf, "%c%.4f*exp(-%.4f*r^2)", sign, a, b); break;
      default: std::snprintf(buf, sizeof buf, "%c%.4f*exp(-%.4f*r)/r", sign, a, b); break;
    }
    return std::string(buf);
  };
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) {
    std::string e = term(true);
    const int more = extra(rng);
    for (int j = 0; j < more; ++j) e += term(j == 0 ? false : true);
    out.push_back("expr:'" + e + "'");
  }
  return out;
}

std::string CheckReport::to_json() const {
  nlohmann::json j;
  j["ok"] = ok();
  j["statements"] = statements;
  j["seconds"] = seconds;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : violations)
    arr.push_back({{"suite", v.suite},
                   {"potential", v.potential},
                   {"ell", v.ell},
                   {"limit", v.limit},
                   {"bound", v.bound},
                   {"exact", v.exact},
                   {"detail", v.detail}});
  j["violations"] = arr;
  return j.dump();
}

CheckReport run_checks(const CheckOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckReport rep;
  const Tolerances& tol = opt.probe_tol ? *opt.probe_tol : opt.tol;
  auto guarded = [&](const std::string& suite, const std::string& pot, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      rep.violations.push_back({suite, pot, -1, "", 0, 0, std::string("error: ") + e.what()});
    }
  };
  auto absorb = [&](SandwichStats s) {
    rep.statements += s.statements;
    for (auto& v : s.violations) rep.violations.push_back(std::move(v));
  };

  for (const auto& fam : opt.families)
    for (double g : opt.g_values)
      guarded("sandwich", fam, [&] { absorb(sandwich(family_member(fam, g), tol)); });

  for (const auto& spec : random_expression_specs(opt.seed, opt.random_potentials))
    guarded("random", spec, [&] { absorb(sandwich(parse_potential_spec(spec), tol, false)); });

  for (int l : {0, 1, 2})
    for (double delta : {0.1, 0.4})
      for (int n : {1, 3})
        guarded("saturation", "saturating", [&] {
          ++rep.statements;
          if (auto v = saturation_case(10.0, l, delta, n, tol)) rep.violations.push_back(*v);
        });

  // Scaling: V(r) -> V(r/R)/R^2 with the same g leaves every integer fixed.
  const double g_mid = opt.g_values[opt.g_values.size() / 2];
  for (const auto& fam : opt.families)
    guarded("scaling", fam, [&] {
      const Potential a = family_member(fam, g_mid);
      const int top = std::max(0, find_L_exact(a, tol));
      const auto fa = fingerprint(a, tol, top);
      const auto fb = fingerprint(family_member(with_R(fam, 2.5), g_mid), tol, top);
      rep.statements += static_cast<long>(fa.size());
      diff_fingerprints(fa, fb, "scaling", fam, rep.violations);
    });

  // Tolerance invariance: the probe (or halved) tolerances against the reference.
  const Tolerances other = opt.probe_tol ? opt.tol : opt.tol.tightened(2.0);
  for (const auto& fam : opt.families)
    guarded("tolerance", fam, [&] {
      const Potential p = family_member(fam, g_mid);
      const int top = std::max(0, find_L_exact(p, other));
      const auto fa = fingerprint(p, other, top);
      const auto fb = fingerprint(p, tol, top);
      rep.statements += static_cast<long>(fa.size());
      diff_fingerprints(fa, fb, "tolerance", fam, rep.violations);
    });

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace boundcount
