// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failing criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "boundcount/check.hpp"
#include "boundcount/exact_counter.hpp"
#include "boundcount/expr.hpp"
#include "boundcount/limits.hpp"
#include "boundcount/limits_total.hpp"
#include "boundcount/report.hpp"
#include "support/fd.hpp"
#include "support/random_ast.hpp"

namespace bc = boundcount;

namespace {

// Pinned thresholds.
constexpr double kTableSeconds = 60.0;
constexpr double kMorseSeconds = 5.0;
constexpr double kSandwichSeconds = 600.0;
constexpr double kHalfIntegerGap = 0.01;  // Morse g values keep this far from n + 1/2
constexpr long kMorseLower = 4996;
constexpr long kMorseUpper = 5003;
constexpr long kMorseNll1 = 3359;
constexpr long kMorseMl = 10307;
constexpr long kMorseMlSlack = 1;
constexpr double kMorseBsRawMin = 1.5e8;
constexpr double kCompareRel = 1e-6;  // COMPARE_H raw against 2g/pi
constexpr double kFdRel = 1e-6;  // relative to max(1, |derivative|)
constexpr double kFdStep = 0.1;  // largest starting step of the difference oracle
constexpr double kBuiltinRel = 1e-12;
constexpr int kRandomAsts = 20;
constexpr int kPointsPerAst = 100;
constexpr unsigned kAstSeed = 20240611;

using Ints = std::map<std::string, long>;

struct Outcome {
  bool pass = true;
  std::string detail;
  Ints ints;  // every integer the criterion produced, for the robustness rerun
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Outcome table_criterion(int which, const bc::Tolerances& tol) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const bc::TableResult t = bc::compute_table(which, tol);
  const double secs = seconds_since(t0);
  std::ostringstream bad;
  int shown = 0;
  for (const auto& row : t.rows)
    for (const auto& c : row.cells) {
      o.ints["g" + std::to_string(row.g) + "_l" + std::to_string(row.ell) + "_" + c.column] = c.computed;
      if (c.match) continue;
      if (shown++ < 6) bad << " g=" << row.g << ",l=" << row.ell << "," << c.column << ":" << c.computed << "vs" << c.golden;
    }
  o.pass = t.mismatches == 0 && secs < kTableSeconds;
  o.detail = std::to_string(t.mismatches) + " mismatching cells of " +
             std::to_string(t.rows.size() * (bc::table_columns().size())) + ", " + fmt("%.2f s", secs);
  if (t.mismatches) o.detail += ";" + bad.str() + (shown > 6 ? " ..." : "");
  return o;
}

std::vector<double> morse_g_values() {
  std::vector<double> gs;
  for (int i = 0; i < 50; ++i) {
    double g = 1.2 + (30.0 - 1.2) * i / 49.0;
    const double frac = g - std::floor(g);
    if (std::abs(frac - 0.5) < kHalfIntegerGap) g += 2.0 * kHalfIntegerGap;
    gs.push_back(g);
  }
  return gs;
}

Outcome morse_closed_form(const bc::Tolerances& tol) {
  Outcome o;
  std::ostringstream d;
  for (double alpha : {0.2, 1.0, 2.0}) {
    int wrong = 0;
    for (double g : morse_g_values()) {
      const bc::Potential p = bc::make_builtin(bc::PotentialKind::morse, {{"g", g}, {"R", 1.0}, {"alpha", alpha}});
      const long n = bc::count_partial_wave(p, 0, tol).N;
      o.ints[fmt("a%g_", alpha) + fmt("g%.6f", g)] = n;
      if (n != static_cast<long>(std::floor(g + 0.5))) ++wrong;
    }
    if (wrong) o.pass = false;
    d << " alpha=" << alpha << ": " << wrong << "/50 differ;";
  }
  o.detail = d.str().substr(1);
  if (!o.pass) o.detail += " (alpha=0.2 truncates the well at the origin)";
  return o;
}

Outcome morse_strong_coupling(const bc::Tolerances& tol) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const bc::Potential p = bc::make_builtin(bc::PotentialKind::morse, {{"g", 5000.0}, {"R", 1.0}, {"alpha", 1.0}});
  const bc::Channel ch = bc::make_channel(p, 0, tol);
  const bc::LimitValue nul2 = bc::evaluate_limit("NUL2", ch);
  const bc::LimitValue nll2 = bc::evaluate_limit("NLL2", ch);
  const bc::LimitValue nll1 = bc::evaluate_limit("NLL1", ch);
  const bc::LimitValue ml = bc::evaluate_limit("Ml", ch);
  const bc::LimitValue bs = bc::evaluate_limit("BSl", ch);
  const double secs = seconds_since(t0);
  o.ints = {{"NUL2", nul2.integer_statement}, {"NLL2", nll2.integer_statement},
            {"NLL1", nll1.integer_statement}, {"Ml", ml.integer_statement}};
  const bool interval = nll2.integer_statement == kMorseLower && nul2.integer_statement == kMorseUpper;
  const bool n1 = nll1.integer_statement == kMorseNll1;
  const bool m = std::abs(ml.integer_statement - kMorseMl) <= kMorseMlSlack;
  const bool b = bs.raw && *bs.raw > kMorseBsRawMin;
  o.pass = interval && n1 && m && b && secs < kMorseSeconds;
  std::ostringstream d;
  d << "[" << nll2.integer_statement << "," << nul2.integer_statement << "]" << (interval ? "" : " (want [4996,5003])")
    << ", NLL1 " << nll1.integer_statement << (n1 ? "" : " (want 3359)") << ", Ml " << ml.integer_statement
    << (m ? "" : " (want 10307+-1)") << ", BSl raw " << fmt("%.6g", bs.raw.value_or(NAN))
    << (b ? "" : " (want > 1.5e8; the integral is g^2(2alpha+3-2log2))") << ", " << fmt("%.2f s", secs);
  o.detail = d.str();
  return o;
}

Outcome ull_tightness(const bc::Tolerances& tol) {
  Outcome o;
  std::ostringstream bad;
  int fails = 0;
  for (const char* fam : {"exponential:R=1", "yukawa:R=1"})
    for (int g = 2; g <= 41; ++g) {
      const bc::Potential p = bc::family_member(fam, g);
      const int L = bc::find_L_exact(p, tol);
      long ull = bc::kNoClaimHigh;
      for (const auto& v : bc::l_bounds(p, tol))
        if (v.id == "ULL") ull = v.integer_statement;
      const std::string key = std::string(fam).substr(0, 1) + std::to_string(g);
      o.ints[key + "_L"] = L;
      o.ints[key + "_ULL"] = ull;
      if (ull - L < 0 || ull - L > 1) {
        ++fails;
        bad << " " << key << ":" << ull << "-" << L;
      }
    }
  o.pass = fails == 0;
  o.detail = std::to_string(fails) + " of 80 potentials outside {0,1}" + bad.str();
  return o;
}

Outcome saturation(const bc::Tolerances& tol) {
  Outcome o;
  int cases = 0, fails = 0;
  std::ostringstream bad;
  for (int l : {0, 1, 2})
    for (double delta : {0.1, 0.4})
      for (double g : {10.0, 40.0})
        for (int n : {1, 2, 3}) {
          ++cases;
          const auto v = bc::saturation_case(g, l, delta, n, tol);
          o.ints[fmt("l%g", l) + fmt("d%g", delta) + fmt("g%g", g) + fmt("n%g", n)] = v ? v->bound : n;
          if (v) {
            ++fails;
            bad << " [" << v->potential << " " << v->limit << ": " << v->detail << "]";
          }
        }
  o.pass = fails == 0;
  o.detail = std::to_string(cases - fails) + "/" + std::to_string(cases) + " saturated" + bad.str();
  return o;
}

Outcome sandwich_grid(const bc::Tolerances& tol) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  long statements = 0;
  std::vector<bc::Violation> viol;
  for (const char* fam : {"exponential:R=1", "yukawa:R=1", "morse:R=1,alpha=1", "square_well:R=1"})
    for (int g = 2; g <= 41; ++g) {
      const bc::Potential p = bc::family_member(fam, g);
      try {
        const bc::SandwichStats s = bc::sandwich(p, tol);
        statements += s.statements;
        viol.insert(viol.end(), s.violations.begin(), s.violations.end());
      } catch (const std::exception& e) {
        viol.push_back({"sandwich", p.describe(), -1, "", 0, 0, std::string("error: ") + e.what()});
      }
      o.ints[p.describe() + "_N"] = bc::total_count(p, tol);
    }
  const double secs = seconds_since(t0);
  o.pass = viol.empty() && secs < kSandwichSeconds;
  std::ostringstream d;
  d << statements << " statements, " << viol.size() << " violations, " << fmt("%.1f s", secs);
  for (std::size_t i = 0; i < std::min<std::size_t>(viol.size(), 4); ++i)
    d << "; " << viol[i].potential << " l=" << viol[i].ell << " " << viol[i].limit << " " << viol[i].detail;
  o.detail = d.str();
  return o;
}

Outcome comparison_check(const bc::Tolerances& tol) {
  Outcome o;
  int fails = 0;
  std::ostringstream bad;
  for (int g = 2; g <= 20; ++g) {
    const bc::Potential p = bc::family_member("exponential:R=1", g);
    const long want = static_cast<long>(std::floor(2.0 * g / std::numbers::pi));
    const long exact = bc::count_partial_wave(p, 0, tol).N;
    const bc::LimitValue v = bc::evaluate_limit("COMPARE_H", bc::make_channel(p, 0, tol));
    const bc::LimitValue closed = bc::comparison_class_limit(g, 2.0, 1.0);
    const bool ok = v.applicable && v.raw && std::abs(*v.raw - 2.0 * g / std::numbers::pi) <= kCompareRel * 2.0 * g / std::numbers::pi &&
                    v.integer_statement == want && closed.integer_statement == want && want <= exact;
    o.ints["g" + std::to_string(g)] = v.integer_statement;
    if (!ok) {
      ++fails;
      bad << " g=" << g << ": " << v.integer_statement << "/" << closed.integer_statement << " want " << want
          << " exact " << exact;
    }
  }
  o.pass = fails == 0;
  o.detail = std::to_string(19 - fails) + "/19 with N0 >= {{2g/pi}} = COMPARE_H" + bad.str();
  return o;
}

using Criterion = std::function<Outcome(const bc::Tolerances&)>;

Outcome robustness(const std::vector<std::pair<int, Criterion>>& parts, const std::map<int, Ints>& base) {
  Outcome o;
  const bc::Tolerances tight = bc::Tolerances{}.tightened(2.0);
  long compared = 0;
  std::ostringstream bad;
  int changed = 0;
  for (const auto& [id, fn] : parts) {
    const Ints again = fn(tight).ints;
    for (const auto& [k, v] : base.at(id)) {
      ++compared;
      auto it = again.find(k);
      if (it != again.end() && it->second == v) continue;
      if (changed++ < 5)
        bad << " c" << id << ":" << k << " " << v << "->" << (it == again.end() ? std::string("missing") : std::to_string(it->second));
    }
  }
  o.pass = changed == 0;
  o.detail = std::to_string(changed) + " of " + std::to_string(compared) + " integers changed" + bad.str();
  return o;
}

Outcome parser_check() {
  Outcome o;
  bc::testing::RandomAst gen(kAstSeed);
  std::mt19937 rng(kAstSeed + 1);
  std::uniform_real_distribution<double> radius(0.2, 5.0);
  int bad_points = 0;
  double worst = 0.0;
  for (int t = 0; t < kRandomAsts; ++t) {
    const bc::expr::Ast ast = gen.tree();
    const bc::expr::Bindings none;
    auto f = [&](double r) { return bc::expr::evaluate(ast, r, none); };
    auto df = [&](double r) { return bc::expr::eval_with_derivatives(ast, r, none).d; };
    for (int i = 0; i < kPointsPerAst; ++i) {
      const double r = radius(rng);
      const bc::expr::Dual2 d = bc::expr::eval_with_derivatives(ast, r, none);
      const double e1 = std::abs(d.d - bc::testing::fd_first(f, r, kFdStep)) / std::max(1.0, std::abs(d.d));
      const double e2 = std::abs(d.dd - bc::testing::fd_first(df, r, kFdStep)) / std::max(1.0, std::abs(d.dd));
      worst = std::max({worst, e1, e2});
      if (e1 > kFdRel || e2 > kFdRel || std::abs(d.v - f(r)) > 1e-14 * std::max(1.0, std::abs(d.v))) ++bad_points;
    }
  }
  // Expression forms of the builtins.
  struct Pair {
    std::string builtin, expr;
  };
  const std::vector<Pair> pairs{
      {"morse:g=3.5,R=1.3,alpha=1.7", "expr:'-g^2/R^2*(2*exp(-(r/R-alpha))-exp(-2*(r/R-alpha)))':g=3.5,R=1.3,alpha=1.7"},
      {"exponential:g=4.2,R=0.8", "expr:'-g^2/R^2*exp(-r/R)':g=4.2,R=0.8"},
      {"yukawa:g=2.7,R=1.9", "expr:'-g^2/R^2*exp(-r/R)/(r/R)':g=2.7,R=1.9"},
      {"square_well:g=5,R=1.1", "expr:'-g^2/R^2*(1+(R-r)/abs(R-r))/2':g=5,R=1.1"},
  };
  double worst_builtin = 0.0;
  for (const auto& pr : pairs) {
    const bc::Potential a = bc::parse_potential_spec(pr.builtin);
    const bc::Potential b = bc::parse_potential_spec(pr.expr);
    for (int i = 1; i <= 400; ++i) {
      const double r = 0.0125 * i + 1e-3;
      const double va = a.value(r), vb = b.value(r);
      const double rel = std::abs(va - vb) / std::max(std::abs(va), 1e-300);
      worst_builtin = std::max(worst_builtin, va == vb ? 0.0 : rel);
    }
  }
  o.pass = bad_points == 0 && worst_builtin <= kBuiltinRel;
  o.detail = std::to_string(kRandomAsts * kPointsPerAst - bad_points) + "/" + std::to_string(kRandomAsts * kPointsPerAst) +
             " points within 1e-6 (worst " + fmt("%.2e", worst) + "); builtin forms worst rel " + fmt("%.2e", worst_builtin);
  return o;
}

}  // namespace

int main() {
  const bc::Tolerances tol;
  const std::vector<std::pair<int, Criterion>> numeric{
      {1, [](const bc::Tolerances& t) { return table_criterion(1, t); }},
      {2, [](const bc::Tolerances& t) { return table_criterion(2, t); }},
      {3, morse_closed_form},
      {4, morse_strong_coupling},
      {5, ull_tightness},
      {6, saturation},
      {7, sandwich_grid},
      {8, comparison_check},
  };
  const char* names[] = {"",
                         "table 1 (exponential)",
                         "table 2 (Yukawa)",
                         "Morse N0 = {{g+1/2}}",
                         "Morse g=5000",
                         "ULL tightness",
                         "saturation",
                         "sandwich grid",
                         "N0 >= {{2g/pi}}",
                         "tolerance halving",
                         "parser"};
  int failed = 0;
  auto report = [&](int id, const Outcome& o) {
    std::printf("criterion %2d %-4s %-22s %s\n", id, o.pass ? "PASS" : "FAIL", names[id], o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  };
  std::map<int, Ints> base;
  for (const auto& [id, fn] : numeric) {
    Outcome o;
    try {
      o = fn(tol);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    base[id] = o.ints;
    report(id, o);
  }
  try {
    report(9, robustness(numeric, base));
  } catch (const std::exception& e) {
    report(9, Outcome{false, std::string("error: ") + e.what(), {}});
  }
  report(10, parser_check());
  return failed;
}
