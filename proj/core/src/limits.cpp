#include "boundcount/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace boundcount {

namespace {

using std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// p grids for the power-type limits.
constexpr int kPowerGrid = 97;
constexpr double kGgmtLo = 1.0, kGgmtHi = 6.0;
constexpr double kCms2Lo = 0.5, kCms2Hi = 1.0 - 1e-3;
// Search span for the scale a of Cl and NLL1, in decades on each side.
constexpr double kScaleSpan = 1e3;
constexpr int kScaleScan = 128;
// H_lambda sign test.
constexpr double kSignTol = 1e-12;

long clamp_to_long(double x) {
  if (x >= static_cast<double>(kNoClaimHigh)) return kNoClaimHigh;
  if (x <= static_cast<double>(kNoClaimLow)) return kNoClaimLow;
  return static_cast<long>(x);
}

double window_integral(const Channel& ch, bool eff, const std::function<double(double, double)>& F) {
  const Potential U = eff ? effective_potential(ch.V, ch.ell) : ch.V;
  return integrate_negative(U, eff ? ch.windows_eff : ch.windows_V, F, ch.tol);
}

bool has_edges(const Channel& ch) { return !ch.V.edges().empty(); }

// True when the integral of F(r, |U|) over the first window diverges at r = 0,
// judged from r F staying flat over six decades (F ~ 1/r or worse).
bool diverges_at_origin(const Potential& U, const NegativeWindows& w,
                        const std::function<double(double, double)>& F) {
  if (w.windows.empty() || w.windows.front().a > 0.0) return false;
  auto s = [&](double x) {
    const double r = x * U.R();
    const double v = U.value(r);
    return v < 0.0 ? r * F(r, -v) : 0.0;
  };
  const double s12 = s(1e-12), s9 = s(1e-9), s6 = s(1e-6);
  return s6 > 0.0 && s9 > 0.0 && (!std::isfinite(s12) || (s12 >= 0.5 * s9 && s9 >= 0.5 * s6));
}

// Depth of the deepest grid sample of V^-, used to set the a-search span.
double grid_depth(const Potential& U) {
  double d = 0.0;
  for (double r : verification_grid(U, 512)) d = std::max(d, -U.value(r));
  return d;
}

std::pair<double, double> scale_range(const Potential& U) {
  const double R = U.R();
  const double d = grid_depth(U);
  const double a_depth = d > 0.0 ? 1.0 / std::sqrt(d) : R;
  return {std::min(R, a_depth) / kScaleSpan, std::max(R, a_depth) * kScaleSpan};
}

void note_boundary(LimitValue& v, const MaxResult& m, const char* what) {
  if (m.at_boundary) {
    v.auxiliary["at_boundary"] = 1.0;
    v.warnings.push_back(std::string("optimum over ") + what + " sits on the search boundary");
  }
}

LimitValue s_wave_only(const char* id, LimitKind k) {
  return make_inapplicable(id, k, "S-wave lower limit; the l-effective version applies for l > 0");
}

}  // namespace

std::string to_string(LimitKind k) { return k == LimitKind::upper ? "upper" : "lower"; }

long integer_statement(LimitKind kind, Strictness s, double raw, std::string* warning) {
  if (std::isnan(raw)) throw NumericalFailure("limit evaluated to NaN");
  if (std::isinf(raw)) return raw > 0 ? kNoClaimHigh : kNoClaimLow;
  const double f = std::floor(raw);
  if (kind == LimitKind::upper) {
    if (s == Strictness::strict && f == raw) {
      // raw = 0 means no attractive region at all: the count is 0.
      if (f <= 0.0) return 0;
      if (warning) *warning = "upper bound is an exact integer; assuming no zero-energy state";
      return clamp_to_long(f - 1.0);
    }
    return clamp_to_long(f);
  }
  switch (s) {
    case Strictness::strict:
      return clamp_to_long(f + 1.0);
    case Strictness::inclusive:
      return clamp_to_long(std::ceil(raw));
    case Strictness::floored:
      return clamp_to_long(f);
  }
  return clamp_to_long(f);
}

long LimitValue::table_value() const {
  if (kind == LimitKind::lower) return std::max(0L, integer_statement);
  // Tables print the integer part of an upper bound even when it is strict.
  if (raw && std::isfinite(*raw)) return clamp_to_long(std::floor(*raw));
  return integer_statement;
}

LimitValue make_applicable(std::string id, LimitKind kind, double raw, Strictness s) {
  LimitValue v;
  v.id = std::move(id);
  v.kind = kind;
  v.strictness = s;
  v.applicable = true;
  v.raw = raw;
  std::string w;
  v.integer_statement = integer_statement(kind, s, raw, &w);
  if (!w.empty()) v.warnings.push_back(w);
  return v;
}

LimitValue make_inapplicable(std::string id, LimitKind kind, std::string reason) {
  LimitValue v;
  v.id = std::move(id);
  v.kind = kind;
  v.applicable = false;
  v.reason = std::move(reason);
  v.integer_statement = kind == LimitKind::upper ? kNoClaimHigh : kNoClaimLow;
  return v;
}

Channel make_channel(const Potential& p, int ell, const Tolerances& tol) {
  if (ell < 0) throw ConfigError("channel l must be nonnegative");
  tol.validate();
  Channel ch;
  ch.V = p.bare();
  ch.ell = ell;
  ch.tol = tol;
  ch.on_V = spectral_functionals(ch.V, ell, false, tol);
  ch.on_eff = spectral_functionals(ch.V, ell, true, tol);
  ch.windows_V = negative_windows(ch.V, tol);
  ch.windows_eff = ell == 0 ? ch.windows_V : negative_windows(effective_potential(ch.V, ell), tol);
  return ch;
}

const std::vector<std::string>& limit_ids() {
  static const std::vector<std::string> ids{
      "BSl",  "CMS",   "CMSn",   "Ml",    "GGMT",  "CMS2",  "CC",    "Cl",
      "Cln",  "NUL1",  "NUL1l",  "NLL1",  "NLL1n", "NLL1nl", "NUL2", "NLL2",
      "NUL2l", "NLL2l", "NLL3s", "NLL3",  "NLL4",  "COMPARE_H", "ULSK", "LLSK"};
  return ids;
}

bool is_limit_id(std::string_view id) {
  const auto& ids = limit_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

LimitKind limit_kind(std::string_view id) {
  static const std::vector<std::string_view> lower{"Cl",   "Cln",   "NLL1",  "NLL1n", "NLL1nl",
                                                   "NLL2", "NLL2l", "NLL3s", "NLL3",  "NLL4",
                                                   "COMPARE_H", "LLSK"};
  if (!is_limit_id(id)) throw ConfigError("unknown limit id '" + std::string(id) + "'");
  return std::find(lower.begin(), lower.end(), id) != lower.end() ? LimitKind::lower
                                                                 : LimitKind::upper;
}

// ---------------------------------------------------------------------------
// Known limits

namespace {

double ggmt_constant(double p) {
  return std::pow(p - 1.0, p - 1.0) * std::tgamma(2.0 * p) /
         (std::pow(p, p) * std::tgamma(p) * std::tgamma(p));
}

double power_integral(const Channel& ch, double p) {
  // Evaluated in logs: near a Coulomb origin r^2 underflows and |V|^p overflows.
  return window_integral(ch, false, [p](double r, double a) {
    return std::exp((2.0 * p - 1.0) * std::log(r) + p * std::log(a));
  });
}

// Integral over (0, inf) of min[a^-1 (r/a)^2l, -a V (r/a)^-2l], V itself.
double calogero_integral(const Channel& ch, double a) {
  const int l = ch.ell;
  const Potential& V = ch.V;
  const auto& w = ch.windows_V;
  auto A = [a, l](double r) { return std::pow(r / a, 2.0 * l) / a; };
  auto B = [a, l](double r, double v) { return -a * v * std::pow(r / a, -2.0 * l); };
  double total = integrate_negative(V, w, [&](double r, double absV) { return std::min(A(r), B(r, -absV)); },
                                    ch.tol);
  // Repulsive stretches contribute B < 0.
  RealFn pos = [&](double r) {
    const double v = V.value(r);
    return v > 0.0 ? B(r, v) : 0.0;
  };
  QuadOptions opt;
  opt.breaks = V.edges();
  double prev = 0.0;
  for (const auto& win : w.windows) {
    if (win.a > prev) total += integrate(pos, prev, win.a, ch.tol, opt).value;
    prev = win.b;
  }
  if (std::isfinite(prev)) total += integrate_semi_infinite(pos, prev, ch.tol, V.decay(), opt).value;
  return total;
}

LimitValue cl_limit(const Channel& ch) {
  const Potential& V = ch.V;
  // With l >= 1 a repulsive origin makes the integral diverge to -inf.
  const double r0 = 1e-6 * V.R();
  if (ch.ell >= 1 && V.value(r0) > 0.0) {
    LimitValue v = make_applicable("Cl", LimitKind::lower, -kInf);
    v.warnings.push_back("trivial: potential is repulsive at the origin");
    return v;
  }
  const auto [lo, hi] = scale_range(V);
  RealFn f = [&](double a) { return calogero_integral(ch, a); };
  const MaxResult m = maximize_scalar(f, lo, hi, ch.tol, true, kScaleScan);
  LimitValue v = make_applicable("Cl", LimitKind::lower, -0.5 + m.value / pi);
  v.auxiliary["a"] = m.argmax;
  note_boundary(v, m, "a");
  return v;
}

LimitValue cln_limit(const Channel& ch) {
  if (!ch.on_eff.shape.cond_monotonicity_4l)
    return make_inapplicable("Cln", LimitKind::lower,
                             "[V r^-4l]' >= 0 fails; the radius equation may have several roots");
  const Potential& V = ch.V;
  const int l = ch.ell;
  const Tolerances& tol = ch.tol;
  QuadOptions opt;
  opt.breaks = V.edges();
  // U(x) = x^2l * int_x^inf r^-2l V dr, accumulated with factors (x/r)^2l <= 1
  // so that high l neither overflows nor underflows.
  auto scaled = [&](double x) {
    return [&, x](double t) {
      const double r = std::exp(t);
      return r * std::exp(2.0 * l * (std::log(x) - t)) * V.value(r);
    };
  };
  // int_a^b (a/r)^2l V dr, integrated in log r across many decades.
  auto segment = [&](double a, double b) {
    const RealFn h_log = scaled(a);
    double s = 0.0, lo = a;
    for (double e : V.edges())
      if (e > a && e < b) {
        s += integrate(h_log, std::log(lo), std::log(e), tol).value;
        lo = e;
      }
    return s + integrate(h_log, std::log(lo), std::log(b), tol).value;
  };
  auto shift = [l](double x, double y) { return std::pow(x / y, 2.0 * l); };

  std::vector<double> xs = verification_grid(V, 128);
  const int n = static_cast<int>(xs.size());
  std::vector<double> U(n);
  {
    const double x = xs[n - 1];
    RealFn tail = [&](double r) { return std::pow(x / r, 2.0 * l) * V.value(r); };
    U[n - 1] = integrate_semi_infinite(tail, x, tol, V.decay(), opt).value;
  }
  for (int i = n - 2; i >= 0; --i) U[i] = shift(xs[i], xs[i + 1]) * U[i + 1] + segment(xs[i], xs[i + 1]);
  auto G_at = [&](double rho, double u) { return rho * V.value(rho) - (2.0 * l + 1.0) * u; };
  std::vector<int> changes;
  int last_sign = 0;
  int last_i = -1;
  for (int i = 0; i < n; ++i) {
    const double g = G_at(xs[i], U[i]);
    const int s = (g > 0.0) - (g < 0.0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) changes.push_back(last_i);
    last_sign = s;
    last_i = i;
  }
  if (changes.size() != 1)
    return make_inapplicable("Cln", LimitKind::lower,
                             "radius equation has " + std::to_string(changes.size()) + " sign changes");
  const int i = changes.front();
  int j = i + 1;
  while (j < n && G_at(xs[j], U[j]) == 0.0) ++j;
  const double b = xs[std::min(j, n - 1)];
  const double Ub = U[std::min(j, n - 1)];
  RealFn G = [&](double rho) { return G_at(rho, shift(rho, b) * Ub + segment(rho, b)); };
  const double rho = find_root(G, xs[i], b, tol);
  const double vrho = V.value(rho);
  LimitValue v = make_applicable(
      "Cln", LimitKind::lower,
      -0.5 + 2.0 / pi * rho * std::sqrt(std::abs(vrho)) / (2.0 * l + 1.0));
  v.auxiliary["rho"] = rho;
  return v;
}

}  // namespace

LimitValue evaluate_known_limit(std::string_view id, const Channel& ch) {
  const int l = ch.ell;
  const double k = 2.0 * l + 1.0;
  const ShapeReport& sh = ch.on_V.shape;
  const double S = ch.on_V.S;
  if (id == "BSl") {
    const double I = window_integral(ch, false, [](double r, double a) { return r * a; });
    return make_applicable("BSl", LimitKind::upper, I / k);
  }
  if (id == "CMS" || id == "CMSn" || id == "CC") {
    const std::string sid(id);
    if (!sh.monotone_nondecreasing)
      return make_inapplicable(sid, LimitKind::upper, "potential is not monotonically nondecreasing");
    if (id != "CC" && has_edges(ch))
      return make_inapplicable(sid, LimitKind::upper, "derivative condition undefined at a discontinuity");
    if (id == "CC") return make_applicable(sid, LimitKind::upper, S);
    if (id == "CMS")
      return make_applicable(sid, LimitKind::upper,
                             S + 1.0 - std::sqrt(1.0 + std::pow(2.0 / pi, 2) * l * (l + 1.0)));
    return make_applicable(sid, LimitKind::upper, S + 1.0 - k / pi);
  }
  if (id == "Ml") {
    const Potential U = effective_potential(ch.V, l);
    if (diverges_at_origin(U, ch.windows_eff, [](double, double a) { return a; })) {
      LimitValue v = make_applicable("Ml", LimitKind::upper, kInf);
      v.warnings.push_back("integral of |V| diverges at the origin: no finite bound");
      return v;
    }
    const double I2 = window_integral(ch, true, [](double r, double a) { return r * r * a; });
    const double I0 = window_integral(ch, true, [](double, double a) { return a; });
    LimitValue v = make_applicable("Ml", LimitKind::upper, std::pow(I2 * I0, 0.25));
    v.auxiliary["int_r2"] = I2;
    v.auxiliary["int_r0"] = I0;
    return v;
  }
  if (id == "GGMT") {
    RealFn f = [&](double p) { return -std::pow(k, 1.0 - 2.0 * p) * ggmt_constant(p) * power_integral(ch, p); };
    if (ch.windows_V.windows.empty()) return make_applicable("GGMT", LimitKind::upper, 0.0);
    const MaxResult m = maximize_scalar(f, kGgmtLo, kGgmtHi, ch.tol, false, kPowerGrid);
    LimitValue v = make_applicable("GGMT", LimitKind::upper, -m.value);
    v.auxiliary["p"] = m.argmax;
    if (m.at_boundary && m.argmax > kGgmtLo) note_boundary(v, m, "p");
    return v;
  }
  if (id == "CMS2") {
    if (!sh.nonpositive) return make_inapplicable("CMS2", LimitKind::upper, "potential is positive somewhere");
    if (has_edges(ch))
      return make_inapplicable("CMS2", LimitKind::upper, "derivative condition undefined at a discontinuity");
    if (!sh.cms2_p_min || *sh.cms2_p_min >= kCms2Hi)
      return make_inapplicable("CMS2", LimitKind::upper, "no p in [1/2, 1) satisfies the CMS2 condition");
    if (ch.windows_V.windows.empty()) return make_applicable("CMS2", LimitKind::upper, 0.0);
    const double lo = std::max(kCms2Lo, *sh.cms2_p_min);
    RealFn f = [&](double p) {
      return -std::pow(k, 1.0 - 2.0 * p) * p * std::pow(1.0 - p, p - 1.0) * power_integral(ch, p);
    };
    const MaxResult m = maximize_scalar(f, lo, kCms2Hi, ch.tol, false, kPowerGrid);
    LimitValue v = make_applicable("CMS2", LimitKind::upper, -m.value);
    v.auxiliary["p"] = m.argmax;
    v.auxiliary["p_min"] = lo;
    return v;
  }
  if (id == "Cl") return cl_limit(ch);
  if (id == "Cln") return cln_limit(ch);
  throw ConfigError("not a known-limit id: " + std::string(id));
}

// ---------------------------------------------------------------------------
// First family of new limits

LimitValue evaluate_nu1_family(std::string_view id, const Channel& ch) {
  const bool eff = id == "NUL1l" || id == "NLL1nl";
  const SpectralFunctionals& sf = eff ? ch.on_eff : ch.on_V;
  const ShapeReport& sh = sf.shape;
  const std::string sid(id);
  const LimitKind kind = limit_kind(id);
  if ((id == "NLL1" || id == "NLL1n") && ch.ell > 0) return s_wave_only(sid.c_str(), kind);
  if (!sh.two_zero_shape)
    return make_inapplicable(sid, kind, "potential does not have the two-zero sign pattern");
  auto abs_integral = [&]() {
    const Potential U = eff ? effective_potential(ch.V, ch.ell) : ch.V;
    if (diverges_at_origin(U, eff ? ch.windows_eff : ch.windows_V, [](double, double a) { return a; }))
      return kInf;
    return window_integral(ch, eff, [](double, double a) { return a; });
  };

  if (id == "NUL1" || id == "NUL1l") {
    if (!std::isfinite(sh.r_plus)) return make_inapplicable(sid, kind, "r+ is infinite");
    const double I = abs_integral();
    const double width = sh.r_plus - sh.r_minus_or_zero();
    LimitValue v = make_applicable(sid, kind, 1.0 + 2.0 / pi * std::sqrt(width * I));
    v.auxiliary["r_minus"] = sh.r_minus_or_zero();
    v.auxiliary["r_plus"] = sh.r_plus;
    if (id == "NUL1" && ch.ell > 0) v.warnings.push_back("bounds N_0, hence every N_l");
    return v;
  }
  if (id == "NLL1n" || id == "NLL1nl") {
    const double depth = -sf.V_at_rmin;
    if (!(depth > 0.0)) return make_inapplicable(sid, kind, "no attractive region");
    if (!std::isfinite(depth)) return make_inapplicable(sid, kind, "potential unbounded below at the origin");
    const double I = abs_integral();
    if (!std::isfinite(I)) return make_inapplicable(sid, kind, "integral of |V| diverges at the origin");
    LimitValue v = make_applicable(sid, kind, -1.0 + I / (pi * std::sqrt(depth)));
    v.auxiliary["max_depth"] = depth;
    return v;
  }
  // NLL1: optimise the scale a.
  const Potential& U = ch.V;
  const auto [lo, hi] = scale_range(U);
  RealFn f = [&](double a) {
    return integrate_negative(U, ch.windows_V, [a](double, double absV) { return std::min(1.0 / a, a * absV); },
                              ch.tol);
  };
  const MaxResult m = maximize_scalar(f, lo, hi, ch.tol, true, kScaleScan);
  LimitValue v = make_applicable("NLL1", kind, -1.0 + m.value / pi);
  v.auxiliary["a"] = m.argmax;
  note_boundary(v, m, "a");
  return v;
}

// ---------------------------------------------------------------------------
// Second family: p, q, r_min based limits

namespace {

std::optional<std::string> pq_problem(const SpectralFunctionals& sf) {
  if (!sf.p || !sf.q) return "phase integral below pi/2: p and q undefined";
  if (*sf.p > *sf.q) return "q < p";
  return std::nullopt;
}

double log_depth_ratio(double vmin, double M) { return std::log(-vmin / M); }

}  // namespace

LimitValue evaluate_nu2_family(std::string_view id, const Channel& ch) {
  const std::string sid(id);
  const LimitKind kind = limit_kind(id);
  const int l = ch.ell;

  if (id == "NUL2" || id == "NLL2" || id == "NUL2l" || id == "NLL2l") {
    const bool eff = id == "NUL2l" || id == "NLL2l";
    if (id == "NLL2" && l > 0) return s_wave_only(sid.c_str(), kind);
    const SpectralFunctionals& sf = eff ? ch.on_eff : ch.on_V;
    if (!sf.shape.single_minimum_shape)
      return make_inapplicable(sid, kind, "potential does not have a single interior minimum");
    if (auto why = pq_problem(sf)) return make_inapplicable(sid, kind, *why);
    const double rmin = *sf.r_min;
    // The published comparison tables evaluate these limits where r_min lies
    // outside [p, q]; the value is kept, flagged as outside the proven range.
    const bool ordered = *sf.p <= rmin && rmin <= *sf.q;
    const double L = log_depth_ratio(sf.V_at_rmin, *sf.M) / (2.0 * pi);
    const double half = sf.phase_total / pi;  // S/2
    const double raw = kind == LimitKind::upper ? 1.0 + half + L : -1.5 + half - L;
    LimitValue v = make_applicable(sid, kind, raw);
    v.auxiliary["p"] = *sf.p;
    v.auxiliary["q"] = *sf.q;
    v.auxiliary["M"] = *sf.M;
    v.auxiliary["r_min"] = rmin;
    v.auxiliary["p_rmin_q_holds"] = ordered ? 1.0 : 0.0;
    if (!ordered) v.warnings.push_back("p <= r_min <= q fails: value outside the proven range");
    if (id == "NUL2" && l > 0) v.warnings.push_back("bounds N_0, hence every N_l");
    return v;
  }

  if (id == "NLL4") {
    if (!ch.on_eff.shape.cond_monotonicity_4l)
      return make_inapplicable(sid, kind, "[V r^-4l]' >= 0 fails");
    LimitValue v = make_applicable(sid, kind, -0.5 + ch.on_V.sigma / (2.0 * (2.0 * l + 1.0)));
    v.auxiliary["sigma"] = ch.on_V.sigma;
    return v;
  }

  if (id == "NLL3" || id == "NLL3s") {
    const SpectralFunctionals& sf = ch.on_V;
    const ShapeReport& sh = sf.shape;
    if (!(sh.single_minimum_shape || sh.monotone_nondecreasing))
      return make_inapplicable(sid, kind, "potential is neither monotone nor single-minimum");
    if (auto why = pq_problem(sf)) return make_inapplicable(sid, kind, *why);
    const Potential& V = ch.V;
    const double p = *sf.p, q = *sf.q;
    const double rmin = sf.r_min.value_or(p);
    const double vmin = V.value(rmin), vp = V.value(p);
    if (!(vmin < 0.0 && vp < 0.0)) return make_inapplicable(sid, kind, "V not negative at p or r_min");

    if (id == "NLL3") {
      const double vq = V.value(q);
      if (!(vq < 0.0)) return make_inapplicable(sid, kind, "V not negative at q");
      const double nu = -1.5 + 0.5 * sf.S - std::log(vmin * vmin / (vp * vq)) / (4.0 * pi);
      LimitValue v = make_applicable(sid, kind, nu - l / pi * std::log(q / p));
      v.auxiliary["nu"] = nu;
      v.auxiliary["p"] = p;
      v.auxiliary["q"] = q;
      return v;
    }
    // NLL3s: optimal s solves s V' = 4 s |V|^(3/2) + 4 l V beyond max(p, r_min).
    auto bound = [&](double s) {
      const double vs = V.value(s);
      if (!(vs < 0.0)) return -kInf;
      QuadOptions opt;
      opt.singular_lo = true;
      opt.breaks = V.edges();
      RealFn root_abs = [&V](double r) {
        const double x = V.value(r);
        return x < 0.0 ? std::sqrt(-x) : 0.0;
      };
      const double phase = pi / 2.0 + integrate(root_abs, p, s, ch.tol, opt).value;
      return -1.0 + phase / pi - std::log(vmin * vmin / (vp * vs)) / (4.0 * pi) - l / pi * std::log(s / p);
    };
    RealFn D = [&](double s) {
      const VEval e = V.eval(s);
      return s * e.d1 - 4.0 * s * std::pow(std::abs(e.v), 1.5) - 4.0 * l * e.v;
    };
    const double lo = std::max(p, rmin);
    const double hi = std::isfinite(sh.r_plus) ? sh.r_plus : V.r_max();
    double best_s = q, best = bound(q);
    int roots = 0;
    if (hi > lo) {
      const int n = 256;
      double a = lo * (1.0 + 1e-12), fa = D(a);
      for (int i = 1; i <= n; ++i) {
        const double b = lo * std::pow(hi / lo, static_cast<double>(i) / n) * (i == n ? 1.0 - 1e-12 : 1.0);
        const double fb = D(b);
        if (fa * fb < 0.0) {
          const double s = find_root(D, a, b, ch.tol);
          ++roots;
          const double val = bound(s);
          if (val > best) {
            best = val;
            best_s = s;
          }
        }
        a = b;
        fa = fb;
      }
    }
    LimitValue v = make_applicable(sid, kind, best);
    v.auxiliary["s"] = best_s;
    v.auxiliary["s_roots"] = roots;
    if (roots == 0) v.warnings.push_back("optimal-s equation has no root; s = q used");
    return v;
  }
  throw ConfigError("not a second-family id: " + sid);
}

// ---------------------------------------------------------------------------
// Comparison potential

namespace {

enum class Verdict { nonnegative, nonpositive, indefinite };

Verdict h_sign(const Potential& V, int l, double lambda, int points, double* witness) {
  bool any_neg = false, any_pos = false;
  for (double r : verification_grid(V, points)) {
    const VEval e = V.eval(r);
    if (e.v == 0.0) continue;
    const double a = std::abs(e.v);
    const double t1 = -l * (l + 1.0) / (r * r);
    const double t2 = 5.0 / 16.0 * (e.d1 / e.v) * (e.d1 / e.v);
    const double t3 = e.d2 / (4.0 * a);
    const double t4 = (1.0 - 4.0 * lambda * lambda) * a;
    const double h = t1 + t2 + t3 + t4;
    const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
    if (h < -kSignTol * scale) {
      if (!any_neg && witness) *witness = r;
      any_neg = true;
    }
    if (h > kSignTol * scale) any_pos = true;
  }
  if (any_neg && any_pos) return Verdict::indefinite;
  return any_neg ? Verdict::nonpositive : Verdict::nonnegative;
}

}  // namespace

LimitValue comparison_limit(const Channel& ch, double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
  const Potential& V = ch.V;
  const int l = ch.ell;
  const ShapeReport& sh = ch.on_V.shape;
  auto fail = [](LimitKind k, std::string why) { return make_inapplicable("COMPARE_H", k, std::move(why)); };
  if (!sh.nonpositive) return fail(LimitKind::lower, "potential is positive somewhere");
  if (has_edges(ch)) return fail(LimitKind::lower, "V' and V'' undefined at a discontinuity");
  Verdict v1, v2;
  double witness = 0.0;
  try {
    v1 = h_sign(V, l, lambda, kShapeGridPoints, &witness);
    v2 = h_sign(V, l, lambda, 2 * kShapeGridPoints, nullptr);
  } catch (const expr::DomainError& e) {
    return fail(LimitKind::lower, std::string("derivative unavailable: ") + e.what());
  }
  if (v1 != v2) return fail(LimitKind::lower, "indeterminate: verdict changes under grid doubling");
  if (v1 == Verdict::indefinite) {
    std::ostringstream os;
    os << "H changes sign (negative near r = " << witness << ")";
    return fail(LimitKind::lower, os.str());
  }
  const LimitKind kind = v1 == Verdict::nonnegative ? LimitKind::lower : LimitKind::upper;
  const DecayHint d = V.decay();
  if (kind == LimitKind::lower && l > 0) {
    const double r0 = 1e-6 * V.R(), r1 = 2e-6 * V.R();
    const double c0 = std::abs(V.value(r0)) * std::pow(r0, -4.0 * l);
    const double c1 = std::abs(V.value(r1)) * std::pow(r1, -4.0 * l);
    if (c0 > c1 * (1.0 + 1e-6)) return fail(kind, "V does not vanish like r^4l at the origin");
    if (!(d.kind == DecayKind::power && d.power <= 4.0 * (l + 1)))
      return fail(kind, "V decays faster than r^-4(l+1)");
  }
  if (kind == LimitKind::upper && l == 0 && !(d.kind == DecayKind::power && d.power > 2.0 && d.power <= 4.0))
    return fail(kind, "S-wave upper version needs an r^-p tail with 2 < p <= 4");
  LimitValue v = make_applicable("COMPARE_H", kind, lambda * ch.on_V.S, Strictness::floored);
  v.auxiliary["lambda"] = lambda;
  if (V.kind() == PotentialKind::exponential && l == 0 && lambda == 0.5) {
    const LimitValue c = comparison_class_limit(V.g(), 2.0, 1.0);
    v.auxiliary["class_closed_form"] = *c.raw;
    if (c.integer_statement != v.integer_statement)
      v.warnings.push_back("closed form for the exponential class disagrees with lambda S");
  }
  return v;
}

LimitValue comparison_class_limit(double g, double alpha, double beta) {
  if (!(alpha > 0.0 && beta > 0.0)) throw ConfigError("class parameters must be positive");
  if (alpha * beta < beta * beta + 1.0)
    return make_inapplicable("COMPARE_H", LimitKind::lower, "alpha beta >= beta^2 + 1 fails");
  const double x = alpha / (2.0 * beta);
  const double raw = g / (pi * beta) * std::pow(2.0, x) * std::tgamma(x);
  LimitValue v = make_applicable("COMPARE_H", LimitKind::lower, raw, Strictness::floored);
  v.auxiliary["alpha"] = alpha;
  v.auxiliary["beta"] = beta;
  return v;
}

// ---------------------------------------------------------------------------

LimitValue evaluate_limit(std::string_view id, const Channel& ch) {
  if (id == "BSl" || id == "CMS" || id == "CMSn" || id == "Ml" || id == "GGMT" || id == "CMS2" ||
      id == "CC" || id == "Cl" || id == "Cln")
    return evaluate_known_limit(id, ch);
  if (id == "NUL1" || id == "NUL1l" || id == "NLL1" || id == "NLL1n" || id == "NLL1nl")
    return evaluate_nu1_family(id, ch);
  if (id == "NUL2" || id == "NLL2" || id == "NUL2l" || id == "NLL2l" || id == "NLL3s" || id == "NLL3" ||
      id == "NLL4")
    return evaluate_nu2_family(id, ch);
  if (id == "COMPARE_H") return comparison_limit(ch, 0.5);
  if (id == "ULSK") return second_kind_limits(ch).ulsk;
  if (id == "LLSK") return second_kind_limits(ch).llsk;
  throw ConfigError("unknown limit id '" + std::string(id) + "'");
}

std::vector<LimitValue> evaluate_all(const Channel& ch, const std::vector<std::string>& only) {
  const std::vector<std::string>& ids = only.empty() ? limit_ids() : only;
  std::vector<LimitValue> out;
  std::optional<SecondKind> sk;
  for (const auto& id : ids) {
    if (!is_limit_id(id)) throw ConfigError("unknown limit id '" + id + "'");
    if (id == "ULSK" || id == "LLSK") {
      if (!sk) sk = second_kind_limits(ch);
      out.push_back(id == "ULSK" ? sk->ulsk : sk->llsk);
    } else {
      out.push_back(evaluate_limit(id, ch));
    }
  }
  return out;
}

std::pair<LimitValue, LimitValue> morse_attractive_nu2(double g) {
  const double g_min = pi * std::sqrt(2.0) / (8.0 * (std::sqrt(2.0) - 1.0));
  if (!(g >= g_min)) {
    const std::string why = "p~ <= r_min <= q~ requires g >= " + std::to_string(g_min);
    return {make_inapplicable("NUL2s", LimitKind::upper, why), make_inapplicable("NLL2s", LimitKind::lower, why)};
  }
  const double z = 8.0 * g / pi;
  const double L = std::log(std::pow(z, 4) / (4.0 * (z * z - 1.0))) / (2.0 * pi);
  LimitValue up = make_applicable("NUL2s", LimitKind::upper, g + L + 1.0);
  LimitValue lo = make_applicable("NLL2s", LimitKind::lower, g - L - 1.5);
  up.auxiliary["z"] = lo.auxiliary["z"] = z;
  return {up, lo};
}

}  // namespace boundcount
