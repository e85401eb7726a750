#include "boundcount/limits_total.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace boundcount {

namespace {

using std::numbers::pi;

constexpr double kLiebCentral = 1.458;
constexpr double kBiSRel = 1e-8;

double moment(const Channel& ch, const std::function<double(double, double)>& F) {
  return integrate_negative(ch.V, ch.windows_V, F, ch.tol);
}

// Shape conditions shared by NLL3-derived bounds.
std::optional<std::string> nll3_problem(const SpectralFunctionals& sf) {
  if (!(sf.shape.single_minimum_shape || sf.shape.monotone_nondecreasing))
    return "potential is neither monotone nor single-minimum";
  if (!sf.p || !sf.q) return "phase integral below pi/2: p and q undefined";
  if (!(*sf.q > *sf.p)) return "q <= p";
  return std::nullopt;
}

double nu_of(const Channel& ch) {
  const SpectralFunctionals& sf = ch.on_V;
  const double p = *sf.p, q = *sf.q;
  const double vmin = ch.V.value(sf.r_min.value_or(p));
  return -1.5 + 0.5 * sf.S - std::log(vmin * vmin / (ch.V.value(p) * ch.V.value(q))) / (4.0 * pi);
}

double bis_central(const Channel& ch) {
  Tolerances t = ch.tol;
  t.quad_rel = std::max(t.quad_rel, kBiSRel);
  const Potential& V = ch.V;
  const auto& W = ch.windows_V;
  auto weight = [&V](double r) {
    const double v = V.value(r);
    return v < 0.0 ? -r * v : 0.0;
  };
  // Inner integral over r2. Inside the window containing r1 the offset
  // d = |r2 - r1| is the variable, so the log kernel is exact near d = 0.
  auto inner = [&](double r1) {
    double s = 0.0;
    for (const auto& win : W.windows) {
      QuadOptions opt;
      opt.singular_lo = true;
      opt.singular_hi = win.zero_at_b;
      if (!(r1 > win.a && r1 < win.b)) {
        RealFn f = [&](double r2) {
          const double w = weight(r2);
          return w == 0.0 ? 0.0 : w * std::log(std::abs((r1 + r2) / (r1 - r2)));
        };
        opt.breaks = W.edges;
        s += std::isfinite(win.b) ? integrate(f, win.a, win.b, t, opt).value
                                  : integrate_semi_infinite(f, win.a, t, V.decay(), opt).value;
        continue;
      }
      QuadOptions left, right;
      left.singular_lo = right.singular_lo = true;
      for (double e : W.edges) {
        if (e > win.a && e < r1) left.breaks.push_back(r1 - e);
        if (e > r1 && e < win.b) right.breaks.push_back(e - r1);
      }
      RealFn below = [&](double d) {
        const double w = weight(r1 - d);
        return w == 0.0 || d == 0.0 ? 0.0 : w * std::log((2.0 * r1 - d) / d);
      };
      RealFn above = [&](double d) {
        const double w = weight(r1 + d);
        return w == 0.0 || d == 0.0 ? 0.0 : w * std::log((2.0 * r1 + d) / d);
      };
      s += integrate(below, 0.0, r1 - win.a, t, left).value;
      if (std::isfinite(win.b)) {
        right.singular_hi = win.zero_at_b;
        s += integrate(above, 0.0, win.b - r1, t, right).value;
      } else {
        s += integrate_semi_infinite(above, 0.0, t, V.decay(), right).value;
      }
    }
    return s;
  };
  const double I = integrate_negative(V, W, [&](double r, double) { return weight(r) * inner(r); }, t);
  return 0.5 * I;
}

TotalLimitValue with_aux(TotalLimitValue v, std::initializer_list<std::pair<const char*, double>> aux) {
  for (const auto& [k, x] : aux) v.auxiliary[k] = x;
  return v;
}

}  // namespace

const std::vector<std::string>& l_bound_ids() {
  static const std::vector<std::string> ids{"BSL", "CMSL", "ULL", "NLL3L", "NLL4L"};
  return ids;
}

const std::vector<std::string>& total_bound_ids() {
  static const std::vector<std::string> ids{"BiScentral", "BSN",    "Lieb",  "CMSN",    "NUL2Nn",
                                            "NUL2Nm",     "improvedBSN", "improvedCMSN", "NLLN3",
                                            "NLLN4",      "SUM_NUL2", "SUM_NLL2"};
  return ids;
}

LimitValue monotone_nul(const Channel& ch) {
  const SpectralFunctionals& sf = ch.on_V;
  if (ch.ell != 0) return make_inapplicable("NUL2m", LimitKind::upper, "S-wave form");
  if (!sf.shape.monotone_nondecreasing)
    return make_inapplicable("NUL2m", LimitKind::upper, "potential is not monotonically nondecreasing");
  if (!sf.p || !sf.q || *sf.p > *sf.q)
    return make_inapplicable("NUL2m", LimitKind::upper, "p and q undefined or q < p");
  const double raw =
      0.5 + 0.5 * sf.S + std::log(ch.V.value(*sf.p) / ch.V.value(*sf.q)) / (4.0 * pi);
  return make_applicable("NUL2m", LimitKind::upper, raw);
}

std::vector<TotalLimitValue> l_bounds(const Potential& pot, const Tolerances& tol) {
  const Channel ch = make_channel(pot, 0, tol);
  const SpectralFunctionals& sf = ch.on_V;
  std::vector<TotalLimitValue> out;

  const double I = moment(ch, [](double r, double a) { return r * a; });
  out.push_back(with_aux(make_applicable("BSL", LimitKind::upper, -0.5 + 0.5 * I), {{"I", I}}));

  if (sf.shape.monotone_nondecreasing)
    out.push_back(make_applicable("CMSL", LimitKind::upper, 0.5 * pi * sf.S - 0.5));
  else
    out.push_back(make_inapplicable("CMSL", LimitKind::upper, "potential is not monotonically nondecreasing"));

  out.push_back(with_aux(make_applicable("ULL", LimitKind::upper, 0.5 * (pi * sf.sigma - 1.0), Strictness::floored),
                         {{"sigma", sf.sigma}}));

  if (auto why = nll3_problem(sf)) {
    out.push_back(make_inapplicable("NLL3L", LimitKind::lower, *why));
  } else {
    const double nu = nu_of(ch);
    const double lambda = std::log(*sf.q / *sf.p) / pi;
    if (nu <= 0.0)
      out.push_back(make_inapplicable("NLL3L", LimitKind::lower, "nu <= 0: no assertion"));
    else
      out.push_back(with_aux(make_applicable("NLL3L", LimitKind::lower, nu / lambda, Strictness::floored),
                             {{"nu", nu}, {"lambda", lambda}}));
  }

  const double l4 = 0.5 * (sf.sigma - 1.0);
  const int l_at = std::max(0, static_cast<int>(std::floor(l4)));
  if (analyze_shape(ch.V, l_at, tol).cond_monotonicity_4l)
    out.push_back(with_aux(make_applicable("NLL4L", LimitKind::lower, l4, Strictness::floored),
                           {{"sigma", sf.sigma}}));
  else
    out.push_back(make_inapplicable("NLL4L", LimitKind::lower, "[V r^-4l]' >= 0 fails"));
  return out;
}

std::vector<TotalLimitValue> total_bounds(const Potential& pot, const Tolerances& tol) {
  const Channel ch = make_channel(pot, 0, tol);
  const SpectralFunctionals& sf = ch.on_V;
  const double S = sf.S, sigma = sf.sigma;
  const bool monotone = sf.shape.monotone_nondecreasing;
  std::vector<TotalLimitValue> out;

  out.push_back(make_applicable("BiScentral", LimitKind::upper, bis_central(ch)));

  const double I = moment(ch, [](double r, double a) { return r * a; });
  // N <= {{I}} {{(I+1)/2}}: the product of integer parts is itself reachable,
  // so the statement is kept inclusive.
  out.push_back(with_aux(make_applicable("BSN", LimitKind::upper,
                                         std::floor(I) * std::floor(0.5 * (I + 1.0)), Strictness::inclusive),
                         {{"I", I}}));

  const double lieb = kLiebCentral * moment(ch, [](double r, double a) { return r * r * a * std::sqrt(a); });
  out.push_back(make_applicable("Lieb", LimitKind::upper, lieb));

  const std::string not_mono = "potential is not monotonically nondecreasing";
  if (monotone) {
    const double cmsn = pi * pi / 12.0 *
                        (S * S * S + 3.0 * S * S + 2.0 / pi * (3.0 - 1.0 / (2.0 * pi)) * S + 3.0 / (pi * pi));
    out.push_back(make_applicable("CMSN", LimitKind::upper, cmsn));
  } else {
    out.push_back(make_inapplicable("CMSN", LimitKind::upper, not_mono));
  }

  const double width = 0.125 * (pi * sigma + 1.0) * (pi * sigma + 1.0);
  {
    const LimitValue nul2 = evaluate_nu2_family("NUL2", ch);
    if (!sf.shape.two_zero_shape || !nul2.applicable) {
      out.push_back(make_inapplicable("NUL2Nn", LimitKind::upper,
                                      nul2.applicable ? "two-zero sign pattern fails" : nul2.reason));
    } else {
      const double lg = std::log(-sf.V_at_rmin / *sf.M) / pi;
      out.push_back(make_applicable("NUL2Nn", LimitKind::upper, width * (2.0 + S + lg)));
    }
  }
  if (!monotone) {
    out.push_back(make_inapplicable("NUL2Nm", LimitKind::upper, not_mono));
  } else if (!sf.p || !sf.q || *sf.p > *sf.q) {
    out.push_back(make_inapplicable("NUL2Nm", LimitKind::upper, "p and q undefined or q < p"));
  } else {
    const double lg = std::log(ch.V.value(*sf.p) / ch.V.value(*sf.q)) / (2.0 * pi);
    out.push_back(make_applicable("NUL2Nm", LimitKind::upper, width * (1.0 + S + lg)));
  }

  // Improved variants: the partial sums up to the real-valued ULL radius.
  const double Lp1 = 0.5 * (pi * sigma + 1.0);
  out.push_back(with_aux(make_applicable("improvedBSN", LimitKind::upper, I * Lp1), {{"L_eff_plus_1", Lp1}}));
  if (monotone) {
    const double v = (S + 1.0) * Lp1 * Lp1 - Lp1 * (2.0 * Lp1 - 1.0) * (2.0 * Lp1 + 1.0) / (3.0 * pi);
    out.push_back(with_aux(make_applicable("improvedCMSN", LimitKind::upper, v), {{"L_eff_plus_1", Lp1}}));
  } else {
    out.push_back(make_inapplicable("improvedCMSN", LimitKind::upper, not_mono));
  }

  if (auto why = nll3_problem(sf)) {
    out.push_back(make_inapplicable("NLLN3", LimitKind::lower, *why));
  } else {
    const double nu = nu_of(ch);
    const double lambda = std::log(*sf.q / *sf.p) / pi;
    if (nu <= 0.0) {
      out.push_back(make_inapplicable("NLLN3", LimitKind::lower, "nu <= 0: no assertion"));
    } else {
      const double v = nu / (6.0 * lambda * lambda) * (2.0 * nu + lambda) * (nu + lambda);
      out.push_back(with_aux(make_applicable("NLLN3", LimitKind::lower, v), {{"nu", nu}, {"lambda", lambda}}));
    }
  }

  if (sf.shape.cond_monotonicity_4l) {
    const double v = 0.5 * std::floor(0.5 * (sigma + 1.0)) * std::floor(0.5 * (sigma + 3.0));
    out.push_back(make_applicable("NLLN4", LimitKind::lower, v, Strictness::inclusive));
  } else {
    out.push_back(make_inapplicable("NLLN4", LimitKind::lower, "[V r^-4l]' >= 0 fails at l = 0"));
  }

  out.push_back(sum_partial_limits("NUL2l", pot, tol));
  out.push_back(sum_partial_limits("NLL2l", pot, tol));
  return out;
}

TotalLimitValue sum_partial_limits(std::string_view limit_id, const Potential& pot, const Tolerances& tol) {
  const bool upper = limit_id == "NUL2l";
  if (!upper && limit_id != "NLL2l") throw ConfigError("partial sums are defined for NUL2l and NLL2l");
  const char* id = upper ? "SUM_NUL2" : "SUM_NLL2";
  const LimitKind kind = upper ? LimitKind::upper : LimitKind::lower;

  const Channel ch0 = make_channel(pot, 0, tol);
  // No channel beyond the ULL radius holds a bound state.
  const int l_cap = static_cast<int>(std::floor(0.5 * (pi * ch0.on_V.sigma - 1.0)));

  TotalLimitValue total;
  double raw = 0.0;
  std::map<std::string, double> aux;
  for (int l = 0;; ++l) {
    if (l > l_cap) {
      aux["stopped_at_ull"] = l;
      break;
    }
    const Channel ch = l == 0 ? ch0 : make_channel(pot, l, tol);
    LimitValue v = evaluate_nu2_family(limit_id, ch);
    int src = 0;
    if (!v.applicable) {
      v = upper ? monotone_nul(ch) : evaluate_nu2_family("NLL3", ch);
      src = 1;
    }
    if (!v.applicable && upper) {
      v = evaluate_known_limit("Ml", ch);
      src = 2;
    }
    const std::string key = std::to_string(l);
    if (!v.applicable) {
      if (l == 0) return make_inapplicable(id, kind, "no per-channel bound applies at l = 0");
      aux["src_" + key] = 3;
      aux["stopped_at"] = l;
      if (upper) return make_inapplicable(id, kind, "no upper bound applies at l = " + key);
      break;
    }
    aux["src_" + key] = src;
    aux["raw_" + key] = *v.raw;
    if (upper ? *v.raw < 1.0 : *v.raw < 0.0) {
      aux["stopped_at"] = l;
      break;
    }
    const long term = v.table_value();
    aux["term_" + key] = static_cast<double>(term);
    raw += (2.0 * l + 1.0) * static_cast<double>(term);
  }
  // The terms are already integers; the sum is an inclusive statement.
  total = make_applicable(id, kind, raw, Strictness::inclusive);
  total.auxiliary = std::move(aux);
  return total;
}

}  // namespace boundcount
