#include <cmath>
#include <numbers>
#include <sstream>

#include "boundcount/limits.hpp"

namespace boundcount {

namespace {

using std::numbers::pi;

// A recursion longer than this means |V| has collapsed inside the well.
constexpr int kMaxRecursion = 1'000'000;

class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Well {
  Potential U;
  double r_minus, r_plus, r_min;

  double step(double r) const {
    const double a = -U.value(r);
    if (!(a > 0.0)) {
      std::ostringstream os;
      os << "|V| vanishes inside the well at r = " << r;
      throw StepFailure(os.str());
    }
    return 0.5 * pi / std::sqrt(a);
  }
  double depth(double r) const { return -U.value(r); }

  // Radii r_0, r_1, ... stepping in `dir` until `stop(r)` holds; the last
  // element is the first radius that satisfies it.
  template <class Stop>
  std::vector<double> walk(double r0, int dir, Stop stop) const {
    std::vector<double> rs{r0};
    while (!stop(rs.back())) {
      if (static_cast<int>(rs.size()) > kMaxRecursion) {
        std::ostringstream os;
        os << "recursion did not leave the well (stuck near r = " << rs.back() << ")";
        throw StepFailure(os.str());
      }
      rs.push_back(rs.back() + dir * step(rs.back()));
    }
    return rs;
  }
};

struct LowerRun {
  double raw;
  RecursionTrace trace;
};

LowerRun lower_run(const Well& w, double r0i, double r0d) {
  LowerRun out;
  RecursionTrace& t = out.trace;
  t.start_incr = r0i;
  t.start_decr = r0d;
  t.radii_incr = w.walk(r0i, +1, [&](double r) { return r >= w.r_min; });
  t.radii_decr = w.walk(r0d, -1, [&](double r) { return r <= w.r_min; });
  const int Ji = static_cast<int>(t.radii_incr.size()) - 1;
  const int Jd = static_cast<int>(t.radii_decr.size()) - 1;
  t.J_incr = Ji;
  t.J_decr = Jd;
  int H = 1;
  if (Ji >= 1 && Jd >= 1) {
    const double a = w.depth(t.radii_incr[Ji - 1]);
    const double b = w.depth(t.radii_decr[Jd - 1]);
    if ((a <= b && t.radii_incr[Ji] <= t.radii_decr[Jd - 1]) ||
        (a >= b && t.radii_incr[Ji - 1] <= t.radii_decr[Jd]))
      H = 0;
  }
  t.H_term = H;
  out.raw = 0.5 * (Ji + Jd - H) - 1.0;
  return out;
}

}  // namespace

SecondKind second_kind_limits(const Channel& ch, bool start_search) {
  SecondKind out;
  const SpectralFunctionals& sf = ch.on_eff;
  const ShapeReport& sh = sf.shape;
  auto both_fail = [&](const std::string& why) {
    out.ulsk = make_inapplicable("ULSK", LimitKind::upper, why);
    out.llsk = make_inapplicable("LLSK", LimitKind::lower, why);
    return out;
  };
  if (!sh.single_minimum_shape) return both_fail("effective potential does not have a single interior minimum");
  if (!sh.r_minus || !std::isfinite(sh.r_plus)) return both_fail("well must have finite r- and r+");

  const Well w{effective_potential(ch.V, ch.ell), *sh.r_minus, sh.r_plus, *sh.r_min};
  try {
    RecursionTrace& up = out.up;
    up.start_incr = up.start_decr = w.r_min;
    up.radii_incr = w.walk(w.r_min, +1, [&](double r) { return r >= w.r_plus; });
    up.radii_decr = w.walk(w.r_min, -1, [&](double r) { return r <= w.r_minus; });
    up.J_incr = static_cast<int>(up.radii_incr.size()) - 1;
    up.J_decr = static_cast<int>(up.radii_decr.size()) - 1;
    up.theta_term = up.radii_decr.back() >= 0.0 ? 1 : 0;
    out.ulsk = make_applicable("ULSK", LimitKind::upper, 0.5 * (up.J_incr + up.J_decr + 1 + up.theta_term));
    out.ulsk.auxiliary["J_incr"] = up.J_incr;
    out.ulsk.auxiliary["J_decr"] = up.J_decr;
    out.ulsk.auxiliary["theta"] = up.theta_term;
  } catch (const StepFailure& e) {
    out.ulsk = make_inapplicable("ULSK", LimitKind::upper, e.what());
  }

  try {
    const int n = kStartSearchPoints;
    auto start_i = [&](int i) { return w.r_minus + 0.5 * (w.r_min - w.r_minus) * i / n; };
    auto start_d = [&](int j) { return w.r_plus - 0.5 * (w.r_plus - w.r_min) * j / n; };
    LowerRun best = lower_run(w, start_i(n / 2), start_d(n / 2));
    if (start_search) {
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
          LowerRun r = lower_run(w, start_i(i), start_d(j));
          if (r.raw > best.raw) best = std::move(r);
        }
    }
    out.lo = best.trace;
    out.llsk = make_applicable("LLSK", LimitKind::lower, best.raw);
    out.llsk.auxiliary["J_incr"] = best.trace.J_incr;
    out.llsk.auxiliary["J_decr"] = best.trace.J_decr;
    out.llsk.auxiliary["H"] = best.trace.H_term;
    out.llsk.auxiliary["r0_incr"] = best.trace.start_incr;
    out.llsk.auxiliary["r0_decr"] = best.trace.start_decr;
  } catch (const StepFailure& e) {
    out.llsk = make_inapplicable("LLSK", LimitKind::lower, e.what());
  }
  return out;
}

}  // namespace boundcount
