#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "boundcount/exact_counter.hpp"

namespace boundcount {

namespace {

using std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_edge(const Potential& U, double r) {
  const auto& e = U.edges();
  return std::find(e.begin(), e.end(), r) != e.end();
}

double refine(const Potential& U, double lo, double hi, const Tolerances& tol) {
  RealFn f = [&U](double r) { return U.value(r); };
  try {
    return find_root(f, lo, hi, tol);
  } catch (const std::invalid_argument&) {
    std::ostringstream os;
    os << "sign change of the potential in [" << lo << ", " << hi << "] could not be bracketed";
    throw NumericalFailure(os.str());
  }
}

}  // namespace

NegativeWindows negative_windows(const Potential& U, const Tolerances& tol) {
  NegativeWindows out;
  out.edges = U.edges();
  std::vector<double> xs = verification_grid(U);
  xs.insert(xs.end(), out.edges.begin(), out.edges.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  const int n = static_cast<int>(xs.size());
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = U.value(xs[i]);

  bool open = false;
  NegativeWindows::Window cur{};
  for (int i = 0; i < n; ++i) {
    const bool neg = v[i] < 0.0;
    if (neg && !open) {
      open = true;
      if (i == 0) {
        cur.a = 0.0;
        cur.zero_at_a = false;
      } else if (is_edge(U, xs[i]) && U.eval_left(xs[i]).v >= 0.0) {
        cur.a = xs[i];
        cur.zero_at_a = false;
      } else {
        cur.a = refine(U, xs[i - 1], xs[i], tol);
        cur.zero_at_a = true;
      }
    } else if (!neg && open) {
      open = false;
      if (is_edge(U, xs[i]) && U.eval_left(xs[i]).v < 0.0) {
        cur.b = xs[i];
        cur.zero_at_b = false;
      } else {
        cur.b = refine(U, xs[i - 1], xs[i], tol);
        cur.zero_at_b = true;
      }
      out.windows.push_back(cur);
    } else if (neg && open && i > 0 && is_edge(U, xs[i]) && U.eval_left(xs[i]).v >= 0.0) {
      // Positive just below an edge: close the previous window there.
      cur.b = refine(U, xs[i - 1], std::nextafter(xs[i], 0.0), tol);
      cur.zero_at_b = true;
      out.windows.push_back(cur);
      cur.a = xs[i];
      cur.zero_at_a = false;
    }
  }
  if (open) {
    cur.b = kInf;
    cur.zero_at_b = false;
    out.windows.push_back(cur);
  }
  return out;
}

double integrate_negative(const Potential& U, const NegativeWindows& w,
                          const std::function<double(double, double)>& F, const Tolerances& tol) {
  RealFn f = [&](double r) {
    const double v = U.value(r);
    // V = -inf only where r underflows against a Coulomb origin; integrable
    // integrands carry no weight there.
    if (!std::isfinite(v)) return 0.0;
    return v < 0.0 ? F(r, -v) : 0.0;
  };
  double total = 0.0;
  for (const auto& win : w.windows) {
    QuadOptions opt;
    opt.singular_lo = true;
    opt.singular_hi = win.zero_at_b;
    opt.breaks = w.edges;
    if (std::isinf(win.b)) {
      total += integrate_semi_infinite(f, win.a, tol, U.decay(), opt).value;
    } else {
      total += integrate(f, win.a, win.b, tol, opt).value;
    }
  }
  return total;
}

namespace {

struct PhaseIntegral {
  const Potential& U;
  const NegativeWindows& w;
  const Tolerances& tol;

  RealFn root_abs() const {
    return [this](double r) {
      const double v = U.value(r);
      return v < 0.0 ? std::sqrt(-v) : 0.0;
    };
  }

  double over(double a, double b, bool sing_lo, bool sing_hi) const {
    QuadOptions opt;
    opt.singular_lo = sing_lo;
    opt.singular_hi = sing_hi;
    opt.breaks = w.edges;
    if (std::isinf(b)) return integrate_semi_infinite(root_abs(), a, tol, U.decay(), opt).value;
    return integrate(root_abs(), a, b, tol, opt).value;
  }

  double window_total(const NegativeWindows::Window& win) const {
    return over(win.a, win.b, true, win.zero_at_b);
  }

  // Radius x where the phase accumulated from the origin reaches `target`.
  double from_left(double target) const {
    double acc = 0.0;
    for (const auto& win : w.windows) {
      const double t = window_total(win);
      if (acc + t >= target) {
        const double need = target - acc;
        double hi = win.b;
        if (std::isinf(hi)) {
          hi = std::max(2.0 * win.a, U.R());
          while (over(win.a, hi, true, true) < need) hi *= 2.0;
        }
        // Both ends may sit near a zero of U; the u^2 map is harmless elsewhere.
        RealFn g = [&](double x) { return over(win.a, x, true, true) - need; };
        return find_root(g, win.a, hi, tol);
      }
      acc += t;
    }
    return kInf;
  }

  // Radius x where the phase accumulated from x to infinity reaches `target`.
  double from_right(double target) const {
    double acc = 0.0;
    for (auto it = w.windows.rbegin(); it != w.windows.rend(); ++it) {
      const auto& win = *it;
      const double t = window_total(win);
      if (acc + t >= target) {
        const double need = target - acc;
        RealFn g = [&](double x) { return over(x, win.b, true, win.zero_at_b) - need; };
        double hi = win.b;
        if (std::isinf(hi)) {
          hi = std::max(2.0 * win.a, U.R());
          while (g(hi) > 0.0) hi *= 2.0;
        }
        return find_root(g, win.a, hi, tol);
      }
      acc += t;
    }
    return -kInf;
  }
};

}  // namespace

SpectralFunctionals spectral_functionals(const Potential& p, int ell, bool use_effective,
                                         const Tolerances& tol) {
  if (ell < 0) throw ConfigError("channel l must be nonnegative");
  SpectralFunctionals sf;
  sf.ell = ell;
  sf.effective = use_effective;
  const Potential U = use_effective ? effective_potential(p.bare(), ell) : p;
  sf.shape = analyze_shape(p.bare(), use_effective ? ell : p.ell_shift(), tol);

  const NegativeWindows w = negative_windows(U, tol);
  const PhaseIntegral phase{U, w, tol};
  for (const auto& win : w.windows) sf.phase_total += phase.window_total(win);
  sf.S = 2.0 / pi * sf.phase_total;

  // sigma: sup of r |U^-|^(1/2), including values just below jump edges.
  double best = 0.0, best_r = 0.0;
  RealFn h = [&U](double r) {
    const double v = U.value(r);
    return v < 0.0 ? r * std::sqrt(-v) : 0.0;
  };
  for (const auto& win : w.windows) {
    const double lo = std::max(win.a, 1e-6 * U.R());
    const double hi = std::isinf(win.b) ? std::max(4.0 * U.r_max(), 2.0 * lo) : win.b;
    if (hi > lo) {
      const MaxResult m = maximize_scalar(h, lo, hi, tol, true, 256);
      if (m.value > best) {
        best = m.value;
        best_r = m.argmax;
      }
    }
    if (!std::isinf(win.b) && !win.zero_at_b) {
      const double v = U.eval_left(win.b).v;
      if (v < 0.0 && win.b * std::sqrt(-v) > best) {
        best = win.b * std::sqrt(-v);
        best_r = win.b;
      }
    }
  }
  sf.sigma = 2.0 / pi * best;
  sf.r_sigma = best_r;

  if (sf.phase_total >= pi / 2.0 && !w.windows.empty()) {
    sf.p = phase.from_left(pi / 2.0);
    sf.q = phase.from_right(pi / 2.0);
    auto depth = [&U](double r) { return std::max(-U.value(r), 0.0); };
    sf.M = std::min(depth(*sf.p), depth(*sf.q));
  }
  sf.r_min = sf.shape.r_min;
  sf.V_at_rmin = sf.shape.V_at_rmin;
  return sf;
}

}  // namespace boundcount
