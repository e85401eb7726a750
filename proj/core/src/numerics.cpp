#include "boundcount/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

namespace boundcount {

Tolerances Tolerances::tightened(double f) const {
  Tolerances t = *this;
  t.quad_rel /= f;
  t.quad_abs /= f;
  t.root_tol /= f;
  t.ode_rel /= f;
  t.tail_tol /= f;
  t.origin_eps /= f * f;
  t.max_steps = static_cast<long>(static_cast<double>(max_steps) * std::max(1.0, f));
  return t;
}

void Tolerances::validate() const {
  auto pos = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("tolerance ") + name + " must be positive and finite");
  };
  pos(quad_rel, "quad_rel");
  pos(quad_abs, "quad_abs");
  pos(root_tol, "root_tol");
  pos(ode_rel, "ode_rel");
  pos(tail_tol, "tail_tol");
  pos(origin_eps, "origin_eps");
  if (max_subdivisions <= 0) throw ConfigError("tolerance max_subdivisions must be positive");
  if (max_steps <= 0) throw ConfigError("tolerance max_steps must be positive");
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod_panel(const RealFn& f, double a, double b) {
  double err = 0.0;
  const double v = GK::integrate(f, a, b, 0, 0.0, &err);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite integrand on panel [" << a << ", " << b << "]";
    throw NumericalFailure(os.str());
  }
  // Boost 1.74 reports the non-adaptive error on [-1, 1] without the
  // half-width factor.
  return {a, b, v, err * 0.5 * (b - a)};
}

// Global adaptive bisection over a single smooth interval.
QuadResult adaptive(const RealFn& f, double a, double b, const Tolerances& tol) {
  if (a == b) return {};
  std::priority_queue<Panel> heap;
  Panel first = kronrod_panel(f, a, b);
  double value = first.value, error = first.error;
  heap.push(first);
  // max_subdivisions is a depth-like knob; the panel budget grows as 2^depth
  // but is capped to keep the heap small.
  const long budget = std::min<long>(1L << std::min(tol.max_subdivisions, 20), 1L << 16);
  long panels = 1;
  while (error > std::max(tol.quad_abs, tol.quad_rel * std::abs(value))) {
    if (panels >= budget) {
      const Panel& w = heap.top();
      std::ostringstream os;
      os << "quadrature did not converge: worst panel [" << w.a << ", " << w.b
         << "] error " << w.error << " (total error " << error << ", value " << value << ")";
      throw NumericalFailure(os.str());
    }
    Panel w = heap.top();
    heap.pop();
    const double m = 0.5 * (w.a + w.b);
    if (!(m > w.a && m < w.b)) {
      // Panel can no longer be split in double precision; accept it.
      error -= w.error;
      if (heap.empty()) break;
      continue;
    }
    Panel l = kronrod_panel(f, w.a, m), r = kronrod_panel(f, m, w.b);
    value += l.value + r.value - w.value;
    error += l.error + r.error - w.error;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  return {value, std::max(error, 0.0)};
}

QuadResult integrate_piece(const RealFn& f, double a, double b, bool sing_lo, bool sing_hi,
                           const Tolerances& tol) {
  if (sing_lo && sing_hi) {
    const double m = 0.5 * (a + b);
    QuadResult l = integrate_piece(f, a, m, true, false, tol);
    QuadResult r = integrate_piece(f, m, b, false, true, tol);
    return {l.value + r.value, l.error + r.error};
  }
  const double w = b - a;
  if (sing_lo) {
    RealFn g = [&](double u) { return u == 0.0 ? 0.0 : 2.0 * u * f(a + u * u); };
    return adaptive(g, 0.0, std::sqrt(w), tol);
  }
  if (sing_hi) {
    RealFn g = [&](double u) { return u == 0.0 ? 0.0 : 2.0 * u * f(b - u * u); };
    return adaptive(g, 0.0, std::sqrt(w), tol);
  }
  return adaptive(f, a, b, tol);
}

}  // namespace

QuadResult integrate(const RealFn& f, double a, double b, const Tolerances& tol,
                     const QuadOptions& opt) {
  if (!(a <= b)) throw std::invalid_argument("integrate: requires a <= b");
  if (a == b) return {};
  std::vector<double> pts{a};
  for (double x : opt.breaks)
    if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  QuadResult total;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const bool lo = (i == 0) && opt.singular_lo;
    const bool hi = (i + 2 == pts.size()) && opt.singular_hi;
    QuadResult r = integrate_piece(f, pts[i], pts[i + 1], lo, hi, tol);
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

QuadResult integrate_semi_infinite(const RealFn& f, double a, const Tolerances& tol,
                                   const DecayHint& decay, const QuadOptions& opt) {
  if (!(decay.scale > 0.0)) throw std::invalid_argument("integrate_semi_infinite: scale must be positive");
  if (decay.kind == DecayKind::compact) return integrate(f, a, std::max(a, decay.scale), tol, opt);
  double b = a + decay.scale;
  QuadResult total = integrate(f, a, b, tol, opt);

  QuadOptions rest;
  constexpr int kMaxDoublings = 60;
  double len = decay.scale;
  for (int it = 0; it < kMaxDoublings; ++it) {
    len *= 2.0;
    const double nb = b + len;
    for (double x : opt.breaks)
      if (x > b && x < nb) rest.breaks.push_back(x);
    QuadResult piece = integrate(f, b, nb, tol, rest);
    rest.breaks.clear();
    total.value += piece.value;
    total.error += piece.error;
    double tail = std::abs(piece.value);
    if (decay.kind == DecayKind::power) {
      const double p = decay.power;
      if (!(p > 1.0)) throw std::invalid_argument("integrate_semi_infinite: power decay needs p > 1");
      // For c r^-p the remainder beyond nb relative to the last piece.
      const double e = 1.0 - p;
      const double ratio = std::pow(nb, e) / (std::pow(b, e) - std::pow(nb, e));
      tail *= std::abs(ratio);
    }
    b = nb;
    if (tail <= tol.tail_tol * std::abs(total.value) || (tail == 0.0 && total.value == 0.0)) {
      total.error += tail;
      return total;
    }
  }
  std::ostringstream os;
  os << "semi-infinite quadrature: tail did not converge by r = " << b;
  throw NumericalFailure(os.str());
}

double find_root(const RealFn& f, double lo, double hi, const Tolerances& tol) {
  if (lo > hi) std::swap(lo, hi);
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!(flo * fhi < 0.0)) {
    std::ostringstream os;
    os << "find_root: invalid bracket [" << lo << ", " << hi << "] with f = " << flo << ", " << fhi;
    throw std::invalid_argument(os.str());
  }
  const double rt = tol.root_tol;
  auto done = [rt](double x, double y) {
    return std::abs(y - x) <= rt * std::max(1.0, std::max(std::abs(x), std::abs(y)));
  };
  std::uintmax_t iters = 400;
  auto res = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
  return 0.5 * (res.first + res.second);
}

MaxResult maximize_scalar(const RealFn& f, double lo, double hi, const Tolerances& tol,
                          bool log_scale, int scan_points) {
  if (!(lo < hi)) throw std::invalid_argument("maximize_scalar: requires lo < hi");
  if (log_scale && !(lo > 0.0)) throw std::invalid_argument("maximize_scalar: log scale needs lo > 0");
  scan_points = std::max(scan_points, 3);
  const double t0 = log_scale ? std::log(lo) : lo;
  const double t1 = log_scale ? std::log(hi) : hi;
  auto to_x = [&](double t) { return log_scale ? std::exp(t) : t; };
  auto ft = [&](double t) {
    const double v = f(to_x(t));
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };

  std::vector<double> ts(scan_points), vs(scan_points);
  int best = 0;
  for (int i = 0; i < scan_points; ++i) {
    ts[i] = t0 + (t1 - t0) * i / (scan_points - 1);
    vs[i] = ft(ts[i]);
    if (vs[i] > vs[best]) best = i;
  }
  const double a = ts[std::max(best - 1, 0)];
  const double b = ts[std::min(best + 1, scan_points - 1)];
  const int bits = std::clamp(static_cast<int>(-std::log2(tol.root_tol) / 2.0) + 2, 10,
                              std::numeric_limits<double>::digits / 2);
  std::uintmax_t iters = 200;
  auto neg = [&](double t) { return -ft(t); };
  auto r = boost::math::tools::brent_find_minima(neg, a, b, bits, iters);

  MaxResult out;
  if (-r.second >= vs[best]) {
    out.argmax = to_x(r.first);
    out.value = -r.second;
  } else {
    out.argmax = to_x(ts[best]);
    out.value = vs[best];
  }
  const double span = t1 - t0;
  const double t_at = log_scale ? std::log(out.argmax) : out.argmax;
  out.at_boundary = (t_at - t0) < 1e-6 * span || (t1 - t_at) < 1e-6 * span;
  return out;
}

OdeResult integrate_ode(const ScalarRhs& rhs, double r0, double y0, double r_end,
                        const Tolerances& tol, double trace_dr) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 1>;
  OdeResult out;
  out.y_end = y0;
  if (r_end <= r0) return out;

  auto sys = [&](const State& x, State& dx, double r) { dx[0] = rhs(r, x[0]); };
  auto stepper = ode::make_controlled(tol.ode_rel, tol.ode_rel, ode::runge_kutta_dopri5<State>());

  State x{y0};
  double r = r0;
  double dt = std::max((r_end - r0) * 1e-6, std::max(std::abs(r0), 1e-300) * 1e-3);
  double last_trace = r0;
  if (trace_dr > 0.0) out.trace.push_back({r0, y0});
  int consecutive_fail = 0;
  while (r < r_end) {
    if (out.steps >= tol.max_steps) {
      std::ostringstream os;
      os << "ODE step budget exhausted at r = " << r;
      throw NumericalFailure(os.str());
    }
    dt = std::min(dt, r_end - r);
    const double r_before = r;
    auto res = stepper.try_step(sys, x, r, dt);
    if (res == ode::success) {
      consecutive_fail = 0;
      ++out.steps;
      if (!std::isfinite(x[0])) {
        std::ostringstream os;
        os << "ODE state became non-finite at r = " << r;
        throw NumericalFailure(os.str());
      }
      if (r_end - r < 1e-14 * std::max(std::abs(r_end), 1.0)) r = r_end;
      if (trace_dr > 0.0 && (r - last_trace >= trace_dr || r >= r_end)) {
        out.trace.push_back({r, x[0]});
        last_trace = r;
      }
    } else {
      if (dt <= 1e-15 * std::max(std::abs(r_before), 1e-300) || ++consecutive_fail > 200) {
        std::ostringstream os;
        os << "ODE step size underflow at r = " << r_before;
        throw NumericalFailure(os.str());
      }
    }
  }
  out.y_end = x[0];
  return out;
}

}  // namespace boundcount
