#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "boundcount/potential.hpp"

namespace boundcount {

std::vector<double> verification_grid(const Potential& p, int points) {
  const double lo = 1e-6 * p.R();
  const double hi = p.r_max();
  std::vector<double> xs(points);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) xs[i] = std::exp(a + (b - a) * i / (points - 1));
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

namespace {

constexpr double kFlagTol = 1e-12;

double refine_zero(const RealFn& f, double lo, double hi, const Tolerances& tol) {
  try {
    return find_root(f, lo, hi, tol);
  } catch (const std::invalid_argument&) {
    std::ostringstream os;
    os << "failed to bracket a sign change indicated by the grid in [" << lo << ", " << hi << "]";
    throw NumericalFailure(os.str());
  }
}

}  // namespace

ShapeReport analyze_shape(const Potential& pot, int ell, const Tolerances& tol, int grid_points) {
  const Potential& bare = pot.bare();
  const Potential U = effective_potential(bare, ell);
  ShapeReport rep;
  rep.channel = ell;

  const std::vector<double> xs = verification_grid(bare, grid_points);
  const int n = static_cast<int>(xs.size());
  std::vector<VEval> vb(n), vu(n);
  double vscale = 0.0;
  for (int i = 0; i < n; ++i) {
    vb[i] = bare.eval(xs[i]);
    vu[i] = U.eval(xs[i]);
    vscale = std::max(vscale, std::abs(vb[i].v));
  }

  // Conditions stated on V itself.
  rep.nonpositive = true;
  rep.monotone_nondecreasing = true;
  rep.cond_monotonicity_4l = true;
  for (int i = 0; i < n; ++i) {
    const double r = xs[i];
    const VEval& e = vb[i];
    if (rep.nonpositive && e.v > kFlagTol * vscale) {
      rep.nonpositive = false;
      rep.witness["nonpositive"] = r;
    }
    const bool jump_down = i > 0 && vb[i].v < vb[i - 1].v - kFlagTol * vscale;
    if (rep.monotone_nondecreasing && (e.d1 < -kFlagTol * std::abs(e.v) || jump_down)) {
      rep.monotone_nondecreasing = false;
      rep.witness["monotone_nondecreasing"] = r;
    }
    const double c5 = e.d1 - 4.0 * ell * e.v / r;
    bool jump5 = false;
    if (i > 0 && ell > 0) {
      const double a = vb[i - 1].v * std::pow(xs[i - 1] / r, -4.0 * ell);
      jump5 = e.v < a - kFlagTol * std::max(std::abs(a), std::abs(e.v));
    } else if (i > 0) {
      jump5 = jump_down;
    }
    if (rep.cond_monotonicity_4l &&
        (c5 < -kFlagTol * (std::abs(e.d1) + 4.0 * ell * std::abs(e.v) / r) || jump5)) {
      rep.cond_monotonicity_4l = false;
      rep.witness["cond_monotonicity_4l"] = r;
    }
  }

  // CMS2: (1-2p)|V| <= (1-p) r V' wherever V < 0.
  if (rep.nonpositive) {
    double pmin = 0.5;
    for (int i = 0; i < n; ++i) {
      const VEval& e = vb[i];
      if (e.v < 0.0 && e.d1 < 0.0) {
        const double a = -e.v, b = -xs[i] * e.d1;
        pmin = std::max(pmin, (a + b) / (2.0 * a + b));
      }
    }
    if (pmin < 1.0) rep.cms2_p_min = pmin;
  }

  // Zeros and minimum of the effective potential.
  std::vector<int> neg;
  for (int i = 0; i < n; ++i)
    if (vu[i].v < 0.0) neg.push_back(i);
  if (neg.empty()) {
    rep.r_plus = 0.0;
    rep.V_at_rmin = 0.0;
    return rep;
  }
  const int i0 = neg.front(), i1 = neg.back();
  const bool contiguous = (i1 - i0 + 1) == static_cast<int>(neg.size());
  RealFn uval = [&U](double r) { return U.value(r); };
  if (i0 > 0) rep.r_minus = refine_zero(uval, xs[i0 - 1], xs[i0], tol);
  rep.r_plus = (i1 == n - 1) ? std::numeric_limits<double>::infinity()
                             : refine_zero(uval, xs[i1], xs[i1 + 1], tol);
  rep.two_zero_shape = contiguous && (!rep.r_minus || *rep.r_minus < rep.r_plus);

  // Sign changes of U' inside the negative window.
  int minima = 0, maxima = 0;
  std::optional<std::pair<double, double>> min_bracket;
  for (int i = i0; i < i1; ++i) {
    const double a = vu[i].d1, b = vu[i + 1].d1;
    if (a < 0.0 && b > 0.0) {
      ++minima;
      min_bracket = {xs[i], xs[i + 1]};
    } else if (a > 0.0 && b < 0.0) {
      ++maxima;
    }
  }
  if (minima == 1 && min_bracket) {
    RealFn du = [&U](double r) { return U.eval(r).d1; };
    rep.r_min = refine_zero(du, min_bracket->first, min_bracket->second, tol);
    rep.V_at_rmin = U.value(*rep.r_min);
  } else if (!rep.r_minus) {
    double v0 = -std::numeric_limits<double>::infinity();
    try {
      v0 = U.value(0.0);
    } catch (const expr::DomainError&) {
    }
    rep.V_at_rmin = std::isfinite(v0) ? std::min(v0, 0.0) : -std::numeric_limits<double>::infinity();
    for (int i = i0; i <= i1; ++i) rep.V_at_rmin = std::min(rep.V_at_rmin, vu[i].v);
  } else {
    rep.V_at_rmin = 0.0;
    for (int i = i0; i <= i1; ++i) rep.V_at_rmin = std::min(rep.V_at_rmin, vu[i].v);
  }
  rep.single_minimum_shape = rep.two_zero_shape && minima == 1 && maxima == 0 && rep.r_min &&
                             rep.r_minus_or_zero() < *rep.r_min && *rep.r_min < rep.r_plus;
  if (!rep.single_minimum_shape) rep.witness["single_minimum_shape"] = rep.r_min.value_or(xs[i0]);
  return rep;
}

}  // namespace boundcount
