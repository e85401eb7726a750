#include "boundcount/exact_counter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace boundcount {

namespace {

using std::numbers::pi;

// Below this depth (in units of 1/R^2) the phase equation is abandoned in
// favour of the Pruefer angle: near a zero of V the coefficient V'/(4|V|)
// blows up.
constexpr double kPhaseDepth = 1e-6;
constexpr int kClassifySamples = 4096;

enum class Mode { phase, prufer };

struct Segment {
  double a, b;
  Mode mode;
  bool edge_at_b;
  double K = 0.0;  // Pruefer base wavenumber
};

struct UV {
  double u, up;  // zero-energy solution and derivative, up to a positive factor
};

bool is_edge(const std::vector<double>& edges, double r) {
  for (double e : edges)
    if (e == r) return true;
  return false;
}

double prufer_k(double K, int ell, double r) {
  const double c = (ell + 1.0) / r;
  return std::sqrt(K * K + c * c);
}

UV to_uv(Mode m, double red, double r, const VEval& e, int ell, double K) {
  const double s = std::sin(red), c = std::cos(red);
  if (m == Mode::phase) {
    const double w = std::sqrt(std::max(-e.v, 0.0));
    return {s, w * c - (ell / r) * s};
  }
  return {s, prufer_k(K, ell, r) * c};
}

double from_uv(Mode m, const UV& x, double r, const VEval& e, int ell, double K) {
  if (m == Mode::phase) {
    const double w = std::sqrt(std::max(-e.v, 0.0));
    return std::atan2(w * x.u, x.up + (ell / r) * x.u);
  }
  return std::atan2(prufer_k(K, ell, r) * x.u, x.up);
}

std::vector<Segment> build_segments(const Potential& V, double eps, double r_end, double thr) {
  std::vector<double> cuts{eps};
  for (double e : V.edges())
    if (e > eps && e < r_end) cuts.push_back(e);
  cuts.push_back(r_end);
  std::sort(cuts.begin(), cuts.end());

  const double la = std::log(eps), lb = std::log(r_end);
  const int per = std::max(64, kClassifySamples / static_cast<int>(cuts.size() - 1));
  Tolerances rt;
  std::vector<Segment> segs;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double A = cuts[c], B = cuts[c + 1];
    const bool edge_b = is_edge(V.edges(), B);
    auto val = [&](double r) { return (r >= B && edge_b) ? V.eval_left(B).v : V.value(r); };
    auto phase_at = [&](double r) { return val(r) < -thr; };
    // Log-spaced samples within the piece, densest near the origin.
    const double pa = std::log(A), pb = std::log(B);
    const int m = std::max(per, static_cast<int>(per * (pb - pa) / (lb - la)));
    double prev_r = A;
    bool prev = phase_at(A);
    Mode seg_mode = prev ? Mode::phase : Mode::prufer;
    double seg_start = A;
    for (int i = 1; i <= m; ++i) {
      const double r = (i == m) ? B : std::exp(pa + (pb - pa) * i / m);
      const bool cur = phase_at(r);
      if (cur != prev) {
        RealFn f = [&](double x) { return val(x) + thr; };
        double x = 0.5 * (prev_r + r);
        try {
          x = find_root(f, prev_r, r, rt);
        } catch (const std::invalid_argument&) {
        }
        if (x > seg_start && x < B) {
          segs.push_back({seg_start, x, seg_mode, false});
          seg_start = x;
          seg_mode = cur ? Mode::phase : Mode::prufer;
        } else {
          // Sliver too thin to split: the Pruefer form is valid for any sign of V.
          seg_mode = Mode::prufer;
        }
      }
      prev = cur;
      prev_r = r;
    }
    segs.push_back({seg_start, B, seg_mode, edge_b});
  }
  // Base wavenumber for each Pruefer segment follows the largest repulsion in it.
  for (Segment& s : segs) {
    if (s.mode != Mode::prufer) continue;
    const double R = V.R();
    double vmax = 0.0;
    constexpr int kProbe = 64;
    for (int i = 0; i <= kProbe; ++i) {
      const double r = s.a + (s.b - s.a) * i / kProbe;
      const double v = (i == kProbe && s.edge_at_b) ? V.eval_left(s.b).v : V.value(r);
      vmax = std::max(vmax, v);
    }
    s.K = std::sqrt(1.0 / (R * R) + vmax);
  }
  return segs;
}

}  // namespace

PhaseSolution integrate_phase(const Potential& pot, int ell, double r_end, double eps,
                              const Tolerances& tol, double trace_dr) {
  if (ell < 0) throw ConfigError("angular momentum must be nonnegative");
  const Potential& V = pot.bare();
  const double R = V.R();
  const double thr = kPhaseDepth / (R * R);
  PhaseSolution sol;
  sol.r_start = eps;
  sol.r_end = r_end;

  const std::vector<Segment> segs = build_segments(V, eps, r_end, thr);

  // Start: small-r behaviour of the regular solution.
  double ang = 0.0;
  {
    const Segment& s0 = segs.front();
    if (s0.mode == Mode::phase) {
      QuadOptions o;
      o.singular_lo = true;
      RealFn f = [&V](double r) { return std::sqrt(std::max(-V.value(r), 0.0)); };
      ang = integrate(f, 0.0, eps, tol, o).value;
    } else {
      ang = std::atan2(prufer_k(s0.K, ell, eps) * eps, ell + 1.0);
    }
  }

  const double lterm = static_cast<double>(ell);
  const double cent = ell * (ell + 1.0);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& s = segs[i];
    auto ev = [&](double r) { return (r >= s.b && s.edge_at_b) ? V.eval_left(s.b) : V.eval(r); };
    ScalarRhs rhs;
    if (s.mode == Mode::phase) {
      ++sol.phase_segments;
      rhs = [&](double r, double eta) {
        const VEval e = ev(r);
        const double a = std::max(-e.v, 1e-300);
        return std::sqrt(a) - (e.d1 / (4.0 * a) + lterm / r) * std::sin(2.0 * eta);
      };
    } else {
      ++sol.prufer_segments;
      const double K = s.K;
      rhs = [&, K](double r, double th) {
        const VEval e = ev(r);
        const double W = e.v + cent / (r * r);
        const double c1 = (ell + 1.0) / r;
        const double k2 = K * K + c1 * c1;
        const double k = std::sqrt(k2);
        const double kk = -(c1 * c1 / r) / k2;
        const double sn = std::sin(th), cs = std::cos(th);
        return k * cs * cs - (W / k) * sn * sn + kk * sn * cs;
      };
    }
    OdeResult res = integrate_ode(rhs, s.a, ang, s.b, tol, trace_dr);
    sol.steps += res.steps;
    if (trace_dr > 0.0) sol.trace.insert(sol.trace.end(), res.trace.begin(), res.trace.end());
    ang = res.y_end;

    // Hand over to the next segment through (u, u'), which is continuous.
    if (i + 1 < segs.size()) {
      const Segment& nx = segs[i + 1];
      const double r = s.b;
      const double n = std::floor(ang / pi);
      const double red = ang - n * pi;
      const VEval left = s.edge_at_b ? V.eval_left(r) : V.eval(r);
      const VEval right = V.eval(r);
      const UV x = to_uv(s.mode, red, r, left, ell, s.K);
      ang = n * pi + from_uv(nx.mode, x, r, right, ell, nx.K);
    }
  }

  // Free continuation beyond r_end: u = A r^(l+1) + B r^(-l) gains one more
  // zero iff l u + r u' < 0.
  const Segment& last = segs.back();
  const double n = std::floor(ang / pi);
  const double red = ang - n * pi;
  const VEval e_end = V.eval(r_end);
  const UV x = to_uv(last.mode, red, r_end, e_end, ell, last.K);
  const double a_part = lterm * x.u + r_end * x.up;
  const double b_part = (ell + 1.0) * x.u - r_end * x.up;
  sol.n_crossings = static_cast<int>(n);
  sol.exterior_zero = a_part < 0.0;
  sol.threshold_margin = std::abs(a_part) / (std::abs(a_part) + std::abs(b_part));
  const int N = sol.n_crossings + (sol.exterior_zero ? 1 : 0);
  if (e_end.v < 0.0) {
    sol.eta_end = n * pi + from_uv(Mode::phase, x, r_end, e_end, ell, 0.0);
    const double frac = sol.eta_end / pi - std::floor(sol.eta_end / pi);
    sol.approach_from_above = frac > 0.0 && frac < 0.5;
  } else {
    sol.eta_end = N * pi;
    sol.approach_from_above = false;
    sol.diagnostics.push_back("potential vanishes at r_end; count taken from the free exterior solution");
  }
  return sol;
}

namespace {

int count_of(const PhaseSolution& s) { return s.n_crossings + (s.exterior_zero ? 1 : 0); }

std::string fmt(const char* what, double v) {
  std::ostringstream os;
  os << what << v;
  return os.str();
}

}  // namespace

CountResult count_partial_wave(const Potential& p, int ell, const Tolerances& tol,
                               const CountOptions& opt) {
  tol.validate();
  const double R = p.bare().R();
  double r_end = p.bare().r_max();
  const double eps = tol.origin_eps * R;
  PhaseSolution a = integrate_phase(p, ell, r_end, eps, tol, opt.trace_dr);
  if (!opt.validate) return {count_of(a), a};

  // Truncation: double R_max until eta settles.
  constexpr int kMaxDoublings = 6;
  constexpr double kEtaSettle = 1e-6;
  bool settled = false;
  for (int d = 0; d < kMaxDoublings; ++d) {
    PhaseSolution b = integrate_phase(p, ell, 2.0 * r_end, eps, tol, opt.trace_dr);
    const bool same = count_of(a) == count_of(b) && std::abs(a.eta_end - b.eta_end) < kEtaSettle;
    a.diagnostics.push_back(fmt("R_max doubling to ", 2.0 * r_end));
    r_end *= 2.0;
    const auto diag = std::move(a.diagnostics);
    a = std::move(b);
    a.diagnostics.insert(a.diagnostics.begin(), diag.begin(), diag.end());
    if (same) {
      settled = true;
      break;
    }
  }
  if (!settled) a.warnings.push_back("eta did not settle under R_max doubling");

  // Origin: quartering the start radius must not move the count.
  PhaseSolution c = integrate_phase(p, ell, r_end, eps / 4.0, tol);
  a.diagnostics.push_back(fmt("epsilon refinement eta change ", c.eta_end - a.eta_end));
  if (count_of(c) != count_of(a)) {
    const Tolerances tt = tol.tightened(10.0);
    PhaseSolution a2 = integrate_phase(p, ell, r_end, eps, tt);
    PhaseSolution c2 = integrate_phase(p, ell, r_end, eps / 4.0, tt);
    if (count_of(a2) != count_of(c2)) {
      std::ostringstream os;
      os << "count depends on the origin start radius (" << count_of(a2) << " vs " << count_of(c2) << ")";
      throw NumericalFailure(os.str());
    }
    a2.diagnostics = a.diagnostics;
    a2.diagnostics.push_back("epsilon refinement required tighter tolerances");
    a2.trace = std::move(a.trace);
    a = std::move(a2);
  }

  // Guard band around threshold.
  if (a.threshold_margin < kGuardBand) {
    PhaseSolution t = integrate_phase(p, ell, 2.0 * r_end, eps, tol.tightened(100.0));
    a.diagnostics.push_back(fmt("guard band re-run margin ", t.threshold_margin));
    if (t.threshold_margin < kGuardBand) {
      a.warnings.push_back("possible zero-energy state: count is ambiguous at threshold");
    } else if (count_of(t) != count_of(a)) {
      t.diagnostics = a.diagnostics;
      t.warnings = a.warnings;
      a = std::move(t);
    }
  }
  return {count_of(a), a};
}

namespace {

int scan_channels(const Potential& p, const Tolerances& tol, std::vector<int>& counts) {
  const SpectralFunctionals sf = spectral_functionals(p, 0, false, tol);
  // Upper limit on L from the sigma functional; one channel beyond it is
  // probed as a consistency check.
  const int cap = static_cast<int>(std::floor(0.5 * (pi * sf.sigma - 1.0))) + 1;
  counts.clear();
  for (int ell = 0; ell <= std::max(cap, 0); ++ell) {
    const int n = count_partial_wave(p, ell, tol).N;
    if (n == 0) return ell - 1;
    counts.push_back(n);
  }
  std::ostringstream os;
  os << "bound states found at l = " << cap << ", beyond the sigma cap";
  throw InvariantViolation(os.str());
}

}  // namespace

int find_L_exact(const Potential& p, const Tolerances& tol) {
  std::vector<int> counts;
  return scan_channels(p, tol, counts);
}

long total_count(const Potential& p, const Tolerances& tol, std::vector<int>* per_ell) {
  std::vector<int> counts;
  scan_channels(p, tol, counts);
  long N = 0;
  for (std::size_t ell = 0; ell < counts.size(); ++ell) N += (2L * static_cast<long>(ell) + 1) * counts[ell];
  if (per_ell) *per_ell = counts;
  return N;
}

}  // namespace boundcount
