#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "boundcount/numerics.hpp"
#include "boundcount/potential.hpp"

namespace boundcount {

struct PhaseSolution {
  double r_start = 0.0;
  double r_end = 0.0;
  double eta_end = 0.0;  // radians; N*pi when V vanishes identically at r_end
  int n_crossings = 0;   // zeros of the zero-energy solution on (0, r_end]
  bool exterior_zero = false;  // one more zero lies beyond r_end
  bool approach_from_above = false;
  // |A|/(|A|+|B|) for the free continuation A r^(l+1) + B r^(-l) at r_end;
  // small values signal a bound state sitting near threshold.
  double threshold_margin = 1.0;
  long steps = 0;
  int phase_segments = 0;
  int prufer_segments = 0;
  // Node-counting angle (eta on phase segments, Pruefer theta elsewhere);
  // both cross multiples of pi exactly at zeros of u.
  std::vector<TracePoint> trace;
  std::vector<std::string> diagnostics;
  std::vector<std::string> warnings;
};

struct CountOptions {
  double trace_dr = 0.0;  // > 0 records a trace with this spacing
  bool validate = true;   // R_max doubling, epsilon refinement, guard band
};

struct CountResult {
  int N = 0;
  PhaseSolution solution;
};

inline constexpr double kGuardBand = 1e-4;

CountResult count_partial_wave(const Potential& p, int ell, const Tolerances& tol = {},
                               const CountOptions& opt = {});

// One integration pass with explicit truncation and start radius; exposed for
// refinement tests.
PhaseSolution integrate_phase(const Potential& p, int ell, double r_end, double eps,
                              const Tolerances& tol, double trace_dr = 0.0);

// Largest l with N_l >= 1, or -1 when there are no bound states.
int find_L_exact(const Potential& p, const Tolerances& tol = {});

// Sum over l of (2l+1) N_l; per-channel counts are returned through `per_ell`.
long total_count(const Potential& p, const Tolerances& tol = {},
                 std::vector<int>* per_ell = nullptr);

// Maximal intervals on which the potential is negative, with refined ends.
// The last one may extend to +inf.
struct NegativeWindows {
  struct Window {
    double a;
    double b;
    bool zero_at_a;  // a is a continuous zero (sqrt behaviour of |V|^1/2)
    bool zero_at_b;
  };
  std::vector<Window> windows;
  std::vector<double> edges;
};

NegativeWindows negative_windows(const Potential& U, const Tolerances& tol = {});

// Integral over (0, inf) of F(r, |U(r)|) restricted to U < 0.
double integrate_negative(const Potential& U, const NegativeWindows& w,
                          const std::function<double(double r, double absV)>& F,
                          const Tolerances& tol);

struct SpectralFunctionals {
  int ell = 0;
  bool effective = false;
  double S = 0.0;
  double phase_total = 0.0;  // integral of |U^-|^(1/2), equals pi S / 2
  double sigma = 0.0;
  double r_sigma = 0.0;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> M;
  std::optional<double> r_min;
  double V_at_rmin = 0.0;
  ShapeReport shape;  // of the potential the functionals were computed on
};

SpectralFunctionals spectral_functionals(const Potential& p, int ell, bool use_effective,
                                         const Tolerances& tol = {});

}  // namespace boundcount
