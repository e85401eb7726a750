#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace boundcount {

// Error taxonomy shared by the whole library; the CLI maps each class to an
// exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double quad_rel = 1e-10;
  double quad_abs = 1e-12;
  double root_tol = 1e-12;
  double ode_rel = 1e-9;
  double tail_tol = 1e-10;
  int max_subdivisions = 18;  // recursion depth of the adaptive Kronrod driver
  long max_steps = 2'000'000;
  double origin_eps = 1e-8;  // start radius of the phase ODE, in units of R

  // Every tolerance divided by `f` (the origin start is divided by f*f so that
  // f=2 gives the quartered epsilon used in robustness checks).
  [[nodiscard]] Tolerances tightened(double f) const;
  void validate() const;
};

using RealFn = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

struct QuadOptions {
  bool singular_lo = false;  // integrable blow-up at a: use r = a + u^2
  bool singular_hi = false;  // integrable blow-up at b: use r = b - u^2
  std::vector<double> breaks;  // interior points where f or f' jumps
};

QuadResult integrate(const RealFn& f, double a, double b, const Tolerances& tol,
                     const QuadOptions& opt = {});

enum class DecayKind { exponential, power, compact };

struct DecayHint {
  DecayKind kind = DecayKind::exponential;
  double power = 2.0;  // exponent p of r^-p when kind == power
  double scale = 1.0;  // initial cutoff length; for compact, the support end
};

// Cutoff doubling: [a, a+L], [a+L, a+3L], ... until the estimated remainder
// drops below tail_tol * |value|.
QuadResult integrate_semi_infinite(const RealFn& f, double a, const Tolerances& tol,
                                   const DecayHint& decay, const QuadOptions& opt = {});

// Bracketed root (TOMS 748). Requires f(lo)*f(hi) <= 0.
double find_root(const RealFn& f, double lo, double hi, const Tolerances& tol);

struct MaxResult {
  double argmax = 0.0;
  double value = 0.0;
  bool at_boundary = false;
};

inline constexpr int kScanPoints = 64;

// 64-point scan followed by Brent refinement around the best sample. When
// `log_scale` the scan and refinement run in log(x), which requires lo > 0.
MaxResult maximize_scalar(const RealFn& f, double lo, double hi, const Tolerances& tol,
                          bool log_scale = false, int scan_points = kScanPoints);

struct TracePoint {
  double r;
  double y;
};

struct OdeResult {
  double y_end = 0.0;
  long steps = 0;
  std::vector<TracePoint> trace;
};

using ScalarRhs = std::function<double(double r, double y)>;

// Dormand-Prince 5(4) with relative control ode_rel. A non-positive
// `trace_dr` disables the trace; otherwise a point is recorded whenever r has
// advanced by at least trace_dr since the previous one, and at r_end.
OdeResult integrate_ode(const ScalarRhs& rhs, double r0, double y0, double r_end,
                        const Tolerances& tol, double trace_dr = 0.0);

}  // namespace boundcount
