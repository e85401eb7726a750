#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boundcount/expr.hpp"
#include "boundcount/numerics.hpp"

namespace boundcount {

enum class PotentialKind { morse, exponential, yukawa, square_well, saturating, expression };

std::string to_string(PotentialKind k);
PotentialKind kind_from_string(std::string_view name);

struct VEval {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

using ParamMap = std::map<std::string, double, std::less<>>;

// Immutable, cheaply copyable handle. Units: 2m = hbar = 1, so V carries
// inverse length squared.
class Potential {
 public:
  class Impl;

  Potential() = default;
  explicit Potential(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  [[nodiscard]] VEval eval(double r) const;
  [[nodiscard]] double value(double r) const;

  [[nodiscard]] PotentialKind kind() const;
  [[nodiscard]] const ParamMap& params() const;
  [[nodiscard]] double param(std::string_view name) const;
  [[nodiscard]] double g() const;
  [[nodiscard]] double R() const;
  // Centrifugal channel folded into this potential (0 for a bare potential).
  [[nodiscard]] int ell_shift() const;
  [[nodiscard]] const Potential& bare() const;
  // Radii where V jumps; quadrature panels and ODE segments split there.
  [[nodiscard]] const std::vector<double>& edges() const;
  [[nodiscard]] DecayHint decay() const;
  // R * max(40, 8 ln(1+g)): initial truncation radius of the phase ODE.
  [[nodiscard]] double r_max() const;
  // Canonical echo, e.g. "morse:g=8,R=1,alpha=1".
  [[nodiscard]] std::string describe() const;
  // Original text when the potential came from parse_potential_spec.
  [[nodiscard]] const std::string& spec_text() const;
  [[nodiscard]] bool valid() const { return static_cast<bool>(impl_); }

  // Evaluation just below r, used at the right end of segments that stop at
  // an edge.
  [[nodiscard]] VEval eval_left(double r) const;

  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

Potential make_builtin(PotentialKind kind, const ParamMap& params);
Potential make_expression(std::string_view text, const ParamMap& params);

// Saturating family: alpha = [pi (2l+1)(N+delta)/g]^(1/(2l+1)).
double saturating_alpha(double g, int ell, double delta, int n_target);

// `kind:key=value,...` or `expr:'<expression>':key=value,...`
Potential parse_potential_spec(std::string_view spec);

// V(r) * theta(-V(r)).
RealFn negative_part(const Potential& p);

// V + l(l+1)/r^2; l = 0 returns the input unchanged.
Potential effective_potential(const Potential& p, int ell);

struct ShapeReport {
  int channel = 0;
  std::optional<double> r_minus;  // none when the potential is negative at the origin
  double r_plus = 0.0;            // +inf when negative out to the end of the grid
  std::optional<double> r_min;    // interior minimum of the (effective) potential
  double V_at_rmin = 0.0;         // -inf for a Coulomb-like origin

  bool nonpositive = false;
  bool monotone_nondecreasing = false;
  bool cond_monotonicity_4l = false;
  bool two_zero_shape = false;
  bool single_minimum_shape = false;
  // Smallest p in [1/2, 1) for which the CMS2 condition holds on the grid;
  // none if V is not nonpositive or no p works.
  std::optional<double> cms2_p_min;

  // Radius of the first grid point where a flag check failed, for diagnostics.
  std::map<std::string, double> witness;

  [[nodiscard]] bool cms2_condition(double p) const {
    return cms2_p_min && p >= *cms2_p_min && p < 1.0;
  }
  [[nodiscard]] double r_minus_or_zero() const { return r_minus.value_or(0.0); }
};

inline constexpr int kShapeGridPoints = 2048;

// Zeros and minimum are located on V_eff for channel `ell`; the flags for
// conditions stated on V itself (nonpositive, monotone, the CMS2 shape) use V.
ShapeReport analyze_shape(const Potential& p, int ell, const Tolerances& tol = {},
                          int grid_points = kShapeGridPoints);

// Log-spaced grid on [1e-6 R, r_max].
std::vector<double> verification_grid(const Potential& p, int points = kShapeGridPoints);

}  // namespace boundcount
