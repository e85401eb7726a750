#pragma once

#include <optional>
#include <string>
#include <vector>

#include "boundcount/limits_total.hpp"

namespace boundcount {

struct Violation {
  std::string suite;
  std::string potential;
  int ell = -1;  // -1 for L and N statements
  std::string limit;
  long bound = 0;
  long exact = 0;
  std::string detail;
};

struct SandwichStats {
  long statements = 0;  // applicable integer statements compared
  std::vector<Violation> violations;
};

// Every applicable lower integer <= exact <= every applicable upper integer,
// for channels 0..L_exact+1, the L bounds and the N bounds.
SandwichStats sandwich(const Potential& p, const Tolerances& tol = {}, bool with_totals = true);

// Exact count for the saturating family and the NLL4 statement must both be
// N; returns a description of the failure or nothing.
std::optional<Violation> saturation_case(double g, int ell, double delta, int n_target,
                                         const Tolerances& tol = {});

// Expressions of a few Gaussian, exponential and Yukawa terms with at least
// one attractive piece, drawn from `seed`.
std::vector<std::string> random_expression_specs(unsigned seed, int count);

struct CheckOptions {
  Tolerances tol;
  std::vector<double> g_values{2, 5, 8, 13, 21, 34};
  std::vector<std::string> families{"exponential:R=1", "yukawa:R=1", "morse:R=1,alpha=1", "square_well:R=1"};
  unsigned seed = 1;
  int random_potentials = 6;
  // Tolerances under test; integer results must agree with `tol`.
  std::optional<Tolerances> probe_tol;
};

struct CheckReport {
  long statements = 0;
  std::vector<Violation> violations;
  double seconds = 0.0;
  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] std::string to_json() const;
};

// Sandwich, saturation, scaling and tolerance-invariance suites.
CheckReport run_checks(const CheckOptions& opt);

}  // namespace boundcount
