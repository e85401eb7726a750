#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boundcount/exact_counter.hpp"
#include "boundcount/numerics.hpp"
#include "boundcount/potential.hpp"

namespace boundcount {

enum class LimitKind { upper, lower };

// How the real bound turns into an integer statement.
//   strict:     N < raw  or  N > raw
//   inclusive:  N >= raw or  N <= raw (raw may be fractional)
//   floored:    N >= {{raw}} or N <= {{raw}} (integer part taken by the bound)
enum class Strictness { strict, inclusive, floored };

std::string to_string(LimitKind k);

// Integer statements of limits that make no finite claim (raw = +-inf or not
// applicable).
inline constexpr long kNoClaimLow = std::numeric_limits<long>::min() / 2;
inline constexpr long kNoClaimHigh = std::numeric_limits<long>::max() / 2;

struct LimitValue {
  std::string id;
  LimitKind kind = LimitKind::upper;
  Strictness strictness = Strictness::strict;
  std::optional<double> raw;  // may be +-inf; absent when not applicable
  long integer_statement = 0;
  bool applicable = false;
  std::string reason;
  std::vector<std::string> warnings;
  std::map<std::string, double> auxiliary;

  // Integer as printed in the comparison tables: floor(raw) for upper
  // limits, the statement clipped at zero for lower limits.
  [[nodiscard]] long table_value() const;
};

// Integer implied by `raw` for the given kind and strictness. When a strict
// bound lands on an integer the zero-energy caveat applies and `warning`
// receives a note.
long integer_statement(LimitKind kind, Strictness s, double raw, std::string* warning = nullptr);

LimitValue make_applicable(std::string id, LimitKind kind, double raw,
                           Strictness s = Strictness::strict);
LimitValue make_inapplicable(std::string id, LimitKind kind, std::string reason);

// Per-channel data shared by every limit: functionals on V and on V_l,eff.
struct Channel {
  Potential V;  // bare potential
  int ell = 0;
  Tolerances tol;
  SpectralFunctionals on_V;    // S, sigma, p, q on V; shape flags for channel l
  SpectralFunctionals on_eff;  // same on V_l,eff (equal to on_V when l = 0)
  NegativeWindows windows_V;
  NegativeWindows windows_eff;
};

Channel make_channel(const Potential& p, int ell, const Tolerances& tol = {});

// Stable identifiers, in catalog order.
const std::vector<std::string>& limit_ids();
bool is_limit_id(std::string_view id);
LimitKind limit_kind(std::string_view id);

LimitValue evaluate_known_limit(std::string_view id, const Channel& ch);
LimitValue evaluate_nu1_family(std::string_view id, const Channel& ch);
LimitValue evaluate_nu2_family(std::string_view id, const Channel& ch);

// Comparison potential H_lambda. The verdict must survive grid doubling.
LimitValue comparison_limit(const Channel& ch, double lambda);

// Closed form for V = -(g^2/R^2)(r/R)^(alpha-2) exp(-(r/R)^beta) with
// lambda = 1/2; requires alpha*beta >= beta^2 + 1.
LimitValue comparison_class_limit(double g, double alpha, double beta);

struct RecursionTrace {
  std::vector<double> radii_incr;
  std::vector<double> radii_decr;
  int J_incr = 0;
  int J_decr = 0;
  int theta_term = 0;  // ULSK only
  int H_term = 0;      // LLSK only
  double start_incr = 0.0;
  double start_decr = 0.0;
};

struct SecondKind {
  LimitValue ulsk;
  LimitValue llsk;
  RecursionTrace up;
  RecursionTrace lo;
};

inline constexpr int kStartSearchPoints = 32;

SecondKind second_kind_limits(const Channel& ch, bool start_search = true);

// Any catalog id; COMPARE_H uses lambda = 1/2.
LimitValue evaluate_limit(std::string_view id, const Channel& ch);
std::vector<LimitValue> evaluate_all(const Channel& ch,
                                     const std::vector<std::string>& only = {});

// Morse S-wave bounds with p and q taken from the attractive term alone;
// z = 8g/pi. Defined for g >= pi sqrt2 / (8 (sqrt2 - 1)).
std::pair<LimitValue, LimitValue> morse_attractive_nu2(double g);

}  // namespace boundcount
