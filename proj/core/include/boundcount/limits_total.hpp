#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "boundcount/limits.hpp"

namespace boundcount {

// Same record as a per-channel limit; integer statements refer to L or N.
using TotalLimitValue = LimitValue;

const std::vector<std::string>& l_bound_ids();      // BSL CMSL ULL NLL3L NLL4L
const std::vector<std::string>& total_bound_ids();  // BiScentral ... NLLN4, SUM_*

std::vector<TotalLimitValue> l_bounds(const Potential& p, const Tolerances& tol = {});
std::vector<TotalLimitValue> total_bounds(const Potential& p, const Tolerances& tol = {});

// Sum of (2l+1) times the per-channel integer bound from NUL2l or NLL2l,
// producing SUM_NUL2 / SUM_NLL2. Where the l-effective limit does not apply
// the monotone form (upper) or NLL3 (lower) stands in, then Ml for the upper
// sum; each channel's source is recorded in the auxiliary map as
// "src_<l>" (0 NUL2l/NLL2l, 1 monotone form/NLL3, 2 Ml, 3 none).
TotalLimitValue sum_partial_limits(std::string_view limit_id, const Potential& p,
                                   const Tolerances& tol = {});

// Upper bound on N_0 for monotone potentials in terms of p and q:
// 1/2 + S/2 + (1/4pi) log(V(p)/V(q)).
LimitValue monotone_nul(const Channel& ch);

}  // namespace boundcount
