#pragma once

#include "quadsurf/pencil.hpp"

namespace quadsurf {

// Numeric search for low-rank hyperplanes: minimizes the three adjugate
// conics over the sphere of normals, rationalizes the minimizers, and keeps
// only candidates whose restricted rank is confirmed exactly. The verdict is
// flagged NumericThenVerified; a d'=2 verdict from this route is only as
// complete as the search.
RankConditionResult check_R_numeric(const QuadPair &pair, int max_denominator = 64);

// Best rational approximation with denominator at most max_den.
Rational rationalize(double x, long max_den);

}  // namespace quadsurf
