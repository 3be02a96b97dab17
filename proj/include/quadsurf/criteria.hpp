#pragma once

#include "quadsurf/experiments.hpp"

#include <string>

namespace quadsurf {

inline constexpr double kKnappSlopeTolerance = 0.1;
inline constexpr double kKnappRatioTolerance = 0.05;
inline constexpr double kSquareFnSlopeTolerance = 0.2;
inline constexpr double kDecaySlopeTolerance = 0.05;
inline constexpr double kBilinearSaturationGap = 0.1;
// Slack above the oracle allowed for quadrature error.
inline constexpr double kBilinearOvershoot = 1e-3;

struct CheckResult {
    bool pass = false;
    std::string detail;
};

// Norm slope within tolerance of its prediction, and the ratio slope at most
// its prediction plus kKnappRatioTolerance.
CheckResult check_knapp(const ExperimentReport &report);
// Every series slope within tolerance of 6 − 3q/2.
CheckResult check_square_function(const ExperimentReport &report);
// Slope of the normalized series within tolerance of 0.
CheckResult check_decay(const ExperimentReport &report);
// Monotone in T and 1 − gap ≤ last/oracle ≤ 1 + overshoot.
CheckResult check_bilinear(const ExperimentReport &report);
// Relative error exactly zero on every nondegenerate sample.
CheckResult check_jacobian(const JacobianResult &result);

}  // namespace quadsurf
