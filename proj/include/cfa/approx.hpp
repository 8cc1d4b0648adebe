#pragma once

#include <algorithm>
#include <cmath>

namespace cfa {

// Global relative comparison tolerance. Everything tolerant in the toolkit
// funnels through these helpers; dyadic-shell membership and level-set tests
// are the deliberate exceptions and compare exactly.
inline constexpr double kRelTol = 1e-9;

inline double abs_ceiling(double a, double b) {
    return std::max({std::fabs(a), std::fabs(b), 1.0});
}

// a == b up to kRelTol, with |a|,|b| <= 1 treated absolutely.
inline bool approx_eq(double a, double b, double tol = kRelTol) {
    return std::fabs(a - b) <= tol * abs_ceiling(a, b);
}

// a >= b minus the tolerance slack.
inline bool approx_ge(double a, double b, double tol = kRelTol) {
    return a - b >= -tol * abs_ceiling(a, b);
}

// a <= b plus the tolerance slack.
inline bool approx_le(double a, double b, double tol = kRelTol) {
    return approx_ge(b, a, tol);
}

} // namespace cfa
