#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "cfa/errors.hpp"

namespace cfa {

// An integrability exponent p in [1, inf]. Infinity is a first-class value so
// sup norms and Holder conjugation need no special-case plumbing at call
// sites.
class Exponent {
public:
    explicit Exponent(double p) : p_(p) {
        if (std::isnan(p) || p < 1.0) {
            throw InvalidExponentError("exponent must lie in [1, inf], got " + std::to_string(p));
        }
    }

    static Exponent infinity() { return Exponent(std::numeric_limits<double>::infinity()); }
    static Exponent one() { return Exponent(1.0); }
    static Exponent two() { return Exponent(2.0); }

    bool is_infinite() const { return std::isinf(p_); }
    double value() const { return p_; }

    friend bool operator==(const Exponent& a, const Exponent& b) { return a.p_ == b.p_; }
    friend bool operator!=(const Exponent& a, const Exponent& b) { return !(a == b); }

private:
    double p_;
};

// Conjugate exponent: 1/p + 1/p' = 1. Maps 1 <-> inf and fixes 2.
inline Exponent holder_conjugate(const Exponent& p) {
    if (p.value() == 1.0) return Exponent::infinity();
    if (p.is_infinite()) return Exponent::one();
    return Exponent(p.value() / (p.value() - 1.0));
}

} // namespace cfa
