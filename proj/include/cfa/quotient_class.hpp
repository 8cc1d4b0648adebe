#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cfa/approx.hpp"
#include "cfa/errors.hpp"
#include "cfa/finite_fn.hpp"

namespace cfa {

// An element of the quotient of the tuples over a label set by the line of
// constant tuples. Two representatives are the same class exactly when they
// differ by a constant shift; the canonical representative subtracts the
// minimum entry, so its minimum is zero.
class QuotientClass {
public:
    explicit QuotientClass(FiniteFn representative) : rep_(std::move(representative)) {}

    const FiniteFn& representative() const { return rep_; }
    const std::vector<std::string>& labels() const { return rep_.labels(); }

    double min_value() const {
        return *std::min_element(rep_.values().begin(), rep_.values().end());
    }
    double max_value() const {
        return *std::max_element(rep_.values().begin(), rep_.values().end());
    }

    // Representative with minimum entry zero.
    FiniteFn canonical() const {
        FiniteFn c = rep_;
        double m = min_value();
        for (std::size_t i = 0; i < c.size(); ++i) c.set_value(i, c.value_at(i) - m);
        return c;
    }

    // Zero class <=> the representative is constant.
    bool is_zero() const { return max_value() == min_value(); }

    QuotientClass& operator+=(const QuotientClass& rhs) {
        rep_ += rhs.rep_;
        return *this;
    }
    QuotientClass& operator-=(const QuotientClass& rhs) {
        rep_ -= rhs.rep_;
        return *this;
    }
    QuotientClass& operator*=(double c) {
        rep_ *= c;
        return *this;
    }
    friend QuotientClass operator+(QuotientClass a, const QuotientClass& b) { return a += b; }
    friend QuotientClass operator-(QuotientClass a, const QuotientClass& b) { return a -= b; }
    friend QuotientClass operator*(double c, QuotientClass q) { return q *= c; }

    friend bool operator==(const QuotientClass& a, const QuotientClass& b) {
        return a.rep_.same_domain(b.rep_) && a.canonical() == b.canonical();
    }

private:
    FiniteFn rep_;
};

// Quotient norm induced by the sup norm on tuples: the distance from the
// representative to the constant line, attained at the midrange constant.
inline double quotient_norm(const QuotientClass& q) {
    return (q.max_value() - q.min_value()) / 2.0;
}

inline bool approx_equal(const QuotientClass& a, const QuotientClass& b, double tol = kRelTol) {
    if (!a.representative().same_domain(b.representative())) return false;
    return approx_equal(a.canonical(), b.canonical(), tol);
}

} // namespace cfa
