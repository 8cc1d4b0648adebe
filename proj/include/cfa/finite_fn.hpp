#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cfa/approx.hpp"
#include "cfa/errors.hpp"
#include "cfa/exponent.hpp"

namespace cfa {

// A real-valued function on a finite, ordered, nonempty label set. Carries
// counting measure: integrals are plain sums over the domain.
class FiniteFn {
public:
    FiniteFn(std::vector<std::string> labels, std::vector<double> values)
        : labels_(std::move(labels)), values_(std::move(values)) {
        if (labels_.empty()) throw InvalidInputError("finite function needs a nonempty domain");
        if (labels_.size() != values_.size()) {
            throw InvalidInputError("finite function has " + std::to_string(labels_.size()) +
                                    " labels but " + std::to_string(values_.size()) + " values");
        }
        std::set<std::string> seen;
        for (const auto& l : labels_) {
            if (!seen.insert(l).second) throw InvalidInputError("duplicate label '" + l + "'");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) throw InvalidInputError("finite function value is not finite");
        }
    }

    // Zero function on the given domain.
    static FiniteFn zero(std::vector<std::string> labels) {
        std::vector<double> v(labels.size(), 0.0);
        return FiniteFn(std::move(labels), std::move(v));
    }

    // Indicator of one label inside the domain.
    static FiniteFn indicator(std::vector<std::string> labels, const std::string& at) {
        FiniteFn f = zero(std::move(labels));
        f.values_[f.index_of(at)] = 1.0;
        return f;
    }

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& values() const { return values_; }

    std::size_t index_of(const std::string& label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) throw InvalidInputError("label '" + label + "' not in domain");
        return static_cast<std::size_t>(it - labels_.begin());
    }

    double operator()(const std::string& label) const { return values_[index_of(label)]; }
    double value_at(std::size_t i) const { return values_.at(i); }
    void set_value(std::size_t i, double v) {
        if (!std::isfinite(v)) throw InvalidInputError("finite function value is not finite");
        values_.at(i) = v;
    }

    bool same_domain(const FiniteFn& other) const { return labels_ == other.labels_; }

    // Sum over the domain (the counting-measure integral).
    double sum() const {
        double s = 0.0;
        for (double v : values_) s += v;
        return s;
    }

    FiniteFn& operator+=(const FiniteFn& rhs) {
        require_same_domain(rhs);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
        return *this;
    }
    FiniteFn& operator-=(const FiniteFn& rhs) {
        require_same_domain(rhs);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
        return *this;
    }
    FiniteFn& operator*=(double c) {
        for (auto& v : values_) v *= c;
        return *this;
    }

    friend FiniteFn operator+(FiniteFn a, const FiniteFn& b) { return a += b; }
    friend FiniteFn operator-(FiniteFn a, const FiniteFn& b) { return a -= b; }
    friend FiniteFn operator*(double c, FiniteFn f) { return f *= c; }
    friend FiniteFn operator*(FiniteFn f, double c) { return f *= c; }

    friend bool operator==(const FiniteFn& a, const FiniteFn& b) {
        return a.labels_ == b.labels_ && a.values_ == b.values_;
    }

private:
    void require_same_domain(const FiniteFn& rhs) const {
        if (!same_domain(rhs)) throw SpaceMismatchError("finite functions have different domains");
    }

    std::vector<std::string> labels_;
    std::vector<double> values_;
};

inline bool approx_equal(const FiniteFn& a, const FiniteFn& b, double tol = kRelTol) {
    if (!a.same_domain(b)) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!approx_eq(a.value_at(i), b.value_at(i), tol)) return false;
    }
    return true;
}

// L^p norm with respect to counting measure: (sum |f|^p)^(1/p), max |f| at
// p = inf.
inline double counting_lp_norm(const FiniteFn& f, const Exponent& p) {
    if (p.is_infinite()) {
        double m = 0.0;
        for (double v : f.values()) m = std::max(m, std::fabs(v));
        return m;
    }
    if (p.value() == 1.0) {
        double s = 0.0;
        for (double v : f.values()) s += std::fabs(v);
        return s;
    }
    double s = 0.0;
    for (double v : f.values()) s += std::pow(std::fabs(v), p.value());
    return std::pow(s, 1.0 / p.value());
}

} // namespace cfa
