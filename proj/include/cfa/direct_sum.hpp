#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "cfa/approx.hpp"
#include "cfa/errors.hpp"
#include "cfa/exponent.hpp"
#include "cfa/finite_fn.hpp"

namespace cfa {

// A finitely supported vector in an l^p direct sum of component spaces.
// Components are finite functions; a tuple indexed by a label set is the
// function on that set, so this one shape also covers spaces of tuples.
// `p` is the outer sum exponent (default 1), `component_p` the exponent of
// every component norm.
class DirectSumVec {
public:
    explicit DirectSumVec(Exponent p = Exponent::one(), Exponent component_p = Exponent::one())
        : p_(p), component_p_(component_p) {}

    static DirectSumVec single(int index, FiniteFn component, Exponent p = Exponent::one(),
                               Exponent component_p = Exponent::one()) {
        DirectSumVec v(p, component_p);
        v.set_component(index, std::move(component));
        return v;
    }

    const Exponent& p() const { return p_; }
    const Exponent& component_p() const { return component_p_; }

    const std::map<int, FiniteFn>& components() const { return components_; }
    bool has_component(int index) const { return components_.count(index) > 0; }

    const FiniteFn& component(int index) const {
        auto it = components_.find(index);
        if (it == components_.end()) {
            throw InvalidInputError("no component at index " + std::to_string(index));
        }
        return it->second;
    }

    void set_component(int index, FiniteFn f) {
        if (index < 1) throw InvalidInputError("component indices start at 1");
        components_.insert_or_assign(index, std::move(f));
    }

    bool same_space(const DirectSumVec& o) const {
        return p_ == o.p_ && component_p_ == o.component_p_;
    }

    DirectSumVec& operator+=(const DirectSumVec& rhs) { return combine(rhs, +1.0); }
    DirectSumVec& operator-=(const DirectSumVec& rhs) { return combine(rhs, -1.0); }
    DirectSumVec& operator*=(double c) {
        for (auto& [i, f] : components_) f *= c;
        return *this;
    }

    friend DirectSumVec operator+(DirectSumVec a, const DirectSumVec& b) { return a += b; }
    friend DirectSumVec operator-(DirectSumVec a, const DirectSumVec& b) { return a -= b; }
    friend DirectSumVec operator*(double c, DirectSumVec v) { return v *= c; }

private:
    DirectSumVec& combine(const DirectSumVec& rhs, double sign) {
        if (!same_space(rhs)) {
            throw SpaceMismatchError("direct-sum vectors carry different exponents");
        }
        for (const auto& [i, f] : rhs.components_) {
            auto it = components_.find(i);
            if (it == components_.end()) {
                components_.emplace(i, sign * f);
            } else {
                if (!it->second.same_domain(f)) {
                    throw SpaceMismatchError("component " + std::to_string(i) +
                                             " has mismatched domains");
                }
                it->second += sign * f;
            }
        }
        return *this;
    }

    Exponent p_;
    Exponent component_p_;
    std::map<int, FiniteFn> components_;
};

// (sum_n ||x_n||^p)^(1/p) over the finite support; sup of component norms at
// p = inf. The empty vector has norm zero.
inline double direct_sum_norm(const DirectSumVec& v) {
    if (v.p().is_infinite()) {
        double m = 0.0;
        for (const auto& [i, f] : v.components()) {
            m = std::max(m, counting_lp_norm(f, v.component_p()));
        }
        return m;
    }
    double p = v.p().value();
    double s = 0.0;
    for (const auto& [i, f] : v.components()) {
        double c = counting_lp_norm(f, v.component_p());
        s += (p == 1.0) ? c : std::pow(c, p);
    }
    return (p == 1.0) ? s : std::pow(s, 1.0 / p);
}

inline bool approx_equal(const DirectSumVec& a, const DirectSumVec& b, double tol = kRelTol) {
    if (!a.same_space(b)) return false;
    DirectSumVec d = a - b;
    for (const auto& [i, f] : d.components()) {
        for (double v : f.values()) {
            if (std::fabs(v) > tol) return false;
        }
    }
    return true;
}

} // namespace cfa
