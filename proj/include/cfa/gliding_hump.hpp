#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cfa/approx.hpp"
#include "cfa/direct_sum.hpp"
#include "cfa/errors.hpp"
#include "cfa/operator_family.hpp"

namespace cfa {

inline double pow3neg(int n) { return std::pow(3.0, -static_cast<double>(n)); }

// Input to the gliding-hump construction: a family, a horizon, and per level
// a near-maximizing unit vector. `operator_index` maps a hump level to the
// family member used there; it defaults to the identity, and exists because
// some families only clear the 4^n threshold at a later member (the quotient
// family certifies 4^k/2, so level n uses member n+1).
struct HumpInput {
    OperatorFamily family;
    int horizon = 1;
    std::function<DirectSumVec(int)> near_maximizer;
    std::function<int(int)> operator_index; // optional; empty means identity

    int op_index(int level) const { return operator_index ? operator_index(level) : level; }
};

struct HumpTrace {
    std::vector<DirectSumVec> iterates;           // y_1 .. y_N
    std::vector<int> signs;                       // choice at each step, size N-1
    std::vector<double> per_step_lower_bounds;    // 3^-n * (2/3) * bound(n), size N
    double truncation_error_bound = 0.0;          // 3^-N / 2
};

struct HumpLimit {
    DirectSumVec point;
    double tail_bound;
};

struct CertificateRow {
    int n;
    double observed;
    double required;
    bool pass;
};
using CertificateTable = std::vector<CertificateRow>;

// Checks the three entry conditions at every level up to the horizon:
// certified bound at least 4^n, near-maximizer inside the unit ball, and the
// near-maximizing value above two thirds of the bound.
inline void validate_hump_input(const HumpInput& input) {
    if (input.horizon < 1) throw InvalidInputError("hump horizon must be at least 1");
    if (!input.near_maximizer) throw InvalidInputError("hump input lacks near-maximizers");
    for (int n = 1; n <= input.horizon; ++n) {
        int alpha = input.op_index(n);
        NormLowerBound lb = input.family.norm_lower_bound(alpha);
        if (!approx_ge(lb.bound, pow4(n))) {
            throw CertificateError("level " + std::to_string(n) + ": certified bound " +
                                   std::to_string(lb.bound) + " is below 4^n");
        }
        DirectSumVec x = input.near_maximizer(n);
        double xn = input.family.domain_norm(x);
        if (!approx_le(xn, 1.0)) {
            throw CertificateError("level " + std::to_string(n) +
                                   ": near-maximizer norm " + std::to_string(xn) +
                                   " exceeds one");
        }
        double attained = input.family.apply_norm(alpha, x);
        if (!approx_ge(attained, (2.0 / 3.0) * lb.bound)) {
            throw CertificateError("level " + std::to_string(n) + ": near-maximizer attains " +
                                   std::to_string(attained) + " <= (2/3) * bound");
        }
    }
}

// One hump step from level n to n+1. The candidate x + 3^-(n+1) x_{n+1} is
// kept if it clears the threshold 3^-(n+1) * (2/3) * bound strictly (ties go
// to the minus branch); scalar-valued families test the signed value, others
// the norm. Either branch is guaranteed to clear the threshold in norm, and
// that guarantee is re-checked here at runtime.
inline std::pair<DirectSumVec, int> hump_step(int n, const DirectSumVec& x,
                                              const HumpInput& input) {
    int level = n + 1;
    if (level > input.horizon) throw InvalidInputError("hump step beyond the horizon");
    int alpha = input.op_index(level);
    NormLowerBound lb = input.family.norm_lower_bound(alpha);
    double step = pow3neg(level);
    double threshold = step * (2.0 / 3.0) * lb.bound;

    DirectSumVec bump = step * input.near_maximizer(level);
    DirectSumVec plus = x + bump;

    bool take_plus;
    if (input.family.output_kind() == OutputKind::Scalar) {
        take_plus = input.family.apply_scalar(alpha, plus) > threshold;
    } else {
        take_plus = input.family.apply_norm(alpha, plus) > threshold;
    }

    DirectSumVec chosen = take_plus ? std::move(plus) : x - bump;
    double achieved = input.family.apply_norm(alpha, chosen);
    if (!approx_ge(achieved, threshold)) {
        throw CertificateError("hump step to level " + std::to_string(level) + " achieves " +
                               std::to_string(achieved) + " < " + std::to_string(threshold));
    }
    return {std::move(chosen), take_plus ? +1 : -1};
}

// Runs the recursion y_1 = x_1, y_{n+1} = y_n +/- 3^-(n+1) x_{n+1} to the
// horizon, recording iterates, signs, and the per-level lower bounds
// 3^-n * (2/3) * bound(n) that each iterate is checked against.
inline HumpTrace hump_sequence(const HumpInput& input) {
    validate_hump_input(input);
    HumpTrace trace;
    trace.iterates.push_back(input.near_maximizer(1));
    for (int n = 1; n < input.horizon; ++n) {
        auto [next, sign] = hump_step(n, trace.iterates.back(), input);
        trace.iterates.push_back(std::move(next));
        trace.signs.push_back(sign);
    }
    for (int n = 1; n <= input.horizon; ++n) {
        int alpha = input.op_index(n);
        double bound = input.family.norm_lower_bound(alpha).bound;
        double floor_n = pow3neg(n) * (2.0 / 3.0) * bound;
        trace.per_step_lower_bounds.push_back(floor_n);
        double achieved = input.family.apply_norm(alpha, trace.iterates[n - 1]);
        if (!approx_ge(achieved, floor_n)) {
            throw CertificateError("iterate " + std::to_string(n) + " achieves " +
                                   std::to_string(achieved) + " < per-step floor " +
                                   std::to_string(floor_n));
        }
    }
    trace.truncation_error_bound = pow3neg(input.horizon) / 2.0;
    return trace;
}

// The horizon iterate together with the tail bound 3^-N / 2: every later
// iterate of the full recursion stays within that distance.
inline HumpLimit hump_limit(const HumpTrace& trace) {
    if (trace.iterates.empty()) throw InvalidInputError("empty hump trace");
    return {trace.iterates.back(), trace.truncation_error_bound};
}

// Certificate that the family blows up along the hump point: row n compares
// the observed ||T_n(y_N)|| against (1/6) * 3^-n * bound(n), which exceeds
// (1/6) * (4/3)^n once the bound clears 4^n.
inline CertificateTable divergence_certificate(const HumpTrace& trace, const HumpInput& input) {
    if (trace.iterates.empty()) throw InvalidInputError("empty hump trace");
    const DirectSumVec& y = trace.iterates.back();
    CertificateTable table;
    for (int n = 1; n <= static_cast<int>(trace.iterates.size()); ++n) {
        int alpha = input.op_index(n);
        double bound = input.family.norm_lower_bound(alpha).bound;
        CertificateRow row;
        row.n = n;
        row.observed = input.family.apply_norm(alpha, y);
        row.required = (1.0 / 6.0) * pow3neg(n) * bound;
        row.pass = approx_ge(row.observed, row.required);
        table.push_back(row);
    }
    return table;
}

inline void verify_certificate(const CertificateTable& table) {
    for (const auto& row : table) {
        if (!row.pass) {
            throw CertificateError("certificate row " + std::to_string(row.n) + " fails: " +
                                   std::to_string(row.observed) + " < " +
                                   std::to_string(row.required));
        }
    }
}

// Pairwise Cauchy bound ||y_n - y_m|| <= 3^-min(n,m) / 2; used by tests and
// by scenario validation.
inline void verify_trace_cauchy(const HumpTrace& trace, const OperatorFamily& family) {
    for (std::size_t a = 0; a < trace.iterates.size(); ++a) {
        for (std::size_t b = a + 1; b < trace.iterates.size(); ++b) {
            double dist = family.domain_norm(trace.iterates[b] - trace.iterates[a]);
            double cap = pow3neg(static_cast<int>(a) + 1) / 2.0;
            if (!approx_le(dist, cap)) {
                throw CertificateError("iterates " + std::to_string(a + 1) + "," +
                                       std::to_string(b + 1) + " are " + std::to_string(dist) +
                                       " apart, above " + std::to_string(cap));
            }
        }
    }
}

// Mean of finitely many scalar-valued near-maximizers. Each input must sit in
// the unit ball with signed value T_n(x) above (2/3) * bound; the mean then
// does too, and both facts are re-checked on the way out.
inline DirectSumVec average_near_maximizer(const std::vector<DirectSumVec>& set, int n,
                                           const OperatorFamily& family) {
    if (family.output_kind() != OutputKind::Scalar) {
        throw InvalidInputError("averaging needs a scalar-valued family");
    }
    if (set.empty()) throw EmptySelectionError("cannot average an empty set");
    double bound = family.norm_lower_bound(n).bound;
    double threshold = (2.0 / 3.0) * bound;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (!approx_le(family.domain_norm(set[i]), 1.0)) {
            throw InvalidInputError("element " + std::to_string(i) + " lies outside the unit ball");
        }
        double val = family.apply_scalar(n, set[i]);
        if (!approx_ge(val, threshold)) {
            throw InvalidInputError("element " + std::to_string(i) + " has signed value " +
                                    std::to_string(val) + " <= (2/3) * bound");
        }
    }
    DirectSumVec mean = set.front();
    for (std::size_t i = 1; i < set.size(); ++i) mean += set[i];
    mean *= 1.0 / static_cast<double>(set.size());

    if (!approx_le(family.domain_norm(mean), 1.0)) {
        throw CertificateError("averaged point left the unit ball");
    }
    if (!approx_ge(family.apply_scalar(n, mean), threshold)) {
        throw CertificateError("averaged point dropped below (2/3) * bound");
    }
    return mean;
}

} // namespace cfa
