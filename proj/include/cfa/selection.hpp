#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfa/approx.hpp"
#include "cfa/errors.hpp"
#include "cfa/finite_fn.hpp"
#include "cfa/quotient_class.hpp"

namespace cfa {

// Index of the dyadic shell holding v: the unique n with 2^n < |v| <= 2^(n+1)
// (equivalently, v in (2^n, 2^(n+1)] for positive v and [-2^(n+1), -2^n) for
// negative v). Exact: driven by the float's exponent, no tolerance anywhere.
inline int dyadic_shell(double v) {
    if (v == 0.0 || !std::isfinite(v)) {
        throw InvalidInputError("dyadic shell needs a nonzero finite value");
    }
    int e;
    double m = std::frexp(std::fabs(v), &e); // |v| = m * 2^e with m in [0.5, 1)
    return (m == 0.5) ? e - 2 : e - 1;
}

// Labels whose values land in the outermost occupied dyadic shell, in domain
// order. Needs only one nonzero value anywhere in f (a nonzero sum is not
// required; selection by shells works for any nonzero function).
inline std::vector<std::string> dyadic_select(const FiniteFn& f) {
    bool found = false;
    int top = 0;
    for (double v : f.values()) {
        if (v == 0.0) continue;
        int s = dyadic_shell(v);
        if (!found || s > top) top = s;
        found = true;
    }
    if (!found) throw EmptySelectionError("dyadic selection from an everywhere-zero function");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double v = f.value_at(i);
        if (v != 0.0 && dyadic_shell(v) == top) out.push_back(f.labels()[i]);
    }
    return out;
}

// Labels attaining max |f|, by exact float equality. Ties are the point: the
// returned set can have several members.
inline std::vector<std::string> argmax_level_set(const FiniteFn& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::fabs(v));
    if (m == 0.0) throw EmptySelectionError("level set of an everywhere-zero function");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (std::fabs(f.value_at(i)) == m) out.push_back(f.labels()[i]);
    }
    return out;
}

struct CardinalityCheck {
    bool applies;          // sum |f| <= C * max |f| (exact comparison)
    bool cardinality_ok;   // #level set <= C
    std::size_t level_set_size;
    double sum_abs;
    double max_abs;
};

// The counting bound behind asymptotic selection: when the l^1 mass is at
// most C times the peak, the peak can be attained at most C times. Both
// comparisons are exact; the lemma guarantees applies => cardinality_ok.
inline CardinalityCheck check_cardinality_bound(const FiniteFn& f, double C) {
    if (!(C > 0.0) || !std::isfinite(C)) throw InvalidInputError("bound constant must be positive");
    CardinalityCheck r{};
    for (double v : f.values()) {
        r.sum_abs += std::fabs(v);
        r.max_abs = std::max(r.max_abs, std::fabs(v));
    }
    if (r.max_abs == 0.0) throw EmptySelectionError("cardinality check on an everywhere-zero function");
    for (double v : f.values()) {
        if (std::fabs(v) == r.max_abs) ++r.level_set_size;
    }
    r.applies = r.sum_abs <= C * r.max_abs;
    r.cardinality_ok = static_cast<double>(r.level_set_size) <= C;
    return r;
}

// Labels where the representative sits strictly above its minimum. Constant
// shifts of the representative select the same labels, the result is never
// empty (the max beats the min) and never everything (the min is excluded).
inline std::vector<std::string> proper_subset_from_class(const QuotientClass& q) {
    if (q.is_zero()) {
        throw DegenerateClassError("zero class carries no proper subset");
    }
    const FiniteFn& rep = q.representative();
    double m = q.min_value();
    std::vector<std::string> out;
    for (std::size_t i = 0; i < rep.size(); ++i) {
        if (rep.value_at(i) != m) out.push_back(rep.labels()[i]);
    }
    return out;
}

struct SelectionReport {
    std::vector<int> indices;                        // qualifying n, ascending
    std::map<int, std::vector<std::string>> subsets; // M_n, labels sorted
    std::optional<double> bound_constant;            // C, when the demo computes one
    std::map<int, double> lambda_table;              // lambda_n for n in indices
};

// Finite choice demo: among the witnessed sets, pick the dyadic top shell of
// every witness with nonzero sum. Indices with cancelling witnesses simply do
// not qualify; at least one must.
inline SelectionReport partial_cmc_demo(const std::vector<std::vector<std::string>>& sets,
                                        const std::function<FiniteFn(int)>& witness) {
    if (sets.empty()) throw InvalidInputError("no sets to select from");
    if (!witness) throw InvalidInputError("missing witness");
    SelectionReport report;
    for (int n = 1; n <= static_cast<int>(sets.size()); ++n) {
        FiniteFn w = witness(n);
        if (w.labels() != sets[static_cast<std::size_t>(n - 1)]) {
            throw SpaceMismatchError("witness " + std::to_string(n) +
                                     " does not live on set " + std::to_string(n));
        }
        if (w.sum() == 0.0) continue;
        auto chosen = dyadic_select(w);
        std::sort(chosen.begin(), chosen.end());
        report.indices.push_back(n);
        report.subsets.emplace(n, std::move(chosen));
    }
    if (report.indices.empty()) {
        throw EmptySelectionError("no witness has a nonzero sum");
    }
    return report;
}

// Asymptotic choice demo: C caps every witness's l^1 mass, an index qualifies
// when lambda_n scales its peak to at least one, and the cardinality lemma
// then caps the level set at C * lambda_n. Qualification uses the global
// tolerance: peaks like n * (1/n) can round a hair under one.
inline SelectionReport asymptotic_choice_demo(const std::vector<std::vector<std::string>>& sets,
                                              const std::vector<double>& lambda,
                                              const std::function<FiniteFn(int)>& witness) {
    if (sets.empty()) throw InvalidInputError("no sets to select from");
    if (lambda.size() != sets.size()) {
        throw InvalidInputError("need one scale factor per set");
    }
    if (!witness) throw InvalidInputError("missing witness");
    SelectionReport report;
    double C = 0.0;
    std::vector<FiniteFn> ws;
    ws.reserve(sets.size());
    for (int n = 1; n <= static_cast<int>(sets.size()); ++n) {
        if (!(lambda[static_cast<std::size_t>(n - 1)] > 0.0)) {
            throw InvalidInputError("scale factors must be positive");
        }
        FiniteFn w = witness(n);
        if (w.labels() != sets[static_cast<std::size_t>(n - 1)]) {
            throw SpaceMismatchError("witness " + std::to_string(n) +
                                     " does not live on set " + std::to_string(n));
        }
        C = std::max(C, counting_lp_norm(w, Exponent::one()));
        ws.push_back(std::move(w));
    }
    report.bound_constant = C;
    for (int n = 1; n <= static_cast<int>(sets.size()); ++n) {
        const FiniteFn& w = ws[static_cast<std::size_t>(n - 1)];
        double ln = lambda[static_cast<std::size_t>(n - 1)];
        double peak = counting_lp_norm(w, Exponent::infinity());
        if (!approx_ge(ln * peak, 1.0)) continue;
        auto chosen = argmax_level_set(w);
        if (!approx_le(static_cast<double>(chosen.size()), C * ln)) {
            throw CertificateError("level set of witness " + std::to_string(n) +
                                   " exceeds C * lambda_n");
        }
        std::sort(chosen.begin(), chosen.end());
        report.indices.push_back(n);
        report.subsets.emplace(n, std::move(chosen));
        report.lambda_table.emplace(n, ln);
    }
    if (report.indices.empty()) {
        throw EmptySelectionError("no index reaches the qualification threshold");
    }
    return report;
}

struct RefineResult {
    std::vector<std::string> singletons; // one label per input set
    std::vector<int> steps;              // refinement steps taken per set
};

// Repeatedly shrinks each set through the oracle's nonzero classes until one
// label is left. Each pass removes at least the minimum's label, so the loop
// ends within #S - 1 steps.
inline RefineResult refine_to_singleton(
    const std::vector<std::vector<std::string>>& sets,
    const std::function<QuotientClass(const std::vector<std::string>&)>& oracle) {
    if (!oracle) throw InvalidInputError("missing class oracle");
    RefineResult result;
    for (const auto& set : sets) {
        if (set.empty()) throw InvalidInputError("cannot refine an empty set");
        std::vector<std::string> current = set;
        int steps = 0;
        while (current.size() >= 2) {
            QuotientClass q = oracle(current);
            if (q.labels() != current) {
                throw OracleViolationError("oracle answered on the wrong label set");
            }
            if (q.is_zero()) {
                throw OracleViolationError("oracle returned the zero class on " +
                                           std::to_string(current.size()) + " labels");
            }
            current = proper_subset_from_class(q);
            ++steps;
        }
        result.singletons.push_back(current.front());
        result.steps.push_back(steps);
    }
    return result;
}

} // namespace cfa
