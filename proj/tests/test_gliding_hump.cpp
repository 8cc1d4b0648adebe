#include <catch2/catch_amalgamated.hpp>

#include <cfa/cfa.hpp>

#include <cmath>
#include <random>

using namespace cfa;

namespace {

std::vector<std::vector<std::string>> singleton_spaces(int depth) {
    std::vector<std::vector<std::string>> spaces;
    for (int n = 1; n <= depth; ++n) spaces.push_back({std::to_string(n)});
    return spaces;
}

HumpInput diagonal_input(int horizon) {
    OperatorFamily family = OperatorFamily::integration(singleton_spaces(horizon));
    auto witness = [family](int n) {
        return DirectSumVec::single(n, FiniteFn::indicator(family.space(n), family.space(n)[0]));
    };
    return HumpInput{std::move(family), horizon, witness, nullptr};
}

} // namespace

TEST_CASE("diagonal hump, closed form at horizon three") {
    auto trace = hump_sequence(diagonal_input(3));
    REQUIRE(trace.iterates.size() == 3);
    REQUIRE(trace.signs == std::vector<int>{+1, +1});

    // y_3 = e_1 + 3^-2 e_2 + 3^-3 e_3
    const auto& y = trace.iterates.back();
    CHECK(y.component(1).value_at(0) == 1.0);
    CHECK(y.component(2).value_at(0) == pow3neg(2));
    CHECK(y.component(3).value_at(0) == pow3neg(3));

    // The first decision compares 16/9 against the threshold 32/27.
    auto input2 = diagonal_input(2);
    auto y2 = trace.iterates[1];
    CHECK(input2.family.apply_scalar(2, y2) == Catch::Approx(16.0 / 9.0));
    CHECK(16.0 / 9.0 > 32.0 / 27.0);

    CHECK(trace.truncation_error_bound == pow3neg(3) / 2.0);
}

TEST_CASE("horizon one returns the first witness alone") {
    auto trace = hump_sequence(diagonal_input(1));
    REQUIRE(trace.iterates.size() == 1);
    CHECK(trace.signs.empty());
    CHECK(trace.iterates[0].component(1).value_at(0) == 1.0);
    CHECK(trace.truncation_error_bound == pow3neg(1) / 2.0);

    auto lim = hump_limit(trace);
    CHECK(lim.tail_bound == pow3neg(1) / 2.0);
}

TEST_CASE("sign flip in the witness flips the recorded sign") {
    auto input = diagonal_input(2);
    auto base_witness = input.near_maximizer;
    input.near_maximizer = [base_witness](int n) {
        DirectSumVec x = base_witness(n);
        if (n == 2) x *= -1.0;
        return x;
    };
    auto trace = hump_sequence(input);
    REQUIRE(trace.signs == std::vector<int>{-1});
    // Same magnitude either way.
    CHECK(std::fabs(trace.iterates[1].component(2).value_at(0)) == pow3neg(2));
    verify_certificate(divergence_certificate(trace, input));
}

TEST_CASE("exact tie goes to the minus branch") {
    auto spaces = singleton_spaces(2);
    auto family = OperatorFamily::custom(
        OutputKind::Scalar,
        [spaces](int n, const DirectSumVec& v) -> OperatorOutput {
            if (!v.has_component(n)) return 0.0;
            return pow4(n) * v.component(n).value_at(0);
        },
        [spaces](int n) {
            NormLowerBound lb;
            lb.bound = pow4(n);
            lb.probe = DirectSumVec::single(
                n, FiniteFn::indicator(spaces[static_cast<std::size_t>(n - 1)],
                                       spaces[static_cast<std::size_t>(n - 1)][0]));
            return lb;
        },
        [](int n) { return pow4(n); }, spaces);
    // The level-2 witness attains exactly (2/3) * bound, so the plus branch
    // lands exactly on the threshold and must be rejected.
    auto witness = [spaces](int n) {
        double t = (n == 2) ? 2.0 / 3.0 : 1.0;
        return DirectSumVec::single(
            n, t * FiniteFn::indicator(spaces[static_cast<std::size_t>(n - 1)],
                                       spaces[static_cast<std::size_t>(n - 1)][0]));
    };
    HumpInput input{std::move(family), 2, witness, nullptr};
    auto trace = hump_sequence(input);
    CHECK(trace.signs == std::vector<int>{-1});
}

TEST_CASE("iterates are Cauchy with the geometric cap") {
    auto input = diagonal_input(9);
    auto trace = hump_sequence(input);
    verify_trace_cauchy(trace, input.family);

    // ||y_4 - y_9||_1 is exactly the tail sum of 3^-j for j = 5..9.
    double dist = input.family.domain_norm(trace.iterates[8] - trace.iterates[3]);
    double tail = 0.0;
    for (int j = 5; j <= 9; ++j) tail += pow3neg(j);
    CHECK(dist == Catch::Approx(tail).epsilon(1e-15));
    CHECK(approx_le(dist, pow3neg(4) / 2.0));
}

TEST_CASE("longer horizons extend the trace bit for bit") {
    auto short_trace = hump_sequence(diagonal_input(5));
    auto long_trace = hump_sequence(diagonal_input(9));
    REQUIRE(long_trace.iterates.size() == 9);
    for (std::size_t i = 0; i < short_trace.iterates.size(); ++i) {
        CHECK(short_trace.iterates[i].components() == long_trace.iterates[i].components());
    }
    for (std::size_t i = 0; i < short_trace.signs.size(); ++i) {
        CHECK(short_trace.signs[i] == long_trace.signs[i]);
    }
}

TEST_CASE("divergence certificate rows") {
    auto input = diagonal_input(5);
    auto trace = hump_sequence(input);
    auto table = divergence_certificate(trace, input);
    REQUIRE(table.size() == 5);
    CHECK(table[0].required == Catch::Approx(2.0 / 9.0));
    CHECK(table[4].required == Catch::Approx((1.0 / 6.0) * std::pow(4.0 / 3.0, 5)));
    CHECK(table[4].observed == Catch::Approx(std::pow(4.0 / 3.0, 5)));
    for (const auto& row : table) {
        CHECK(row.pass);
        CHECK(approx_ge(row.observed, row.required));
    }
    verify_certificate(table);

    auto doctored = table;
    doctored[2].pass = false;
    CHECK_THROWS_AS(verify_certificate(doctored), CertificateError);
}

TEST_CASE("hump over the quotient family needs the shifted index") {
    int horizon = 5;
    std::vector<std::vector<std::string>> spaces(static_cast<std::size_t>(horizon + 1),
                                                 std::vector<std::string>{"lo", "hi"});
    OperatorFamily family = OperatorFamily::quotient(spaces);
    auto witness = [family](int n) {
        return DirectSumVec::single(n + 1,
                                    FiniteFn::indicator(family.space(n + 1), "lo"),
                                    Exponent::one(), Exponent::infinity());
    };

    SECTION("shifted index certifies") {
        HumpInput input{family, horizon, witness, [](int n) { return n + 1; }};
        auto trace = hump_sequence(input);
        CHECK(trace.iterates.size() == static_cast<std::size_t>(horizon));
        verify_trace_cauchy(trace, input.family);
        auto table = divergence_certificate(trace, input);
        verify_certificate(table);
        // bound(n+1) = 4^(n+1) / 2 = 2 * 4^n
        CHECK(table[0].required == Catch::Approx((1.0 / 6.0) * pow3neg(1) * 8.0));
    }

    SECTION("identity index falls below the needed gain") {
        auto bad_witness = [family](int n) {
            return DirectSumVec::single(n, FiniteFn::indicator(family.space(n), "lo"),
                                        Exponent::one(), Exponent::infinity());
        };
        HumpInput input{family, horizon, bad_witness, nullptr};
        CHECK_THROWS_AS(hump_sequence(input), CertificateError);
    }
}

TEST_CASE("hump over the scaling family") {
    int horizon = 6;
    std::vector<double> lambdas;
    for (int n = 1; n <= horizon; ++n) lambdas.push_back(pow4(n));
    std::vector<std::vector<std::string>> spaces(static_cast<std::size_t>(horizon),
                                                 std::vector<std::string>{"a", "b"});
    OperatorFamily family = OperatorFamily::scaling(lambdas, spaces);
    auto witness = [family](int n) {
        return DirectSumVec::single(n, FiniteFn::indicator(family.space(n), "a"),
                                    Exponent::infinity(), Exponent::one());
    };
    HumpInput input{std::move(family), horizon, witness, nullptr};
    auto trace = hump_sequence(input);
    CHECK(trace.signs == std::vector<int>(static_cast<std::size_t>(horizon - 1), +1));
    verify_trace_cauchy(trace, input.family);
    verify_certificate(divergence_certificate(trace, input));
}

TEST_CASE("step beyond the horizon is rejected") {
    auto input = diagonal_input(2);
    auto trace = hump_sequence(input);
    CHECK_THROWS_AS(hump_step(2, trace.iterates.back(), input), InvalidInputError);
}

TEST_CASE("randomized families keep every hump invariant") {
    std::mt19937 rng(424242u);
    std::uniform_int_distribution<int> horizon_d(2, 12);
    std::uniform_int_distribution<int> size_d(1, 4);
    std::uniform_real_distribution<double> excess(0.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);

    for (int rep = 0; rep < 40; ++rep) {
        int horizon = horizon_d(rng);
        auto spaces_p = std::make_shared<std::vector<std::vector<std::string>>>();
        auto weights = std::make_shared<std::vector<std::vector<double>>>();
        auto gains = std::make_shared<std::vector<double>>();
        std::vector<int> witness_pick;
        for (int n = 1; n <= horizon; ++n) {
            int sz = size_d(rng);
            std::vector<std::string> labels;
            std::vector<double> w;
            for (int j = 0; j < sz; ++j) {
                labels.push_back("s" + std::to_string(n) + "_" + std::to_string(j));
                w.push_back(j == 0 ? 1.0 : (coin(rng) ? 1.0 : -1.0));
            }
            spaces_p->push_back(labels);
            weights->push_back(w);
            gains->push_back(pow4(n) * (1.0 + excess(rng)));
            witness_pick.push_back(std::uniform_int_distribution<int>(0, sz - 1)(rng));
        }
        auto family = OperatorFamily::custom(
            OutputKind::Scalar,
            [spaces_p, weights, gains](int n, const DirectSumVec& v) -> OperatorOutput {
                if (!v.has_component(n)) return 0.0;
                const auto& f = v.component(n);
                if (f.labels() != (*spaces_p)[static_cast<std::size_t>(n - 1)]) {
                    throw SpaceMismatchError("component off the family's label set");
                }
                double s = 0.0;
                for (std::size_t j = 0; j < f.size(); ++j) {
                    s += (*weights)[static_cast<std::size_t>(n - 1)][j] * f.value_at(j);
                }
                return (*gains)[static_cast<std::size_t>(n - 1)] * s;
            },
            [spaces_p, gains](int n) {
                NormLowerBound lb;
                lb.bound = (*gains)[static_cast<std::size_t>(n - 1)];
                const auto& labels = (*spaces_p)[static_cast<std::size_t>(n - 1)];
                lb.probe = DirectSumVec::single(n, FiniteFn::indicator(labels, labels[0]));
                return lb;
            },
            [gains](int n) { return (*gains)[static_cast<std::size_t>(n - 1)]; }, *spaces_p);

        auto witness = [spaces_p, witness_pick](int n) {
            const auto& labels = (*spaces_p)[static_cast<std::size_t>(n - 1)];
            const auto& at = labels[static_cast<std::size_t>(
                witness_pick[static_cast<std::size_t>(n - 1)])];
            return DirectSumVec::single(n, FiniteFn::indicator(labels, at));
        };
        HumpInput input{std::move(family), horizon, witness, nullptr};
        auto trace = hump_sequence(input);
        REQUIRE(trace.iterates.size() == static_cast<std::size_t>(horizon));
        for (int s : trace.signs) CHECK((s == 1 || s == -1));
        verify_trace_cauchy(trace, input.family);
        auto table = divergence_certificate(trace, input);
        REQUIRE(table.size() == static_cast<std::size_t>(horizon));
        verify_certificate(table);
        CHECK(hump_limit(trace).tail_bound == pow3neg(horizon) / 2.0);
    }
}

TEST_CASE("averaged near-maximizers") {
    auto family = OperatorFamily::integration(singleton_spaces(3));
    auto probe = [&](double t) {
        return DirectSumVec::single(2, t * FiniteFn::indicator(family.space(2),
                                                               family.space(2)[0]));
    };

    SECTION("mean of qualifying points qualifies") {
        auto mean = average_near_maximizer({probe(0.9), probe(0.8)}, 2, family);
        CHECK(mean.component(2).value_at(0) == Catch::Approx(0.85));
        CHECK(family.apply_scalar(2, mean) == Catch::Approx(0.85 * 16.0));
    }

    SECTION("empty set is an empty selection") {
        CHECK_THROWS_AS(average_near_maximizer({}, 2, family), EmptySelectionError);
    }

    SECTION("a sub-threshold element is rejected") {
        CHECK_THROWS_AS(average_near_maximizer({probe(0.9), probe(0.5)}, 2, family),
                        InvalidInputError);
    }

    SECTION("a point outside the unit ball is rejected") {
        CHECK_THROWS_AS(average_near_maximizer({probe(1.5)}, 2, family), InvalidInputError);
    }
}
