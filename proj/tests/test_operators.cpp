#include <catch2/catch_amalgamated.hpp>

#include <cfa/cfa.hpp>

#include <cmath>
#include <random>

using namespace cfa;

namespace {

std::vector<std::vector<std::string>> repeat_space(std::vector<std::string> labels, int depth) {
    return std::vector<std::vector<std::string>>(static_cast<std::size_t>(depth),
                                                 std::move(labels));
}

} // namespace

TEST_CASE("power-of-four scale is exact") {
    CHECK(pow4(0) == 1.0);
    CHECK(pow4(1) == 4.0);
    CHECK(pow4(5) == 1024.0);
    CHECK(pow4(13) == 67108864.0);
    for (int n = 0; n <= 20; ++n) {
        CHECK(pow4(n) == std::ldexp(1.0, 2 * n));
    }
}

TEST_CASE("summation family") {
    auto family = OperatorFamily::integration(repeat_space({"1", "2", "3"}, 6));

    SECTION("worked values") {
        auto ind = DirectSumVec::single(3, FiniteFn::indicator({"1", "2", "3"}, "2"));
        CHECK(family.apply_scalar(3, ind) == 64.0); // 4^3 * 1

        auto x3 = DirectSumVec::single(3, FiniteFn({"1", "2", "3"}, {1.0, 1.0, 1.0}));
        CHECK(family.apply_scalar(3, x3) == 192.0);

        auto x2 = DirectSumVec::single(2, FiniteFn({"1", "2", "3"}, {0.3, 0.2, 0.0}));
        CHECK(family.apply_scalar(2, x2) == Catch::Approx(8.0));

        // Missing component acts as zero.
        DirectSumVec empty;
        CHECK(family.apply_scalar(1, empty) == 0.0);
    }

    SECTION("component on the wrong label set is rejected") {
        auto bad = DirectSumVec::single(2, FiniteFn({"1", "2"}, {1.0, 1.0}));
        CHECK_THROWS_AS(family.apply_scalar(2, bad), SpaceMismatchError);
    }

    SECTION("linearity on random triples") {
        std::mt19937 rng(31337u);
        std::uniform_real_distribution<double> val(-4.0, 4.0);
        for (int rep = 0; rep < 100; ++rep) {
            std::vector<double> u{val(rng), val(rng), val(rng)};
            std::vector<double> w{val(rng), val(rng), val(rng)};
            double a = val(rng), b = val(rng);
            FiniteFn fu({"1", "2", "3"}, u), fw({"1", "2", "3"}, w);
            auto vu = DirectSumVec::single(2, fu);
            auto vw = DirectSumVec::single(2, fw);
            auto combo = DirectSumVec::single(2, a * fu + b * fw);
            CHECK(family.apply_scalar(2, combo) ==
                  Catch::Approx(a * family.apply_scalar(2, vu) + b * family.apply_scalar(2, vw))
                      .epsilon(1e-12)
                      .margin(1e-9));
        }
    }

    SECTION("certified lower bound with verified probe") {
        for (int n = 1; n <= 6; ++n) {
            auto lb = family.norm_lower_bound(n);
            CHECK(lb.bound == pow4(n));
            CHECK_FALSE(lb.degenerate);
            CHECK(approx_le(family.domain_norm(lb.probe), 1.0));
            CHECK(approx_ge(family.apply_norm(n, lb.probe), lb.bound));
        }
    }
}

TEST_CASE("scaling family") {
    std::vector<double> lambdas{2.0, 4.0, 6.0, 8.0};
    auto family = OperatorFamily::scaling(lambdas, repeat_space({"a", "b"}, 4));

    auto x = DirectSumVec::single(3, FiniteFn({"a", "b"}, {0.5, -0.25}),
                                  Exponent::infinity(), Exponent::one());
    auto out = family.apply(3, x);
    const auto& fn = std::get<FiniteFn>(out);
    CHECK(fn == FiniteFn({"a", "b"}, {3.0, -1.5}));
    CHECK(family.output_norm(out) == 3.0); // sup norm on the image

    // The certified gain is lambda_n, attained by an indicator.
    auto lb = family.norm_lower_bound(2);
    CHECK(lb.bound == 4.0);
    CHECK(family.apply_norm(2, lb.probe) == 4.0);
}

TEST_CASE("quotient family") {
    auto family = OperatorFamily::quotient(repeat_space({"a", "b"}, 4));

    SECTION("well-defined on classes") {
        auto x = DirectSumVec::single(1, FiniteFn({"a", "b"}, {1.0, 0.0}),
                                      Exponent::one(), Exponent::infinity());
        auto out = family.apply(1, x);
        const auto& q = std::get<QuotientClass>(out);
        CHECK(approx_equal(q, QuotientClass(FiniteFn({"a", "b"}, {4.0, 0.0}))));
        CHECK(approx_equal(q, QuotientClass(FiniteFn({"a", "b"}, {5.0, 1.0}))));
        CHECK(family.output_norm(out) == 2.0);
    }

    SECTION("constants map to the zero class") {
        auto x = DirectSumVec::single(2, FiniteFn({"a", "b"}, {0.7, 0.7}),
                                      Exponent::one(), Exponent::infinity());
        auto out = family.apply(2, x);
        CHECK(std::get<QuotientClass>(out).is_zero());
    }

    SECTION("certified bound is half the scale") {
        auto lb = family.norm_lower_bound(2);
        CHECK(lb.bound == 16.0 * 0.5);
        CHECK_FALSE(lb.degenerate);
    }

    SECTION("singleton target degenerates") {
        auto deg = OperatorFamily::quotient(repeat_space({"only"}, 2));
        auto lb = deg.norm_lower_bound(1);
        CHECK(lb.degenerate);
        CHECK(lb.bound == 0.0);
    }
}

TEST_CASE("probe certification holds through n = 20") {
    auto diag = [](int depth) {
        std::vector<std::vector<std::string>> spaces;
        for (int n = 1; n <= depth; ++n) spaces.push_back({std::to_string(n)});
        return spaces;
    };
    auto family = OperatorFamily::integration(diag(20));
    for (int n = 1; n <= 20; ++n) {
        auto lb = family.norm_lower_bound(n);
        CHECK(approx_ge(lb.bound, pow4(n)));
        // A slightly sub-unit multiple of the probe still witnesses most of it.
        DirectSumVec shrunk = lb.probe;
        shrunk.set_component(n, (1.0 - 1e-9) * lb.probe.component(n));
        CHECK(approx_ge(family.apply_norm(n, shrunk), (1.0 - 1e-9) * lb.bound));
    }
}

TEST_CASE("monotone divergence of the certified bounds") {
    auto spaces = repeat_space({"u", "v"}, 30);
    auto family = OperatorFamily::integration(spaces);
    double prev = 0.0;
    for (int n = 1; n <= 30; ++n) {
        double b = family.norm_lower_bound(n).bound;
        CHECK(b > prev);
        CHECK(approx_ge(b, pow4(n)));
        prev = b;
    }
    CHECK(prev == pow4(30));
}

TEST_CASE("custom family round trip") {
    // Scalar family with a handcrafted bound rule; the probe is re-verified
    // inside norm_lower_bound, so a lying bound must throw.
    auto spaces = repeat_space({"a", "b"}, 3);
    auto honest = OperatorFamily::custom(
        OutputKind::Scalar,
        [spaces](int n, const DirectSumVec& v) -> OperatorOutput {
            if (!v.has_component(n)) return 0.0;
            return pow4(n) * 2.0 * v.component(n).value_at(0);
        },
        [spaces](int n) {
            NormLowerBound lb;
            lb.bound = pow4(n) * 2.0;
            lb.probe = DirectSumVec::single(n, FiniteFn::indicator(spaces[0], "a"));
            return lb;
        },
        [](int n) { return pow4(n) * 2.0; }, spaces);
    CHECK(honest.norm_lower_bound(2).bound == 32.0);

    auto lying = OperatorFamily::custom(
        OutputKind::Scalar,
        [spaces](int n, const DirectSumVec& v) -> OperatorOutput {
            if (!v.has_component(n)) return 0.0;
            return v.component(n).value_at(0);
        },
        [spaces](int n) {
            NormLowerBound lb;
            lb.bound = pow4(n); // not attained by the probe
            lb.probe = DirectSumVec::single(n, FiniteFn::indicator(spaces[0], "a"));
            return lb;
        },
        [](int n) { return pow4(n); }, spaces);
    CHECK_THROWS_AS(lying.norm_lower_bound(1), CertificateError);
}
