#include <catch2/catch_amalgamated.hpp>

#include <cfa/cfa.hpp>

#include <cmath>
#include <random>

using namespace cfa;

namespace {

GridFunction indicator_1d(double lo, double hi, int cells, double a, double b) {
    double h = (hi - lo) / cells;
    GridFunction g = GridFunction::constant(1, {lo, 0.0}, {h, 1.0}, {cells, 1}, 0.0);
    for (int i = 0; i < cells; ++i) {
        double x = g.node_position(i)[0];
        if (x >= a && x < b) g.values()[static_cast<std::size_t>(i)] = 1.0;
    }
    return g;
}

} // namespace

TEST_CASE("zero-extended convolution") {
    SECTION("grid geometry grows by the kernel radius") {
        auto f = GridFunction::constant(1, {0.0, 0.0}, {1.0 / 64.0, 1.0}, {64, 1}, 1.0);
        Mollifier rho(4, 1);
        auto h = convolve_zero_extended(f, rho);
        int rc = static_cast<int>(std::ceil(rho.support_radius() * 64.0));
        CHECK(h.extent()[0] == 64 + 2 * rc);
        CHECK(h.origin()[0] == Catch::Approx(0.0 - rc / 64.0));
        CHECK(h.spacing()[0] == f.spacing()[0]);
    }

    SECTION("constants are reproduced in the interior") {
        auto f = GridFunction::constant(1, {0.0, 0.0}, {1.0 / 64.0, 1.0}, {64, 1}, 2.5);
        Mollifier rho(4, 1);
        auto h = convolve_zero_extended(f, rho);
        double r = rho.support_radius();
        for (int i = 0; i < h.extent()[0]; ++i) {
            double x = h.node_position(i)[0];
            if (x > r && x < 1.0 - r) {
                CHECK(h.values()[static_cast<std::size_t>(i)] ==
                      Catch::Approx(2.5).margin(2.5e-3));
            }
        }
        // Far outside the support of f the convolution is exactly zero.
        CHECK(h.values().front() == 0.0);
        CHECK(h.values().back() == 0.0);
    }

    SECTION("constants are reproduced in two dimensions") {
        auto f = GridFunction::constant(2, {0.0, 0.0}, {1.0 / 24.0, 1.0 / 24.0}, {24, 24}, -1.5);
        Mollifier rho(4, 2);
        auto h = convolve_zero_extended(f, rho);
        double r = rho.support_radius();
        for (int ix = 0; ix < h.extent()[0]; ++ix) {
            for (int iy = 0; iy < h.extent()[1]; ++iy) {
                auto pos = h.node_position(ix, iy);
                if (pos[0] > r && pos[0] < 1.0 - r && pos[1] > r && pos[1] < 1.0 - r) {
                    CHECK(h.at(ix, iy) == Catch::Approx(-1.5).margin(1.5e-3));
                }
            }
        }
    }

    SECTION("mass scales by exactly the kernel's lattice mass") {
        auto f = indicator_1d(0.0, 2.0, 128, 0.25, 1.25);
        Mollifier rho(8, 1);
        auto h = convolve_zero_extended(f, rho);

        // Zero extension keeps every tap on the output grid, so the integral
        // factorizes through the tap sum with no boundary loss at all.
        double spacing = f.spacing()[0];
        int rc = static_cast<int>(std::ceil(rho.support_radius() / spacing));
        double lattice_mass = 0.0;
        for (int t = -rc; t <= rc; ++t) lattice_mass += rho({t * spacing, 0.0}) * spacing;

        CHECK(grid_integral(h) ==
              Catch::Approx(lattice_mass * grid_integral(f)).epsilon(1e-12));
        CHECK(lattice_mass == Catch::Approx(1.0).margin(1e-3));
    }

    SECTION("input errors") {
        auto f = GridFunction::constant(1, {0.0, 0.0}, {0.5, 1.0}, {4, 1}, 1.0);
        CHECK_THROWS_AS(convolve_zero_extended(f, Mollifier(4, 1)), ResolutionError);
        CHECK_THROWS_AS(convolve_zero_extended(f, Mollifier(1, 2)), SpaceMismatchError);
    }
}

TEST_CASE("kernel-side bounds") {
    std::mt19937 rng(8086u);
    std::uniform_real_distribution<double> val(-2.0, 2.0);

    SECTION("sup and slope of the convolution are dominated") {
        for (double pv : {1.0, 2.0}) {
            Exponent p(pv);
            for (int rep = 0; rep < 10; ++rep) {
                int cells = 96;
                GridFunction f =
                    GridFunction::constant(1, {0.0, 0.0}, {1.0 / 64.0, 1.0}, {cells, 1}, 0.0);
                for (auto& v : f.values()) v = val(rng);
                Mollifier rho(4, 1);
                auto hb = holder_bounds(f, rho, p);
                auto h = convolve_zero_extended(f, rho);

                CHECK(approx_le(grid_sup_norm(h), hb.sup_bound));

                double hx = f.spacing()[0];
                double worst_slope = 0.0;
                for (int i = 0; i + 1 < h.extent()[0]; ++i) {
                    double fd = (h.at(i + 1) - h.at(i)) / hx;
                    worst_slope = std::max(worst_slope, std::fabs(fd));
                }
                CHECK(approx_le(worst_slope,
                                hb.grad_bound[0] + 5.0 * hx * hb.kernel_variation));
            }
        }
    }

    SECTION("p of infinity is rejected") {
        auto f = GridFunction::constant(1, {0.0, 0.0}, {0.1, 1.0}, {10, 1}, 1.0);
        CHECK_THROWS_AS(holder_bounds(f, Mollifier(1, 1), Exponent::infinity()),
                        InvalidExponentError);
    }
}

TEST_CASE("translation integrals") {
    // Indicator of [0,1] inside [0,2] on a quarter-unit grid.
    auto f = indicator_1d(0.0, 2.0, 8, 0.0, 1.0);

    SECTION("worked value at a grid-aligned shift") {
        auto table = translation_modulus({f}, Exponent::one(), {{0.25, 0.0}});
        REQUIRE(table.size() == 1);
        CHECK(table[0].snapped[0] == 0.25);
        CHECK(table[0].snap_error == 0.0);
        CHECK(table[0].value == Catch::Approx(0.5).margin(1e-12));
    }

    SECTION("off-lattice shifts snap to the nearest cell") {
        auto table = translation_modulus({f}, Exponent::one(), {{0.3, 0.0}});
        REQUIRE(table.size() == 1);
        CHECK(table[0].requested[0] == 0.3);
        CHECK(table[0].snapped[0] == 0.25);
        CHECK(table[0].snap_error == Catch::Approx(0.05));
    }

    SECTION("smaller shifts move less mass") {
        auto table = translation_modulus(
            {f}, Exponent::one(), {{0.75, 0.0}, {0.5, 0.0}, {0.25, 0.0}});
        REQUIRE(table.size() == 3);
        CHECK(table[0].value == Catch::Approx(1.5));
        CHECK(table[1].value == Catch::Approx(1.0));
        CHECK(table[2].value == Catch::Approx(0.5));
        CHECK(table[0].value > table[1].value);
        CHECK(table[1].value > table[2].value);
    }

    SECTION("mass pushed past the box edge still counts") {
        // Shift the whole indicator out by its own length: every cell changes.
        auto table = translation_modulus({f}, Exponent::one(), {{2.0, 0.0}});
        CHECK(table[0].value == Catch::Approx(2.0));
    }

    SECTION("the family maximum is taken per shift") {
        auto g = indicator_1d(0.0, 2.0, 8, 0.0, 0.25); // smaller block, smaller change
        auto solo = translation_modulus({g}, Exponent::one(), {{0.25, 0.0}});
        auto both = translation_modulus({f, g}, Exponent::one(), {{0.25, 0.0}});
        CHECK(solo[0].value == Catch::Approx(0.5)); // both edges of the small block move
        CHECK(both[0].value == Catch::Approx(0.5));
    }

    SECTION("input errors") {
        CHECK_THROWS_AS(translation_modulus({}, Exponent::one(), {{0.25, 0.0}}),
                        InvalidInputError);
        CHECK_THROWS_AS(translation_modulus({f}, Exponent::infinity(), {{0.25, 0.0}}),
                        InvalidExponentError);
        auto other = GridFunction::constant(1, {0.0, 0.0}, {0.5, 1.0}, {4, 1}, 1.0);
        CHECK_THROWS_AS(translation_modulus({f, other}, Exponent::one(), {{0.25, 0.0}}),
                        SpaceMismatchError);
    }
}
