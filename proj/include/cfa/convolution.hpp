#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "cfa/errors.hpp"
#include "cfa/exponent.hpp"
#include "cfa/grid_function.hpp"
#include "cfa/mollifier.hpp"

namespace cfa {

// Discrete convolution of a zero-extended grid function with a mollifier
// sampled on the function's own lattice. The output box grows by the kernel
// support radius (whole cells), so nothing the kernel can reach is cut off.
inline GridFunction convolve_zero_extended(const GridFunction& f, const Mollifier& m) {
    if (f.dim() != m.dim()) {
        throw SpaceMismatchError("function and mollifier have different dimensions");
    }
    double r = m.support_radius();
    for (int a = 0; a < f.dim(); ++a) {
        if (f.spacing()[a] > r) {
            throw ResolutionError("grid spacing " + std::to_string(f.spacing()[a]) +
                                  " cannot resolve a kernel of radius " + std::to_string(r));
        }
    }
    std::array<int, 2> rc{0, 0};
    for (int a = 0; a < f.dim(); ++a) {
        rc[a] = static_cast<int>(std::ceil(r / f.spacing()[a]));
    }

    std::array<double, 2> origin = f.origin();
    std::array<int, 2> extent = f.extent();
    for (int a = 0; a < f.dim(); ++a) {
        origin[a] -= rc[a] * f.spacing()[a];
        extent[a] += 2 * rc[a];
    }

    double cell = f.cell_volume();
    if (f.dim() == 1) {
        double h = f.spacing()[0];
        std::vector<double> kernel(static_cast<std::size_t>(2 * rc[0] + 1));
        for (int t = -rc[0]; t <= rc[0]; ++t) {
            kernel[static_cast<std::size_t>(t + rc[0])] = m({t * h, 0.0}) * cell;
        }
        std::vector<double> out(static_cast<std::size_t>(extent[0]), 0.0);
        for (int j = 0; j < extent[0]; ++j) {
            double s = 0.0;
            for (int t = -rc[0]; t <= rc[0]; ++t) {
                int i = j - rc[0] - t;
                if (i < 0 || i >= f.extent()[0]) continue;
                s += kernel[static_cast<std::size_t>(t + rc[0])] * f.at(i);
            }
            out[static_cast<std::size_t>(j)] = s;
        }
        return GridFunction(1, origin, f.spacing(), extent, std::move(out));
    }

    double hx = f.spacing()[0], hy = f.spacing()[1];
    int tx = 2 * rc[0] + 1, ty = 2 * rc[1] + 1;
    std::vector<double> kernel(static_cast<std::size_t>(tx) * static_cast<std::size_t>(ty));
    for (int a = -rc[0]; a <= rc[0]; ++a) {
        for (int b = -rc[1]; b <= rc[1]; ++b) {
            kernel[static_cast<std::size_t>(a + rc[0]) * ty + static_cast<std::size_t>(b + rc[1])] =
                m({a * hx, b * hy}) * cell;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(extent[0]) * static_cast<std::size_t>(extent[1]),
                            0.0);
    for (int jx = 0; jx < extent[0]; ++jx) {
        for (int jy = 0; jy < extent[1]; ++jy) {
            double s = 0.0;
            int ix0 = jx - rc[0], iy0 = jy - rc[1];
            for (int a = -rc[0]; a <= rc[0]; ++a) {
                int ix = ix0 - a;
                if (ix < 0 || ix >= f.extent()[0]) continue;
                for (int b = -rc[1]; b <= rc[1]; ++b) {
                    int iy = iy0 - b;
                    if (iy < 0 || iy >= f.extent()[1]) continue;
                    s += kernel[static_cast<std::size_t>(a + rc[0]) * ty +
                                static_cast<std::size_t>(b + rc[1])] *
                         f.values()[f.flat_index(ix, iy)];
                }
            }
            out[static_cast<std::size_t>(jx) * extent[1] + static_cast<std::size_t>(jy)] = s;
        }
    }
    return GridFunction(2, origin, f.spacing(), extent, std::move(out));
}

struct HolderBounds {
    double f_norm;                      // ||f||_p on the grid
    double sup_bound;                   // ||f||_p * ||rho||_p'
    std::array<double, 2> grad_bound;   // ||f||_p * ||d_j rho||_p' per axis
    double kernel_variation;            // largest kernel slope on the lattice
};

namespace detail {

// L^p' norm of the kernel (or one of its derivatives) sampled on the
// function's lattice, optionally staggered by half a cell so the samples sit
// where finite differences of the convolution live.
template <typename Eval>
inline double kernel_lattice_norm(const GridFunction& f, const Mollifier& m, const Exponent& q,
                                  bool stagger_x, Eval&& eval) {
    double r = m.support_radius();
    std::array<int, 2> rc{0, 0};
    for (int a = 0; a < f.dim(); ++a) {
        rc[a] = static_cast<int>(std::ceil(r / f.spacing()[a])) + 1;
    }
    double hx = f.spacing()[0];
    double hy = f.dim() == 2 ? f.spacing()[1] : 1.0;
    double off = stagger_x ? 0.5 : 0.0;
    double acc = 0.0;
    double peak = 0.0;
    if (f.dim() == 1) {
        for (int t = -rc[0]; t <= rc[0]; ++t) {
            double v = std::fabs(eval({(t + off) * hx, 0.0}));
            peak = std::max(peak, v);
            if (!q.is_infinite()) acc += std::pow(v, q.value());
        }
        if (q.is_infinite()) return peak;
        return std::pow(acc * hx, 1.0 / q.value());
    }
    for (int a = -rc[0]; a <= rc[0]; ++a) {
        for (int b = -rc[1]; b <= rc[1]; ++b) {
            double v = std::fabs(eval({(a + off) * hx, b * hy}));
            peak = std::max(peak, v);
            if (!q.is_infinite()) acc += std::pow(v, q.value());
        }
    }
    if (q.is_infinite()) return peak;
    return std::pow(acc * hx * hy, 1.0 / q.value());
}

} // namespace detail

// Holder bounds for the convolution f * rho: the conjugate-exponent pairing
// caps both the pointwise values (by ||f||_p ||rho||_p') and the slopes (by
// ||f||_p ||d_j rho||_p'). Kernel norms are taken on the same lattice the
// convolution uses, derivative norms on the half-cell staggered lattice where
// finite differences of the output live.
inline HolderBounds holder_bounds(const GridFunction& f, const Mollifier& m, const Exponent& p) {
    if (p.is_infinite()) {
        throw InvalidExponentError("holder bounds need finite p (the kernel side takes p')");
    }
    if (f.dim() != m.dim()) {
        throw SpaceMismatchError("function and mollifier have different dimensions");
    }
    Exponent q = holder_conjugate(p);
    HolderBounds hb{};
    hb.f_norm = grid_lp_norm(f, p);
    double rho_q = detail::kernel_lattice_norm(f, m, q, false, [&](std::array<double, 2> x) {
        return m(x);
    });
    hb.sup_bound = hb.f_norm * rho_q;
    for (int a = 0; a < f.dim(); ++a) {
        double d_q = detail::kernel_lattice_norm(f, m, q, a == 0, [&](std::array<double, 2> x) {
            return m.grad(x, a);
        });
        hb.grad_bound[a] = hb.f_norm * d_q;
        double slope = detail::kernel_lattice_norm(f, m, Exponent::infinity(), a == 0,
                                                   [&](std::array<double, 2> x) {
                                                       return m.grad(x, a);
                                                   });
        hb.kernel_variation = std::max(hb.kernel_variation, slope);
    }
    return hb;
}

struct TranslationEntry {
    std::array<double, 2> requested;
    std::array<double, 2> snapped;
    double snap_error;
    double value; // max over the family of the p-integral of |f(x+h) - f(x)|
};

// Translation p-integrals sup over a family: each requested shift is snapped
// to the nearest whole-cell shift, and the integral runs over the whole
// zero-extended lattice, so mass pushed past either edge of the box counts.
inline std::vector<TranslationEntry> translation_modulus(
    const std::vector<GridFunction>& family, const Exponent& p,
    const std::vector<std::array<double, 2>>& shifts) {
    if (family.empty()) throw InvalidInputError("translation modulus of an empty family");
    if (p.is_infinite()) throw InvalidExponentError("translation modulus needs finite p");
    for (const auto& f : family) {
        if (!f.same_grid(family.front())) {
            throw SpaceMismatchError("family members live on different grids");
        }
    }
    const GridFunction& g0 = family.front();
    std::vector<TranslationEntry> out;
    for (const auto& shift : shifts) {
        TranslationEntry e{};
        e.requested = shift;
        std::array<int, 2> k{0, 0};
        double err2 = 0.0;
        for (int a = 0; a < g0.dim(); ++a) {
            k[a] = static_cast<int>(std::llround(shift[a] / g0.spacing()[a]));
            e.snapped[a] = k[a] * g0.spacing()[a];
            double d = shift[a] - e.snapped[a];
            err2 += d * d;
        }
        e.snap_error = std::sqrt(err2);

        double cell = g0.cell_volume();
        double worst = 0.0;
        for (const auto& f : family) {
            double s = 0.0;
            int lo_x = std::min(0, -k[0]), hi_x = std::max(f.extent()[0], f.extent()[0] - k[0]);
            int lo_y = 0, hi_y = 1;
            if (f.dim() == 2) {
                lo_y = std::min(0, -k[1]);
                hi_y = std::max(f.extent()[1], f.extent()[1] - k[1]);
            }
            for (int ix = lo_x; ix < hi_x; ++ix) {
                for (int iy = lo_y; iy < hi_y; ++iy) {
                    double d = std::fabs(f.at(ix + k[0], iy + k[1]) - f.at(ix, iy));
                    if (d == 0.0) continue;
                    s += (p.value() == 1.0) ? d : std::pow(d, p.value());
                }
            }
            worst = std::max(worst, s * cell);
        }
        e.value = worst;
        out.push_back(e);
    }
    return out;
}

} // namespace cfa
