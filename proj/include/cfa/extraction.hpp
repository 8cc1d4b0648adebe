#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cfa/approx.hpp"
#include "cfa/convolution.hpp"
#include "cfa/errors.hpp"
#include "cfa/exponent.hpp"
#include "cfa/grid_function.hpp"
#include "cfa/mollifier.hpp"

namespace cfa {

using Point = std::array<double, 2>;

inline double point_distance(const Point& a, const Point& b, int dim) {
    double dx = a[0] - b[0];
    double dy = dim == 2 ? a[1] - b[1] : 0.0;
    return std::sqrt(dx * dx + dy * dy);
}

// Dense points of a box, enumerated level by level: level 0 contributes the
// corners, level l the odd multiples of side/2^l. In two dimensions a point's
// level is the max of its coordinate levels, ties ordered lexicographically by
// generation order, so every prefix of the list is itself a covering set.
inline std::vector<Point> dyadic_dense_points(const Box& box, int levels) {
    if (levels < 0) throw InvalidInputError("negative level count");
    struct AxisPoint {
        double coord;
        int level;
    };
    auto axis_points = [&](int a) {
        std::vector<AxisPoint> pts;
        pts.push_back({box.lo[a], 0});
        pts.push_back({box.hi[a], 0});
        double side = box.side(a);
        for (int l = 1; l <= levels; ++l) {
            std::int64_t denom = std::int64_t{1} << l;
            for (std::int64_t m = 1; m < denom; m += 2) {
                pts.push_back({box.lo[a] + side * (static_cast<double>(m) / static_cast<double>(denom)), l});
            }
        }
        return pts;
    };
    std::vector<Point> out;
    auto xs = axis_points(0);
    if (box.dim == 1) {
        for (const auto& p : xs) out.push_back({p.coord, 0.0});
        return out;
    }
    auto ys = axis_points(1);
    for (int l = 0; l <= levels; ++l) {
        for (const auto& px : xs) {
            if (px.level > l) continue;
            for (const auto& py : ys) {
                if (py.level > l) continue;
                if (std::max(px.level, py.level) != l) continue;
                out.push_back({px.coord, py.coord});
            }
        }
    }
    return out;
}

inline std::vector<Point> box_sample_points(const Box& box, int per_axis) {
    if (per_axis < 2) throw InvalidInputError("need at least two samples per axis");
    std::vector<Point> out;
    auto coord = [&](int a, int i) {
        return box.lo[a] + box.side(a) * (static_cast<double>(i) / (per_axis - 1));
    };
    if (box.dim == 1) {
        for (int i = 0; i < per_axis; ++i) out.push_back({coord(0, i), 0.0});
        return out;
    }
    for (int i = 0; i < per_axis; ++i) {
        for (int j = 0; j < per_axis; ++j) out.push_back({coord(0, i), coord(1, j)});
    }
    return out;
}

inline std::vector<Point> grid_node_points(const GridFunction& g) {
    std::vector<Point> out;
    if (g.dim() == 1) {
        for (int i = 0; i < g.extent()[0]; ++i) out.push_back(g.node_position(i, 0));
        return out;
    }
    for (int ix = 0; ix < g.extent()[0]; ++ix) {
        for (int iy = 0; iy < g.extent()[1]; ++iy) out.push_back(g.node_position(ix, iy));
    }
    return out;
}

// Smallest prefix length k such that the first k dense points come within eps
// of every target. Distances are maintained incrementally, one dense point at
// a time.
inline int covering_index(const std::vector<Point>& dense, int dim, double eps,
                          const std::vector<Point>& targets) {
    if (!(eps > 0.0)) throw InvalidInputError("covering radius must be positive");
    if (targets.empty()) throw InvalidInputError("no covering targets");
    std::vector<double> best(targets.size(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < dense.size(); ++k) {
        double worst = 0.0;
        for (std::size_t t = 0; t < targets.size(); ++t) {
            double d = point_distance(dense[k], targets[t], dim);
            if (d < best[t]) best[t] = d;
            worst = std::max(worst, best[t]);
        }
        if (worst <= eps) return static_cast<int>(k + 1);
    }
    throw InsufficientDensityError("dense list does not cover the targets at radius " +
                                   std::to_string(eps));
}

inline int covering_index(const std::vector<Point>& dense, double eps, const Box& box,
                          int samples_per_axis = 0) {
    if (samples_per_axis == 0) samples_per_axis = box.dim == 1 ? 1025 : 65;
    return covering_index(dense, box.dim, eps, box_sample_points(box, samples_per_axis));
}

// Interval-halving selection: keep whichever half of the current value range
// holds at least as many survivors (ties go low), until the range is narrower
// than tol. Returns the surviving positions, in order.
inline std::vector<int> bw_subsequence(const std::vector<double>& values, double tol) {
    if (values.empty()) throw InvalidInputError("no values to select from");
    if (!(tol > 0.0)) throw InvalidInputError("selection tolerance must be positive");
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidInputError("non-finite value in selection input");
    }
    std::vector<int> survivors(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) survivors[i] = static_cast<int>(i);
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    while (hi - lo >= tol) {
        double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break; // range has collapsed to adjacent floats
        std::vector<int> lower, upper;
        for (int i : survivors) {
            (values[static_cast<std::size_t>(i)] <= mid ? lower : upper).push_back(i);
        }
        if (lower.size() >= upper.size()) {
            survivors = std::move(lower);
            hi = mid;
        } else {
            survivors = std::move(upper);
            lo = mid;
        }
    }
    return survivors;
}

struct CauchyEntry {
    int i = 0; // positions within the extracted subsequence, i < j
    int j = 0;
    double distance = 0.0;
};

struct ExtractionResult {
    std::vector<std::vector<int>> stages; // stages[0] = full index list, then per round
    std::vector<int> subsequence;         // final stage
    std::vector<double> epsilons;
    std::vector<CauchyEntry> cauchy;
    std::vector<std::pair<double, int>> modulus; // eps -> position certified from
    std::string norm_label;
    bool modulus_estimated = false;
};

inline void verify_extraction(const ExtractionResult& r) {
    if (r.stages.empty()) throw CertificateError("extraction has no stages");
    for (const auto& stage : r.stages) {
        for (std::size_t k = 1; k < stage.size(); ++k) {
            if (stage[k] <= stage[k - 1]) {
                throw CertificateError("stage indices are not strictly increasing");
            }
        }
    }
    for (std::size_t s = 1; s < r.stages.size(); ++s) {
        const auto& prev = r.stages[s - 1];
        const auto& cur = r.stages[s];
        std::size_t at = 0;
        for (int idx : cur) {
            while (at < prev.size() && prev[at] != idx) ++at;
            if (at == prev.size()) {
                throw CertificateError("stage " + std::to_string(s) +
                                       " is not a subsequence of its predecessor");
            }
            ++at;
        }
    }
    if (r.subsequence != r.stages.back()) {
        throw CertificateError("extracted subsequence is not the final stage");
    }
    int n = static_cast<int>(r.subsequence.size());
    for (const auto& e : r.cauchy) {
        if (e.i < 0 || e.j <= e.i || e.j >= n) {
            throw CertificateError("cauchy table positions out of range");
        }
    }
    for (const auto& [eps, pos] : r.modulus) {
        if (pos < 0 || pos > n) throw CertificateError("modulus position out of range");
        for (const auto& e : r.cauchy) {
            if (e.i >= pos && !approx_le(e.distance, eps)) {
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "certified modulus violated: positions %d,%d at distance %.12g "
                              "exceed %.12g",
                              e.i, e.j, e.distance, eps);
                throw CertificateError(buf);
            }
        }
    }
}

namespace detail {

struct ModulusSample {
    double value = 0.0;
    int member = -1;
    std::array<int, 2> from{0, 0};
    std::array<int, 2> to{0, 0};
};

// Largest variation of any family member between grid nodes at distance <=
// delta. Exact over the lattice, so it is a certificate for node-to-node
// comparisons and only an estimate for the underlying functions.
inline ModulusSample sampled_modulus(const std::vector<GridFunction>& family, double delta) {
    ModulusSample worst;
    const GridFunction& g0 = family.front();
    double hx = g0.spacing()[0];
    if (g0.dim() == 1) {
        int w = static_cast<int>(std::floor(delta / hx + 1e-12));
        for (std::size_t f = 0; f < family.size(); ++f) {
            const auto& v = family[f].values();
            int n = g0.extent()[0];
            for (int k = 1; k <= w; ++k) {
                for (int i = 0; i + k < n; ++i) {
                    double d = std::fabs(v[static_cast<std::size_t>(i + k)] -
                                         v[static_cast<std::size_t>(i)]);
                    if (d > worst.value) {
                        worst = {d, static_cast<int>(f), {i, 0}, {i + k, 0}};
                    }
                }
            }
        }
        return worst;
    }
    double hy = g0.spacing()[1];
    int wx = static_cast<int>(std::floor(delta / hx + 1e-12));
    int wy = static_cast<int>(std::floor(delta / hy + 1e-12));
    int nx = g0.extent()[0], ny = g0.extent()[1];
    for (int a = 0; a <= wx; ++a) {
        int b_lo = (a == 0) ? 1 : -wy;
        for (int b = b_lo; b <= wy; ++b) {
            double dd = a * hx * a * hx + b * hy * b * hy;
            if (dd > delta * delta * (1.0 + 1e-12)) continue;
            for (std::size_t f = 0; f < family.size(); ++f) {
                const auto& g = family[f];
                for (int ix = 0; ix + a < nx; ++ix) {
                    int iy0 = std::max(0, -b), iy1 = std::min(ny, ny - b);
                    for (int iy = iy0; iy < iy1; ++iy) {
                        double d = std::fabs(g.values()[g.flat_index(ix + a, iy + b)] -
                                             g.values()[g.flat_index(ix, iy)]);
                        if (d > worst.value) {
                            worst = {d, static_cast<int>(f), {ix, iy}, {ix + a, iy + b}};
                        }
                    }
                }
            }
        }
    }
    return worst;
}

inline double max_spacing(const GridFunction& g) {
    double h = g.spacing()[0];
    if (g.dim() == 2) h = std::max(h, g.spacing()[1]);
    return h;
}

} // namespace detail

struct AaOptions {
    // Optional continuity rule eps -> delta. When absent, a delta is found by
    // halving the box diameter until the sampled modulus passes the eps/3
    // gate; either way the gate is checked against the data.
    std::function<double(double)> delta_for_eps;
};

// Equicontinuity-driven extraction: cover the box by a prefix of the dense
// list, select at each dense point by interval halving, and certify all pairs
// of the final stage in sup norm. The eps/3 split is: continuity from a node
// to the nearest selected dense point (twice), plus the selection band.
inline ExtractionResult aa_extract(const std::vector<GridFunction>& family,
                                   const std::vector<Point>& dense,
                                   const std::vector<double>& eps_schedule,
                                   const AaOptions& opts = {}) {
    if (family.empty()) throw InvalidInputError("empty family");
    for (const auto& f : family) {
        if (!f.same_grid(family.front())) {
            throw SpaceMismatchError("family members live on different grids");
        }
    }
    if (eps_schedule.empty()) throw InvalidInputError("empty tolerance schedule");
    for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
        if (!(eps_schedule[k] > 0.0)) throw InvalidInputError("tolerances must be positive");
        if (k > 0 && !(eps_schedule[k] < eps_schedule[k - 1])) {
            throw InvalidInputError("tolerance schedule must be strictly decreasing");
        }
    }
    const GridFunction& g0 = family.front();
    double hmax = detail::max_spacing(g0);
    Box box = g0.box();
    double diam = 0.0;
    for (int a = 0; a < box.dim; ++a) diam += box.side(a) * box.side(a);
    diam = std::sqrt(diam);

    std::map<int, double> omega_cache;
    auto omega = [&](double delta) { return detail::sampled_modulus(family, delta).value; };

    auto delta_for = [&](double eps) {
        if (opts.delta_for_eps) {
            double delta = opts.delta_for_eps(eps);
            if (!std::isfinite(delta) || delta <= 0.0) {
                throw InvalidInputError("continuity rule returned a non-positive delta");
            }
            double om = omega(delta + hmax);
            if (!approx_le(om, eps / 3.0)) {
                auto s = detail::sampled_modulus(family, delta + hmax);
                throw CertificateError(
                    "supplied continuity rule fails on the data: member " +
                    std::to_string(s.member) + " varies by " + std::to_string(s.value) +
                    " within delta, above eps/3 = " + std::to_string(eps / 3.0));
            }
            return delta;
        }
        for (int j = 1; j <= 60; ++j) {
            double delta = std::ldexp(diam, -j);
            if (delta < detail::max_spacing(g0) / 4.0 && j > 1) break;
            auto it = omega_cache.find(j);
            double om = it != omega_cache.end() ? it->second : (omega_cache[j] = omega(delta + hmax));
            if (approx_le(om, eps / 3.0)) return delta;
        }
        auto s = detail::sampled_modulus(family, detail::max_spacing(g0) * 1.5);
        throw CertificateError("no continuity scale certifies eps = " + std::to_string(eps) +
                               ": member " + std::to_string(s.member) +
                               " varies by " + std::to_string(s.value) +
                               " between nearby nodes, above eps/3");
    };

    std::vector<Point> targets = grid_node_points(g0);
    int rounds = 0;
    for (double eps : eps_schedule) {
        rounds = std::max(rounds, covering_index(dense, g0.dim(), delta_for(eps), targets));
    }

    double eps_min = eps_schedule.back();
    ExtractionResult r;
    r.epsilons = eps_schedule;
    r.norm_label = "sup";
    r.modulus_estimated = !opts.delta_for_eps;
    std::vector<int> current(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) current[i] = static_cast<int>(i);
    r.stages.push_back(current);
    for (int round = 0; round < rounds; ++round) {
        std::vector<double> vals;
        vals.reserve(current.size());
        for (int idx : current) {
            vals.push_back(family[static_cast<std::size_t>(idx)].value_near(dense[static_cast<std::size_t>(round)]));
        }
        std::vector<int> keep = bw_subsequence(vals, eps_min / 3.0);
        std::vector<int> next;
        next.reserve(keep.size());
        for (int k : keep) next.push_back(current[static_cast<std::size_t>(k)]);
        current = std::move(next);
        r.stages.push_back(current);
    }
    r.subsequence = current;
    for (std::size_t a = 0; a < current.size(); ++a) {
        for (std::size_t b = a + 1; b < current.size(); ++b) {
            double d = grid_sup_norm(family[static_cast<std::size_t>(current[a])] -
                                     family[static_cast<std::size_t>(current[b])]);
            r.cauchy.push_back({static_cast<int>(a), static_cast<int>(b), d});
        }
    }
    for (double eps : eps_schedule) r.modulus.emplace_back(eps, 0);
    verify_extraction(r);
    return r;
}

struct FkOptions {
    std::function<double(double)> inner_delta_for_eps;
    int dense_levels = 0; // 0 -> 12 in one dimension, 6 in two
};

struct FkResult {
    ExtractionResult extraction;
    std::vector<int> schedule;
    std::vector<double> smoothing_bounds; // per scheduled kernel index
    int kernel_index = 0;                 // first index whose bound clears eps/3
};

// Smoothing-driven extraction: translation integrals bound the distance from
// each member to its mollification (via the conjugate-exponent pairing and
// the kernel scaling identity, the product ||rho_m||_p'^p * vol(B_1/m) does
// not depend on m), the mollified family goes through sup-norm extraction at
// eps/3 scaled by the box volume, and a direct distance table backs the
// assembled certificate.
inline FkResult fk_extract(const std::vector<GridFunction>& family, const Exponent& p,
                           const std::vector<int>& kernel_schedule, double eps,
                           const FkOptions& opts = {}) {
    if (family.empty()) throw InvalidInputError("empty family");
    for (const auto& f : family) {
        if (!f.same_grid(family.front())) {
            throw SpaceMismatchError("family members live on different grids");
        }
    }
    if (p.is_infinite()) throw InvalidExponentError("smoothing extraction needs finite p");
    if (kernel_schedule.empty()) throw InvalidInputError("empty kernel schedule");
    for (std::size_t k = 0; k < kernel_schedule.size(); ++k) {
        if (kernel_schedule[k] < 1) throw InvalidInputError("kernel indices must be positive");
        if (k > 0 && kernel_schedule[k] <= kernel_schedule[k - 1]) {
            throw InvalidInputError("kernel schedule must be strictly increasing");
        }
    }
    if (!(eps > 0.0)) throw InvalidInputError("tolerance must be positive");
    const GridFunction& g0 = family.front();
    int dim = g0.dim();
    for (int m : kernel_schedule) {
        for (int a = 0; a < dim; ++a) {
            if (g0.spacing()[a] > 1.0 / m) {
                throw ResolutionError("grid spacing cannot resolve kernel index " +
                                      std::to_string(m));
            }
        }
    }

    Exponent q = holder_conjugate(p);
    double c1 = std::pow(Mollifier(1, dim).lp_norm(q), p.value());
    double c2 = dim == 1 ? 2.0 : 3.14159265358979323846;

    FkResult result;
    result.schedule = kernel_schedule;
    int chosen = -1;
    for (std::size_t k = 0; k < kernel_schedule.size(); ++k) {
        int m = kernel_schedule[k];
        std::vector<std::array<double, 2>> shifts;
        for (double s : {0.25, 0.5, 0.75, 0.95}) {
            double rs = s / m;
            shifts.push_back({rs, 0.0});
            shifts.push_back({-rs, 0.0});
            if (dim == 2) {
                shifts.push_back({0.0, rs});
                shifts.push_back({0.0, -rs});
                double dg = rs / std::sqrt(2.0);
                shifts.push_back({dg, dg});
                shifts.push_back({-dg, -dg});
            }
        }
        double worst = 0.0;
        for (const auto& e : translation_modulus(family, p, shifts)) {
            worst = std::max(worst, e.value);
        }
        double bound = std::pow(c1 * c2 * worst, 1.0 / p.value());
        result.smoothing_bounds.push_back(bound);
        if (chosen < 0 && approx_le(bound, eps / 3.0)) chosen = static_cast<int>(k);
    }
    if (chosen < 0) {
        double best = *std::min_element(result.smoothing_bounds.begin(),
                                        result.smoothing_bounds.end());
        throw CertificateError("no scheduled kernel reaches the smoothing target " +
                               std::to_string(eps / 3.0) + "; best bound " +
                               std::to_string(best));
    }
    result.kernel_index = kernel_schedule[static_cast<std::size_t>(chosen)];

    int levels = opts.dense_levels > 0 ? opts.dense_levels : (dim == 1 ? 12 : 6);
    ExtractionResult& r = result.extraction;
    r.epsilons = {eps};
    char label[32];
    std::snprintf(label, sizeof(label), "L^%.12g", p.value());
    r.norm_label = label;
    r.modulus_estimated = !opts.inner_delta_for_eps;

    std::vector<int> current(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) current[i] = static_cast<int>(i);
    r.stages.push_back(current);
    for (int m : kernel_schedule) {
        Mollifier rho(m, dim);
        std::vector<GridFunction> smoothed;
        smoothed.reserve(current.size());
        for (int idx : current) {
            smoothed.push_back(convolve_zero_extended(family[static_cast<std::size_t>(idx)], rho));
        }
        Box hbox = smoothed.front().box();
        double tau = (eps / 3.0) / std::pow(hbox.volume(), 1.0 / p.value());
        std::vector<Point> dense = dyadic_dense_points(hbox, levels);
        AaOptions inner;
        inner.delta_for_eps = opts.inner_delta_for_eps;
        ExtractionResult stage = aa_extract(smoothed, dense, {tau}, inner);
        std::vector<int> next;
        next.reserve(stage.subsequence.size());
        for (int pos : stage.subsequence) {
            next.push_back(current[static_cast<std::size_t>(pos)]);
        }
        current = std::move(next);
        r.stages.push_back(current);
    }
    r.subsequence = current;
    for (std::size_t a = 0; a < current.size(); ++a) {
        for (std::size_t b = a + 1; b < current.size(); ++b) {
            double d = grid_lp_norm(family[static_cast<std::size_t>(current[a])] -
                                        family[static_cast<std::size_t>(current[b])],
                                    p);
            if (!approx_le(d, eps)) {
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "direct distance check refutes the smoothing certificate: "
                              "members %d,%d at distance %.12g exceed %.12g",
                              current[a], current[b], d, eps);
                throw CertificateError(buf);
            }
            r.cauchy.push_back({static_cast<int>(a), static_cast<int>(b), d});
        }
    }
    r.modulus.emplace_back(eps, 0);
    verify_extraction(r);
    return result;
}

} // namespace cfa
