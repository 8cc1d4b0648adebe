#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cfa/approx.hpp"
#include "cfa/errors.hpp"
#include "cfa/exponent.hpp"

namespace cfa {

// Axis-aligned box in dimension 1 or 2.
struct Box {
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};

    double side(int axis) const { return hi[axis] - lo[axis]; }
    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= side(a);
        return v;
    }
};

// A function sampled on a uniform grid over a box, zero extended outside it.
// `extent` counts cells per axis; each cell carries one node at its midpoint,
// so the value count is the product of the extents and sums of node values
// times the cell volume are midpoint-rule integrals.
class GridFunction {
public:
    GridFunction(int dim, std::array<double, 2> origin, std::array<double, 2> spacing,
                 std::array<int, 2> extent, std::vector<double> values)
        : dim_(dim), origin_(origin), spacing_(spacing), extent_(extent), values_(std::move(values)) {
        if (dim_ != 1 && dim_ != 2) throw InvalidInputError("grid dimension must be 1 or 2");
        if (dim_ == 1) {
            spacing_[1] = 1.0;
            extent_[1] = 1;
            origin_[1] = 0.0;
        }
        std::size_t expect = 1;
        for (int a = 0; a < dim_; ++a) {
            if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a])) {
                throw InvalidInputError("grid spacing must be positive");
            }
            if (extent_[a] < 1) throw InvalidInputError("grid extent must be at least one cell");
            expect *= static_cast<std::size_t>(extent_[a]);
        }
        if (values_.size() != expect) {
            throw InvalidInputError("grid value count " + std::to_string(values_.size()) +
                                    " does not match node count " + std::to_string(expect));
        }
        for (double v : values_) {
            if (!std::isfinite(v)) throw InvalidInputError("grid value is not finite");
        }
    }

    static GridFunction constant(int dim, std::array<double, 2> origin, std::array<double, 2> spacing,
                                 std::array<int, 2> extent, double c) {
        std::size_t n = static_cast<std::size_t>(extent[0]) *
                        (dim == 2 ? static_cast<std::size_t>(extent[1]) : 1u);
        return GridFunction(dim, origin, spacing, extent, std::vector<double>(n, c));
    }

    int dim() const { return dim_; }
    const std::array<double, 2>& origin() const { return origin_; }
    const std::array<double, 2>& spacing() const { return spacing_; }
    const std::array<int, 2>& extent() const { return extent_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    std::size_t node_count() const { return values_.size(); }

    double cell_volume() const {
        double v = spacing_[0];
        if (dim_ == 2) v *= spacing_[1];
        return v;
    }

    Box box() const {
        Box b;
        b.dim = dim_;
        for (int a = 0; a < dim_; ++a) {
            b.lo[a] = origin_[a];
            b.hi[a] = origin_[a] + spacing_[a] * extent_[a];
        }
        return b;
    }

    // Row-major index; ix is the slow axis.
    std::size_t flat_index(int ix, int iy = 0) const {
        return static_cast<std::size_t>(ix) * static_cast<std::size_t>(extent_[1]) +
               static_cast<std::size_t>(iy);
    }

    bool in_range(int ix, int iy = 0) const {
        return ix >= 0 && ix < extent_[0] && iy >= 0 && iy < extent_[1];
    }

    // Node value with zero extension outside the box.
    double at(int ix, int iy = 0) const {
        if (!in_range(ix, iy)) return 0.0;
        return values_[flat_index(ix, iy)];
    }

    // Position of node (ix, iy): cell midpoints.
    std::array<double, 2> node_position(int ix, int iy = 0) const {
        std::array<double, 2> p{0.0, 0.0};
        p[0] = origin_[0] + (ix + 0.5) * spacing_[0];
        if (dim_ == 2) p[1] = origin_[1] + (iy + 0.5) * spacing_[1];
        return p;
    }

    // Index of the cell containing x (clamped to the box), i.e. the nearest
    // node in the midpoint-sampling sense.
    std::array<int, 2> nearest_node(const std::array<double, 2>& x) const {
        std::array<int, 2> idx{0, 0};
        for (int a = 0; a < dim_; ++a) {
            int i = static_cast<int>(std::floor((x[a] - origin_[a]) / spacing_[a]));
            idx[a] = std::min(std::max(i, 0), extent_[a] - 1);
        }
        return idx;
    }

    double value_near(const std::array<double, 2>& x) const {
        auto idx = nearest_node(x);
        return values_[flat_index(idx[0], idx[1])];
    }

    bool same_grid(const GridFunction& other) const {
        return dim_ == other.dim_ && origin_ == other.origin_ && spacing_ == other.spacing_ &&
               extent_ == other.extent_;
    }

    GridFunction& operator+=(const GridFunction& rhs) {
        require_same_grid(rhs);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
        return *this;
    }
    GridFunction& operator-=(const GridFunction& rhs) {
        require_same_grid(rhs);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
        return *this;
    }
    GridFunction& operator*=(double c) {
        for (auto& v : values_) v *= c;
        return *this;
    }

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(double c, GridFunction g) { return g *= c; }

    friend bool operator==(const GridFunction& a, const GridFunction& b) {
        return a.same_grid(b) && a.values_ == b.values_;
    }

private:
    void require_same_grid(const GridFunction& rhs) const {
        if (!same_grid(rhs)) throw SpaceMismatchError("grid functions live on different grids");
    }

    int dim_;
    std::array<double, 2> origin_;
    std::array<double, 2> spacing_;
    std::array<int, 2> extent_;
    std::vector<double> values_;
};

// Midpoint-rule L^p norm for finite p. The sup norm is a different beast on a
// grid (no measure weight), so p = inf is routed to grid_sup_norm.
inline double grid_lp_norm(const GridFunction& g, const Exponent& p) {
    if (p.is_infinite()) {
        throw InvalidExponentError("grid_lp_norm needs finite p; use grid_sup_norm for p = inf");
    }
    double vol = g.cell_volume();
    double s = 0.0;
    if (p.value() == 1.0) {
        for (double v : g.values()) s += std::fabs(v);
        return s * vol;
    }
    for (double v : g.values()) s += std::pow(std::fabs(v), p.value());
    return std::pow(s * vol, 1.0 / p.value());
}

inline double grid_sup_norm(const GridFunction& g) {
    double m = 0.0;
    for (double v : g.values()) m = std::max(m, std::fabs(v));
    return m;
}

// Midpoint-rule integral of the raw values (signed).
inline double grid_integral(const GridFunction& g) {
    double s = 0.0;
    for (double v : g.values()) s += v;
    return s * g.cell_volume();
}

} // namespace cfa
