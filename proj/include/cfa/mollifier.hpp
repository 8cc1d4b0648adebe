#pragma once

#include <array>
#include <cmath>
#include <string>

#include "cfa/errors.hpp"
#include "cfa/exponent.hpp"

namespace cfa {

namespace detail {

// exp(-1/(1 - |y|^2)) inside the unit ball, 0 outside; the standard smooth
// bump with all derivatives vanishing at the boundary.
inline double unit_bump(double r2) {
    if (r2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r2));
}

// Mass of the unit bump in dimension d, computed once by midpoint quadrature.
// The integrand is smooth and flat at the boundary, so the composite midpoint
// rule converges faster than any power of the step.
inline double unit_bump_mass(int dim) {
    constexpr int kSteps = 1 << 17;
    if (dim == 1) {
        static const double mass = [] {
            double h = 2.0 / kSteps;
            double s = 0.0;
            for (int i = 0; i < kSteps; ++i) {
                double x = -1.0 + (i + 0.5) * h;
                s += unit_bump(x * x);
            }
            return s * h;
        }();
        return mass;
    }
    static const double mass2 = [] {
        // radial: integral over the disc = 2 pi * int_0^1 r bump(r^2) dr
        double h = 1.0 / kSteps;
        double s = 0.0;
        for (int i = 0; i < kSteps; ++i) {
            double r = (i + 0.5) * h;
            s += r * unit_bump(r * r);
        }
        return 2.0 * std::acos(-1.0) * s * h;
    }();
    return mass2;
}

} // namespace detail

// The mollifier rho_n: supported in the closed ball of radius 1/n, smooth,
// with unit integral. rho_n(x) = n^d * bump(n x) / mass(bump).
class Mollifier {
public:
    Mollifier(int n, int dim) : n_(n), dim_(dim) {
        if (n_ < 1) throw InvalidInputError("mollifier index must be at least 1");
        if (dim_ != 1 && dim_ != 2) throw InvalidInputError("mollifier dimension must be 1 or 2");
        double scale = (dim_ == 1) ? n_ : static_cast<double>(n_) * n_;
        normalization_ = scale / detail::unit_bump_mass(dim_);
    }

    int index() const { return n_; }
    int dim() const { return dim_; }
    double support_radius() const { return 1.0 / n_; }

    double operator()(const std::array<double, 2>& x) const {
        double r2 = scaled_r2(x);
        if (r2 >= 1.0) return 0.0;
        return normalization_ * detail::unit_bump(r2);
    }

    // Partial derivative along `axis`; analytic, not a finite difference.
    double grad(const std::array<double, 2>& x, int axis) const {
        if (axis < 0 || axis >= dim_) throw InvalidInputError("bad derivative axis");
        double r2 = scaled_r2(x);
        if (r2 >= 1.0) return 0.0;
        double denom = 1.0 - r2;
        double y = n_ * x[axis];
        return normalization_ * detail::unit_bump(r2) * (-2.0 * y / (denom * denom)) * n_;
    }

    // Peak value; attained at the origin.
    double peak() const { return normalization_ * detail::unit_bump(0.0); }

    // L^p norm over the support by midpoint quadrature on a fine private
    // lattice (p = inf gives the peak exactly).
    double lp_norm(const Exponent& p, int samples_per_axis = 2048) const {
        if (p.is_infinite()) return peak();
        double r = support_radius();
        double h = 2.0 * r / samples_per_axis;
        double s = 0.0;
        if (dim_ == 1) {
            for (int i = 0; i < samples_per_axis; ++i) {
                double x = -r + (i + 0.5) * h;
                s += std::pow((*this)({x, 0.0}), p.value());
            }
            s *= h;
        } else {
            for (int i = 0; i < samples_per_axis; ++i) {
                for (int j = 0; j < samples_per_axis; ++j) {
                    double x = -r + (i + 0.5) * h;
                    double y = -r + (j + 0.5) * h;
                    s += std::pow((*this)({x, y}), p.value());
                }
            }
            s *= h * h;
        }
        return std::pow(s, 1.0 / p.value());
    }

    // Quadrature mass over the support on a private lattice; the contract is
    // that this sits within 1e-6 of one.
    double mass_quadrature(int samples_per_axis = 1024) const {
        double r = support_radius();
        double h = 2.0 * r / samples_per_axis;
        double s = 0.0;
        if (dim_ == 1) {
            for (int i = 0; i < samples_per_axis; ++i) {
                double x = -r + (i + 0.5) * h;
                s += (*this)({x, 0.0});
            }
            return s * h;
        }
        for (int i = 0; i < samples_per_axis; ++i) {
            for (int j = 0; j < samples_per_axis; ++j) {
                double x = -r + (i + 0.5) * h;
                double y = -r + (j + 0.5) * h;
                s += (*this)({x, y});
            }
        }
        return s * h * h;
    }

private:
    double scaled_r2(const std::array<double, 2>& x) const {
        double r2 = (n_ * x[0]) * (n_ * x[0]);
        if (dim_ == 2) r2 += (n_ * x[1]) * (n_ * x[1]);
        return r2;
    }

    int n_;
    int dim_;
    double normalization_;
};

} // namespace cfa
