#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fracdg/audit.hpp"
#include "fracdg/error.hpp"
#include "fracdg/geometry.hpp"

namespace fracdg {

namespace detail {

// Monotone (Fritsch-Carlson) cubic Hermite interpolation of tabulated samples,
// with analytic derivative. Clamped to endpoint values outside the table.
struct Pchip {
    std::vector<double> x, y, d; // nodes, values, node slopes

    Pchip() = default;
    Pchip(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)) {
        const std::size_t n = x.size();
        if (n < 2 || y.size() != n) throw error("smooth_table: need at least two samples");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x[i] > x[i - 1])) throw error("smooth_table: sample abscissae must increase");
        std::vector<double> hseg(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            hseg[i] = x[i + 1] - x[i];
            delta[i] = (y[i + 1] - y[i]) / hseg[i];
        }
        d.assign(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d[i] = 0.0;
            } else {
                const double w1 = 2.0 * hseg[i] + hseg[i - 1];
                const double w2 = hseg[i] + 2.0 * hseg[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d[0] = edge_slope(hseg[0], n > 2 ? hseg[1] : hseg[0], delta[0], n > 2 ? delta[1] : delta[0]);
        d[n - 1] = edge_slope(hseg[n - 2], n > 2 ? hseg[n - 3] : hseg[n - 2], delta[n - 2],
                              n > 2 ? delta[n - 3] : delta[n - 2]);
    }

    static double edge_slope(double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return s;
    }

    std::size_t segment(double t) const {
        const auto it = std::upper_bound(x.begin(), x.end(), t);
        const std::size_t i = static_cast<std::size_t>(std::distance(x.begin(), it));
        return std::min(std::max<std::size_t>(i, 1), x.size() - 1) - 1;
    }

    double eval(double t) const {
        if (t <= x.front()) return y.front();
        if (t >= x.back()) return y.back();
        const std::size_t i = segment(t);
        const double hh = x[i + 1] - x[i];
        const double u = (t - x[i]) / hh;
        const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        const double h10 = u * (1.0 - u) * (1.0 - u);
        const double h01 = u * u * (3.0 - 2.0 * u);
        const double h11 = u * u * (u - 1.0);
        return h00 * y[i] + h10 * hh * d[i] + h01 * y[i + 1] + h11 * hh * d[i + 1];
    }

    double deriv(double t) const {
        if (t <= x.front() || t >= x.back()) return 0.0;
        const std::size_t i = segment(t);
        const double hh = x[i + 1] - x[i];
        const double u = (t - x[i]) / hh;
        const double g00 = (6.0 * u * u - 6.0 * u) / hh;
        const double g10 = 3.0 * u * u - 4.0 * u + 1.0;
        const double g01 = -g00;
        const double g11 = 3.0 * u * u - 2.0 * u;
        return g00 * y[i] + g10 * d[i] + g01 * y[i + 1] + g11 * d[i + 1];
    }
};

} // namespace detail

// Potentials F(x,u) for the energy and their u-derivatives f = F_u for the
// equation path. Jump variants use the open-interval conventions
// chi_(0,inf), chi_(-1,1), lambda1*chi_(-inf,0) + lambda2*chi_(0,inf); the
// boundary value never matters for energies since integrals are cell sums.
// Growth data (d1, d2, q) certifies |F| <= d1 + d2|u|^q on the working range.
struct PotentialSpec {
    enum class Variant { zero, double_well, chi_positive, chi_interval, two_phase, smooth_table };

    struct Growth {
        double d1 = 0.0, d2 = 0.0, q = 1.0;
    };

    Variant variant = Variant::zero;
    double d = 2.0;                 // double_well exponent
    double lambda1 = 0.0, lambda2 = 0.0;
    detail::Pchip table;
    Growth growth;

    static PotentialSpec zero() {
        PotentialSpec ps;
        ps.variant = Variant::zero;
        return ps;
    }

    static PotentialSpec double_well(double dexp, Growth g = {1.0, 0.0, 1.0}) {
        if (!(dexp > 0.0)) throw error("double_well: d must be positive");
        PotentialSpec ps;
        ps.variant = Variant::double_well;
        ps.d = dexp;
        ps.growth = g;
        return ps;
    }

    static PotentialSpec chi_positive(Growth g = {1.0, 0.0, 1.0}) {
        PotentialSpec ps;
        ps.variant = Variant::chi_positive;
        ps.growth = g;
        return ps;
    }

    static PotentialSpec chi_interval(Growth g = {1.0, 0.0, 1.0}) {
        PotentialSpec ps;
        ps.variant = Variant::chi_interval;
        ps.growth = g;
        return ps;
    }

    static PotentialSpec two_phase(double l1, double l2, Growth g = {0.0, 0.0, 1.0}) {
        PotentialSpec ps;
        ps.variant = Variant::two_phase;
        ps.lambda1 = l1;
        ps.lambda2 = l2;
        if (g.d1 == 0.0 && g.d2 == 0.0) g.d1 = std::max(std::abs(l1), std::abs(l2));
        ps.growth = g;
        return ps;
    }

    static PotentialSpec smooth_table(std::vector<double> us, std::vector<double> Fs, Growth g) {
        PotentialSpec ps;
        ps.variant = Variant::smooth_table;
        ps.table = detail::Pchip(std::move(us), std::move(Fs));
        ps.growth = g;
        return ps;
    }

    double eval(const Point& /*x*/, double u) const {
        switch (variant) {
            case Variant::zero: return 0.0;
            case Variant::double_well: return std::pow(std::abs(1.0 - u * u), d);
            case Variant::chi_positive: return u > 0.0 ? 1.0 : 0.0;
            case Variant::chi_interval: return (u > -1.0 && u < 1.0) ? 1.0 : 0.0;
            case Variant::two_phase: return (u < 0.0 ? lambda1 : 0.0) + (u > 0.0 ? lambda2 : 0.0);
            case Variant::smooth_table: return table.eval(u);
        }
        return 0.0;
    }

    // Differentiable in u: zero, double_well with d > 1, smooth_table.
    bool differentiable() const {
        switch (variant) {
            case Variant::zero: return true;
            case Variant::double_well: return d > 1.0;
            case Variant::smooth_table: return true;
            default: return false;
        }
    }

    // f(x,u) = dF/du; unsupported for jump variants: the minimization path
    // must be used instead.
    double eval_f(const Point& /*x*/, double u) const {
        switch (variant) {
            case Variant::zero: return 0.0;
            case Variant::double_well: {
                if (!(d > 1.0))
                    throw unsupported_operation_error("eval_f: double_well needs d > 1");
                const double w = 1.0 - u * u;
                const double sgn = w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
                return -2.0 * d * u * std::pow(std::abs(w), d - 1.0) * sgn;
            }
            case Variant::smooth_table: return table.deriv(u);
            default:
                throw unsupported_operation_error("eval_f: potential variant is not differentiable");
        }
    }
};

inline double eval_potential(const PotentialSpec& ps, const Point& x, double u) {
    return ps.eval(x, u);
}

inline double eval_f(const PotentialSpec& ps, const Point& x, double u) {
    return ps.eval_f(x, u);
}

// Verifies the declared growth bound |F(x,u)| <= d1 + d2|u|^q over a u-range
// by dense sampling (endpoints included).
inline AuditReport check_growth(const PotentialSpec& ps, double u_lo, double u_hi, int samples) {
    if (samples < 1) throw error("check_growth: samples must be >= 1");
    AuditReport rep;
    rep.id = "potential_growth";
    const auto& g = ps.growth;
    for (int t = 0; t <= samples; ++t) {
        const double u =
            samples == 0 ? u_lo : u_lo + (u_hi - u_lo) * static_cast<double>(t) / samples;
        const double lhs = std::abs(ps.eval({0.0, 0.0}, u));
        const double rhs = g.d1 + g.d2 * std::pow(std::abs(u), g.q);
        char key[64];
        std::snprintf(key, sizeof key, "u=%.10g", u);
        auto& row = rep.add_sample(key, lhs, rhs);
        row.pass = !row.infinite && lhs <= rhs + 1e-12 * std::max(1.0, rhs);
    }
    rep.pass = true;
    for (const auto& r : rep.samples) rep.pass = rep.pass && r.pass;
    rep.implied_constant = rep.worst_ratio;
    return rep;
}

} // namespace fracdg
