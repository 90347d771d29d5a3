#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "fracdg/error.hpp"
#include "fracdg/geometry.hpp"
#include "fracdg/lattice.hpp"
#include "fracdg/summation.hpp"

namespace fracdg {

namespace detail {

inline double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

// Self-cell constant of the locally linear model:
//   integral over C x C of |g.(x-y)|^p / |x-y|^(n+sp)  =  |g|^p h^(n+(1-s)p) kappa_n(s,p),
// written through the tent density of x-y on [-1,1]^n. Exact in 1D; the 2D
// value uses an axis-aligned gradient direction (radial part closed form,
// composite Simpson in the angle).
inline double diag_constant(int dim, double s, double p) {
    const double a = p - 1.0 - s * p; // radial exponent, a > -1
    if (dim == 1) {
        const double ap = (1.0 - s) * p;
        return 2.0 / (ap * (ap + 1.0));
    }
    const int m = 128; // Simpson intervals on [0, pi/2]
    const double th1 = 0.5 * M_PI;
    auto f = [&](double th) {
        const double c = std::abs(std::cos(th)), sn = std::abs(std::sin(th));
        const double rm = 1.0 / std::max(c, sn);
        const double b = c + sn, cc = c * sn;
        const double r1 = std::pow(rm, a + 1.0) / (a + 1.0);
        const double r2 = std::pow(rm, a + 2.0) / (a + 2.0);
        const double r3 = std::pow(rm, a + 3.0) / (a + 3.0);
        return std::pow(c, p) * (r1 - b * r2 + cc * r3);
    };
    double acc = f(0.0) + f(th1);
    for (int i = 1; i < m; ++i) acc += f(th1 * i / m) * (i % 2 ? 4.0 : 2.0);
    return 4.0 * acc * th1 / (3.0 * m);
}

// Double antiderivative of t^-q: second differences give exact 1D cell-pair
// kernel integrals. q = 2 (sp = 1) needs the log branch.
inline double phi_kernel(double t, double q) {
    if (t == 0.0) return 0.0; // valid: exponent 2-q > 0 whenever this is called with t=0
    if (std::abs(q - 2.0) < 1e-12) return -std::log(t);
    return std::pow(t, 2.0 - q) / ((1.0 - q) * (2.0 - q));
}

inline double pair_weight_exact_1d(double D, double w, double q) {
    return phi_kernel(D + w, q) - 2.0 * phi_kernel(D, q) + phi_kernel(D - w, q);
}

// Double antiderivative of t^(p-1-sp): exact same-slope touching-cell term.
inline double psi_model(double t, double s, double p) {
    const double e = p - 1.0 - s * p;
    return std::pow(t, e + 2.0) / ((e + 1.0) * (e + 2.0));
}

struct SeminormScheme {
    int near_width;  // cell pairs treated by subdivision
    int subdivision; // subcells per axis
};

inline SeminormScheme seminorm_scheme(int dim) {
    return dim == 1 ? SeminormScheme{8, 8} : SeminormScheme{2, 4};
}

struct RegionCells {
    std::vector<CellIndex> idx;
    std::vector<Point> center;
    std::vector<double> value;
};

inline RegionCells collect_ball_cells(const GridFunction& u, const Ball& region) {
    RegionCells rc;
    for_each_lattice_cell_in_ball(u.grid, region, [&](const CellIndex& i, const Point& c) {
        rc.idx.push_back(i);
        rc.center.push_back(c);
        rc.value.push_back(u.value_at(i));
    });
    return rc;
}

inline std::array<double, 2> minmod_slopes(const GridFunction& u, const CellIndex& i) {
    const double h = u.grid.h;
    std::array<double, 2> g{0.0, 0.0};
    const double v = u.value_at(i);
    for (int a = 0; a < u.grid.dim; ++a) {
        CellIndex lo = i, hi = i;
        --lo[a];
        ++hi[a];
        g[a] = minmod((v - u.value_at(lo)) / h, (u.value_at(hi) - v) / h);
    }
    return g;
}

} // namespace detail

// Gagliardo seminorm to the p-th power over a ball: collocated far pairs with
// exact 1D cell-pair kernel integrals (midpoint in 2D), a subdivided near
// zone driven by a minmod-limited per-cell linear reconstruction, and the
// analytic self-cell term of that model. The reconstruction keeps lattice
// jumps sharp while restoring the near-diagonal mass that plain
// diagonal-skipped midpoint sums lose (that loss scales like h^((1-s)p) in
// total and does not vanish at practical resolutions for s near 1).
inline double gagliardo_seminorm_p(const GridFunction& u, const Ball& region, double s, double p) {
    if (!(s > 0.0 && s < 1.0) || !(p > 1.0))
        throw error("gagliardo_seminorm_p: need s in (0,1), p > 1");
    const Grid& g = u.grid;
    const int dim = g.dim;
    const double h = g.h;
    const double q = dim + s * p;
    const auto scheme = detail::seminorm_scheme(dim);
    const int m0 = scheme.near_width;
    const int sg = scheme.subdivision;

    auto rc = detail::collect_ball_cells(u, region);
    const std::size_t n = rc.idx.size();
    if (n < 2) throw degenerate_region_error("gagliardo_seminorm_p: region holds fewer than 2 cells");

    std::vector<std::array<double, 2>> slope(n);
    for (std::size_t a = 0; a < n; ++a) slope[a] = detail::minmod_slopes(u, rc.idx[a]);

    const double hs = h / sg;
    const double kap = detail::diag_constant(dim, s, p);
    const double self_term_scale = std::pow(hs, dim + (1.0 - s) * p);
    const double psi_touch =
        dim == 1 ? detail::psi_model(2.0 * hs, s, p) - 2.0 * detail::psi_model(hs, s, p) : 0.0;
    const double cellw = g.cell_measure();
    std::vector<double> offs(sg);
    for (int a = 0; a < sg; ++a) offs[a] = (a + 0.5) * hs - 0.5 * h;

    std::vector<double> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        // self cell: subdivided with the exact sub-self and touching terms
        {
            const double gmag = dim == 1 ? std::abs(slope[i][0])
                                         : std::hypot(slope[i][0], slope[i][1]);
            row += sg * (dim == 1 ? 1.0 : sg) * kap * std::pow(gmag, p) * self_term_scale;
            if (dim == 1) {
                for (int a = 0; a < sg; ++a)
                    for (int b = a + 1; b < sg; ++b) {
                        if (b - a == 1) {
                            row += 2.0 * std::pow(std::abs(slope[i][0]), p) * psi_touch;
                        } else {
                            const double D = (b - a) * hs;
                            row += 2.0 * std::pow(std::abs(slope[i][0]) * D, p) *
                                   detail::pair_weight_exact_1d(D, hs, q);
                        }
                    }
            } else {
                // 2D: subcell midpoint pairs of the linear model
                for (int a = 0; a < sg * sg; ++a)
                    for (int b = a + 1; b < sg * sg; ++b) {
                        const double dx = offs[b / sg] - offs[a / sg];
                        const double dy = offs[b % sg] - offs[a % sg];
                        const double r2 = dx * dx + dy * dy;
                        const double dv = slope[i][0] * dx + slope[i][1] * dy;
                        row += 2.0 * std::pow(std::abs(dv), p) * std::pow(r2, -0.5 * q) * hs * hs *
                               hs * hs;
                    }
            }
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            int cheb = std::abs(rc.idx[i][0] - rc.idx[j][0]);
            if (dim == 2) cheb = std::max(cheb, std::abs(rc.idx[i][1] - rc.idx[j][1]));
            if (cheb > m0) {
                const double D = dist(rc.center[i], rc.center[j], dim);
                const double w = dim == 1 ? detail::pair_weight_exact_1d(D, h, q)
                                          : std::pow(D, -q) * cellw * cellw;
                row += 2.0 * std::pow(std::abs(rc.value[i] - rc.value[j]), p) * w;
                continue;
            }
            // near pair: subdivide both cells, evaluate the linear models
            if (dim == 1) {
                const double D0 = rc.center[j][0] - rc.center[i][0];
                const int gap_cells = rc.idx[j][0] - rc.idx[i][0];
                double acc = 0.0;
                for (int a = 0; a < sg; ++a) {
                    const double va = rc.value[i] + slope[i][0] * offs[a];
                    for (int b = 0; b < sg; ++b) {
                        const double vb = rc.value[j] + slope[j][0] * offs[b];
                        const int gapsub = gap_cells * sg + b - a;
                        const double D = D0 + offs[b] - offs[a];
                        if (gapsub == 1) {
                            const bool same_model =
                                std::abs(slope[i][0] - slope[j][0]) < 1e-15 &&
                                std::abs(va + slope[i][0] * hs - vb) <
                                    1e-13 * std::max(1.0, std::abs(vb));
                            if (same_model)
                                acc += std::pow(std::abs(slope[i][0]), p) * psi_touch;
                            else
                                acc += std::pow(std::abs(va - vb), p) * std::pow(D, -q) * hs * hs;
                        } else {
                            acc += std::pow(std::abs(va - vb), p) *
                                   detail::pair_weight_exact_1d(D, hs, q);
                        }
                    }
                }
                row += 2.0 * acc;
            } else {
                const double Dx = rc.center[j][0] - rc.center[i][0];
                const double Dy = rc.center[j][1] - rc.center[i][1];
                double acc = 0.0;
                for (int a = 0; a < sg * sg; ++a) {
                    const double ax = offs[a / sg], ay = offs[a % sg];
                    const double va = rc.value[i] + slope[i][0] * ax + slope[i][1] * ay;
                    for (int b = 0; b < sg * sg; ++b) {
                        const double bx = offs[b / sg], by = offs[b % sg];
                        const double vb = rc.value[j] + slope[j][0] * bx + slope[j][1] * by;
                        const double dx = Dx + bx - ax, dy = Dy + by - ay;
                        const double r2 = dx * dx + dy * dy;
                        acc += std::pow(std::abs(va - vb), p) * std::pow(r2, -0.5 * q) * hs * hs *
                               hs * hs;
                    }
                }
                row += 2.0 * acc;
            }
        }
        rows.push_back(row);
    }
    return pairwise_sum(rows);
}

namespace detail {

// Analytic bound for the exterior remainder beyond radius rho:
//   integral over |z| > rho of (A + B |z|^beta) |z|^-q dz.
// Finite iff q - n - beta > 0.
inline double exterior_remainder_bound(int dim, double rho, double q, double A, double B,
                                       double beta) {
    const double om = unit_sphere_measure(dim);
    const double eA = q - dim;
    double rem = A > 0.0 ? om * A * std::pow(rho, -eA) / eA : 0.0;
    if (B > 0.0) {
        const double eB = q - dim - beta;
        if (eB <= 0.0) return std::numeric_limits<double>::infinity();
        rem += om * B * std::pow(rho, -eB) / eB;
    }
    return rem;
}

// Closed form of  integral over |z| > T of coeff |z|^beta / |z|^q dz.
inline double radial_power_exterior(int dim, double T, double q, double coeff, double beta) {
    const double e = q - dim - beta;
    if (e <= 0.0) throw divergent_tail_error("exterior integral diverges");
    return coeff * unit_sphere_measure(dim) * std::pow(T, -e) / e;
}

// Adaptive geometric-shell quadrature of
//   integral over R^n \ B_T(x0) of w(y) / |y - x0|^q dy
// with w >= 0 and w(y) <= A + B |y - x0|^beta beyond T. Shells double in
// radius, each handled by a fixed-order product rule; the loop stops when
// the analytic remainder bound drops below rel_tol * (accumulated total).
inline double exterior_integral_adaptive(int dim, const Point& x0, double T, double q,
                                         const std::function<double(const Point&)>& w, double A,
                                         double B, double beta, double rel_tol,
                                         double hard_cap = std::numeric_limits<double>::infinity(),
                                         double abs_floor = 1e-14) {
    if (exterior_remainder_bound(dim, T, q, A, B, beta) ==
        std::numeric_limits<double>::infinity())
        throw divergent_tail_error("exterior integral diverges");
    double total = 0.0;
    double lo = T;
    const int radial_nodes = 32; // per shell, composite Simpson
    const int angular_nodes = 64;
    for (int shell = 0; shell < 200; ++shell) {
        const double hi = std::min(2.0 * lo, hard_cap);
        if (hi > lo) {
            auto radial = [&](double r) {
                if (dim == 1)
                    return (w({x0[0] + r, 0.0}) + w({x0[0] - r, 0.0})) * std::pow(r, -q);
                double acc = 0.0;
                for (int a = 0; a < angular_nodes; ++a) {
                    const double th = 2.0 * M_PI * (a + 0.5) / angular_nodes;
                    acc += w({x0[0] + r * std::cos(th), x0[1] + r * std::sin(th)});
                }
                return acc * (2.0 * M_PI / angular_nodes) * std::pow(r, -q) * r;
            };
            const double step = (hi - lo) / radial_nodes;
            double acc = radial(lo) + radial(hi);
            for (int i = 1; i < radial_nodes; ++i)
                acc += radial(lo + i * step) * (i % 2 ? 4.0 : 2.0);
            total += acc * step / 3.0;
        }
        lo = hi;
        if (lo >= hard_cap) return total;
        const double rem = exterior_remainder_bound(dim, lo, q, A, B, beta);
        if (rem < rel_tol * std::max(std::abs(total), abs_floor)) return total;
    }
    throw divergence_error("exterior integral failed to converge within 200 shells");
}

// Exterior-extension growth recentered at x0: |u(y)| <= A' + B' |y-x0|^beta.
inline std::array<double, 3> recentered_growth(const ExteriorExtension& ext, const Point& x0,
                                               int dim) {
    const auto g = ext.growth_coeffs();
    const double beta = ext.growth_exponent();
    if (g[1] == 0.0 || beta == 0.0) return {g[0] + g[1], 0.0, 0.0};
    const double shift = norm(x0, dim);
    const double scale = std::pow(2.0, std::max(beta - 1.0, 0.0));
    return {g[0] + g[1] * scale * std::pow(shift, beta), g[1] * scale, beta};
}

// pth-power growth: w = |u|^(p-1) <= wA + wB r^(beta (p-1)).
inline std::array<double, 3> pth_power_growth(const std::array<double, 3>& g, double pm1) {
    const double split = std::pow(2.0, std::max(pm1 - 1.0, 0.0));
    if (g[1] == 0.0) return {std::pow(g[0], pm1), 0.0, 0.0};
    return {split * std::pow(g[0], pm1), split * std::pow(g[1], pm1), g[2] * pm1};
}

} // namespace detail

// The weighted exterior integral behind the Tail:
//   integral over R^n \ B_R(x0) of |u|^(p-1) / |x - x0|^(n+sp) dx,
// cell sums inside the grid box plus closed-form or adaptive shell
// quadrature of the extension beyond it.
inline double tail_integral(const GridFunction& u, const Point& x0, double R, double s, double p) {
    if (!(R > 0.0)) throw error("tail: R must be positive");
    const Grid& g = u.grid;
    const int dim = g.dim;
    const double q = dim + s * p;
    const double pm1 = p - 1.0;
    const auto& ext = u.exterior;
    if (ext.growth_exponent() * pm1 >= s * p)
        throw divergent_tail_error("tail: exterior growth violates the membership condition");

    std::vector<double> terms;
    // grid part: in-box cells with center outside the ball
    for (std::size_t k = 0; k < g.cell_count(); ++k) {
        const CellIndex idx = g.from_linear(k);
        const Point c = g.cell_center(idx);
        const double d2 = dist_sq(c, x0, dim);
        if (d2 < R * R) continue;
        terms.push_back(std::pow(std::abs(u.values[k]), pm1) * std::pow(d2, -0.5 * q) *
                        g.cell_measure());
    }
    double total = pairwise_sum(terms);

    const double T = g.circumradius_about(x0);
    if (T > R) {
        // annular leftover: synthesized lattice cells inside B_T, outside both
        // the box and B_R
        std::vector<double> ann;
        for_each_lattice_cell_in_ball(g, Ball(x0, T), [&](const CellIndex& idx, const Point& c) {
            if (g.in_box(idx)) return;
            if (dist_sq(c, x0, dim) < R * R) return;
            ann.push_back(std::pow(std::abs(ext.eval(c, dim)), pm1) *
                          std::pow(dist(c, x0, dim), -q) * g.cell_measure());
        });
        total += pairwise_sum(ann);
    }
    const double Tfar = std::max(T, R);

    // far field beyond B_Tfar(x0): closed forms where the modulus is radial
    switch (ext.variant) {
        case ExteriorExtension::Variant::zero:
            return total;
        case ExteriorExtension::Variant::constant:
            if (ext.c == 0.0) return total;
            return total + detail::radial_power_exterior(dim, Tfar, q,
                                                         std::pow(std::abs(ext.c), pm1), 0.0);
        case ExteriorExtension::Variant::sign:
            return total + detail::radial_power_exterior(dim, Tfar, q, 1.0, 0.0);
        case ExteriorExtension::Variant::power:
        case ExteriorExtension::Variant::linear: {
            const double beta = ext.variant == ExteriorExtension::Variant::linear ? 1.0 : ext.beta;
            const double scale = ext.variant == ExteriorExtension::Variant::linear ? 1.0 : ext.c;
            if (norm(x0, dim) < 1e-14)
                return total + detail::radial_power_exterior(dim, Tfar, q,
                                                             std::pow(std::abs(scale), pm1),
                                                             beta * pm1);
            break;
        }
        default: break;
    }
    const auto growth = detail::pth_power_growth(detail::recentered_growth(ext, x0, dim), pm1);
    auto w = [&](const Point& y) { return std::pow(std::abs(ext.eval(y, dim)), pm1); };
    double cap = std::numeric_limits<double>::infinity();
    if (ext.variant == ExteriorExtension::Variant::compact)
        cap = ext.rho + norm(x0, dim) + 1e-12;
    total += detail::exterior_integral_adaptive(dim, x0, Tfar, q, w, growth[0], growth[1],
                                                growth[2], 1e-8, cap,
                                                1e-14 * std::max(1.0, total));
    return total;
}

// Tail(u; x0, R) = [ (1-s) R^(sp) * tail_integral ]^(1/(p-1)).
inline double tail(const GridFunction& u, const Point& x0, double R, double s, double p) {
    const double I = tail_integral(u, x0, R, s, p);
    return std::pow((1.0 - s) * std::pow(R, s * p) * I, 1.0 / (p - 1.0));
}

// Non-scaling-invariant variant: R^(-sp/(p-1)) * tail.
inline double tail_ns(const GridFunction& u, const Point& x0, double R, double s, double p) {
    return std::pow(R, -s * p / (p - 1.0)) * tail(u, x0, R, s, p);
}

// Cross-interaction term between the two truncations:
//   sign '+' :  sum_x in region (u(x)-k)_+ * [ sum_y in B_reach(x) (u(y)-k)_-^(p-1) / |x-y|^(n+sp) ] h^(2n)
// mirrored for '-'. The y-ball is open; reach = +inf truncates at the grid
// box plus adaptive extension shells.
inline double cross_interaction(const GridFunction& u, double k, int sign, const Ball& region,
                                double reach, double s, double p) {
    if (sign != +1 && sign != -1) throw error("cross_interaction: sign must be +1 or -1");
    const Grid& g = u.grid;
    const int dim = g.dim;
    const double q = dim + s * p;
    const double pm1 = p - 1.0;
    auto rc = detail::collect_ball_cells(u, region);
    if (rc.idx.empty()) throw degenerate_region_error("cross_interaction: empty region");
    const double cellw = g.cell_measure();

    auto outer_part = [&](double v) { return sign > 0 ? std::max(v - k, 0.0) : std::max(k - v, 0.0); };
    auto inner_part = [&](double v) { return sign > 0 ? std::max(k - v, 0.0) : std::max(v - k, 0.0); };

    const bool infinite_reach = std::isinf(reach);
    ExteriorExtension inner_ext = u.exterior.truncated(k, -sign);

    std::vector<double> rows;
    rows.reserve(rc.idx.size());
    for (std::size_t i = 0; i < rc.idx.size(); ++i) {
        const double wp = outer_part(rc.value[i]);
        if (wp == 0.0) {
            rows.push_back(0.0);
            continue;
        }
        const Point x = rc.center[i];
        double inner = 0.0;
        const double lattice_reach =
            infinite_reach ? g.circumradius_about(x) + 2.0 * g.h : reach;
        std::vector<double> terms;
        for_each_lattice_cell_in_ball(g, Ball(x, lattice_reach),
                                      [&](const CellIndex& idx, const Point& c) {
            if (idx == rc.idx[i]) return; // product of the two parts vanishes at x itself
            const double wm = inner_part(u.value_at(idx));
            if (wm == 0.0) return;
            terms.push_back(std::pow(wm, pm1) * std::pow(dist(c, x, dim), -q) * cellw);
        });
        inner = pairwise_sum(terms);
        if (infinite_reach) {
            const auto growth =
                detail::pth_power_growth(detail::recentered_growth(inner_ext, x, dim), pm1);
            auto w = [&](const Point& y) { return std::pow(inner_ext.eval(y, dim), pm1); };
            inner += detail::exterior_integral_adaptive(dim, x, lattice_reach, q, w, growth[0],
                                                        growth[1], growth[2], 1e-8);
        }
        rows.push_back(wp * inner * cellw);
    }
    return pairwise_sum(rows);
}

enum class Cmp { lt, gt, le, ge };

// Lebesgue measure of {u cmp k} within a ball, by cell counting (lattice
// cells, including synthesized exterior ones).
inline double level_set_measure(const GridFunction& u, double k, const Ball& region, Cmp cmp) {
    std::size_t count = 0;
    for_each_lattice_cell_in_ball(u.grid, region, [&](const CellIndex& idx, const Point&) {
        const double v = u.value_at(idx);
        const bool in = cmp == Cmp::lt ? v < k : cmp == Cmp::gt ? v > k : cmp == Cmp::le ? v <= k
                                                                                         : v >= k;
        if (in) ++count;
    });
    return static_cast<double>(count) * u.grid.cell_measure();
}

// Pointwise truncation (u-k)_+ (sign +1) or (u-k)_- (sign -1), extension
// transformed alongside.
inline GridFunction truncate(const GridFunction& u, double k, int sign) {
    if (sign != +1 && sign != -1) throw error("truncate: sign must be +1 or -1");
    std::vector<double> v(u.values.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = sign > 0 ? std::max(u.values[i] - k, 0.0) : std::max(k - u.values[i], 0.0);
    return GridFunction(u.grid, std::move(v), u.exterior.truncated(k, sign));
}

// max - min over region cells.
inline double oscillation(const GridFunction& u, const Ball& region) {
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for_each_lattice_cell_in_ball(u.grid, region, [&](const CellIndex& idx, const Point&) {
        const double v = u.value_at(idx);
        mx = std::max(mx, v);
        mn = std::min(mn, v);
    });
    if (mn > mx) throw degenerate_region_error("oscillation: empty region");
    return mx - mn;
}

inline double inf_over(const GridFunction& u, const Ball& region) {
    double mn = std::numeric_limits<double>::infinity();
    for_each_lattice_cell_in_ball(u.grid, region,
                                  [&](const CellIndex& idx, const Point&) {
                                      mn = std::min(mn, u.value_at(idx));
                                  });
    if (!std::isfinite(mn)) throw degenerate_region_error("inf_over: empty region");
    return mn;
}

inline double sup_over(const GridFunction& u, const Ball& region) {
    double mx = -std::numeric_limits<double>::infinity();
    for_each_lattice_cell_in_ball(u.grid, region,
                                  [&](const CellIndex& idx, const Point&) {
                                      mx = std::max(mx, u.value_at(idx));
                                  });
    if (!std::isfinite(mx)) throw degenerate_region_error("sup_over: empty region");
    return mx;
}

// || u ||_Lp(ball)^p as a cell sum.
inline double lp_norm_p(const GridFunction& u, const Ball& region, double p) {
    std::vector<double> terms;
    for_each_lattice_cell_in_ball(u.grid, region, [&](const CellIndex& idx, const Point&) {
        terms.push_back(std::pow(std::abs(u.value_at(idx)), p));
    });
    return pairwise_sum(terms) * u.grid.cell_measure();
}

inline double l1_norm(const GridFunction& u, const Ball& region) {
    std::vector<double> terms;
    for_each_lattice_cell_in_ball(u.grid, region, [&](const CellIndex& idx, const Point&) {
        terms.push_back(std::abs(u.value_at(idx)));
    });
    return pairwise_sum(terms) * u.grid.cell_measure();
}

inline double mean_pth_power(const GridFunction& u, const Ball& region, double p) {
    std::vector<double> terms;
    for_each_lattice_cell_in_ball(u.grid, region, [&](const CellIndex& idx, const Point&) {
        terms.push_back(std::pow(std::abs(u.value_at(idx)), p));
    });
    if (terms.empty()) throw degenerate_region_error("mean_pth_power: empty region");
    return pairwise_sum(terms) / static_cast<double>(terms.size());
}

} // namespace fracdg
