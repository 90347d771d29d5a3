#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fracdg/error.hpp"
#include "fracdg/geometry.hpp"

namespace fracdg {

using CellIndex = std::array<int, 2>;

// Uniform cell-centered lattice over an axis-aligned box. Cell indices extend
// over all of Z^n; indices outside [0, ncells) address synthesized exterior
// cells whose values come from the exterior extension.
struct Grid {
    int dim = 1;
    Point lo{0.0, 0.0};
    Point hi{0.0, 0.0};
    double h = 0.0;
    std::array<int, 2> ncells{0, 1};

    static Grid make(int dim, Point lo, Point hi, double h) {
        if (dim != 1 && dim != 2) throw error("Grid: dim must be 1 or 2");
        if (!(h > 0.0)) throw error("Grid: h must be positive");
        Grid g;
        g.dim = dim;
        g.lo = lo;
        g.hi = hi;
        g.h = h;
        g.ncells = {1, 1};
        for (int a = 0; a < dim; ++a) {
            const double len = hi[a] - lo[a];
            const double cells = len / h;
            const long n = std::lround(cells);
            if (n < 4) throw error("Grid: need at least 4 cells per axis");
            if (std::abs(cells - static_cast<double>(n)) > 1e-9 * std::max(1.0, cells))
                throw error("Grid: box side must be an integer multiple of h");
            g.ncells[a] = static_cast<int>(n);
        }
        if (dim == 1) {
            g.lo[1] = 0.0;
            g.hi[1] = 0.0;
            g.ncells[1] = 1;
        }
        return g;
    }

    Point cell_center(const CellIndex& idx) const {
        Point p{0.0, 0.0};
        for (int a = 0; a < dim; ++a)
            p[a] = lo[a] + (static_cast<double>(idx[a]) + 0.5) * h;
        return p;
    }

    bool in_box(const CellIndex& idx) const {
        for (int a = 0; a < dim; ++a)
            if (idx[a] < 0 || idx[a] >= ncells[a]) return false;
        return true;
    }

    std::size_t linear(const CellIndex& idx) const {
        return static_cast<std::size_t>(idx[0]) * static_cast<std::size_t>(ncells[1]) +
               static_cast<std::size_t>(idx[1]);
    }

    CellIndex from_linear(std::size_t k) const {
        const int n1 = ncells[1];
        return CellIndex{static_cast<int>(k / static_cast<std::size_t>(n1)),
                         static_cast<int>(k % static_cast<std::size_t>(n1))};
    }

    std::size_t cell_count() const {
        return static_cast<std::size_t>(ncells[0]) * static_cast<std::size_t>(ncells[1]);
    }

    double cell_measure() const {
        double m = h;
        for (int a = 1; a < dim; ++a) m *= h;
        return m;
    }

    // Cell index of the cell containing x (half-open convention per axis).
    CellIndex cell_of(const Point& x) const {
        CellIndex idx{0, 0};
        for (int a = 0; a < dim; ++a)
            idx[a] = static_cast<int>(std::floor((x[a] - lo[a]) / h));
        return idx;
    }

    IBox bounding_box() const { return IBox{lo, hi}; }

    double box_diameter() const { return dist(lo, hi, dim); }

    // Largest |x - x0| over box corners; B_T(x0) then covers the box.
    double circumradius_about(const Point& x0) const {
        double worst = 0.0;
        for (int c0 = 0; c0 < 2; ++c0)
            for (int c1 = 0; c1 < (dim == 2 ? 2 : 1); ++c1) {
                Point corner{c0 ? hi[0] : lo[0], c1 ? hi[1] : lo[1]};
                worst = std::max(worst, dist(corner, x0, dim));
            }
        return worst;
    }

    bool same_layout(const Grid& o) const {
        return dim == o.dim && h == o.h && lo == o.lo && hi == o.hi && ncells == o.ncells;
    }
};

// Parametric values of u outside the grid box. `power` means c*|x|^beta for
// large |x|; membership in the weighted Lebesgue class requires
// beta < s*p/(p-1), checked where tails are computed. `custom` wraps an
// arbitrary rule together with an explicit growth bound |u| <= A + B|x|^beta.
struct ExteriorExtension {
    enum class Variant { zero, constant, power, compact, sign, linear, sin_profile, custom };

    Variant variant = Variant::zero;
    double c = 0.0;      // constant / power / compact value scale
    double beta = 0.0;   // power exponent; also custom growth exponent
    double rho = 0.0;    // compact support radius
    double a0 = 0.0, b0 = 0.0, omega = 0.0, phase = 0.0; // sin_profile: a0 + b0*sin(omega*x1 + phase)
    double bound_a = 0.0, bound_b = 0.0;                 // custom growth bound coefficients
    std::function<double(const Point&, int)> fn;         // custom rule

    static ExteriorExtension zero() { return ExteriorExtension{}; }

    static ExteriorExtension constant(double value) {
        ExteriorExtension e;
        e.variant = Variant::constant;
        e.c = value;
        return e;
    }

    static ExteriorExtension power(double beta, double scale) {
        ExteriorExtension e;
        e.variant = Variant::power;
        e.beta = beta;
        e.c = scale;
        return e;
    }

    static ExteriorExtension compact(double support_radius, double value) {
        if (!(support_radius > 0.0)) throw error("compact extension: radius must be positive");
        ExteriorExtension e;
        e.variant = Variant::compact;
        e.rho = support_radius;
        e.c = value;
        return e;
    }

    static ExteriorExtension sign_profile() {
        ExteriorExtension e;
        e.variant = Variant::sign;
        return e;
    }

    static ExteriorExtension linear_profile() {
        ExteriorExtension e;
        e.variant = Variant::linear;
        return e;
    }

    static ExteriorExtension sin_profile(double a, double b, double om, double ph) {
        ExteriorExtension e;
        e.variant = Variant::sin_profile;
        e.a0 = a;
        e.b0 = b;
        e.omega = om;
        e.phase = ph;
        return e;
    }

    static ExteriorExtension custom(std::function<double(const Point&, int)> f,
                                    double growth_a, double growth_b, double growth_beta) {
        ExteriorExtension e;
        e.variant = Variant::custom;
        e.fn = std::move(f);
        e.bound_a = growth_a;
        e.bound_b = growth_b;
        e.beta = growth_beta;
        return e;
    }

    double eval(const Point& x, int dim) const {
        switch (variant) {
            case Variant::zero: return 0.0;
            case Variant::constant: return c;
            case Variant::power: return c * std::pow(norm(x, dim), beta);
            case Variant::compact: return norm(x, dim) < rho ? c : 0.0;
            case Variant::sign: return x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? -1.0 : 0.0);
            case Variant::linear: return x[0];
            case Variant::sin_profile: return a0 + b0 * std::sin(omega * x[0] + phase);
            case Variant::custom: return fn(x, dim);
        }
        return 0.0;
    }

    double growth_exponent() const {
        switch (variant) {
            case Variant::power: return std::max(beta, 0.0);
            case Variant::linear: return 1.0;
            case Variant::custom: return std::max(beta, 0.0);
            default: return 0.0;
        }
    }

    // Coefficients (A, B) with |u(x)| <= A + B*|x|^growth_exponent().
    std::array<double, 2> growth_coeffs() const {
        switch (variant) {
            case Variant::zero: return {0.0, 0.0};
            case Variant::constant: return {std::abs(c), 0.0};
            case Variant::power:
                return beta >= 0.0 ? std::array<double, 2>{0.0, std::abs(c)}
                                   : std::array<double, 2>{std::abs(c), 0.0}; // decaying; crude bound near box edge
            case Variant::compact: return {std::abs(c), 0.0};
            case Variant::sign: return {1.0, 0.0};
            case Variant::linear: return {0.0, 1.0};
            case Variant::sin_profile: return {std::abs(a0) + std::abs(b0), 0.0};
            case Variant::custom: return {bound_a, bound_b};
        }
        return {0.0, 0.0};
    }

    // Pointwise truncation (u-k)_+ or (u-k)_-; symbolic for flat variants,
    // a sampled wrapper otherwise.
    ExteriorExtension truncated(double k, int sign) const {
        auto cut = [k, sign](double v) {
            return sign > 0 ? std::max(v - k, 0.0) : std::max(k - v, 0.0);
        };
        switch (variant) {
            case Variant::zero: return constant(cut(0.0));
            case Variant::constant: return constant(cut(c));
            default: break;
        }
        auto base = *this;
        auto g = growth_coeffs();
        return custom(
            [base, cut](const Point& x, int dim) { return cut(base.eval(x, dim)); },
            g[0] + std::abs(k), g[1], growth_exponent());
    }

    bool serializable() const { return variant != Variant::custom; }

    std::string spec_string() const {
        char buf[160];
        switch (variant) {
            case Variant::zero: return "zero";
            case Variant::constant:
                std::snprintf(buf, sizeof buf, "constant:%.17g", c);
                return buf;
            case Variant::power:
                std::snprintf(buf, sizeof buf, "power:%.17g:%.17g", beta, c);
                return buf;
            case Variant::compact:
                std::snprintf(buf, sizeof buf, "compact:%.17g:%.17g", rho, c);
                return buf;
            case Variant::sign: return "sign";
            case Variant::linear: return "linear";
            case Variant::sin_profile:
                std::snprintf(buf, sizeof buf, "sin:%.17g:%.17g:%.17g:%.17g", a0, b0, omega, phase);
                return buf;
            case Variant::custom: return "custom";
        }
        return "zero";
    }

    static ExteriorExtension parse(const std::string& spec) {
        auto split = [](const std::string& s) {
            std::vector<std::string> parts;
            std::string cur;
            for (char ch : s) {
                if (ch == ':') {
                    parts.push_back(cur);
                    cur.clear();
                } else {
                    cur.push_back(ch);
                }
            }
            parts.push_back(cur);
            return parts;
        };
        auto parts = split(spec);
        const std::string& kind = parts[0];
        auto num = [&](std::size_t i) {
            if (i >= parts.size()) throw config_error("exterior spec '" + spec + "': missing parameter");
            return std::stod(parts[i]);
        };
        if (kind == "zero") return zero();
        if (kind == "constant") return constant(num(1));
        if (kind == "power") return power(num(1), num(2));
        if (kind == "compact") return compact(num(1), num(2));
        if (kind == "sign") return sign_profile();
        if (kind == "linear") return linear_profile();
        if (kind == "sin") return sin_profile(num(1), num(2), num(3), num(4));
        throw config_error("unknown exterior spec '" + spec + "'");
    }
};

// Values of u on the grid plus the exterior rule: total on R^n.
struct GridFunction {
    Grid grid;
    std::vector<double> values;
    ExteriorExtension exterior;

    GridFunction() = default;
    GridFunction(Grid g, std::vector<double> v, ExteriorExtension ext = ExteriorExtension::zero())
        : grid(g), values(std::move(v)), exterior(std::move(ext)) {
        if (values.size() != grid.cell_count())
            throw error("GridFunction: value count does not match grid");
        for (double x : values)
            if (!std::isfinite(x)) throw error("GridFunction: values must be finite");
    }

    static GridFunction sampled(const Grid& g, const std::function<double(const Point&)>& f,
                                ExteriorExtension ext = ExteriorExtension::zero()) {
        std::vector<double> v(g.cell_count());
        for (std::size_t k = 0; k < v.size(); ++k)
            v[k] = f(g.cell_center(g.from_linear(k)));
        return GridFunction(g, std::move(v), std::move(ext));
    }

    static GridFunction constant(const Grid& g, double c) {
        return GridFunction(g, std::vector<double>(g.cell_count(), c),
                            ExteriorExtension::constant(c));
    }

    // Value of the lattice cell `idx`: stored value in the box, extension at
    // the synthesized cell center outside.
    double value_at(const CellIndex& idx) const {
        if (grid.in_box(idx)) return values[grid.linear(idx)];
        return exterior.eval(grid.cell_center(idx), grid.dim);
    }

    // Total evaluation on R^n: containing-cell value inside the box,
    // extension rule outside.
    double eval(const Point& x) const {
        const CellIndex idx = grid.cell_of(x);
        if (grid.in_box(idx)) return values[grid.linear(idx)];
        return exterior.eval(x, grid.dim);
    }

    GridFunction with_values(std::vector<double> v) const {
        return GridFunction(grid, std::move(v), exterior);
    }
};

inline double cell_measure(const Grid& g) { return g.cell_measure(); }

namespace detail {

// Index range [first, last] of lattice cells whose centers can lie in
// (lo_c, hi_c) along one axis.
inline std::pair<int, int> axis_range(double grid_lo, double h, double lo_c, double hi_c) {
    const int first = static_cast<int>(std::ceil((lo_c - grid_lo) / h - 0.5 - 1e-12));
    const int last = static_cast<int>(std::floor((hi_c - grid_lo) / h - 0.5 + 1e-12));
    return {first, last};
}

} // namespace detail

// Visit every lattice cell (including synthesized exterior cells) whose
// center lies strictly inside the ball, in lexicographic index order.
template <class F>
inline void for_each_lattice_cell_in_ball(const Grid& g, const Ball& b, F&& visit) {
    const auto [i0, i1] =
        detail::axis_range(g.lo[0], g.h, b.center[0] - b.radius, b.center[0] + b.radius);
    if (g.dim == 1) {
        for (int i = i0; i <= i1; ++i) {
            CellIndex idx{i, 0};
            const Point c = g.cell_center(idx);
            if (b.contains(c, 1)) visit(idx, c);
        }
        return;
    }
    const auto [j0, j1] =
        detail::axis_range(g.lo[1], g.h, b.center[1] - b.radius, b.center[1] + b.radius);
    for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j) {
            CellIndex idx{i, j};
            const Point c = g.cell_center(idx);
            if (b.contains(c, 2)) visit(idx, c);
        }
}

// Visit every lattice cell whose center lies in the region (including
// synthesized exterior cells when the region leaves the box).
template <class F>
inline void for_each_lattice_cell_in_region(const Grid& g, const Region& r, F&& visit) {
    if (r.kind == Region::Kind::ball) {
        for_each_lattice_cell_in_ball(g, r.ball, std::forward<F>(visit));
        return;
    }
    const auto [i0, i1] = detail::axis_range(g.lo[0], g.h, r.box.lo[0], r.box.hi[0]);
    if (g.dim == 1) {
        for (int i = i0; i <= i1; ++i) {
            CellIndex idx{i, 0};
            const Point c = g.cell_center(idx);
            if (r.box.contains(c, 1)) visit(idx, c);
        }
        return;
    }
    const auto [j0, j1] = detail::axis_range(g.lo[1], g.h, r.box.lo[1], r.box.hi[1]);
    for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j) {
            CellIndex idx{i, j};
            const Point c = g.cell_center(idx);
            if (r.box.contains(c, 2)) visit(idx, c);
        }
}

// Grid cells (in-box only) whose centers lie strictly inside the ball,
// lexicographic order.
inline std::vector<CellIndex> ball_cells(const Grid& g, const Ball& b) {
    if (!(b.radius > 0.0)) throw error("ball_cells: radius must be positive");
    std::vector<CellIndex> out;
    for_each_lattice_cell_in_ball(g, b, [&](const CellIndex& idx, const Point&) {
        if (g.in_box(idx)) out.push_back(idx);
    });
    return out;
}

// --- flat CSV serialization -------------------------------------------------
//
// Header: "# dim,h,lo...,hi...,exterior=<spec>"
// Rows:   "index..., x..., value" one per in-box cell, lexicographic.

inline void write_csv(const GridFunction& u, std::ostream& os) {
    if (!u.exterior.serializable())
        throw error("write_csv: custom exterior extensions are not serializable");
    char buf[256];
    const Grid& g = u.grid;
    if (g.dim == 1)
        std::snprintf(buf, sizeof buf, "# 1,%.17g,%.17g,%.17g,exterior=", g.h, g.lo[0], g.hi[0]);
    else
        std::snprintf(buf, sizeof buf, "# 2,%.17g,%.17g,%.17g,%.17g,%.17g,exterior=", g.h, g.lo[0],
                      g.lo[1], g.hi[0], g.hi[1]);
    os << buf << u.exterior.spec_string() << "\n";
    for (std::size_t k = 0; k < u.values.size(); ++k) {
        const CellIndex idx = g.from_linear(k);
        const Point c = g.cell_center(idx);
        if (g.dim == 1)
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", idx[0], c[0], u.values[k]);
        else
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", idx[0], idx[1], c[0], c[1],
                          u.values[k]);
        os << buf;
    }
}

inline GridFunction read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
        throw config_error("grid CSV: missing header");
    const std::string body = line.substr(2);
    std::vector<std::string> fields;
    {
        std::string cur;
        for (char ch : body) {
            if (ch == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        fields.push_back(cur);
    }
    const int dim = std::stoi(fields.at(0));
    const double h = std::stod(fields.at(1));
    Point lo{0, 0}, hi{0, 0};
    std::size_t at = 2;
    for (int a = 0; a < dim; ++a) lo[a] = std::stod(fields.at(at++));
    for (int a = 0; a < dim; ++a) hi[a] = std::stod(fields.at(at++));
    const std::string extfield = fields.at(at);
    if (extfield.rfind("exterior=", 0) != 0) throw config_error("grid CSV: malformed header");
    auto ext = ExteriorExtension::parse(extfield.substr(9));
    Grid g = Grid::make(dim, lo, hi, h);
    std::vector<double> v(g.cell_count(), 0.0);
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        CellIndex idx{0, 0};
        char comma;
        ss >> idx[0] >> comma;
        if (dim == 2) ss >> idx[1] >> comma;
        double x, val;
        ss >> x >> comma;
        if (dim == 2) ss >> val >> comma; // x[1]
        ss >> val;
        if (!g.in_box(idx)) throw config_error("grid CSV: cell index out of range");
        v[g.linear(idx)] = val;
        ++rows;
    }
    if (rows != g.cell_count()) throw config_error("grid CSV: wrong row count");
    return GridFunction(g, std::move(v), std::move(ext));
}

} // namespace fracdg
