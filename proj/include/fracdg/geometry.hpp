#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "fracdg/error.hpp"

namespace fracdg {

// Points live in R^1 or R^2; the unused coordinate stays 0 in 1D.
using Point = std::array<double, 2>;

inline double dist_sq(const Point& a, const Point& b, int dim) {
    double d0 = a[0] - b[0];
    if (dim == 1) return d0 * d0;
    double d1 = a[1] - b[1];
    return d0 * d0 + d1 * d1;
}

inline double dist(const Point& a, const Point& b, int dim) {
    return std::sqrt(dist_sq(a, b, dim));
}

inline double norm(const Point& a, int dim) {
    return dist(a, Point{0.0, 0.0}, dim);
}

// Volume of the unit ball and surface measure of the unit sphere.
inline double unit_ball_volume(int dim) { return dim == 1 ? 2.0 : 3.14159265358979323846; }
inline double unit_sphere_measure(int dim) { return dim == 1 ? 2.0 : 2.0 * 3.14159265358979323846; }

inline double ball_volume(int dim, double R) {
    return dim == 1 ? 2.0 * R : unit_ball_volume(2) * R * R;
}

struct Ball {
    Point center{0.0, 0.0};
    double radius = 0.0;

    Ball() = default;
    Ball(Point c, double R) : center(c), radius(R) {
        if (!(R > 0.0)) throw error("Ball: radius must be positive");
    }
    Ball(double c, double R) : Ball(Point{c, 0.0}, R) {}

    // Boundary points count as outside.
    bool contains(const Point& x, int dim) const {
        return dist_sq(x, center, dim) < radius * radius;
    }
};

struct IBox {
    Point lo{0.0, 0.0};
    Point hi{0.0, 0.0};

    bool contains(const Point& x, int dim) const {
        for (int a = 0; a < dim; ++a)
            if (x[a] < lo[a] || x[a] >= hi[a]) return false;
        return true;
    }
    double diameter(int dim) const {
        return dist(lo, hi, dim);
    }
};

// Domains for energies and solves: either a ball or an axis-aligned box.
struct Region {
    enum class Kind { ball, box };
    Kind kind = Kind::ball;
    Ball ball;
    IBox box;

    static Region make(const Ball& b) {
        Region r;
        r.kind = Kind::ball;
        r.ball = b;
        return r;
    }
    static Region make(const IBox& b) {
        Region r;
        r.kind = Kind::box;
        r.box = b;
        return r;
    }

    bool contains(const Point& x, int dim) const {
        return kind == Kind::ball ? ball.contains(x, dim) : box.contains(x, dim);
    }

    // Enclosing axis-aligned bounds, used to clip lattice enumeration.
    IBox bounds(int dim) const {
        if (kind == Kind::box) return box;
        IBox b;
        for (int a = 0; a < dim; ++a) {
            b.lo[a] = ball.center[a] - ball.radius;
            b.hi[a] = ball.center[a] + ball.radius;
        }
        return b;
    }

    double dist_to_boundary(const Point& x, int dim) const {
        if (kind == Kind::ball)
            return ball.radius - dist(x, ball.center, dim);
        double d = std::numeric_limits<double>::infinity();
        for (int a = 0; a < dim; ++a) {
            d = std::min(d, x[a] - box.lo[a]);
            d = std::min(d, box.hi[a] - x[a]);
        }
        return d;
    }
};

} // namespace fracdg
