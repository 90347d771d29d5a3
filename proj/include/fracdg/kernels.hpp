#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

#include "fracdg/audit.hpp"
#include "fracdg/error.hpp"
#include "fracdg/geometry.hpp"
#include "fracdg/rng.hpp"

namespace fracdg {

// Interaction kernel family K(x,y) = (1-s) a(x,y) / |x-y|^(n+sp), with a
// comparable to 1: 1/Lambda * chi_{B_r0}(x-y) <= a <= Lambda near the
// diagonal, or globally when r0 = +inf. The custom variant takes a as a
// function of the difference x-y only, so evenness of a gives symmetry.
struct KernelSpec {
    enum class Variant { standard, angular, convolution, truncated, custom };

    Variant variant = Variant::standard;
    int dim = 1;
    double s = 0.5;
    double p = 2.0;
    double lambda = 1.0;                          // ellipticity constant Lambda >= 1
    double r0 = std::numeric_limits<double>::infinity();
    double r1 = 0.0;                              // truncated: support radius
    std::function<double(const Point&)> a_fn;     // angular/convolution/custom profile

    static KernelSpec base(int dim, double s, double p, double lambda, double r0) {
        if (dim != 1 && dim != 2) throw error("KernelSpec: dim must be 1 or 2");
        if (!(s > 0.0 && s < 1.0)) throw error("KernelSpec: need s in (0,1)");
        if (!(p > 1.0)) throw error("KernelSpec: need p > 1");
        if (!(lambda >= 1.0)) throw error("KernelSpec: need Lambda >= 1");
        if (!(r0 > 0.0)) throw error("KernelSpec: need r0 > 0");
        KernelSpec k;
        k.dim = dim;
        k.s = s;
        k.p = p;
        k.lambda = lambda;
        k.r0 = r0;
        return k;
    }

    static KernelSpec standard(int dim, double s, double p,
                               double r0 = std::numeric_limits<double>::infinity()) {
        KernelSpec k = base(dim, s, p, 1.0, r0);
        k.variant = Variant::standard;
        return k;
    }

    // a0 evaluated on the unit sphere direction of x-y.
    static KernelSpec angular(int dim, double s, double p, double lambda,
                              std::function<double(const Point&)> a0,
                              double r0 = std::numeric_limits<double>::infinity()) {
        KernelSpec k = base(dim, s, p, lambda, r0);
        k.variant = Variant::angular;
        k.a_fn = std::move(a0);
        return k;
    }

    // a0 evaluated on the difference x-y itself.
    static KernelSpec convolution(int dim, double s, double p, double lambda,
                                  std::function<double(const Point&)> a0,
                                  double r0 = std::numeric_limits<double>::infinity()) {
        KernelSpec k = base(dim, s, p, lambda, r0);
        k.variant = Variant::convolution;
        k.a_fn = std::move(a0);
        return k;
    }

    // a = chi_D(x-y) with B_r0 <= D = B_r1.
    static KernelSpec truncated(int dim, double s, double p, double lambda, double r0, double r1) {
        if (!(r0 > 0.0) || r1 < r0) throw error("truncated kernel: need 0 < r0 <= r1");
        KernelSpec k = base(dim, s, p, lambda, r0);
        k.variant = Variant::truncated;
        k.r1 = r1;
        return k;
    }

    static KernelSpec custom(int dim, double s, double p, double lambda,
                             std::function<double(const Point&)> a_of_diff,
                             double r0 = std::numeric_limits<double>::infinity()) {
        KernelSpec k = base(dim, s, p, lambda, r0);
        k.variant = Variant::custom;
        k.a_fn = std::move(a_of_diff);
        return k;
    }

    double singular_exponent() const { return static_cast<double>(dim) + s * p; }

    // K(x,y); throws on coincident points (kernel singularity).
    double eval(const Point& x, const Point& y) const {
        const double r = dist(x, y, dim);
        if (r == 0.0) throw error("eval_kernel: coincident points");
        return (1.0 - s) * a_value(x, y, r) / std::pow(r, singular_exponent());
    }

    double a_value(const Point& x, const Point& y, double r) const {
        Point z{x[0] - y[0], x[1] - y[1]};
        switch (variant) {
            case Variant::standard: return 1.0;
            case Variant::angular: {
                Point dir{z[0] / r, z[1] / r};
                return a_fn(dir);
            }
            case Variant::convolution: return a_fn(z);
            case Variant::truncated: return r < r1 ? 1.0 : 0.0;
            case Variant::custom: return a_fn(z);
        }
        return 1.0;
    }

    bool globally_elliptic() const {
        return std::isinf(r0) && variant != Variant::truncated;
    }
};

inline double eval_kernel(const KernelSpec& k, const Point& x, const Point& y) {
    return k.eval(x, y);
}

namespace detail {

inline double kernel_sample_halfwidth(const KernelSpec& k) {
    double w = 1.0;
    if (k.variant == KernelSpec::Variant::truncated) w = std::max(w, 1.5 * k.r1);
    if (std::isfinite(k.r0)) w = std::max(w, 1.5 * k.r0);
    return w;
}

inline std::string point_pair_key(const Point& x, const Point& y, int dim) {
    char buf[128];
    if (dim == 1)
        std::snprintf(buf, sizeof buf, "x=%.6g y=%.6g", x[0], y[0]);
    else
        std::snprintf(buf, sizeof buf, "x=(%.6g,%.6g) y=(%.6g,%.6g)", x[0], x[1], y[0], y[1]);
    return buf;
}

} // namespace detail

// Max over sampled pairs of |K(x,y) - K(y,x)|; passes only at exactly zero.
inline AuditReport check_symmetry(const KernelSpec& k, int samples, std::uint64_t seed) {
    if (samples < 1) throw error("check_symmetry: samples must be >= 1");
    AuditReport rep;
    rep.id = "kernel_symmetry";
    rep.seed = seed;
    Rng rng(seed);
    const double w = detail::kernel_sample_halfwidth(k);
    double worst = 0.0;
    for (int t = 0; t < samples; ++t) {
        Point x{rng.uniform(-w, w), 0.0}, y{rng.uniform(-w, w), 0.0};
        if (k.dim == 2) {
            x[1] = rng.uniform(-w, w);
            y[1] = rng.uniform(-w, w);
        }
        if (dist(x, y, k.dim) == 0.0) continue;
        const double dev = std::abs(k.eval(x, y) - k.eval(y, x));
        worst = std::max(worst, dev);
        auto& row = rep.add_sample(detail::point_pair_key(x, y, k.dim), dev, 0.0);
        row.infinite = false; // deviation rows are absolute, not ratios
        row.ratio = dev;
        row.pass = dev == 0.0;
    }
    rep.infinite_ratios = 0;
    rep.worst_ratio = worst;
    rep.implied_constant = worst;
    rep.pass = worst == 0.0;
    return rep;
}

// Worst ratios against the two-sided comparability bounds. With `global` set
// the lower bound is enforced at every distance (r0 = +inf form); otherwise
// only within distance r0 of the diagonal.
inline AuditReport check_ellipticity(const KernelSpec& k, int samples, bool global,
                                     std::uint64_t seed) {
    if (samples < 1) throw error("check_ellipticity: samples must be >= 1");
    AuditReport rep;
    rep.id = global ? "kernel_ellipticity_global" : "kernel_ellipticity";
    rep.seed = seed;
    Rng rng(seed);
    const double w = global ? std::max(2.0, detail::kernel_sample_halfwidth(k))
                            : detail::kernel_sample_halfwidth(k);
    const double q = k.singular_exponent();
    for (int t = 0; t < samples; ++t) {
        Point x{rng.uniform(-w, w), 0.0}, y{rng.uniform(-w, w), 0.0};
        if (k.dim == 2) {
            x[1] = rng.uniform(-w, w);
            y[1] = rng.uniform(-w, w);
        }
        const double r = dist(x, y, k.dim);
        if (r == 0.0) continue;
        const double kv = k.eval(x, y);
        const double envelope = (1.0 - k.s) / std::pow(r, q);
        const double upper = k.lambda * envelope;
        const bool in_r0 = global || r < k.r0;
        const double lower = in_r0 ? envelope / k.lambda : 0.0;
        // upper check: K/upper <= 1; lower check: lower/K <= 1
        auto& up = rep.add_sample("upper " + detail::point_pair_key(x, y, k.dim), kv, upper);
        up.pass = up.ratio <= 1.0 + 1e-12 && !up.infinite;
        if (lower > 0.0) {
            auto& lo = rep.add_sample("lower " + detail::point_pair_key(x, y, k.dim), lower, kv);
            lo.pass = !lo.infinite && lo.ratio <= 1.0 + 1e-12;
        }
    }
    rep.pass = rep.infinite_ratios == 0;
    for (const auto& rrow : rep.samples) rep.pass = rep.pass && rrow.pass;
    rep.implied_constant = rep.worst_ratio;
    return rep;
}

} // namespace fracdg
