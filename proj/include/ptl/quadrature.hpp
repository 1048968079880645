#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ptl {

/// Gauss-Legendre rule on [-1,1]. Nodes are computed once per order by
/// Newton iteration on the Legendre polynomial and cached.
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;

    explicit GaussLegendre(int n) {
        if (n < 1) throw std::invalid_argument("GaussLegendre order must be >= 1");
        x.resize(n);
        w.resize(n);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            // Tricomi initial guess, then Newton on P_n.
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (z * p0 - p1) / (z * z - 1.0);
                double dz = p0 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-15) break;
            }
            x[i] = -z;
            x[n - 1 - i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            w[n - 1 - i] = w[i];
        }
    }

    static const GaussLegendre& cached(int n) {
        // deque: growth must not invalidate references held by callers whose
        // integrands reenter this cache at another order
        static thread_local std::deque<GaussLegendre> pool; // indexed by order
        if (static_cast<int>(pool.size()) <= n) {
            for (int k = static_cast<int>(pool.size()); k <= n; ++k)
                pool.emplace_back(std::max(k, 1));
        }
        return pool[n];
    }
};

/// Integral of f over [a,b] with one Gauss-Legendre panel.
template <typename F>
double gl_panel(F&& f, double a, double b, int order = 16) {
    const auto& rule = GaussLegendre::cached(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * f(mid + half * rule.x[i]);
    return acc * half;
}

/// Integral of f over [a,b] split into n equal panels.
template <typename F>
double gl_uniform(F&& f, double a, double b, int panels, int order = 16) {
    double acc = 0.0;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) acc += gl_panel(f, a + k * h, a + (k + 1) * h, order);
    return acc;
}

/// Integral of f over [a,b] with panels geometrically refined towards `a`
/// (first panel width ~ (b-a)*shrink^{panels-1}). Suited to integrands with
/// a power or log singularity in the derivative at the left endpoint.
template <typename F>
double gl_graded_left(F&& f, double a, double b, int panels, double shrink = 0.5, int order = 16) {
    double acc = 0.0;
    double hi = b;
    double len = b - a;
    for (int k = 0; k < panels - 1; ++k) {
        len *= shrink;
        double lo = a + len;
        acc += gl_panel(f, lo, hi, order);
        hi = lo;
    }
    acc += gl_panel(f, a, hi, order);
    return acc;
}

/// Adaptive integral of f over (0, b]: geometric decades towards 0 with a
/// fixed number of GL points per decade; stops when a decade contributes
/// less than rel_tol of the running total or the floor `t_min` is reached.
template <typename F>
double gl_decades_to_zero(F&& f, double b, double rel_tol = 1e-14, double t_min = 0.0,
                          int panels_per_decade = 8, int order = 16) {
    double acc = 0.0;
    double hi = b;
    const double ratio = 0.1;
    for (int d = 0; d < 400; ++d) {
        double lo = hi * ratio;
        double part = gl_uniform(f, lo, hi, panels_per_decade, order);
        acc += part;
        hi = lo;
        if (hi <= t_min) break;
        if (std::abs(part) < rel_tol * std::abs(acc) && d > 2) break;
    }
    return acc;
}

/// Log-spaced grid of n points from lo to hi (inclusive), increasing.
inline std::vector<double> geometric_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw std::invalid_argument("geometric_grid: bad range");
    std::vector<double> g(n);
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[i] = lo * std::exp(step * i);
    g.front() = lo;
    g.back() = hi;
    return g;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 points");
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

} // namespace ptl
