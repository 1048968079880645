#pragma once

#include "ptl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ptl {

/// Surface area of the unit sphere S^{N-1} in R^N.
inline double unit_sphere_area(int N) {
    return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
}

/// Volume of the unit ball in R^N.
inline double unit_ball_volume(int N) { return unit_sphere_area(N) / N; }

/// Radial grid 0 = r_0 < r_1 < ... < r_M = Rmax with geometrically growing
/// spacing: the first interval is first_frac * Rmax and the spacing ratio is
/// solved so the intervals sum to Rmax. Geometric grading gives relative
/// resolution h ~ const * r in the interior, which resolves power-law data
/// near the origin.
struct RadialMesh {
    int dim = 1;
    std::vector<double> r;

    RadialMesh() = default;

    RadialMesh(int dim_, std::vector<double> radii) : dim(dim_), r(std::move(radii)) {
        if (dim < 1) throw std::invalid_argument("RadialMesh: dim must be >= 1");
        if (r.size() < 4 || r.front() != 0.0) throw std::invalid_argument("RadialMesh: need r_0 = 0 and >= 4 nodes");
        for (size_t i = 1; i < r.size(); ++i)
            if (!(r[i] > r[i - 1])) throw std::invalid_argument("RadialMesh: radii must increase strictly");
    }

    static RadialMesh graded(int dim, double Rmax, int nodes, double first_frac = 1e-4) {
        if (!(Rmax > 0.0)) throw std::invalid_argument("RadialMesh: Rmax must be positive");
        if (nodes < 8) throw std::invalid_argument("RadialMesh: need at least 8 nodes");
        if (!(first_frac > 0.0) || !(first_frac < 0.5))
            throw std::invalid_argument("RadialMesh: first_frac out of range");
        const int m = nodes - 1; // interval count
        const double target = 1.0 / first_frac;
        // solve (phi^m - 1)/(phi - 1) = target for phi >= 1
        double lo = 1.0, hi = 2.0;
        auto total = [&](double phi) {
            if (std::abs(phi - 1.0) < 1e-13) return static_cast<double>(m);
            return (std::pow(phi, m) - 1.0) / (phi - 1.0);
        };
        while (total(hi) < target) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (total(mid) < target ? lo : hi) = mid;
        }
        const double phi = 0.5 * (lo + hi);
        std::vector<double> radii(nodes);
        radii[0] = 0.0;
        double h = Rmax * first_frac;
        for (int i = 1; i < nodes; ++i) {
            radii[i] = radii[i - 1] + h;
            h *= phi;
        }
        radii.back() = Rmax;
        return RadialMesh(dim, std::move(radii));
    }

    int nodes() const { return static_cast<int>(r.size()); }
    double rmax() const { return r.back(); }

    bool same_as(const RadialMesh& o) const { return dim == o.dim && r == o.r; }

    size_t interval_of(double s) const {
        // index i with r[i] <= s < r[i+1]
        auto it = std::upper_bound(r.begin(), r.end(), s);
        size_t i = static_cast<size_t>(it - r.begin());
        if (i == 0) return 0;
        if (i >= r.size()) return r.size() - 2;
        return i - 1;
    }
};

/// Nonnegative radial function sampled on a RadialMesh at a fixed time.
struct RadialField {
    RadialMesh mesh;
    std::vector<double> values;
    double time = 0.0;

    RadialField() = default;

    RadialField(RadialMesh m, std::vector<double> vals, double t = 0.0)
        : mesh(std::move(m)), values(std::move(vals)), time(t) {
        if (values.size() != mesh.r.size())
            throw std::invalid_argument("RadialField: values/mesh size mismatch");
        for (double v : values)
            if (!(v >= 0.0)) throw std::invalid_argument("RadialField: values must be nonnegative");
        if (!(time >= 0.0)) throw std::invalid_argument("RadialField: time must be >= 0");
    }

    static RadialField constant(const RadialMesh& m, double level, double t = 0.0) {
        return RadialField(m, std::vector<double>(m.r.size(), level), t);
    }

    double sup_norm() const {
        double s = 0.0;
        for (double v : values) s = std::max(s, v);
        return s;
    }
};

namespace detail {
/// Weights of the cubic Lagrange interpolant through nodes {j0..j0+3} at s.
struct CubicStencil {
    size_t j0 = 0;
    double w[4] = {0, 0, 0, 0};
};

inline CubicStencil cubic_stencil(const RadialMesh& mesh, double s) {
    const auto& r = mesh.r;
    const size_t n = r.size();
    size_t i = mesh.interval_of(s);
    size_t j0 = (i == 0) ? 0 : i - 1;
    if (j0 + 3 >= n) j0 = n - 4;
    CubicStencil st;
    st.j0 = j0;
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            w *= (s - r[j0 + b]) / (r[j0 + a] - r[j0 + b]);
        }
        st.w[a] = w;
    }
    return st;
}
} // namespace detail

/// Piecewise-cubic evaluation of the field at radius s; values beyond Rmax
/// take the boundary value (constant tail). Clamped at 0 so interpolation
/// undershoot cannot produce negative densities.
inline double field_value(const RadialField& f, double s) {
    if (s >= f.mesh.rmax()) return f.values.back();
    if (s <= 0.0) return f.values.front();
    auto st = detail::cubic_stencil(f.mesh, s);
    double v = 0.0;
    for (int a = 0; a < 4; ++a) v += st.w[a] * f.values[st.j0 + a];
    return std::max(v, 0.0);
}

/// omega_{N-1} * int_0^rho f(r) r^{N-1} dr over the mesh reconstruction,
/// i.e. the integral of the field over the ball B(0, rho).
inline double ball_integral(const RadialField& f, double rho) {
    const int N = f.mesh.dim;
    const double area = unit_sphere_area(N);
    rho = std::min(rho, f.mesh.rmax());
    double acc = 0.0;
    const auto& r = f.mesh.r;
    for (size_t i = 0; i + 1 < r.size() && r[i] < rho; ++i) {
        double hi = std::min(r[i + 1], rho);
        acc += gl_panel([&](double s) { return field_value(f, s) * std::pow(s, N - 1); }, r[i], hi, 8);
    }
    return area * acc;
}

} // namespace ptl
