#pragma once

#include "ptl/mesh.hpp"
#include "ptl/parallel.hpp"
#include "ptl/quadrature.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace ptl {

/// Gauss kernel G(x,t) = (4 pi t)^{-N/2} exp(-|x|^2 / (4t)) at radius r.
inline double gauss_kernel(double r, double t, int N) {
    if (!(t > 0.0)) throw std::invalid_argument("gauss_kernel: t must be positive");
    return std::pow(4.0 * M_PI * t, -0.5 * N) * std::exp(-r * r / (4.0 * t));
}

namespace detail {

/// Exponentially scaled modified Bessel function e^{-z} I_0(z), z >= 0.
/// Power series for moderate z (all-positive terms, no cancellation),
/// asymptotic expansion beyond.
inline double bessel_i0_scaled(double z) {
    if (z < 0.0) throw std::invalid_argument("bessel_i0_scaled: z must be >= 0");
    if (z <= 600.0) {
        double term = 1.0, sum = 1.0;
        const double q = 0.25 * z * z;
        for (int k = 1; k < 800; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return sum * std::exp(-z);
    }
    // I_0(z) ~ e^z (2 pi z)^{-1/2} sum_k c_k z^{-k}, c_k = prod (2j-1)^2 / (k! 8^k)
    double sum = 1.0, c = 1.0;
    for (int k = 1; k <= 10; ++k) {
        c *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k);
        sum += c / std::pow(z, k);
    }
    return sum / std::sqrt(2.0 * M_PI * z);
}

} // namespace detail

/// Spherical average of the Gauss kernel: for |x| = r,
///   ring_kernel(r,s,t) = int_{S^{N-1}} G(x - s*w, t) dsigma(w),
/// so that [S(t)f](r) = int_0^inf f(s) ring_kernel(r,s,t) s^{N-1} ds for a
/// radial f. Supported dimensions: 1, 2, 3. All branches are evaluated in
/// exponentially scaled form, stable for r*s >> t.
inline double ring_kernel(double r, double s, double t, int N) {
    if (!(t > 0.0)) throw std::invalid_argument("ring_kernel: t must be positive");
    const double d2 = (r - s) * (r - s);
    switch (N) {
        case 1:
            return gauss_kernel(r - s, t, 1) + gauss_kernel(r + s, t, 1);
        case 2: {
            const double z = r * s / (2.0 * t);
            return (0.5 / t) * detail::bessel_i0_scaled(z) * std::exp(-d2 / (4.0 * t));
        }
        case 3: {
            const double z = r * s / (2.0 * t);
            const double shfac = (z < 1e-12) ? 1.0 : -std::expm1(-2.0 * z) / (2.0 * z);
            return std::pow(4.0 * M_PI * t, -1.5) * 4.0 * M_PI * shfac * std::exp(-d2 / (4.0 * t));
        }
        default:
            throw std::invalid_argument("ring_kernel: only N in {1,2,3} is supported");
    }
}

/// int_{R^N} G(x,t) dx by radial quadrature (should be 1).
inline double gauss_mass_radial(double t, int N, int panels = 96, int order = 16) {
    const double rmax = std::sqrt(4.0 * t * 60.0);
    return unit_sphere_area(N) *
           gl_uniform([&](double r) { return gauss_kernel(r, t, N) * std::pow(r, N - 1); }, 0.0,
                      rmax, panels, order);
}

namespace detail {

constexpr int kPropagatorGL = 12;

/// Width of the window around the target radius outside which the kernel is
/// negligible (exp(-K^2) with K = 7.5 is ~ 4e-25).
inline double kernel_window(double t) { return 7.5 * std::sqrt(4.0 * t); }

} // namespace detail

/// Value of [S(t) f](r_target) for the radial field f (constant tail beyond
/// Rmax handled analytically, so spatially constant fields are reproduced
/// exactly).
inline double convolve_at(const RadialField& f, double t, double r_target) {
    const int N = f.mesh.dim;
    const double tail = f.values.back();
    const double window = detail::kernel_window(t);
    const double lo = std::max(0.0, r_target - window);
    const double hi = std::min(f.mesh.rmax(), r_target + window);
    double inside = 0.0; // integral of f * kernel over [lo, hi]
    double kmass = 0.0;  // integral of kernel alone over [lo, hi]
    const auto& r = f.mesh.r;
    const auto& rule = GaussLegendre::cached(detail::kPropagatorGL);
    for (size_t i = 0; i + 1 < r.size(); ++i) {
        if (r[i + 1] <= lo || r[i] >= hi) continue;
        const double a = std::max(r[i], lo);
        const double b = std::min(r[i + 1], hi);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (size_t k = 0; k < rule.x.size(); ++k) {
            const double s = mid + half * rule.x[k];
            const double kern =
                rule.w[k] * half * ring_kernel(r_target, s, t, N) * std::pow(s, N - 1);
            kmass += kern;
            inside += kern * field_value(f, s);
        }
    }
    // Everything outside [lo, hi] is either beyond the window (where the
    // kernel mass is negligible) or beyond Rmax (where f equals the tail
    // value); both contribute tail * (1 - kmass).
    return std::max(0.0, inside + tail * (1.0 - kmass));
}

/// Dense realization of S(t) on a fixed mesh: row i holds quadrature weights
/// mapping node values to [S(t) f](r_i). Rows whose local spacing cannot
/// resolve the kernel width fall back to identity (S(t) ~ I there).
class HeatPropagator {
  public:
    HeatPropagator(const RadialMesh& mesh, double t) : mesh_(mesh), t_(t) {
        if (!(t > 0.0)) throw std::invalid_argument("HeatPropagator: t must be positive");
        build();
    }

    const RadialMesh& mesh() const { return mesh_; }
    double time() const { return t_; }

    std::vector<double> apply(const std::vector<double>& v) const {
        const size_t n = mesh_.r.size();
        if (v.size() != n) throw std::invalid_argument("HeatPropagator: size mismatch");
        std::vector<double> out(n, 0.0);
        const double tail = v.back();
        for (size_t i = 0; i < n; ++i) {
            const Row& row = rows_[i];
            double acc = tail * row.tail_weight;
            for (size_t k = 0; k < row.idx.size(); ++k) acc += row.w[k] * v[row.idx[k]];
            out[i] = std::max(acc, 0.0);
        }
        return out;
    }

    RadialField apply(const RadialField& f) const {
        return RadialField(mesh_, apply(f.values), f.time);
    }

    /// Composition with another propagator on the same mesh (matrix product);
    /// used to assemble sub-step powers once per solve.
    HeatPropagator compose(const HeatPropagator& inner) const {
        if (!mesh_.same_as(inner.mesh_)) throw std::invalid_argument("HeatPropagator: mesh mismatch");
        const size_t n = mesh_.r.size();
        // densify inner
        std::vector<double> dense(n * n, 0.0);
        std::vector<double> tailw(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            for (size_t k = 0; k < inner.rows_[i].idx.size(); ++k)
                dense[i * n + inner.rows_[i].idx[k]] += inner.rows_[i].w[k];
            tailw[i] = inner.rows_[i].tail_weight;
        }
        HeatPropagator out(mesh_, t_ + inner.t_, private_tag{});
        out.rows_.assign(n, Row{});
        parallel_for(static_cast<int>(n), [&](int ii) {
            const size_t i = static_cast<size_t>(ii);
            std::vector<double> acc(n, 0.0);
            // constant tail is a fixed point of both factors, so tail
            // weights compose additively through the inner rows
            double tw = rows_[i].tail_weight;
            for (size_t k = 0; k < rows_[i].idx.size(); ++k) {
                const size_t j = rows_[i].idx[k];
                const double wij = rows_[i].w[k];
                for (size_t l = 0; l < n; ++l) acc[l] += wij * dense[j * n + l];
                tw += wij * tailw[j];
            }
            Row row;
            for (size_t l = 0; l < n; ++l)
                if (acc[l] != 0.0) {
                    row.idx.push_back(l);
                    row.w.push_back(acc[l]);
                }
            row.tail_weight = tw;
            out.rows_[i] = std::move(row);
        });
        return out;
    }

  private:
    struct Row {
        std::vector<size_t> idx;
        std::vector<double> w;
        double tail_weight = 0.0;
    };
    struct private_tag {};

    HeatPropagator(const RadialMesh& mesh, double t, private_tag) : mesh_(mesh), t_(t) {}

    void build() {
        const size_t n = mesh_.r.size();
        const int N = mesh_.dim;
        const auto& r = mesh_.r;
        rows_.assign(n, Row{});
        const double window = detail::kernel_window(t_);
        const double width = std::sqrt(4.0 * t_);
        parallel_for(static_cast<int>(n), [&](int ii) {
            const size_t i = static_cast<size_t>(ii);
            const double ri = r[i];
            double hloc = 0.0;
            if (i > 0) hloc = std::max(hloc, r[i] - r[i - 1]);
            if (i + 1 < n) hloc = std::max(hloc, r[i + 1] - r[i]);
            if (width < 0.35 * hloc) {
                // kernel narrower than the local mesh: keep the value
                rows_[i].idx = {i};
                rows_[i].w = {1.0};
                rows_[i].tail_weight = 0.0;
                return;
            }
            const double lo = std::max(0.0, ri - window);
            const double hi = std::min(mesh_.rmax(), ri + window);
            std::vector<double> wrow(n, 0.0);
            double ksum = 0.0;
            const auto& rule = GaussLegendre::cached(detail::kPropagatorGL);
            for (size_t j = 0; j + 1 < n; ++j) {
                if (r[j + 1] <= lo || r[j] >= hi) continue;
                const double a = std::max(r[j], lo);
                const double b = std::min(r[j + 1], hi);
                const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
                for (size_t qk = 0; qk < rule.x.size(); ++qk) {
                    const double s = mid + half * rule.x[qk];
                    const double wq = rule.w[qk] * half * ring_kernel(ri, s, t_, N) *
                                      std::pow(s, N - 1);
                    ksum += wq;
                    auto st = detail::cubic_stencil(mesh_, s);
                    for (int a4 = 0; a4 < 4; ++a4) wrow[st.j0 + a4] += wq * st.w[a4];
                }
            }
            Row row;
            for (size_t j = 0; j < n; ++j)
                if (wrow[j] != 0.0) {
                    row.idx.push_back(j);
                    row.w.push_back(wrow[j]);
                }
            row.tail_weight = 1.0 - ksum;
            rows_[i] = std::move(row);
        });
    }

    RadialMesh mesh_;
    double t_;
    std::vector<Row> rows_;
};

class domain_too_small_error : public std::runtime_error {
  public:
    domain_too_small_error(double loss, double tol, const std::string& what_indicator =
                                                        "truncation-loss estimate")
        : std::runtime_error("domain too small: " + what_indicator + " " + std::to_string(loss) +
                             " exceeds tolerance " + std::to_string(tol)),
          loss_(loss) {}
    double loss() const { return loss_; }

  private:
    double loss_ = 0.0;
};

struct PropagateOptions {
    double trunc_tol = 1e-4; ///< relative truncation-loss estimate that aborts
    bool check_truncation = true;
};

/// Discrete action of S(Dcoef * dt) on the field. Mass-conserving up to
/// domain truncation, nonnegativity-preserving, exact on spatially constant
/// fields. Throws domain_too_small_error when the estimated mass fraction
/// lost past Rmax exceeds opts.trunc_tol.
inline RadialField propagate(const RadialField& field, double dt, double Dcoef,
                             const PropagateOptions& opts = {}) {
    if (!(dt > 0.0)) throw std::invalid_argument("propagate: dt must be positive");
    if (!(Dcoef > 0.0)) throw std::invalid_argument("propagate: diffusion coefficient must be positive");
    const double tk = Dcoef * dt;
    HeatPropagator P(field.mesh, tk);
    RadialField out = P.apply(field);
    out.time = field.time + dt;
    if (opts.check_truncation) {
        const double tail = field.values.back();
        double mass_before = ball_integral(field, field.mesh.rmax());
        double mass_after = ball_integral(out, out.mesh.rmax());
        const double tail_mass = tail * unit_ball_volume(field.mesh.dim) *
                                 std::pow(field.mesh.rmax(), field.mesh.dim);
        const double g_before = mass_before - tail_mass;
        const double g_after = mass_after - tail_mass;
        // below the quadrature noise floor there is nothing to lose
        const double floor = 1e-9 * (std::abs(mass_before) + std::abs(tail_mass)) + 1e-300;
        if (g_before > floor) {
            const double loss = std::max(0.0, (g_before - g_after) / g_before);
            if (loss > opts.trunc_tol) throw domain_too_small_error(loss, opts.trunc_tol);
        }
    }
    return out;
}

/// --- pointwise kernel inequalities -------------------------------------

struct MarginReport {
    double worst_margin = 0.0; ///< min over samples of (dominant - dominated)
    double tolerance = 0.0;
    bool passed = false;
};

/// Jensen smoothing check: S(t)f <= (S(t) f^alpha)^{1/alpha} pointwise for
/// alpha >= 1 (convexity of z -> z^alpha against the kernel's unit mass).
inline MarginReport jensen_check(const RadialField& field, double t, double alpha,
                                 const std::vector<double>& sample_radii, double tol = 1e-9) {
    if (!(alpha >= 1.0)) throw std::invalid_argument("jensen_check: alpha must be >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("jensen_check: t must be positive");
    RadialField powed = field;
    for (auto& v : powed.values) v = std::pow(v, alpha);
    MarginReport rep;
    rep.tolerance = tol;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (double r : sample_radii) {
        const double lhs = convolve_at(field, t, r);
        const double rhs = std::pow(convolve_at(powed, t, r), 1.0 / alpha);
        rep.worst_margin = std::min(rep.worst_margin, rhs - lhs);
    }
    rep.passed = rep.worst_margin >= -tol;
    return rep;
}

/// Ball-restricted kernel mass bound: for t >= rho^2,
///   int_{B(0,rho)} G(x-y,t) mu(y) dy >= 2^{-N/2} e^{-1/2} G(x,t/2) mu(B(0,rho)).
/// The constant comes from |x-y|^2 <= 2(|x|^2 + |y|^2) and |y| <= rho <= sqrt(t).
inline double ball_restriction_constant(int N) {
    return std::pow(2.0, -0.5 * N) * std::exp(-0.5);
}

inline MarginReport kernel_lower_bound_check(double rho, double t, const RadialField& mu,
                                             const std::vector<double>& x_samples,
                                             double tol = 1e-9) {
    if (!(rho > 0.0)) throw std::invalid_argument("kernel_lower_bound_check: rho must be positive");
    if (!(t >= rho * rho * (1.0 - 1e-12)))
        throw std::invalid_argument("kernel_lower_bound_check: need t >= rho^2");
    const int N = mu.mesh.dim;
    const double mass = ball_integral(mu, rho);
    const double cst = ball_restriction_constant(N);
    MarginReport rep;
    rep.tolerance = tol;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (double x : x_samples) {
        double lhs = 0.0;
        const auto& r = mu.mesh.r;
        for (size_t i = 0; i + 1 < r.size() && r[i] < rho; ++i) {
            const double b = std::min(r[i + 1], rho);
            lhs += gl_panel(
                [&](double s) {
                    return field_value(mu, s) * ring_kernel(x, s, t, N) * std::pow(s, N - 1);
                },
                r[i], b, detail::kPropagatorGL);
        }
        const double rhs = cst * gauss_kernel(x, 0.5 * t, N) * mass;
        rep.worst_margin = std::min(rep.worst_margin, lhs - rhs);
    }
    rep.passed = rep.worst_margin >= -tol;
    return rep;
}

/// Both sides of the Gaussian-power convolution bound: for 0 < s < t,
///   lhs = int G(x-y,t-s) G(y,(s+L)/alpha)^beta dy
///       = (4pi/alpha)^{-N(beta-1)/2} beta^{-N/2} (s+L)^{-N(beta-1)/2}
///         * G(x, t-s+(s+L)/(alpha beta))       (exact),
///   rhs = same prefactor * (min{alpha beta,1}/max{alpha beta,1})^{N/2}
///         * G(x, (t+L)/max{alpha beta,1}),
/// and lhs >= rhs always, with equality when alpha*beta = 1.
struct BoundPair {
    double lhs = 0.0;
    double rhs = 0.0;
};

inline BoundPair gaussian_power_convolution_bound(int N, double alpha, double beta, double L,
                                                  double r, double s, double t) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("need alpha, beta > 0");
    if (!(L >= 0.0)) throw std::invalid_argument("need L >= 0");
    if (!(0.0 < s && s < t)) throw std::invalid_argument("need 0 < s < t");
    const double pref = std::pow(4.0 * M_PI / alpha, -0.5 * N * (beta - 1.0)) *
                        std::pow(beta, -0.5 * N) * std::pow(s + L, -0.5 * N * (beta - 1.0));
    const double ab = alpha * beta;
    BoundPair out;
    out.lhs = pref * gauss_kernel(r, t - s + (s + L) / ab, N);
    out.rhs = pref * std::pow(std::min(ab, 1.0) / std::max(ab, 1.0), 0.5 * N) *
              gauss_kernel(r, (t + L) / std::max(ab, 1.0), N);
    return out;
}

/// --- finite ball covers --------------------------------------------------

/// Finite set of unit-ball centers covering B(0,k): lattice of spacing
/// 2/sqrt(N) restricted to B(0,k+1). Any point of B(0,k) is within distance
/// 1 of its nearest lattice point, and that lattice point lies in B(0,k+1).
struct CoverPlan {
    double k = 1.0;
    int dim = 1;
    std::vector<std::vector<double>> centers;

    int m() const { return static_cast<int>(centers.size()); }

    /// Every sampled point of B(0,k) (sphere + random interior) must be
    /// within distance 1 of some center.
    bool verify(int sphere_samples = 2000, int interior_samples = 500,
                unsigned seed = 12345) const {
        std::mt19937 rng(seed);
        std::normal_distribution<double> gaussian(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        auto covered = [&](const std::vector<double>& x) {
            for (const auto& c : centers) {
                double d2 = 0.0;
                for (int j = 0; j < dim; ++j) d2 += (x[j] - c[j]) * (x[j] - c[j]);
                if (d2 <= 1.0 + 1e-12) return true;
            }
            return false;
        };
        std::vector<double> x(dim);
        for (int it = 0; it < sphere_samples + interior_samples; ++it) {
            double norm2 = 0.0;
            for (int j = 0; j < dim; ++j) {
                x[j] = gaussian(rng);
                norm2 += x[j] * x[j];
            }
            double scale;
            if (norm2 == 0.0) continue;
            if (it < sphere_samples) {
                scale = k / std::sqrt(norm2);
            } else {
                scale = k * std::pow(unif(rng), 1.0 / dim) / std::sqrt(norm2);
            }
            for (int j = 0; j < dim; ++j) x[j] *= scale;
            if (!covered(x)) return false;
        }
        return true;
    }
};

inline CoverPlan ball_cover(double k, int N) {
    if (!(k >= 1.0)) throw std::invalid_argument("ball_cover: k must be >= 1");
    if (N < 1 || N > 6) throw std::invalid_argument("ball_cover: dimension out of range");
    CoverPlan plan;
    plan.k = k;
    plan.dim = N;
    const double spacing = 2.0 / std::sqrt(static_cast<double>(N));
    const int imax = static_cast<int>(std::floor((k + 1.0) / spacing)) + 1;
    std::vector<int> idx(N, -imax);
    const double rad2 = (k + 1.0) * (k + 1.0);
    while (true) {
        double n2 = 0.0;
        for (int j = 0; j < N; ++j) n2 += (spacing * idx[j]) * (spacing * idx[j]);
        if (n2 <= rad2) {
            std::vector<double> c(N);
            for (int j = 0; j < N; ++j) c[j] = spacing * idx[j];
            plan.centers.push_back(std::move(c));
        }
        int j = 0;
        while (j < N && ++idx[j] > imax) idx[j++] = -imax;
        if (j == N) break;
    }
    return plan;
}

} // namespace ptl
