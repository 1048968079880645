#pragma once

#include "ptl/exponents.hpp"
#include "ptl/kernel.hpp"
#include "ptl/measures.hpp"
#include "ptl/mesh.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptl {

struct MeshSpec {
    double Rmax = 12.0;
    int nodes = 256;
    double first_frac = 1e-4; ///< first interval as a fraction of Rmax
};

/// Parameters of one Picard/time-stepping run.
struct SolveConfig {
    ExponentConfig cfg;
    double T = 1.0;
    int n_steps = 100;
    int n_sub = 2; ///< midpoint sub-steps per slab
    double picard_tol = 1e-8;
    int picard_max_iter = 80;
    double blowup_threshold = 1e8;
    double dt_min_frac = 1e-9;  ///< refinement floor as a fraction of T
    double growth_cap = 1.7;    ///< halve a slab whose sup grows faster than this
    /// abort when the spatial variation across the outer mesh band exceeds
    /// this fraction of the sup-norm (a front has reached the boundary and
    /// the constant-tail closure is no longer consistent)
    double boundary_tol = 1e-3;
    /// number of Duhamel-residual windows evaluated on the converged
    /// trajectory (0 = skip; the evaluation re-propagates stored fields)
    int duhamel_windows = 0;
    /// radius below which singular data are carried as an exact atom
    /// (non-positive = a few first cells); reported back in the SolveReport
    double core_radius = -1.0;
    MeshSpec mesh;
    std::vector<double> mass_radii = {0.5};

    void validate() const {
        if (!(T > 0.0)) throw std::invalid_argument("SolveConfig: T must be positive");
        if (n_steps < 1) throw std::invalid_argument("SolveConfig: n_steps must be >= 1");
        if (n_sub < 1) throw std::invalid_argument("SolveConfig: n_sub must be >= 1");
        if (!(picard_tol > 0.0)) throw std::invalid_argument("SolveConfig: picard_tol must be positive");
        if (!(blowup_threshold > 0.0))
            throw std::invalid_argument("SolveConfig: blowup_threshold must be positive");
    }
};

enum class Outcome { Converged, BlowupDetected, PicardDiverged };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Converged: return "Converged";
        case Outcome::BlowupDetected: return "BlowupDetected";
        case Outcome::PicardDiverged: return "PicardDiverged";
    }
    return "?";
}

struct StepRecord {
    double t = 0.0;
    double sup_u = 0.0;
    double sup_v = 0.0;
    std::vector<double> mass_u; ///< ball masses at SolveConfig::mass_radii
    std::vector<double> mass_v;
    int picard_iters = 0;
    double boundary_frac = 0.0; ///< max boundary value over sup norm
};

/// Windowed Duhamel-identity residual recorded on the finished trajectory.
struct DuhamelRecord {
    double tau = 0.0;
    double t = 0.0;
    double res_u = 0.0;
    double res_v = 0.0;
};

struct SolveReport {
    Outcome outcome = Outcome::Converged;
    double t_blowup = -1.0;
    int diverged_step = -1;
    std::vector<StepRecord> history;
    std::vector<DuhamelRecord> duhamel;
    double core_radius_u = 0.0; ///< atomized-core radii actually used (0 = none)
    double core_radius_v = 0.0;
    std::string note;

    double max_boundary_frac() const {
        double m = 0.0;
        for (const auto& rec : history) m = std::max(m, rec.boundary_frac);
        return m;
    }
};

/// The two components at a common mesh and time.
struct FieldPair {
    RadialField u;
    RadialField v;

    FieldPair(RadialField u_, RadialField v_) : u(std::move(u_)), v(std::move(v_)) {
        if (!u.mesh.same_as(v.mesh)) throw std::invalid_argument("FieldPair: mesh mismatch");
        if (u.time != v.time) throw std::invalid_argument("FieldPair: time mismatch");
    }
};

/// Stored trajectory: fields at every completed slab end (non-uniform once
/// blow-up refinement kicks in), plus the initial sampled fields when the
/// data are densities.
struct Trajectory {
    RadialMesh mesh;
    std::vector<double> times;
    std::vector<std::vector<double>> u;
    std::vector<std::vector<double>> v;

    RadialField field_u(size_t i) const { return RadialField(mesh, u.at(i), times.at(i)); }
    RadialField field_v(size_t i) const { return RadialField(mesh, v.at(i), times.at(i)); }
    FieldPair pair(size_t i) const { return FieldPair(field_u(i), field_v(i)); }
};

struct SolveResult {
    SolveReport report;
    Trajectory traj;
};

namespace detail {

inline double sup_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
        s = std::max(s, x);
    }
    return s;
}

inline std::vector<double> pow_source(const std::vector<double>& v, double expo) {
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = std::pow(v[i], expo);
    return out;
}

inline void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

/// Propagator pair (full sub-step and half sub-step) for one diffusion
/// coefficient, cached per kernel time so halved slabs reuse matrices.
class PropagatorCache {
  public:
    explicit PropagatorCache(const RadialMesh& mesh) : mesh_(mesh) {}

    const HeatPropagator& at(double kernel_time) {
        auto it = cache_.find(kernel_time);
        if (it == cache_.end())
            it = cache_.emplace(kernel_time, HeatPropagator(mesh_, kernel_time)).first;
        return it->second;
    }

  private:
    RadialMesh mesh_;
    std::map<double, HeatPropagator> cache_;
};

enum class SlabStatus { Converged, ThresholdCrossed, NoConvergence };

struct SlabOutcome {
    SlabStatus status = SlabStatus::Converged;
    std::vector<double> u_end, v_end;
    int iters = 0;
};

} // namespace detail

/// Sup-norm mismatch of the windowed Duhamel identity evaluated on a stored
/// trajectory between stored indices tau_index < t_index:
///   u(t) =? S(D1 (t-tau)) u(tau) + int_tau^t S(D1 (t-s)) v(s)^p ds,
/// the integral taken by the trapezoid rule on the stored time grid (a
/// different quadrature than the scheme's midpoint rule, so the residual
/// measures genuine scheme error, not an identity). Returned values are
/// relative to the sup-norms at time t.
inline std::pair<double, double> duhamel_residual(const Trajectory& traj,
                                                  const ExponentConfig& cfg, size_t tau_index,
                                                  size_t t_index) {
    if (tau_index >= t_index || t_index >= traj.times.size())
        throw std::out_of_range("duhamel_residual: need tau_index < t_index < steps");
    const double tau = traj.times[tau_index];
    const double t = traj.times[t_index];

    auto window = [&](const std::vector<std::vector<double>>& base,
                      const std::vector<std::vector<double>>& src_field, double Dcoef,
                      double expo) {
        RadialField start(traj.mesh, base[tau_index], tau);
        PropagateOptions opts;
        opts.check_truncation = false;
        std::vector<double> acc = propagate(start, t - tau, Dcoef, opts).values;
        for (size_t k = tau_index; k <= t_index; ++k) {
            double w;
            if (k == tau_index)
                w = 0.5 * (traj.times[k + 1] - traj.times[k]);
            else if (k == t_index)
                w = 0.5 * (traj.times[k] - traj.times[k - 1]);
            else
                w = 0.5 * (traj.times[k + 1] - traj.times[k - 1]);
            std::vector<double> s = detail::pow_source(src_field[k], expo);
            if (k < t_index) {
                RadialField fs(traj.mesh, s, traj.times[k]);
                s = propagate(fs, t - traj.times[k], Dcoef, opts).values;
            }
            detail::axpy(acc, w, s);
        }
        return acc;
    };

    auto rel_residual = [&](const std::vector<double>& got, const std::vector<double>& want) {
        double diff = 0.0, scale = 0.0;
        for (size_t i = 0; i < got.size(); ++i) {
            diff = std::max(diff, std::abs(got[i] - want[i]));
            scale = std::max(scale, std::abs(want[i]));
        }
        return scale > 0.0 ? diff / scale : diff;
    };

    std::vector<double> rhs_u = window(traj.u, traj.v, cfg.D1, cfg.p);
    std::vector<double> rhs_v = window(traj.v, traj.u, cfg.D2, cfg.q);
    return {rel_residual(rhs_u, traj.u[t_index]), rel_residual(rhs_v, traj.v[t_index])};
}

/// Constructs the mild solution with data (mu, nu) by slab-wise Picard
/// iteration of the Duhamel map: exact diffusion via kernel-quadrature
/// propagators, midpoint quadrature of the source integral on sub-steps,
/// iterates started from the heat-flow lower solution (monotone increasing,
/// which also covers non-Lipschitz sources with p < 1). Slabs where the
/// iteration exceeds the blow-up threshold are halved down to a floor,
/// refining the crossing time.
inline SolveResult picard_solve(const RadialMeasure& mu, const RadialMeasure& nu,
                                const SolveConfig& sc) {
    sc.validate();
    const ExponentConfig& cfg = sc.cfg;
    if (mu.dim != cfg.N || nu.dim != cfg.N)
        throw std::invalid_argument("picard_solve: measure dimension mismatch");
    if (cfg.N > 3)
        throw std::invalid_argument(
            "picard_solve: the radial machinery supports N in {1,2,3}; higher dimensions are "
            "classification-only");
    const RadialMesh mesh = RadialMesh::graded(cfg.N, sc.mesh.Rmax, sc.mesh.nodes, sc.mesh.first_frac);
    const size_t M = mesh.r.size();

    detail::PropagatorCache cache(mesh);

    // Initial measures split into an exact atom at the origin (Dirac data
    // and the unresolved core of singular densities) plus a resolved
    // sampled part. The atom is propagated analytically on the first slab.
    const CoreSplit seed_u = core_split(mu, mesh, sc.core_radius);
    const CoreSplit seed_v = core_split(nu, mesh, sc.core_radius);
    auto check_resolution = [&](const RadialMeasure& m, const CoreSplit& seed) {
        if (seed.field.empty()) return;
        const double rho_chk =
            std::min(std::max(50.0 * mesh.r[1], 4.0 * seed.core_radius), 0.5 * mesh.rmax());
        const double want = ball_mass(m, rho_chk);
        if (want > 1e-300) {
            const double got =
                seed.atom + ball_integral(RadialField(mesh, seed.field, 0.0), rho_chk);
            if (std::abs(got - want) > 0.02 * want)
                throw std::invalid_argument(
                    "picard_solve: mesh does not resolve the data (sampled mass off by more "
                    "than 2%); refine first_frac or nodes");
        }
    };
    check_resolution(mu, seed_u);
    check_resolution(nu, seed_v);

    auto hom_from_seed = [&](const CoreSplit& seed, double t, double Dcoef) {
        std::vector<double> out =
            seed.field.empty() ? std::vector<double>(M, 0.0) : cache.at(Dcoef * t).apply(seed.field);
        if (seed.atom > 0.0)
            for (size_t i = 0; i < M; ++i)
                out[i] += seed.atom * gauss_kernel(mesh.r[i], Dcoef * t, cfg.N);
        return out;
    };

    const double init_sup_u = seed_u.field.empty() ? 0.0 : detail::sup_of(seed_u.field);
    const double init_sup_v = seed_v.field.empty() ? 0.0 : detail::sup_of(seed_v.field);
    if (std::max(init_sup_u, init_sup_v) >= sc.blowup_threshold)
        throw std::invalid_argument(
            "picard_solve: blowup_threshold must exceed the initial (resolved) sup-norms");

    SolveResult res;
    res.traj.mesh = mesh;
    res.report.core_radius_u = seed_u.core_radius;
    res.report.core_radius_v = seed_v.core_radius;

    size_t i_band = M - 2; // first node at >= 0.85 Rmax
    while (i_band > 0 && mesh.r[i_band - 1] >= 0.85 * mesh.rmax()) --i_band;

    auto record = [&](double t, const std::vector<double>& u, const std::vector<double>& v,
                      int iters) {
        StepRecord rec;
        rec.t = t;
        rec.sup_u = detail::sup_of(u);
        rec.sup_v = detail::sup_of(v);
        RadialField fu(mesh, u, t), fv(mesh, v, t);
        for (double rho : sc.mass_radii) {
            rec.mass_u.push_back(ball_integral(fu, rho));
            rec.mass_v.push_back(ball_integral(fv, rho));
        }
        rec.picard_iters = iters;
        const double supmax = std::max({rec.sup_u, rec.sup_v, 1e-300});
        rec.boundary_frac = std::max(std::abs(u.back() - u[i_band]),
                                     std::abs(v.back() - v[i_band])) /
                            supmax;
        res.report.history.push_back(rec);
        res.traj.times.push_back(t);
        res.traj.u.push_back(u);
        res.traj.v.push_back(v);
    };

    // One Picard slab of the given length. first_slab = measures are the base data.
    auto run_slab = [&](const std::vector<double>& u_start, const std::vector<double>& v_start,
                        double len, bool first_slab) {
        detail::SlabOutcome out;
        const int nsub = sc.n_sub;
        const double h = len / nsub;
        const HeatPropagator& P1h = cache.at(cfg.D1 * 0.5 * h);
        const HeatPropagator& P2h = cache.at(cfg.D2 * 0.5 * h);
        const HeatPropagator* P1 = nullptr;
        const HeatPropagator* P2 = nullptr;
        if (nsub > 1) {
            P1 = &cache.at(cfg.D1 * h);
            P2 = &cache.at(cfg.D2 * h);
        }

        // homogeneous part at the first midpoint
        std::vector<double> hom_u1, hom_v1;
        if (first_slab) {
            hom_u1 = hom_from_seed(seed_u, 0.5 * h, cfg.D1);
            hom_v1 = hom_from_seed(seed_v, 0.5 * h, cfg.D2);
        } else {
            hom_u1 = P1h.apply(u_start);
            hom_v1 = P2h.apply(v_start);
        }

        // heat-flow lower iterate
        std::vector<std::vector<double>> u_mid(nsub), v_mid(nsub);
        u_mid[0] = hom_u1;
        v_mid[0] = hom_v1;
        for (int j = 1; j < nsub; ++j) {
            u_mid[j] = P1->apply(u_mid[j - 1]);
            v_mid[j] = P2->apply(v_mid[j - 1]);
        }

        auto sup_mid = [&]() {
            double s = 0.0;
            for (int j = 0; j < nsub; ++j)
                s = std::max({s, detail::sup_of(u_mid[j]), detail::sup_of(v_mid[j])});
            return s;
        };

        for (int it = 1; it <= sc.picard_max_iter; ++it) {
            // u update from v_mid, v update from u_mid (previous iterate)
            std::vector<std::vector<double>> u_new(nsub), v_new(nsub);
            for (int j = 0; j < nsub; ++j) {
                if (j == 0) {
                    u_new[0] = hom_u1;
                    detail::axpy(u_new[0], 0.5 * h, detail::pow_source(v_mid[0], cfg.p));
                    v_new[0] = hom_v1;
                    detail::axpy(v_new[0], 0.5 * h, detail::pow_source(u_mid[0], cfg.q));
                } else {
                    std::vector<double> carry_u = u_new[j - 1];
                    detail::axpy(carry_u, 0.5 * h, detail::pow_source(v_mid[j - 1], cfg.p));
                    u_new[j] = P1->apply(carry_u);
                    detail::axpy(u_new[j], 0.5 * h, detail::pow_source(v_mid[j], cfg.p));

                    std::vector<double> carry_v = v_new[j - 1];
                    detail::axpy(carry_v, 0.5 * h, detail::pow_source(u_mid[j - 1], cfg.q));
                    v_new[j] = P2->apply(carry_v);
                    detail::axpy(v_new[j], 0.5 * h, detail::pow_source(u_mid[j], cfg.q));
                }
            }
            double change = 0.0, scale = 1e-300;
            for (int j = 0; j < nsub; ++j) {
                for (size_t i = 0; i < M; ++i) {
                    change = std::max({change, std::abs(u_new[j][i] - u_mid[j][i]),
                                       std::abs(v_new[j][i] - v_mid[j][i])});
                    scale = std::max({scale, u_new[j][i], v_new[j][i]});
                }
            }
            u_mid.swap(u_new);
            v_mid.swap(v_new);
            out.iters = it;
            if (!std::isfinite(scale) || sup_mid() > sc.blowup_threshold) {
                out.status = detail::SlabStatus::ThresholdCrossed;
                return out;
            }
            if (change <= sc.picard_tol * scale) {
                out.status = detail::SlabStatus::Converged;
                break;
            }
            if (it == sc.picard_max_iter) {
                out.status = detail::SlabStatus::NoConvergence;
                return out;
            }
        }

        // end-of-slab values
        std::vector<double> carry_u = u_mid[nsub - 1];
        detail::axpy(carry_u, 0.5 * h, detail::pow_source(v_mid[nsub - 1], cfg.p));
        out.u_end = P1h.apply(carry_u);
        std::vector<double> carry_v = v_mid[nsub - 1];
        detail::axpy(carry_v, 0.5 * h, detail::pow_source(u_mid[nsub - 1], cfg.q));
        out.v_end = P2h.apply(carry_v);
        if (std::max(detail::sup_of(out.u_end), detail::sup_of(out.v_end)) > sc.blowup_threshold)
            out.status = detail::SlabStatus::ThresholdCrossed;
        return out;
    };

    const double dt0 = sc.T / sc.n_steps;
    const double dt_min = sc.T * sc.dt_min_frac;

    std::vector<double> u_cur = seed_u.field, v_cur = seed_v.field;
    double t_cur = 0.0;
    bool first = true;
    int macro_step = 0;
    if (seed_u.atom == 0.0 && seed_v.atom == 0.0 && !u_cur.empty() && !v_cur.empty())
        record(0.0, u_cur, v_cur, 0);

    // Advances one slab, recursively halving on threshold crossings,
    // non-convergence, or over-fast growth. Returns false when the run
    // terminated (blow-up or divergence), with the report filled in.
    std::function<bool(double)> advance = [&](double len) -> bool {
        const std::vector<double>& us = u_cur;
        const std::vector<double>& vs = v_cur;
        auto out = run_slab(us, vs, len, first);
        const bool can_split = len > dt_min;
        if (out.status == detail::SlabStatus::Converged) {
            // Growth is measured against the homogeneous evolution. On later
            // slabs diffusion contracts the sup-norm, so the slab-start sup
            // serves; on the measure-seeded first slab the reference is the
            // sup of the heat flow itself (an atom's profile at t -> 0 has
            // no finite starting sup to compare against).
            double sup_before;
            if (first) {
                const double hu = detail::sup_of(hom_from_seed(seed_u, len, cfg.D1));
                const double hv = detail::sup_of(hom_from_seed(seed_v, len, cfg.D2));
                sup_before = std::max({hu, hv, 1.0});
            } else {
                sup_before = std::max({detail::sup_of(us), detail::sup_of(vs), 1.0});
            }
            const double sup_after = std::max(detail::sup_of(out.u_end), detail::sup_of(out.v_end));
            if (can_split && sup_after > sc.growth_cap * sup_before) {
                return advance(0.5 * len) && advance(0.5 * len);
            }
            u_cur = std::move(out.u_end);
            v_cur = std::move(out.v_end);
            t_cur += len;
            first = false;
            record(t_cur, u_cur, v_cur, out.iters);
            const double bfrac = res.report.history.back().boundary_frac;
            if (bfrac > sc.boundary_tol)
                throw domain_too_small_error(bfrac, sc.boundary_tol,
                                             "outer-band variation of the fields");
            return true;
        }
        if (can_split) return advance(0.5 * len) && advance(0.5 * len);
        if (out.status == detail::SlabStatus::ThresholdCrossed) {
            res.report.outcome = Outcome::BlowupDetected;
            res.report.t_blowup = t_cur + len;
            res.report.note = "sup-norm crossed blowup_threshold within the slab ending here";
        } else {
            res.report.outcome = Outcome::PicardDiverged;
            res.report.diverged_step = macro_step;
            res.report.note = "Picard iteration stalled below threshold at the refinement floor";
        }
        return false;
    };

    for (macro_step = 0; macro_step < sc.n_steps; ++macro_step) {
        if (!advance(dt0)) return res;
    }
    res.report.outcome = Outcome::Converged;

    if (sc.duhamel_windows > 0 && res.traj.times.size() >= 3) {
        // residuals on a thinned copy of the trajectory (the evaluation
        // re-propagates each stored field in the window)
        Trajectory thin;
        thin.mesh = res.traj.mesh;
        const size_t n = res.traj.times.size();
        const size_t stride = std::max<size_t>(1, n / 24);
        for (size_t i = 0; i < n; i += stride) {
            thin.times.push_back(res.traj.times[i]);
            thin.u.push_back(res.traj.u[i]);
            thin.v.push_back(res.traj.v[i]);
        }
        if (thin.times.back() != res.traj.times.back()) {
            thin.times.push_back(res.traj.times.back());
            thin.u.push_back(res.traj.u.back());
            thin.v.push_back(res.traj.v.back());
        }
        const size_t m = thin.times.size();
        for (int w = 0; w < sc.duhamel_windows; ++w) {
            const size_t tau_i = (w * m) / (2 * sc.duhamel_windows);
            const size_t t_i = m - 1 - tau_i;
            if (tau_i >= t_i) break;
            auto [ru, rv] = duhamel_residual(thin, sc.cfg, tau_i, t_i);
            res.report.duhamel.push_back({thin.times[tau_i], thin.times[t_i], ru, rv});
        }
    }
    return res;
}

/// Result of bisecting the family constant between a converged and a
/// blowing-up run at the configured horizon.
struct ProbeResult {
    bool conclusive = false;
    double c_lo = 0.0; ///< largest constant observed to converge
    double c_hi = 0.0; ///< smallest constant observed to blow up
    int runs = 0;
    std::string reason;

    double rel_width() const { return (c_hi - c_lo) / c_lo; }
};

/// Bisects the prefactor of the case's critical data family to an empirical
/// existence/nonexistence bracket at horizon sc.T, of relative width <= 5%.
/// Preconditions: the run must converge at c_lo and blow up (or diverge) at
/// c_hi; otherwise the probe reports inconclusive.
inline ProbeResult blowup_probe(CaseLabel label, const ExponentConfig& cfg, double c_lo,
                                double c_hi, const SolveConfig& sc, double rel_width = 0.05) {
    ProbeResult pr;
    if (!(c_lo > 0.0) || !(c_hi > c_lo)) {
        pr.reason = "need 0 < c_lo < c_hi";
        return pr;
    }
    auto converges = [&](double c) {
        auto family = critical_family(label, cfg, c, c);
        ++pr.runs;
        auto result = picard_solve(family.first, family.second, sc);
        return result.report.outcome == Outcome::Converged;
    };
    if (!converges(c_lo)) {
        pr.reason = "run at c_lo did not converge; bracket is degenerate";
        return pr;
    }
    if (converges(c_hi)) {
        pr.reason = "run at c_hi converged; bracket is degenerate";
        return pr;
    }
    while ((c_hi - c_lo) / c_lo > rel_width) {
        const double mid = std::sqrt(c_lo * c_hi);
        (converges(mid) ? c_lo : c_hi) = mid;
    }
    pr.conclusive = true;
    pr.c_lo = c_lo;
    pr.c_hi = c_hi;
    return pr;
}

} // namespace ptl
