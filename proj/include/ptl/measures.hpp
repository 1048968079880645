#pragma once

#include "ptl/exponents.hpp"
#include "ptl/mesh.hpp"
#include "ptl/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptl {

class non_integrable_error : public std::runtime_error {
  public:
    explicit non_integrable_error(const std::string& what) : std::runtime_error(what) {}
};

/// Positive function tabulated on increasing radii, interpolated log-log
/// (piecewise power law). Outside the tabulated range the endpoint values
/// extend as constants.
struct TabulatedFunction {
    std::vector<double> r;
    std::vector<double> h;

    TabulatedFunction() = default;
    TabulatedFunction(std::vector<double> radii, std::vector<double> values)
        : r(std::move(radii)), h(std::move(values)) {
        if (r.size() != h.size() || r.size() < 2)
            throw std::invalid_argument("TabulatedFunction: need >= 2 samples");
        for (size_t i = 0; i < r.size(); ++i) {
            if (!(r[i] > 0.0)) throw std::invalid_argument("TabulatedFunction: radii must be positive");
            if (i > 0 && !(r[i] > r[i - 1]))
                throw std::invalid_argument("TabulatedFunction: radii must increase");
            if (!(h[i] > 0.0)) throw std::invalid_argument("TabulatedFunction: values must be positive");
        }
    }

    double operator()(double s) const {
        if (s <= r.front()) return h.front();
        if (s >= r.back()) return h.back();
        auto it = std::upper_bound(r.begin(), r.end(), s);
        size_t i = static_cast<size_t>(it - r.begin()) - 1;
        const double w = (std::log(s) - std::log(r[i])) / (std::log(r[i + 1]) - std::log(r[i]));
        return std::exp((1.0 - w) * std::log(h[i]) + w * std::log(h[i + 1]));
    }

    /// Checks the side condition that s^{-eps} h(s) is nonincreasing on
    /// (0, delta) over the tabulated points.
    bool power_adjusted_nonincreasing(double eps, double delta) const {
        double prev = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < r.size(); ++i) {
            if (r[i] >= delta) break;
            const double v = std::pow(r[i], -eps) * h[i];
            if (v > prev * (1.0 + 1e-12)) return false;
            prev = v;
        }
        return true;
    }
};

/// Parametric radial initial datum on R^N with exact ball-mass evaluation.
/// The density lives on r <= cutoff and is extended beyond it by zero or by
/// its boundary value, declared per instance.
struct RadialMeasure {
    enum class Family { Dirac, Constant, PowerLaw, PowerLogLaw, ModulatedPower };
    enum class Extension { Zero, Boundary };

    int dim = 1;
    Family family = Family::Constant;
    double c = 0.0;      ///< atom mass / constant level / density prefactor
    double a = 0.0;      ///< power exponent of r^{-a}
    double logpow = 0.0; ///< exponent of |log r|^{-logpow} (PowerLogLaw)
    double cutoff = std::numeric_limits<double>::infinity();
    Extension extension = Extension::Zero;
    TabulatedFunction table; ///< modulating function (ModulatedPower)

    static RadialMeasure dirac(int N, double mass) {
        RadialMeasure m;
        m.dim = N;
        m.family = Family::Dirac;
        m.c = mass;
        m.check();
        return m;
    }

    static RadialMeasure constant(int N, double level) {
        RadialMeasure m;
        m.dim = N;
        m.family = Family::Constant;
        m.c = level;
        m.check();
        return m;
    }

    static RadialMeasure power_law(int N, double c, double a, double cutoff = 1.0,
                                   Extension ext = Extension::Zero) {
        RadialMeasure m;
        m.dim = N;
        m.family = Family::PowerLaw;
        m.c = c;
        m.a = a;
        m.cutoff = cutoff;
        m.extension = ext;
        m.check();
        return m;
    }

    static RadialMeasure power_log_law(int N, double c, double a, double logpow,
                                       double cutoff = std::exp(-1.0),
                                       Extension ext = Extension::Zero) {
        RadialMeasure m;
        m.dim = N;
        m.family = Family::PowerLogLaw;
        m.c = c;
        m.a = a;
        m.logpow = logpow;
        m.cutoff = cutoff;
        m.extension = ext;
        m.check();
        return m;
    }

    static RadialMeasure modulated_power(int N, double a, TabulatedFunction h, double cutoff = 1.0,
                                         Extension ext = Extension::Zero) {
        RadialMeasure m;
        m.dim = N;
        m.family = Family::ModulatedPower;
        m.c = 1.0;
        m.a = a;
        m.cutoff = cutoff;
        m.extension = ext;
        m.table = std::move(h);
        m.check();
        return m;
    }

    void check() const {
        if (dim < 1) throw std::invalid_argument("RadialMeasure: dim must be >= 1");
        if (!(c >= 0.0)) throw std::invalid_argument("RadialMeasure: prefactor must be >= 0");
        switch (family) {
            case Family::Dirac:
            case Family::Constant:
                break;
            case Family::PowerLaw:
                if (!(a < dim))
                    throw std::invalid_argument(
                        "PowerLaw density r^{-a} is locally integrable only for a < N");
                if (!(cutoff > 0.0)) throw std::invalid_argument("RadialMeasure: cutoff must be positive");
                break;
            case Family::PowerLogLaw:
                if (a > dim || (a == dim && !(logpow > 1.0)))
                    throw std::invalid_argument(
                        "PowerLogLaw r^{-a}|log r|^{-l} needs a < N, or a = N with l > 1");
                if (!(cutoff > 0.0) || cutoff > std::exp(-1.0) + 1e-15)
                    throw std::invalid_argument("PowerLogLaw: cutoff must lie in (0, 1/e]");
                break;
            case Family::ModulatedPower:
                if (!(cutoff > 0.0)) throw std::invalid_argument("RadialMeasure: cutoff must be positive");
                break;
        }
    }

    bool is_atom() const { return family == Family::Dirac; }

    /// True when the density blows up at the origin (the solver then splits
    /// off the unresolved core as an exact atom).
    bool singular_at_origin() const {
        switch (family) {
            case Family::Dirac: return true;
            case Family::Constant: return false;
            default: return a > 0.0;
        }
    }

    /// Density at radius r > 0 (not defined for Dirac).
    double density(double r) const {
        if (family == Family::Dirac)
            throw std::logic_error("RadialMeasure: a Dirac atom has no density");
        if (!(r > 0.0)) throw std::invalid_argument("RadialMeasure: density needs r > 0");
        if (r > cutoff)
            return extension == Extension::Zero ? 0.0 : density_core(cutoff);
        return density_core(r);
    }

    const char* family_name() const {
        switch (family) {
            case Family::Dirac: return "dirac";
            case Family::Constant: return "constant";
            case Family::PowerLaw: return "powerlaw";
            case Family::PowerLogLaw: return "powerloglaw";
            case Family::ModulatedPower: return "modulatedpower";
        }
        return "?";
    }

  private:
    double density_core(double r) const {
        switch (family) {
            case Family::Constant:
                return c;
            case Family::PowerLaw:
                return c * std::pow(r, -a);
            case Family::PowerLogLaw:
                return c * std::pow(r, -a) * std::pow(-std::log(r), -logpow);
            case Family::ModulatedPower:
                return std::pow(r, -a) * table(r);
            default:
                return 0.0;
        }
    }

    friend double ball_mass(const RadialMeasure&, double);
};

/// mu(B(0, sigma)): exact closed form where available, adaptive log-graded
/// quadrature otherwise. Throws non_integrable_error when the per-decade
/// contributions fail to decay towards r = 0.
inline double ball_mass(const RadialMeasure& m, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("ball_mass: sigma must be positive");
    const int N = m.dim;
    const double area = unit_sphere_area(N);
    const double vol = unit_ball_volume(N);

    auto extension_part = [&](double from, double to) {
        if (to <= from) return 0.0;
        if (m.extension == RadialMeasure::Extension::Zero) return 0.0;
        const double level = m.density_core(from);
        return level * vol * (std::pow(to, N) - std::pow(from, N));
    };

    switch (m.family) {
        case RadialMeasure::Family::Dirac:
            return m.c;
        case RadialMeasure::Family::Constant: {
            const double edge = std::min(sigma, m.cutoff);
            return m.c * vol * std::pow(edge, N) + extension_part(m.cutoff, sigma);
        }
        case RadialMeasure::Family::PowerLaw: {
            const double edge = std::min(sigma, m.cutoff);
            const double core = m.c * area * std::pow(edge, N - m.a) / (N - m.a);
            return core + extension_part(m.cutoff, sigma);
        }
        case RadialMeasure::Family::PowerLogLaw: {
            const double edge = std::min(sigma, m.cutoff);
            double core;
            if (m.a == static_cast<double>(N)) {
                // int_0^edge r^{-1} (log 1/r)^{-l} dr = (log 1/edge)^{1-l} / (l-1)
                core = m.c * area * std::pow(std::log(1.0 / edge), 1.0 - m.logpow) /
                       (m.logpow - 1.0);
            } else {
                core = m.c * area *
                       gl_decades_to_zero(
                           [&](double r) {
                               return std::pow(r, N - 1.0 - m.a) *
                                      std::pow(-std::log(r), -m.logpow);
                           },
                           edge, 1e-13);
            }
            return core + extension_part(m.cutoff, sigma);
        }
        case RadialMeasure::Family::ModulatedPower: {
            const double edge = std::min(sigma, m.cutoff);
            // decade sweep with divergence detection; contributions that
            // decay only like a log power are resolved by tail extrapolation
            double acc = 0.0, hi = edge;
            double prev = std::numeric_limits<double>::infinity();
            double prev2 = std::numeric_limits<double>::infinity();
            bool converged = false;
            for (int d = 0; d < 200; ++d) {
                double lo = hi * 0.1;
                // exponents combined before pow: r^{-a} alone overflows for
                // tiny radii even when the integrand is benign
                double part = gl_uniform(
                    [&](double r) { return std::pow(r, N - 1.0 - m.a) * m.table(r); }, lo, hi, 8,
                    16);
                if (d > 4 && part > prev * (1.0 + 1e-9) && part > 1e-14 * acc)
                    throw non_integrable_error(
                        "ball_mass: modulated-power density is not integrable near 0");
                acc += part;
                prev2 = prev;
                prev = part;
                hi = lo;
                if (part < 1e-14 * acc && d > 3) {
                    converged = true;
                    break;
                }
            }
            if (!converged && prev > 0.0 && std::isfinite(prev2)) {
                // parts behave like L^{-k} per decade, L = log(1/r): fit k
                // from the last two decades and close the sum analytically
                const double L_last = std::log(1.0 / hi);
                const double k_hat = -std::log(prev / prev2) /
                                     std::log(L_last / (L_last - std::log(10.0)));
                if (!(k_hat > 1.05))
                    throw non_integrable_error(
                        "ball_mass: modulated-power density decays too slowly near 0 to be "
                        "integrable");
                acc += prev * (L_last / std::log(10.0)) / (k_hat - 1.0);
            }
            return area * acc + extension_part(m.cutoff, sigma);
        }
    }
    return 0.0;
}

/// True when the density is nonincreasing in radius over (0, upto], so the
/// sup over ball centers is attained at the origin.
inline bool has_nonincreasing_density(const RadialMeasure& m, double upto) {
    switch (m.family) {
        case RadialMeasure::Family::Dirac:
            return true;
        case RadialMeasure::Family::Constant:
            return true;
        case RadialMeasure::Family::PowerLaw:
            return m.a >= 0.0;
        case RadialMeasure::Family::PowerLogLaw: {
            if (m.a <= 0.0) return false;
            // r^{-a} (log 1/r)^{-l} decreases iff log(1/r) >= l/a
            const double band = std::exp(-m.logpow / m.a);
            return std::min(upto, m.cutoff) <= band * (1.0 + 1e-12);
        }
        case RadialMeasure::Family::ModulatedPower: {
            double prev = std::numeric_limits<double>::infinity();
            for (double r : geometric_grid(std::max(1e-12, m.table.r.front() * 1e-3),
                                           std::min(upto, m.cutoff), 200)) {
                const double v = m.density(r);
                if (v > prev * (1.0 + 1e-10)) return false;
                prev = v;
            }
            return true;
        }
    }
    return false;
}

/// sup over centers z of mu(B(z, sigma)). For radially nonincreasing
/// densities the supremum is attained at the singularity, so this equals
/// ball_mass(m, sigma); families without that monotonicity are rejected.
inline double sup_ball_mass(const RadialMeasure& m, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sup_ball_mass: sigma must be positive");
    if (!has_nonincreasing_density(m, 2.0 * sigma))
        throw std::invalid_argument(
            "sup_ball_mass: density is not radially nonincreasing up to 2*sigma");
    return ball_mass(m, sigma);
}

/// mu(B(z, sigma)) for an off-origin center z (|z| = zr), by quadrature of
/// the density against the spherical-cap area fraction. Used as the sampled
/// cross-check that the origin attains the supremum. N <= 3.
inline double off_center_ball_mass(const RadialMeasure& m, double zr, double sigma) {
    if (m.is_atom()) return (zr <= sigma) ? m.c : 0.0;
    const int N = m.dim;
    if (N > 3) throw std::invalid_argument("off_center_ball_mass: N <= 3 only");
    const double area = unit_sphere_area(N);
    auto cap_fraction = [&](double s) {
        if (zr == 0.0) return s <= sigma ? 1.0 : 0.0;
        // fraction of the sphere of radius s inside B(z, sigma)
        const double cosmin = (s * s + zr * zr - sigma * sigma) / (2.0 * s * zr);
        if (cosmin <= -1.0) return 1.0;
        if (cosmin >= 1.0) return 0.0;
        switch (N) {
            case 1: return 0.5; // one of the two points +-s
            case 2: return std::acos(cosmin) / M_PI;
            default: return 0.5 * (1.0 - cosmin);
        }
    };
    const double lo_edge = std::max(zr - sigma, 0.0);
    const double hi_edge = zr + sigma;
    auto integrand = [&](double s) {
        return m.density(s) * cap_fraction(s) * std::pow(s, N - 1);
    };
    double acc = 0.0;
    if (lo_edge > 0.0) {
        acc = gl_uniform(integrand, lo_edge, hi_edge, 64, 16);
    } else {
        acc = gl_decades_to_zero(integrand, hi_edge, 1e-13);
    }
    return area * acc;
}

/// sigma -> mu(B(0,sigma)) sampled on an increasing grid.
struct MassCurve {
    std::vector<double> radii;
    std::vector<double> masses;
    std::string family;
};

inline MassCurve mass_curve(const RadialMeasure& m, const std::vector<double>& sigmas) {
    MassCurve curve;
    curve.family = m.family_name();
    curve.radii = sigmas;
    curve.masses.reserve(sigmas.size());
    double prev = -1.0;
    for (double s : sigmas) {
        if (!(s > prev)) throw std::invalid_argument("mass_curve: sigmas must increase");
        prev = s;
        curve.masses.push_back(ball_mass(m, s));
    }
    return curve;
}

/// Data family matched to the nonexistence threshold of the given regime:
/// the borderline densities whose ball masses realize the critical decay
/// rates. Only cases A, B, C have a two-parameter closed-form family; see
/// modulated_family for D and E.
inline std::pair<RadialMeasure, RadialMeasure> critical_family(CaseLabel label,
                                                               const ExponentConfig& cfg,
                                                               double c1, double c2) {
    if (!(c1 > 0.0) || !(c2 > 0.0))
        throw std::invalid_argument("critical_family: prefactors must be positive");
    if (classify(cfg) != label)
        throw std::invalid_argument("critical_family: configuration is not in the requested case");
    const int N = cfg.N;
    const double pq1 = cfg.p * cfg.q - 1.0;
    switch (label) {
        case CaseLabel::A:
            return {RadialMeasure::power_law(N, c1, cfg.sing_u()),
                    RadialMeasure::power_law(N, c2, cfg.sing_v())};
        case CaseLabel::B:
            return {RadialMeasure::power_log_law(N, c1, cfg.sing_u(), cfg.p / pq1),
                    RadialMeasure::power_log_law(N, c2, static_cast<double>(N),
                                                 1.0 / pq1 + 1.0)};
        case CaseLabel::C:
            return {RadialMeasure::power_log_law(N, c1, static_cast<double>(N), 0.5 * N + 1.0),
                    RadialMeasure::power_log_law(N, c2, static_cast<double>(N), 0.5 * N + 1.0)};
        default:
            throw std::invalid_argument(
                "critical_family: closed-form families exist for cases A, B, C only; cases D/E "
                "take a tabulated modulating function, and case F requires infinite ball mass");
    }
}

/// Case D / case E mu-datum r^{-(N+2)/q} h(r) resp. r^{-N} h(r) with a
/// user-supplied tabulated modulating function. For case D the side
/// condition that s^{-eps} h(s) is nonincreasing near 0 is validated on the
/// tabulation.
inline RadialMeasure modulated_family(CaseLabel label, const ExponentConfig& cfg,
                                      TabulatedFunction h, double eps = 0.01,
                                      double delta = 1.0) {
    if (classify(cfg) != label)
        throw std::invalid_argument("modulated_family: configuration is not in the requested case");
    if (label == CaseLabel::D) {
        if (!h.power_adjusted_nonincreasing(eps, delta))
            throw std::invalid_argument(
                "modulated_family: s^{-eps} h(s) must be nonincreasing near 0");
        return RadialMeasure::modulated_power(cfg.N, (cfg.N + 2.0) / cfg.q, std::move(h));
    }
    if (label == CaseLabel::E)
        return RadialMeasure::modulated_power(cfg.N, static_cast<double>(cfg.N), std::move(h));
    throw std::invalid_argument("modulated_family: applies to cases D and E only");
}

/// Samples the measure onto a mesh as node densities. For densities that
/// are singular at the origin, nodes inside `core_radius` (default: a few
/// first cells) are flattened at the exact average level so that the
/// reconstructed core carries the measure's core ball mass; cf. core_split
/// which instead carries the core as an exact atom. Atoms are not sampled
/// here.
inline RadialField sample_to_field(const RadialMeasure& m, const RadialMesh& mesh,
                                   double core_radius = -1.0) {
    if (m.is_atom())
        throw std::invalid_argument("sample_to_field: Dirac data is handled analytically");
    if (m.dim != mesh.dim) throw std::invalid_argument("sample_to_field: dimension mismatch");
    std::vector<double> vals(mesh.r.size());
    if (!m.singular_at_origin()) {
        // bounded density: plain sampling with the r -> 0 limit at the origin
        double v0 = 0.0;
        switch (m.family) {
            case RadialMeasure::Family::Constant: v0 = m.c; break;
            case RadialMeasure::Family::PowerLaw: v0 = (m.a == 0.0) ? m.c : 0.0; break;
            case RadialMeasure::Family::PowerLogLaw: v0 = 0.0; break;
            case RadialMeasure::Family::ModulatedPower:
                v0 = (m.a == 0.0) ? m.table.h.front() : 0.0;
                break;
            default: break;
        }
        vals[0] = v0;
        for (size_t i = 1; i < mesh.r.size(); ++i) vals[i] = m.density(mesh.r[i]);
        return RadialField(mesh, std::move(vals), 0.0);
    }
    if (core_radius <= 0.0) core_radius = 5.0 * mesh.r[1];
    // snap the core boundary to a node so the flat region interpolates flat
    const size_t i_core = mesh.interval_of(core_radius);
    core_radius = mesh.r[std::max<size_t>(i_core, 1)];
    const double core_level =
        ball_mass(m, core_radius) / (unit_ball_volume(mesh.dim) * std::pow(core_radius, mesh.dim));
    for (size_t i = 0; i < mesh.r.size(); ++i) {
        const double r = mesh.r[i];
        vals[i] = (r <= core_radius) ? core_level : m.density(r);
    }
    return RadialField(mesh, std::move(vals), 0.0);
}

/// Measure decomposed for the solver: the unresolved singular core as an
/// exact atom at the origin plus the resolved density sampled outside it.
/// The atom is propagated analytically on the first slab (S(t) delta is a
/// Gauss profile), after which everything lives on the mesh.
struct CoreSplit {
    double atom = 0.0;               ///< mass carried at the origin
    std::vector<double> field;       ///< sampled resolved part (empty = zero)
    double core_radius = 0.0;
};

inline CoreSplit core_split(const RadialMeasure& m, const RadialMesh& mesh,
                            double core_radius = -1.0) {
    CoreSplit out;
    if (m.is_atom()) {
        out.atom = m.c;
        return out;
    }
    if (m.dim != mesh.dim) throw std::invalid_argument("core_split: dimension mismatch");
    if (!m.singular_at_origin()) {
        out.field = sample_to_field(m, mesh).values;
        return out;
    }
    if (core_radius <= 0.0) core_radius = 5.0 * mesh.r[1];
    const size_t i_core = std::max<size_t>(mesh.interval_of(core_radius), 1);
    out.core_radius = mesh.r[i_core];
    out.atom = ball_mass(m, out.core_radius);
    out.field.assign(mesh.r.size(), 0.0);
    for (size_t i = i_core + 1; i < mesh.r.size(); ++i) out.field[i] = m.density(mesh.r[i]);
    return out;
}

} // namespace ptl
