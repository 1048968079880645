#pragma once

#include "ptl/exponents.hpp"
#include "ptl/measures.hpp"
#include "ptl/quadrature.hpp"
#include "ptl/rational.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptl {

// ---------------------------------------------------------------------------
// (b_n, c_n) recurrences and their closed forms, templated on the number type
// so the same code runs in doubles and in exact rationals.
// ---------------------------------------------------------------------------

template <typename Num>
struct RecurrenceBC {
    std::vector<Num> b;
    std::vector<Num> c;
};

/// Scheme A: b_{n+1} = pq b_n + p + 1 (b_0 = 0), c_{n+1} = pq c_n (c_0 = 1).
template <typename Num>
RecurrenceBC<Num> recurrence_bc_power(const Num& p, const Num& q, int n_max) {
    RecurrenceBC<Num> seq;
    Num b(0), c(1);
    const Num pq = p * q;
    for (int n = 0; n <= n_max; ++n) {
        seq.b.push_back(b);
        seq.c.push_back(c);
        b = pq * b + p + 1;
        c = pq * c;
    }
    return seq;
}

/// Closed forms b_n = ((pq)^n - 1)(p+1)/(pq-1), c_n = (pq)^n.
template <typename Num>
RecurrenceBC<Num> closed_form_bc_power(const Num& p, const Num& q, int n_max) {
    RecurrenceBC<Num> seq;
    const Num pq = p * q;
    Num pqn(1);
    for (int n = 0; n <= n_max; ++n) {
        seq.b.push_back((pqn - 1) * (p + 1) / (pq - 1));
        seq.c.push_back(pqn);
        pqn *= pq;
    }
    return seq;
}

/// Scheme B: b_{n+1} = q max(p b_n, 1) (b_0 = 1), c_{n+1} = pq c_n + 1 (c_0 = 0).
template <typename Num>
RecurrenceBC<Num> recurrence_bc_log_system(const Num& p, const Num& q, int n_max) {
    RecurrenceBC<Num> seq;
    Num b(1), c(0);
    const Num pq = p * q;
    for (int n = 0; n <= n_max; ++n) {
        seq.b.push_back(b);
        seq.c.push_back(c);
        Num pb = p * b;
        b = q * (pb > Num(1) ? pb : Num(1));
        c = pq * c + 1;
    }
    return seq;
}

/// Closed forms for n >= 1: b_n = (pq)^{n-1} q max(p,1), c_n = ((pq)^n - 1)/(pq - 1).
template <typename Num>
RecurrenceBC<Num> closed_form_bc_log_system(const Num& p, const Num& q, int n_max) {
    RecurrenceBC<Num> seq;
    const Num pq = p * q;
    const Num b1 = q * (p > Num(1) ? p : Num(1));
    Num pqn(1); // (pq)^n
    for (int n = 0; n <= n_max; ++n) {
        if (n == 0)
            seq.b.push_back(Num(1));
        else
            seq.b.push_back(pqn / pq * b1); // (pq)^{n-1} b_1
        seq.c.push_back((pqn - 1) / (pq - 1));
        pqn *= pq;
    }
    return seq;
}

/// Scheme C: b_{n+1} = p b_n (b_0 = 1), c_{n+1} = p c_n + 1 (c_0 = 0).
template <typename Num>
RecurrenceBC<Num> recurrence_bc_log_combined(const Num& p, int n_max) {
    RecurrenceBC<Num> seq;
    Num b(1), c(0);
    for (int n = 0; n <= n_max; ++n) {
        seq.b.push_back(b);
        seq.c.push_back(c);
        b = p * b;
        c = p * c + 1;
    }
    return seq;
}

/// Closed forms b_n = p^n, c_n = (p^n - 1)/(p - 1).
template <typename Num>
RecurrenceBC<Num> closed_form_bc_log_combined(const Num& p, int n_max) {
    RecurrenceBC<Num> seq;
    Num pn(1);
    for (int n = 0; n <= n_max; ++n) {
        seq.b.push_back(pn);
        seq.c.push_back((pn - 1) / (p - 1));
        pn *= p;
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Tracked constants. Everywhere the chained estimates use a generic positive
// constant, the explicit value is recomposed from
//   * the ball-restriction constant 2^{-N/2} e^{-1/2},
//   * the diffusion comparison G(x, D_i t) >= (D'/D)^{-N/2} G(x, t) (after
//     normalizing min(D1,D2) to 1),
//   * the Gaussian-power convolution prefactors,
//   * elementary integral lower bounds for int (s+rho^2)^a log^b ds.
// All values refer to the problem rescaled to horizon T = 1, min diffusion 1.
// ---------------------------------------------------------------------------

struct LedgerConstants {
    CaseLabel scheme{};
    double dp_ratio = 1.0;      ///< D'/D = max(D1,D2)/min(D1,D2)
    double c_star = 0.0;        ///< seed constant: field >= c_star * M * G(x, t+rho^2)
    double gamma = 0.0;         ///< per-sweep constant of the recursion
    double majorizer_C = 0.0;   ///< C with log a_{n+1} >= x log a_n - C(n+1)
    double a_star = 0.0;        ///< a_n >= (a_star M)^{x^n}
    double ratio = 0.0;         ///< x = pq (schemes A, B) or p (scheme C)
    std::string c_star_note;
    std::string gamma_note;
    std::string a_star_note;
};

inline LedgerConstants ledger_constants(CaseLabel scheme, const ExponentConfig& cfg) {
    const double N = cfg.N;
    const double p = cfg.p;
    const double q = cfg.q;
    const double dp = cfg.Dp() / cfg.D();
    LedgerConstants k;
    k.scheme = scheme;
    k.dp_ratio = dp;
    k.c_star = std::pow(dp, -N) * std::pow(2.0, -0.5 * N) * std::exp(-0.5);
    k.c_star_note =
        "2^{-N/2} e^{-1/2} (ball-restricted kernel bound at t = 2 rho^2) times (D'/D)^{-N/2} "
        "twice (diffusion comparison through S(D_i t))";

    double A = 0.0, B = 0.0;
    switch (scheme) {
        case CaseLabel::A: {
            k.ratio = p * q;
            k.gamma = std::pow(dp, -0.5 * N * (p + 1.0));
            k.gamma_note =
                "(D'/D)^{-N/2} per Duhamel pass, (p+1) passes total; the kernel-power "
                "convolutions reduce exactly by Jensen and the semigroup identity";
            const double alpha0 = (p + 1.0) / (p * q - 1.0);
            A = -std::log(k.gamma) + p * std::log(q * alpha0 + 1.0) +
                std::log(p * q * alpha0 + p + 1.0);
            B = (p + 1.0) * std::log(p * q);
            break;
        }
        case CaseLabel::B: {
            if (classify(cfg) != CaseLabel::B)
                throw std::invalid_argument("ledger_constants: configuration is not case B");
            k.ratio = p * q;
            const double a1 = -0.5 * N * (p - 1.0); // s-exponent after the first pass
            const double kappa1 = std::pow(std::min(p, 1.0 / p), 0.5 * N);
            const double kappa2 = std::min(1.0, std::pow(p, 0.5 * N * (q - 2.0)));
            const double K1 = std::pow(dp, -0.5 * N) * std::pow(4.0 * M_PI, -0.5 * N * (p - 1.0)) *
                              std::pow(p, -0.5 * N) * kappa1 / (4.0 * (a1 + 2.0));
            k.gamma = std::pow(dp, -0.5 * N) * std::pow(K1, q) *
                      std::pow(4.0 * M_PI, -0.5 * N * (q - 1.0)) * std::pow(q, -N) * kappa2 * 0.5;
            k.gamma_note =
                "compose: per-pass (D'/D)^{-N/2}; Gaussian-power convolution prefactors "
                "(4pi/alpha)^{-N(beta-1)/2} beta^{-N/2} (min/max)^{N/2} with (alpha,beta) = "
                "(b,p) then (max{pb,1},q); log-weighted integral factors 1/(4(a+2)) and 1/2";
            const double pq1 = p * q - 1.0;
            const double Eb = 0.5 * N * q * (p - 2.0) + 0.5 * N * (q - 2.0);
            const double b1 = q * std::max(p, 1.0);
            A = -std::log(k.gamma) + q * std::log((p + p * q - 1.0) / pq1) +
                std::log((2.0 * p * q - 1.0) / pq1) + std::max(0.0, -Eb) * std::log(b1);
            B = (q + 1.0 + std::max(0.0, -Eb)) * std::log(p * q);
            break;
        }
        case CaseLabel::C: {
            if (classify(cfg) != CaseLabel::C)
                throw std::invalid_argument("ledger_constants: configuration is not case C");
            k.ratio = p;
            k.gamma = std::pow(dp, -0.5 * N) * std::pow(2.0, -p) / (4.0 * M_PI) * std::pow(p, -N);
            k.gamma_note =
                "(D'/D)^{-N/2} per pass; 2^{1-p} from (u+v)^p <= 2^{p-1}(u^p+v^p); "
                "(4pi)^{-N(p-1)/2} p^{-N} from the Gaussian-power convolution with pb > 1; 1/2 "
                "from the log-weighted s-integral";
            const double E = 0.5 * N * (p - 2.0);
            A = -std::log(k.gamma) + std::log((2.0 * p - 1.0) / (p - 1.0));
            B = (1.0 + std::max(0.0, -E)) * std::log(p);
            break;
        }
        default:
            throw std::invalid_argument("ledger_constants: schemes exist for cases A, B, C");
    }
    k.majorizer_C = std::max(A, B);
    const double x = k.ratio;
    k.a_star = k.c_star * std::exp(-k.majorizer_C * x / ((x - 1.0) * (x - 1.0)));
    k.a_star_note =
        "solve log a_{n+1} >= x log a_n - C(n+1) by geometric summation: a_n >= (a_star M)^{x^n} "
        "with a_star = c_star exp(-C x/(x-1)^2)";
    return k;
}

// ---------------------------------------------------------------------------
// Iteration ledgers
// ---------------------------------------------------------------------------

/// One run of a lower-bound recursion with explicitly tracked constants.
/// a_n is tracked in log space (it grows doubly exponentially); b_n and c_n
/// are kept as doubles plus exact rationals when the configuration carries
/// exact exponents.
struct IterationLedger {
    CaseLabel scheme{};
    double M = 0.0;
    double rho = 0.0;
    LedgerConstants constants;
    std::vector<double> log_a; ///< -inf when M = 0
    std::vector<double> a;     ///< exp(log_a), may overflow to +inf
    std::vector<double> b;
    std::vector<double> c;
    std::vector<std::string> b_exact; ///< rational strings (exact mode only)
    std::vector<std::string> c_exact;
    bool closed_forms_ok = false;
    double threshold_mass = 0.0; ///< nonexistence threshold at this rho
    std::string threshold_note;
};

namespace detail {

inline void fill_exact_bc(IterationLedger& led, const ExponentConfig& cfg, int n_max) {
    if (!cfg.exact()) return;
    RecurrenceBC<Rat> rec, closed;
    switch (led.scheme) {
        case CaseLabel::A:
            rec = recurrence_bc_power<Rat>(*cfg.p_exact, *cfg.q_exact, n_max);
            closed = closed_form_bc_power<Rat>(*cfg.p_exact, *cfg.q_exact, n_max);
            break;
        case CaseLabel::B:
            rec = recurrence_bc_log_system<Rat>(*cfg.p_exact, *cfg.q_exact, n_max);
            closed = closed_form_bc_log_system<Rat>(*cfg.p_exact, *cfg.q_exact, n_max);
            break;
        default:
            rec = recurrence_bc_log_combined<Rat>(*cfg.p_exact, n_max);
            closed = closed_form_bc_log_combined<Rat>(*cfg.p_exact, n_max);
            break;
    }
    for (int n = 0; n <= n_max; ++n) {
        if (rec.b[n] != closed.b[n] && !(led.scheme == CaseLabel::B && n == 0))
            throw std::logic_error("ledger: exact closed-form mismatch for b_n");
        if (rec.c[n] != closed.c[n])
            throw std::logic_error("ledger: exact closed-form mismatch for c_n");
        led.b_exact.push_back(rat_to_string(rec.b[n]));
        led.c_exact.push_back(rat_to_string(rec.c[n]));
    }
}

inline bool bc_close(const std::vector<double>& x, const std::vector<double>& y) {
    for (size_t i = 0; i < x.size(); ++i) {
        const double scale = std::max({std::abs(x[i]), std::abs(y[i]), 1.0});
        if (std::abs(x[i] - y[i]) > 1e-11 * scale) return false;
    }
    return true;
}

} // namespace detail

/// Lower-bound machine U(x,t) >= a_n t^{b_n} G(x, t+rho^2)^{c_n} on
/// t in [0, 2 rho^2], seeded by (c_star M, 0, 1). The recursion itself is
/// case-free; rho must satisfy 0 < rho < 1/sqrt(5).
inline IterationLedger ledger_case_a(const ExponentConfig& cfg, double M, double rho,
                                     int n_max = 12) {
    if (n_max < 1) throw std::invalid_argument("ledger: n_max must be >= 1");
    if (!(M >= 0.0)) throw std::invalid_argument("ledger: mass must be nonnegative");
    if (!(rho > 0.0 && rho < 1.0 / std::sqrt(5.0)))
        throw std::invalid_argument("ledger: need 0 < rho < 1/sqrt(5)");
    const double p = cfg.p, q = cfg.q;
    IterationLedger led;
    led.scheme = CaseLabel::A;
    led.M = M;
    led.rho = rho;
    led.constants = ledger_constants(CaseLabel::A, cfg);

    auto bc = recurrence_bc_power<double>(p, q, n_max);
    led.b = bc.b;
    led.c = bc.c;
    auto closed = closed_form_bc_power<double>(p, q, n_max);
    led.closed_forms_ok = detail::bc_close(led.b, closed.b) && detail::bc_close(led.c, closed.c);
    detail::fill_exact_bc(led, cfg, n_max);

    double la = (M > 0.0) ? std::log(led.constants.c_star * M)
                          : -std::numeric_limits<double>::infinity();
    for (int n = 0; n <= n_max; ++n) {
        led.log_a.push_back(la);
        led.a.push_back(std::exp(la));
        la = std::log(led.constants.gamma) + p * q * la - p * std::log(q * led.b[n] + 1.0) -
             std::log(p * q * led.b[n] + p + 1.0);
    }
    // mass bound: evaluate the conclusion at t = rho^2, x = 0 where
    // G(0, 2 rho^2) = (8 pi rho^2)^{-N/2}
    led.threshold_mass = std::pow(8.0 * M_PI, 0.5 * cfg.N) / led.constants.a_star *
                         std::pow(rho, cfg.N - cfg.sing_u());
    led.threshold_note =
        "u-mass on B(z,rho) at any tau <= rho^2 must satisfy M <= (8 pi)^{N/2} a_star^{-1} "
        "rho^{N - 2(p+1)/(pq-1)} (horizon 1, min diffusion 1)";
    return led;
}

/// Log-corrected machine for the v component in case B:
/// V(x,t) >= a_n G(x,(t+rho^2)/b_n) [log(t/rho^2)]^{c_n} on [2 rho^2, t_*),
/// seeded by (c_star M, 1, 0); 0 < rho < 1/sqrt(10).
inline IterationLedger ledger_case_b(const ExponentConfig& cfg, double M, double rho,
                                     int n_max = 12) {
    if (n_max < 1) throw std::invalid_argument("ledger: n_max must be >= 1");
    if (!(M >= 0.0)) throw std::invalid_argument("ledger: mass must be nonnegative");
    if (!(rho > 0.0 && rho < 1.0 / std::sqrt(10.0)))
        throw std::invalid_argument("ledger: need 0 < rho < 1/sqrt(10)");
    if (classify(cfg) != CaseLabel::B)
        throw std::invalid_argument("ledger_case_b: configuration is not case B");
    const double p = cfg.p, q = cfg.q, N = cfg.N;
    IterationLedger led;
    led.scheme = CaseLabel::B;
    led.M = M;
    led.rho = rho;
    led.constants = ledger_constants(CaseLabel::B, cfg);

    auto bc = recurrence_bc_log_system<double>(p, q, n_max);
    led.b = bc.b;
    led.c = bc.c;
    auto closed = closed_form_bc_log_system<double>(p, q, n_max);
    bool ok = detail::bc_close(led.c, closed.c);
    for (size_t n = 1; n < led.b.size() && ok; ++n) {
        const double scale = std::max(std::abs(led.b[n]), 1.0);
        if (std::abs(led.b[n] - closed.b[n]) > 1e-11 * scale) ok = false;
    }
    led.closed_forms_ok = ok;
    detail::fill_exact_bc(led, cfg, n_max);

    const double Eb = 0.5 * N * q * (p - 2.0) + 0.5 * N * (q - 2.0);
    double la = (M > 0.0) ? std::log(led.constants.c_star * M)
                          : -std::numeric_limits<double>::infinity();
    for (int n = 0; n <= n_max; ++n) {
        led.log_a.push_back(la);
        led.a.push_back(std::exp(la));
        la = std::log(led.constants.gamma) + p * q * la + Eb * std::log(led.b[n]) -
             q * std::log(p * led.c[n] + 1.0) - std::log(p * q * led.c[n] + 1.0);
    }
    led.threshold_mass = (1.0 / led.constants.a_star) *
                         std::pow(std::log(1.0 / (2.0 * rho * rho)), -1.0 / (p * q - 1.0));
    led.threshold_note =
        "v-mass on B(z,rho) at any tau <= rho^2 must satisfy M <= a_star^{-1} "
        "[log(1/(2 rho^2))]^{-1/(pq-1)} (horizon 1, min diffusion 1)";
    return led;
}

/// Log-corrected machine for w = u+v in case C (p = q = 1+2/N):
/// W(x,t) >= a_n G(x,(t+rho^2)/b_n) [log(t/rho^2)]^{c_n} on [rho^2, t_*),
/// seeded by (c_star M, 1, 0) with M the combined mass; 0 < rho < 1/sqrt(10).
inline IterationLedger ledger_case_c(const ExponentConfig& cfg, double M, double rho,
                                     int n_max = 12) {
    if (n_max < 1) throw std::invalid_argument("ledger: n_max must be >= 1");
    if (!(M >= 0.0)) throw std::invalid_argument("ledger: mass must be nonnegative");
    if (!(rho > 0.0 && rho < 1.0 / std::sqrt(10.0)))
        throw std::invalid_argument("ledger: need 0 < rho < 1/sqrt(10)");
    if (classify(cfg) != CaseLabel::C)
        throw std::invalid_argument("ledger_case_c: configuration is not case C");
    const double p = cfg.p, N = cfg.N;
    IterationLedger led;
    led.scheme = CaseLabel::C;
    led.M = M;
    led.rho = rho;
    led.constants = ledger_constants(CaseLabel::C, cfg);

    auto bc = recurrence_bc_log_combined<double>(p, n_max);
    led.b = bc.b;
    led.c = bc.c;
    auto closed = closed_form_bc_log_combined<double>(p, n_max);
    led.closed_forms_ok = detail::bc_close(led.b, closed.b) && detail::bc_close(led.c, closed.c);
    detail::fill_exact_bc(led, cfg, n_max);

    const double E = 0.5 * N * (p - 2.0);
    double la = (M > 0.0) ? std::log(led.constants.c_star * M)
                          : -std::numeric_limits<double>::infinity();
    for (int n = 0; n <= n_max; ++n) {
        led.log_a.push_back(la);
        led.a.push_back(std::exp(la));
        la = std::log(led.constants.gamma) + p * la + E * std::log(led.b[n]) -
             std::log(p * led.c[n] + 1.0);
    }
    // final exponent -1/(p-1) = -N/2 with p = 1 + 2/N
    led.threshold_mass = (1.0 / led.constants.a_star) *
                         std::pow(std::log(1.0 / (2.0 * rho * rho)), -0.5 * N);
    led.threshold_note =
        "combined (u+v)-mass on B(z,rho) at any tau <= rho^2 must satisfy M <= a_star^{-1} "
        "[log(1/(2 rho^2))]^{-N/2} (horizon 1, min diffusion 1)";
    return led;
}

/// Nonexistence threshold on the ball mass at radius rho, with constant
/// provenance. For case A the threshold scales exactly as rho^{N - sing_u}
/// with C_star = (8 pi)^{N/2} / a_star.
struct CertificateThreshold {
    CaseLabel label{};
    double rho = 0.0;
    double a_star = 0.0;
    double C_star = 0.0; ///< rho-free prefactor (case A); a_star^{-1} otherwise
    double threshold = 0.0;
    std::string note;
};

inline CertificateThreshold certificate_threshold(CaseLabel label, const ExponentConfig& cfg,
                                                  double rho) {
    CertificateThreshold out;
    out.label = label;
    out.rho = rho;
    switch (label) {
        case CaseLabel::A: {
            auto led = ledger_case_a(cfg, 1.0, rho);
            out.a_star = led.constants.a_star;
            out.C_star = std::pow(8.0 * M_PI, 0.5 * cfg.N) / out.a_star;
            out.threshold = led.threshold_mass;
            out.note = led.threshold_note;
            break;
        }
        case CaseLabel::B: {
            auto led = ledger_case_b(cfg, 1.0, rho);
            out.a_star = led.constants.a_star;
            out.C_star = 1.0 / out.a_star;
            out.threshold = led.threshold_mass;
            out.note = led.threshold_note;
            break;
        }
        case CaseLabel::C: {
            auto led = ledger_case_c(cfg, 1.0, rho);
            out.a_star = led.constants.a_star;
            out.C_star = 1.0 / out.a_star;
            out.threshold = led.threshold_mass;
            out.note = led.threshold_note;
            break;
        }
        default:
            throw std::invalid_argument("certificate_threshold: cases A, B, C only");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Elementary log-weighted integral bound
// ---------------------------------------------------------------------------

/// For a > -1, b >= 0, t >= 2 rho^2:
///   int_{rho^2}^t (s+rho^2)^a [log(s/rho^2)]^b ds
///     >= (t+rho^2)^{a+1} / (4(a+b+2)) * [log(t/rho^2)]^b.
/// Returns per-sample (lhs by graded quadrature, rhs closed form).
struct LogIntegralSample {
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct LogIntegralReport {
    std::vector<LogIntegralSample> samples;
    double worst_margin = std::numeric_limits<double>::infinity();
    bool passed = false;
};

inline double log_weighted_integral(double a, double b, double rho, double t) {
    // substitute s = rho^2 sigma: (rho^2)^{a+1} int_1^{t/rho^2} (sigma+1)^a log(sigma)^b dsigma;
    // panels graded towards sigma = 1 where log(sigma)^b has unbounded slope for b < 1
    const double T = t / (rho * rho);
    const double scale = std::pow(rho * rho, a + 1.0);
    return scale * gl_graded_left(
                       [&](double sig) {
                           const double l = std::log(sig); // rounding may put sig below 1
                           return l <= 0.0 ? 0.0 : std::pow(sig + 1.0, a) * std::pow(l, b);
                       },
                       1.0, T, 64, 0.5, 16);
}

inline LogIntegralReport log_integral_bound_check(double a, double b, double rho,
                                                  const std::vector<double>& t_samples,
                                                  double tol = 1e-10) {
    if (!(a > -1.0)) throw std::invalid_argument("log_integral_bound_check: need a > -1");
    if (!(b >= 0.0)) throw std::invalid_argument("log_integral_bound_check: need b >= 0");
    if (!(rho > 0.0)) throw std::invalid_argument("log_integral_bound_check: need rho > 0");
    LogIntegralReport rep;
    for (double t : t_samples) {
        if (!(t >= 2.0 * rho * rho * (1.0 - 1e-12)))
            throw std::invalid_argument("log_integral_bound_check: samples need t >= 2 rho^2");
        LogIntegralSample s;
        s.t = t;
        s.lhs = log_weighted_integral(a, b, rho, t);
        s.rhs = std::pow(t + rho * rho, a + 1.0) / (4.0 * (a + b + 2.0)) *
                std::pow(std::log(t / (rho * rho)), b);
        rep.samples.push_back(s);
        rep.worst_margin = std::min(rep.worst_margin, s.lhs - s.rhs);
    }
    rep.passed = rep.worst_margin >= -tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Necessary-condition bound evaluation
// ---------------------------------------------------------------------------

/// Which necessary-condition template to evaluate. "mass-u"/"mass-v" are the
/// plain ball-mass bounds valid in all cases; the remaining tags are the
/// sharper per-case bounds (with the all-sigma form used for D/E and the
/// unit-horizon integral for "unit-DE").
enum class BoundTag { MassU, MassV, LogB, LogC, SigmaD, SigmaE, UnitDE };

inline const char* to_string(BoundTag t) {
    switch (t) {
        case BoundTag::MassU: return "mass-u";
        case BoundTag::MassV: return "mass-v";
        case BoundTag::LogB: return "log-B";
        case BoundTag::LogC: return "log-C";
        case BoundTag::SigmaD: return "sigma-D";
        case BoundTag::SigmaE: return "sigma-E";
        case BoundTag::UnitDE: return "unit-DE";
    }
    return "?";
}

inline BoundTag bound_tag_from_string(const std::string& s) {
    if (s == "mass-u") return BoundTag::MassU;
    if (s == "mass-v") return BoundTag::MassV;
    if (s == "log-B") return BoundTag::LogB;
    if (s == "log-C") return BoundTag::LogC;
    if (s == "sigma-D") return BoundTag::SigmaD;
    if (s == "sigma-E") return BoundTag::SigmaE;
    if (s == "unit-DE") return BoundTag::UnitDE;
    throw std::invalid_argument("unknown bound tag: " + s);
}

struct BoundReport {
    BoundTag tag{};
    double T = 1.0;
    double gamma = 1.0;
    std::vector<double> sigma;
    std::vector<double> lhs;
    std::vector<double> rhs_template; ///< bound without its generic constant
    std::vector<double> ratio;        ///< lhs / rhs_template
    double fitted_power = 0.0;        ///< d log(lhs) / d log(sigma)
    double fitted_log_power = 0.0;    ///< d log(lhs) / d log(log(e + sqrt(T)/sigma))
    bool divergent = false;           ///< a tau-integral failed to converge
    bool pass = false;                ///< lhs <= gamma * rhs at every sigma (and not divergent)
};

namespace detail {

/// int_0^{sigma} tau^{-1} [mass(tau)/tau^E]^q dtau. Three phases:
///   1. geometric tau-decades from sigma down to tau_switch (>= 64 points
///      per decade); growing per-decade contributions mark divergence;
///   2. continuation in L = log(1/tau) down to tau = e^{-L_max}: power-log
///      integrands are slowly decaying powers of L there;
///   3. asymptotic tail: the local power eta = -d log g / d log L of
///      g(L) = tau * integrand is extrapolated, adding g L/(eta-1); a local
///      power <= 1 means the integral diverges logarithmically.
struct TauIntegral {
    double value = 0.0;
    bool divergent = false;
};

template <typename MassFn>
TauIntegral tau_power_integral(MassFn&& mass, double E, double q, double sigma,
                               double tau_switch = 1e-8, double L_max = 600.0) {
    TauIntegral out;
    auto integrand = [&](double tau) {
        const double m = mass(tau);
        return std::pow(m / std::pow(tau, E), q) / tau;
    };
    double hi = sigma;
    double prev = std::numeric_limits<double>::infinity();
    while (hi > tau_switch * (1.0 + 1e-12)) {
        const double lo = std::max(hi * 0.1, tau_switch);
        double part = 0.0;
        try {
            part = gl_uniform(integrand, lo, hi, 8, 8); // 64 nodes per decade
        } catch (const non_integrable_error&) {
            out.divergent = true;
            return out;
        }
        if (!std::isfinite(part)) {
            out.divergent = true;
            return out;
        }
        out.value += part;
        if (part > prev * (1.0 + 1e-6) && part > 1e-10 * out.value) out.divergent = true;
        prev = part;
        hi = lo;
    }
    if (out.divergent) return out;

    // L-space continuation: int g(L) dL with g(L) = integrand(e^{-L}) e^{-L}
    auto g_of = [&](double L) {
        const double tau = std::exp(-L);
        return integrand(tau) * tau;
    };
    double L_lo = std::log(1.0 / std::min(sigma, tau_switch));
    double g_prev = g_of(L_lo);
    double eta = std::numeric_limits<double>::infinity();
    if (!(g_prev > 0.0)) return out; // nothing left below the switch point
    try {
        while (L_lo < L_max) {
            const double L_hi = std::min(L_lo * 1.35, L_max);
            out.value += gl_panel(g_of, L_lo, L_hi, 16);
            const double g_here = g_of(L_hi);
            if (g_here > 0.0 && g_prev > 0.0)
                eta = -std::log(g_here / g_prev) / std::log(L_hi / L_lo);
            g_prev = g_here;
            L_lo = L_hi;
            if (g_here <= 1e-300) return out; // integrand died; no tail
        }
    } catch (const non_integrable_error&) {
        out.divergent = true;
        return out;
    }
    if (!(eta > 1.05)) {
        out.divergent = true;
        return out;
    }
    out.value += g_prev * L_lo / (eta - 1.0); // power-tail estimate
    return out;
}

} // namespace detail

/// Evaluates one necessary-condition bound on a sigma grid: the measured
/// left side, the bound's template (without its generic constant), the
/// fitted decay rates, and pass/fail against a caller-supplied gamma.
inline BoundReport bound_report(BoundTag tag, const RadialMeasure& mu, const RadialMeasure& nu,
                                const ExponentConfig& cfg, std::vector<double> sigmas,
                                double gamma = 1.0, double T = 1.0) {
    const CaseLabel label = classify(cfg);
    auto require_case = [&](CaseLabel want) {
        if (label != want)
            throw std::invalid_argument(std::string("bound_report: tag ") + to_string(tag) +
                                        " requires case " + to_string(want) + ", got " +
                                        to_string(label));
    };
    switch (tag) {
        case BoundTag::MassU:
        case BoundTag::MassV: break;
        case BoundTag::LogB: require_case(CaseLabel::B); break;
        case BoundTag::LogC: require_case(CaseLabel::C); break;
        case BoundTag::SigmaD: require_case(CaseLabel::D); break;
        case BoundTag::SigmaE: require_case(CaseLabel::E); break;
        case BoundTag::UnitDE:
            if (label != CaseLabel::D && label != CaseLabel::E)
                throw std::invalid_argument("bound_report: unit-DE requires case D or E");
            break;
    }
    if (tag == BoundTag::UnitDE) sigmas = {1.0};
    if (sigmas.empty()) throw std::invalid_argument("bound_report: empty sigma grid");
    const double sqrtT = std::sqrt(T);
    for (size_t i = 0; i < sigmas.size(); ++i) {
        if (!(sigmas[i] > 0.0) || sigmas[i] > sqrtT * (1.0 + 1e-12))
            throw std::invalid_argument("bound_report: sigmas must lie in (0, sqrt(T)]");
        if (i > 0 && !(sigmas[i] > sigmas[i - 1]))
            throw std::invalid_argument("bound_report: sigmas must increase");
    }

    BoundReport rep;
    rep.tag = tag;
    rep.T = T;
    rep.gamma = gamma;
    rep.sigma = sigmas;

    auto mass_mu = [&](double tau) { return ball_mass(mu, tau); };
    const double N = cfg.N;

    for (double s : sigmas) {
        double lhs = 0.0;
        double rhs = 1.0;
        switch (tag) {
            case BoundTag::MassU:
                lhs = ball_mass(mu, s);
                rhs = std::pow(s, N - cfg.sing_u());
                break;
            case BoundTag::MassV:
                lhs = ball_mass(nu, s);
                rhs = std::pow(s, N - cfg.sing_v());
                break;
            case BoundTag::LogB: {
                auto ti = detail::tau_power_integral(mass_mu, N - cfg.sing_u(), cfg.q, s);
                rep.divergent = rep.divergent || ti.divergent;
                lhs = ti.value + ball_mass(nu, s);
                rhs = std::pow(std::log(M_E + sqrtT / s), -1.0 / (cfg.p * cfg.q - 1.0));
                break;
            }
            case BoundTag::LogC:
                lhs = ball_mass(mu, s) + ball_mass(nu, s);
                rhs = std::pow(std::log(M_E + sqrtT / s), -0.5 * N);
                break;
            case BoundTag::SigmaD: {
                auto ti = detail::tau_power_integral(mass_mu, N - (N + 2.0) / cfg.q, cfg.q, s);
                rep.divergent = rep.divergent || ti.divergent;
                lhs = ti.value + ball_mass(nu, s);
                rhs = std::pow(s, N - cfg.sing_v());
                break;
            }
            case BoundTag::SigmaE: {
                auto ti = detail::tau_power_integral(mass_mu, 0.0, cfg.q, s);
                rep.divergent = rep.divergent || ti.divergent;
                lhs = ti.value + ball_mass(nu, s);
                rhs = std::pow(s, N - cfg.sing_v());
                break;
            }
            case BoundTag::UnitDE: {
                auto ti = detail::tau_power_integral(mass_mu, N - (N + 2.0) / cfg.q, cfg.q, 1.0);
                rep.divergent = rep.divergent || ti.divergent;
                lhs = ti.value;
                rhs = 1.0;
                break;
            }
        }
        rep.lhs.push_back(lhs);
        rep.rhs_template.push_back(rhs);
        rep.ratio.push_back(lhs / rhs);
    }

    if (rep.sigma.size() >= 2 && !rep.divergent) {
        std::vector<double> lx, ly, llx;
        for (size_t i = 0; i < rep.sigma.size(); ++i) {
            if (!(rep.lhs[i] > 0.0)) continue;
            lx.push_back(std::log(rep.sigma[i]));
            llx.push_back(std::log(std::log(M_E + sqrtT / rep.sigma[i])));
            ly.push_back(std::log(rep.lhs[i]));
        }
        if (ly.size() >= 2) {
            rep.fitted_power = fit_slope(lx, ly);
            rep.fitted_log_power = fit_slope(llx, ly);
        }
    }

    rep.pass = !rep.divergent;
    for (size_t i = 0; i < rep.sigma.size() && rep.pass; ++i)
        if (rep.lhs[i] > gamma * rep.rhs_template[i]) rep.pass = false;
    return rep;
}

} // namespace ptl
