#pragma once

#include "ptl/rational.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace ptl {

/// Regime label for the exponent pair (p,q) at dimension N. The six
/// predicates on ((q+1)/(pq-1), N/2) and (q, 1+2/N) partition the
/// admissible parameter set {0 < p <= q, pq > 1}.
enum class CaseLabel { A, B, C, D, E, F };

inline const char* to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::A: return "A";
        case CaseLabel::B: return "B";
        case CaseLabel::C: return "C";
        case CaseLabel::D: return "D";
        case CaseLabel::E: return "E";
        case CaseLabel::F: return "F";
    }
    return "?";
}

inline CaseLabel case_from_string(const std::string& s) {
    if (s.size() == 1) {
        switch (s[0]) {
            case 'A': return CaseLabel::A;
            case 'B': return CaseLabel::B;
            case 'C': return CaseLabel::C;
            case 'D': return CaseLabel::D;
            case 'E': return CaseLabel::E;
            case 'F': return CaseLabel::F;
            default: break;
        }
    }
    throw std::invalid_argument("unknown case label: " + s);
}

/// Problem parameters (N, p, q, D1, D2) plus every derived exponent the
/// bounds and certificates consume. Construction enforces the standing
/// assumptions 0 < p <= q, pq > 1, D1 > 0, D2 > 0.
///
/// When p and q are supplied as exact rationals, regime classification is
/// exact; double inputs fall back to a relative tolerance of 1e-12 at the
/// regime boundaries (which are measure-zero and numerically fragile).
struct ExponentConfig {
    int N = 1;
    double p = 2.0;
    double q = 2.0;
    double D1 = 1.0;
    double D2 = 1.0;

    std::optional<Rat> p_exact;
    std::optional<Rat> q_exact;

    static constexpr double kBoundaryRelTol = 1e-12;

    ExponentConfig() = default;

    ExponentConfig(int N_, double p_, double q_, double D1_ = 1.0, double D2_ = 1.0)
        : N(N_), p(p_), q(q_), D1(D1_), D2(D2_) {
        validate();
    }

    ExponentConfig(int N_, Rat p_, Rat q_, double D1_ = 1.0, double D2_ = 1.0)
        : N(N_), p(to_double(p_)), q(to_double(q_)), D1(D1_), D2(D2_),
          p_exact(std::move(p_)), q_exact(std::move(q_)) {
        validate();
    }

    void validate() const {
        if (N < 1) throw std::invalid_argument("spatial dimension N must be >= 1");
        if (D1 <= 0.0 || D2 <= 0.0) throw std::invalid_argument("diffusion coefficients must be positive");
        if (p_exact && q_exact) {
            if (*p_exact <= 0 || *p_exact > *q_exact)
                throw std::invalid_argument("need 0 < p <= q");
            if (*p_exact * *q_exact <= 1)
                throw std::invalid_argument("need pq > 1");
        } else {
            if (!(p > 0.0) || !(p <= q)) throw std::invalid_argument("need 0 < p <= q");
            if (!(p * q > 1.0)) throw std::invalid_argument("need pq > 1");
        }
        if (beta() < alpha()) throw std::logic_error("beta >= alpha must follow from p <= q");
    }

    bool exact() const { return p_exact && q_exact; }

    double D() const { return std::min(D1, D2); }
    double Dp() const { return std::max(D1, D2); }
    /// alpha = (p+1)/(pq-1), the u-scaling exponent.
    double alpha() const { return (p + 1.0) / (p * q - 1.0); }
    /// beta = (q+1)/(pq-1), the v-scaling exponent; beta >= alpha since p <= q.
    double beta() const { return (q + 1.0) / (p * q - 1.0); }
    double sing_u() const { return 2.0 * (p + 1.0) / (p * q - 1.0); }
    double sing_v() const { return 2.0 * (q + 1.0) / (p * q - 1.0); }
    double fujita_q() const { return 1.0 + 2.0 / N; }
};

namespace detail {
// -1 / 0 / +1 comparison of beta = (q+1)/(pq-1) against N/2, exact when possible.
inline int cmp_beta_halfN(const ExponentConfig& cfg) {
    if (cfg.exact()) {
        Rat lhs = 2 * (*cfg.q_exact + 1);
        Rat rhs = Rat(cfg.N) * (*cfg.p_exact * *cfg.q_exact - 1);
        if (lhs < rhs) return -1;
        if (lhs > rhs) return 1;
        return 0;
    }
    double lhs = cfg.beta();
    double rhs = 0.5 * cfg.N;
    double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (std::abs(lhs - rhs) <= ExponentConfig::kBoundaryRelTol * scale) return 0;
    return lhs < rhs ? -1 : 1;
}

inline int cmp_q_fujita(const ExponentConfig& cfg) {
    if (cfg.exact()) {
        Rat lhs = Rat(cfg.N) * *cfg.q_exact;
        Rat rhs = Rat(cfg.N + 2);
        if (lhs < rhs) return -1;
        if (lhs > rhs) return 1;
        return 0;
    }
    double lhs = cfg.q;
    double rhs = cfg.fujita_q();
    if (std::abs(lhs - rhs) <= ExponentConfig::kBoundaryRelTol * std::max(lhs, rhs)) return 0;
    return lhs < rhs ? -1 : 1;
}

inline bool p_equals_q(const ExponentConfig& cfg) {
    if (cfg.exact()) return *cfg.p_exact == *cfg.q_exact;
    return std::abs(cfg.p - cfg.q) <= ExponentConfig::kBoundaryRelTol * cfg.q;
}
} // namespace detail

/// True when the configuration sits within tolerance of a regime boundary
/// and was built from doubles, i.e. the label below is tolerance-dependent.
inline bool classification_is_fragile(const ExponentConfig& cfg) {
    if (cfg.exact()) return false;
    double beta = cfg.beta();
    double b1 = std::abs(beta - 0.5 * cfg.N) / std::max(beta, 0.5 * cfg.N);
    double b2 = std::abs(cfg.q - cfg.fujita_q()) / std::max(cfg.q, cfg.fujita_q());
    double b3 = std::abs(cfg.p - cfg.q) / cfg.q;
    constexpr double near = 1e-9;
    return b1 < near || b2 < near || b3 < near;
}

inline CaseLabel classify(const ExponentConfig& cfg) {
    int c = detail::cmp_beta_halfN(cfg);
    if (c < 0) return CaseLabel::A;
    if (c == 0) return detail::p_equals_q(cfg) ? CaseLabel::C : CaseLabel::B;
    int f = detail::cmp_q_fujita(cfg);
    if (f > 0) return CaseLabel::D;
    if (f == 0) return CaseLabel::E;
    return CaseLabel::F;
}

/// (sing_u, sing_v) = (2(p+1)/(pq-1), 2(q+1)/(pq-1)): the critical ball-mass
/// decay rates sigma^{N - sing_u}, sigma^{N - sing_v}.
inline std::pair<double, double> singularity_exponents(const ExponentConfig& cfg) {
    return {cfg.sing_u(), cfg.sing_v()};
}

/// Sign facts allowing the sigma-family mass bounds to be collapsed to a
/// single radius sigma = T^{1/2} in the subcritical regimes: the bound
/// exponents N - sing are nonpositive there, so the bounding functions are
/// monotonically decreasing in sigma.
struct BoundMonotonicityReport {
    CaseLabel label{};
    double n_minus_sing_u = 0.0;
    double n_minus_sing_v = 0.0;
    bool u_bound_decreasing = false; ///< only asserted in case F
    bool v_bound_decreasing = false;
};

inline BoundMonotonicityReport bound_monotonicity(const ExponentConfig& cfg) {
    CaseLabel label = classify(cfg);
    if (label != CaseLabel::D && label != CaseLabel::E && label != CaseLabel::F)
        throw std::invalid_argument("bound_monotonicity applies to cases D, E, F only");
    BoundMonotonicityReport rep;
    rep.label = label;
    rep.n_minus_sing_u = cfg.N - cfg.sing_u();
    rep.n_minus_sing_v = cfg.N - cfg.sing_v();
    rep.v_bound_decreasing = rep.n_minus_sing_v < 0.0;
    if (label == CaseLabel::F) rep.u_bound_decreasing = rep.n_minus_sing_u <= 0.0;
    return rep;
}

} // namespace ptl
