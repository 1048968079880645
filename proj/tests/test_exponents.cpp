#include <catch2/catch_amalgamated.hpp>

#include "ptl/exponents.hpp"

#include <random>

using namespace ptl;

TEST_CASE("classification of the reference configurations") {
    CHECK(classify(ExponentConfig(2, 2.0, 2.0)) == CaseLabel::C);
    CHECK(classify(ExponentConfig(3, 2.0, 3.0)) == CaseLabel::A);
    CHECK(classify(ExponentConfig(1, 1.0, 3.0)) == CaseLabel::E);
    CHECK(classify(ExponentConfig(1, 0.5, 4.0)) == CaseLabel::D);
    CHECK(classify(ExponentConfig(1, 2.0, 2.0)) == CaseLabel::F);
}

TEST_CASE("exact rational inputs classify boundary configurations exactly") {
    ExponentConfig c(2, Rat(2), Rat(2));
    CHECK(c.exact());
    CHECK(classify(c) == CaseLabel::C);
    CHECK_FALSE(classification_is_fragile(c));

    ExponentConfig e(1, Rat(1), Rat(3));
    CHECK(classify(e) == CaseLabel::E);

    // beta = (q+1)/(pq-1) = N/2 with p < q
    ExponentConfig b(2, Rat(3, 2), Rat(4));
    CHECK(classify(b) == CaseLabel::B);

    // the same configurations as doubles sit on the boundary
    CHECK(classification_is_fragile(ExponentConfig(2, 2.0, 2.0)));
}

TEST_CASE("invalid configurations are rejected at construction") {
    CHECK_THROWS_AS(ExponentConfig(2, 3.0, 2.0), std::invalid_argument); // p > q
    CHECK_THROWS_AS(ExponentConfig(2, 0.5, 1.0), std::invalid_argument); // pq < 1
    CHECK_THROWS_AS(ExponentConfig(2, 1.0, 1.0), std::invalid_argument); // pq = 1
    CHECK_THROWS_AS(ExponentConfig(2, -1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ExponentConfig(0, 2.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ExponentConfig(2, Rat(1), Rat(1)), std::invalid_argument);
}

TEST_CASE("singularity exponents") {
    auto [su, sv] = singularity_exponents(ExponentConfig(3, 2.0, 3.0));
    CHECK(su == Catch::Approx(1.2));
    CHECK(sv == Catch::Approx(1.6));

    auto [su2, sv2] = singularity_exponents(ExponentConfig(2, 2.0, 2.0));
    CHECK(su2 == Catch::Approx(2.0));
    CHECK(sv2 == Catch::Approx(2.0));

    // p = q makes the two exponents coincide
    auto [su3, sv3] = singularity_exponents(ExponentConfig(1, 3.0, 3.0));
    CHECK(su3 == Catch::Approx(sv3));
}

TEST_CASE("derived quantities and ordering") {
    ExponentConfig c(3, 1.5, 2.5, 0.5, 2.0);
    CHECK(c.D() == 0.5);
    CHECK(c.Dp() == 2.0);
    CHECK(c.beta() >= c.alpha());
    CHECK(c.fujita_q() == Catch::Approx(1.0 + 2.0 / 3.0));
}

TEST_CASE("bound monotonicity sign facts in the subcritical cases") {
    // case F example: N=1, p=q=2
    auto repF = bound_monotonicity(ExponentConfig(1, 2.0, 2.0));
    CHECK(repF.label == CaseLabel::F);
    CHECK(repF.n_minus_sing_u == Catch::Approx(-1.0));
    CHECK(repF.u_bound_decreasing);
    CHECK(repF.v_bound_decreasing);

    // case D example: N=1, p=1/2, q=4, sing_v = 2*5/(2-1) = 10
    auto repD = bound_monotonicity(ExponentConfig(1, 0.5, 4.0));
    CHECK(repD.label == CaseLabel::D);
    CHECK(repD.n_minus_sing_v == Catch::Approx(-9.0));
    CHECK(repD.v_bound_decreasing);

    // p = q in case F: the two signed exponents coincide
    auto repF2 = bound_monotonicity(ExponentConfig(3, 1.2, 1.2));
    CHECK(repF2.label == CaseLabel::F);
    CHECK(repF2.n_minus_sing_u == Catch::Approx(repF2.n_minus_sing_v));

    CHECK_THROWS_AS(bound_monotonicity(ExponentConfig(3, 2.0, 3.0)), std::invalid_argument);
    CHECK_THROWS_AS(bound_monotonicity(ExponentConfig(2, 2.0, 2.0)), std::invalid_argument);
}

namespace {
int raw_case_count(int N, double p, double q, CaseLabel* which) {
    const double beta = (q + 1.0) / (p * q - 1.0);
    const double half = 0.5 * N;
    const double fuj = 1.0 + 2.0 / N;
    int hits = 0;
    auto mark = [&](bool cond, CaseLabel lab) {
        if (cond) {
            ++hits;
            *which = lab;
        }
    };
    mark(beta < half, CaseLabel::A);
    mark(beta == half && p < q, CaseLabel::B);
    mark(beta == half && p == q, CaseLabel::C);
    mark(beta > half && q > fuj, CaseLabel::D);
    mark(beta > half && q == fuj, CaseLabel::E);
    mark(beta > half && q < fuj, CaseLabel::F);
    return hits;
}
} // namespace

TEST_CASE("the six predicates partition 1e5 random parameter samples") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> dims(1, 6);
    int n = 0;
    while (n < 100000) {
        const int N = dims(rng);
        const double p = 0.05 + 5.0 * unif(rng);
        const double q = p + 5.0 * unif(rng);
        if (p * q <= 1.0 + 1e-9) continue;
        ++n;
        CaseLabel raw{};
        REQUIRE(raw_case_count(N, p, q, &raw) == 1);
        ExponentConfig cfg(N, p, q);
        REQUIRE(classify(cfg) == raw);
    }
}

TEST_CASE("case F inequality chain: alpha - N/2 >= (q-p)/((pq-1)(q-1)) >= 0") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> dims(1, 6);
    int found = 0;
    for (int it = 0; it < 200000 && found < 2000; ++it) {
        const int N = dims(rng);
        const double p = 0.05 + 3.0 * unif(rng);
        const double q = p + 3.0 * unif(rng);
        if (p * q <= 1.0 + 1e-9) continue;
        ExponentConfig cfg(N, p, q);
        if (classify(cfg) != CaseLabel::F) continue;
        ++found;
        const double lhs = (p + 1.0) / (p * q - 1.0) - 0.5 * N;
        const double rhs = (q - p) / ((p * q - 1.0) * (q - 1.0));
        REQUIRE(rhs >= 0.0);
        REQUIRE(lhs >= rhs - 1e-12 * std::abs(rhs));
    }
    REQUIRE(found == 2000);
}

TEST_CASE("classification ignores the diffusion coefficients") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int it = 0; it < 2000; ++it) {
        const int N = 1 + static_cast<int>(4 * unif(rng));
        const double p = 0.1 + 4.0 * unif(rng);
        const double q = p + 4.0 * unif(rng);
        if (p * q <= 1.0 + 1e-9) continue;
        const double d1 = std::exp(6.0 * (unif(rng) - 0.5));
        const double d2 = std::exp(6.0 * (unif(rng) - 0.5));
        REQUIRE(classify(ExponentConfig(N, p, q, d1, d2)) ==
                classify(ExponentConfig(N, p, q, 1.0, 1.0)));
    }
}
