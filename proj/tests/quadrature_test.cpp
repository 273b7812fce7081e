#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_polynomials.hpp"
#include "voltcheb/errors.hpp"
#include "voltcheb/quadrature.hpp"

namespace voltcheb {
namespace {

Integrand3 from_polynomial(const testing::Polynomial& p) {
    return [p](double, double, double, double r, double s, double t) { return p(r, s, t); };
}

TEST(GaussLegendreRule, OnePointIsMidpoint) {
    const QuadratureRule rule = gauss_legendre_rule(1);
    ASSERT_EQ(rule.nodes.size(), 1u);
    EXPECT_EQ(rule.nodes[0], 0.5);
    EXPECT_EQ(rule.weights[0], 1.0);
}

TEST(GaussLegendreRule, TwoPointClosedForm) {
    const QuadratureRule rule = gauss_legendre_rule(2);
    const double offset = 1.0 / (2.0 * std::sqrt(3.0));
    EXPECT_NEAR(rule.nodes[0], 0.5 - offset, 1e-15);
    EXPECT_NEAR(rule.nodes[1], 0.5 + offset, 1e-15);
    EXPECT_NEAR(rule.weights[0], 0.5, 1e-15);
    EXPECT_NEAR(rule.weights[1], 0.5, 1e-15);
}

TEST(GaussLegendreRule, InvariantsAcrossOrders) {
    std::vector<int> orders;
    for (int q = 1; q <= 48; ++q) orders.push_back(q);
    for (int q : {64, 100, 128, 200, 256}) orders.push_back(q);
    for (int q : orders) {
        const QuadratureRule rule = gauss_legendre_rule(q);
        double sum = 0.0;
        for (std::size_t a = 0; a < rule.weights.size(); ++a) {
            EXPECT_GT(rule.weights[a], 0.0);
            EXPECT_GT(rule.nodes[a], 0.0);
            EXPECT_LT(rule.nodes[a], 1.0);
            if (a > 0) EXPECT_LT(rule.nodes[a - 1], rule.nodes[a]);
            sum += rule.weights[a];
        }
        EXPECT_NEAR(sum, 1.0, 1e-13) << "q=" << q;
        for (int d = 0; d <= 2 * q - 1; ++d) {
            double integral = 0.0;
            for (std::size_t a = 0; a < rule.nodes.size(); ++a) integral += rule.weights[a] * std::pow(rule.nodes[a], d);
            ASSERT_NEAR(integral, 1.0 / (d + 1), 1e-12) << "q=" << q << " d=" << d;
        }
    }
}

TEST(GaussLegendreRule, CubicExactForAnyOrderAboveOne) {
    for (int q = 2; q <= 64; ++q) {
        const QuadratureRule rule = gauss_legendre_rule(q);
        double integral = 0.0;
        for (std::size_t a = 0; a < rule.nodes.size(); ++a) integral += rule.weights[a] * std::pow(rule.nodes[a], 3);
        EXPECT_NEAR(integral, 0.25, 1e-14);
    }
}

TEST(GaussLegendreRule, RejectsOutOfRange) {
    EXPECT_THROW((void)gauss_legendre_rule(0), DomainError);
    EXPECT_THROW((void)gauss_legendre_rule(257), DomainError);
}

TEST(BoxIntegral, SpecExamples) {
    const QuadratureRule q4 = gauss_legendre_rule(4);
    const Integrand3 one = [](double, double, double, double, double, double) { return 1.0; };
    EXPECT_NEAR(box_integral(one, {1, 1, 1}, q4), 1.0, 1e-14);

    const Integrand3 odd = [](double, double, double, double r, double, double) { return 2.0 * r - 1.0; };
    EXPECT_NEAR(box_integral(odd, {1, 1, 1}, q4), 0.0, 1e-14);

    const Integrand3 rs2 = [](double, double, double, double r, double s, double) { return r * s * s; };
    EXPECT_NEAR(box_integral(rs2, {1, 1, 1}, q4), 1.0 / 6.0, 1e-14);
}

TEST(BoxIntegral, OuterVariablesAreBound) {
    const QuadratureRule rule = gauss_legendre_rule(6);
    const Integrand3 f = [](double x, double y, double z, double r, double, double) { return x * y * z * r; };
    // x y z * x^2/2 * y * z
    EXPECT_NEAR(box_integral(f, {0.5, 0.8, 0.3}, rule), 0.5 * 0.8 * 0.3 * 0.125 * 0.8 * 0.3, 1e-15);
}

TEST(BoxIntegral, EmptyBoxIsExactlyZero) {
    const QuadratureRule rule = gauss_legendre_rule(5);
    const Integrand3 f = [](double, double, double, double r, double s, double t) { return 1.0 + r + s + t; };
    EXPECT_EQ(box_integral(f, {0.0, 1.0, 1.0}, rule), 0.0);
    EXPECT_EQ(box_integral(f, {1.0, 0.0, 1.0}, rule), 0.0);
    EXPECT_EQ(box_integral(f, {1.0, 1.0, 0.0}, rule), 0.0);
    EXPECT_EQ(brute_force_integral(f, {0.0, 0.0, 0.0}, 3), 0.0);
    // Not even evaluated: a poisoned integrand over an empty box is still 0.
    const Integrand3 poison = [](double, double, double, double, double, double) {
        return std::numeric_limits<double>::quiet_NaN();
    };
    EXPECT_EQ(box_integral(poison, {0.0, 0.5, 0.5}, rule), 0.0);
}

TEST(BoxIntegral, RejectsNegativeLimitsAndNonFiniteSamples) {
    const QuadratureRule rule = gauss_legendre_rule(3);
    const Integrand3 one = [](double, double, double, double, double, double) { return 1.0; };
    EXPECT_THROW((void)box_integral(one, {-0.1, 1.0, 1.0}, rule), QuadratureError);
    EXPECT_THROW((void)brute_force_integral(one, {1.0, -1.0, 1.0}, 4), QuadratureError);
    EXPECT_THROW((void)brute_force_integral(one, {1.0, 1.0, 1.0}, 0), DomainError);

    const Integrand3 blowup = [](double, double, double, double r, double, double) { return 1.0 / (r - r); };
    try {
        (void)box_integral(blowup, {1.0, 1.0, 1.0}, rule);
        FAIL() << "expected QuadratureError";
    } catch (const QuadratureError& e) {
        EXPECT_NE(std::string(e.what()).find("node (r, s, t)"), std::string::npos) << e.what();
    }
}

TEST(BoxIntegral, PolynomialExactness) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> limit(0.05, 1.0);
    for (int q = 1; q <= 8; ++q) {
        const QuadratureRule rule = gauss_legendre_rule(q);
        for (int trial = 0; trial < 10; ++trial) {
            const testing::Polynomial p = testing::random_polynomial(rng, 2 * q - 1, 4);
            const double x = limit(rng), y = limit(rng), z = limit(rng);
            EXPECT_NEAR(box_integral(from_polynomial(p), {x, y, z}, rule), p.box_integral(x, y, z), 1e-12);
        }
    }
}

TEST(BruteForceIntegral, SpecExamples) {
    const Integrand3 one = [](double, double, double, double, double, double) { return 1.0; };
    for (int m : {1, 2, 3, 7, 10, 33}) EXPECT_EQ(brute_force_integral(one, {1, 1, 1}, m), 1.0) << m;

    const Integrand3 rs2 = [](double, double, double, double r, double s, double) { return r * s * s; };
    EXPECT_NEAR(brute_force_integral(rs2, {1, 1, 1}, 200), 1.0 / 6.0, 1e-4);

    const Integrand3 cos_t = [](double, double, double, double, double, double t) { return std::cos(t); };
    EXPECT_NEAR(brute_force_integral(cos_t, {1, 1, 1}, 400), std::sin(1.0), 1e-5);
}

// A reduced version of the acceptance-suite sweep (which runs 50 integrands at m = 256).
TEST(BoxIntegral, AgreesWithBruteForceOracle) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> limit(0.1, 1.0);
    const QuadratureRule rule = gauss_legendre_rule(12);
    for (int trial = 0; trial < 5; ++trial) {
        const testing::Polynomial p = testing::random_polynomial(rng, 6, 4);
        const double x = limit(rng), y = limit(rng), z = limit(rng);
        const double gauss = box_integral(from_polynomial(p), {x, y, z}, rule);
        EXPECT_NEAR(gauss, brute_force_integral(from_polynomial(p), {x, y, z}, 96), 1e-3);
        EXPECT_NEAR(gauss, p.box_integral(x, y, z), 1e-12);
    }
}

}  // namespace
}  // namespace voltcheb
