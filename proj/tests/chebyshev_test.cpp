#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "voltcheb/chebyshev.hpp"
#include "voltcheb/errors.hpp"

namespace voltcheb {
namespace {

// Closed form T*_n(x) = cos(n arccos(2x - 1)); test oracle only.
double cosine_oracle(int n, double x) { return std::cos(n * std::acos(2.0 * x - 1.0)); }

TEST(ShiftedChebyshev, KnownValues) {
    EXPECT_EQ(shifted_cheb_eval(0, 0.3), 1.0);
    EXPECT_EQ(shifted_cheb_eval(1, 0.75), 0.5);
    EXPECT_EQ(shifted_cheb_eval(2, 0.5), -1.0);
    EXPECT_NEAR(shifted_cheb_eval(5, 0.3), std::cos(5.0 * std::acos(-0.4)), 1e-15);
}

TEST(ShiftedChebyshev, MatchesCosineIdentity) {
    std::mt19937_64 rng(20261016);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int sample = 0; sample < 1000; ++sample) {
        const double x = unit(rng);
        for (int n = 0; n <= 64; ++n) {
            ASSERT_NEAR(shifted_cheb_eval(n, x), cosine_oracle(n, x), 1e-12) << "n=" << n << " x=" << x;
        }
    }
}

TEST(ShiftedChebyshev, EndpointIdentities) {
    for (int n = 0; n <= 64; ++n) {
        EXPECT_NEAR(shifted_cheb_eval(n, 1.0), 1.0, 1e-14);
        EXPECT_NEAR(shifted_cheb_eval(n, 0.0), n % 2 == 0 ? 1.0 : -1.0, 1e-14);
    }
}

TEST(ShiftedChebyshev, RejectsBadArguments) {
    EXPECT_THROW((void)shifted_cheb_eval(-1, 0.5), DomainError);
    EXPECT_THROW((void)shifted_cheb_eval(1025, 0.5), DomainError);
    EXPECT_NO_THROW((void)shifted_cheb_eval(1024, 0.5));
    EXPECT_THROW((void)shifted_cheb_eval(8, 0.5, 4), DomainError);
    EXPECT_THROW((void)shifted_cheb_eval(2, -1e-12), DomainError);
    EXPECT_THROW((void)shifted_cheb_eval(2, 1.0 + 1e-12), DomainError);
    EXPECT_THROW((void)shifted_cheb_eval(2, std::nan("")), DomainError);
    EXPECT_THROW((void)shifted_cheb_eval_all(3, 1.5), DomainError);
}

TEST(ShiftedChebyshev, BatchMatchesElementwise) {
    EXPECT_EQ(shifted_cheb_eval_all(2, 0.5), (std::vector<double>{1.0, 0.0, -1.0}));
    EXPECT_EQ(shifted_cheb_eval_all(1, 1.0), (std::vector<double>{1.0, 1.0}));
    const std::vector<double> batch = shifted_cheb_eval_all(4, 0.146447);
    ASSERT_EQ(batch.size(), 5u);
    for (int n = 0; n <= 4; ++n) EXPECT_EQ(batch[static_cast<std::size_t>(n)], shifted_cheb_eval(n, 0.146447));
}

TEST(CollocationGrid, SmallOrders) {
    EXPECT_EQ(gcl_points(1).xs, (std::vector<double>{1.0, 0.0}));
    EXPECT_EQ(gcl_points(2).xs, (std::vector<double>{1.0, 0.5, 0.0}));

    const CollocationGrid g4 = gcl_points(4);
    const std::vector<double> expected{1.0, 0.8535533906, 0.5, 0.1464466094, 0.0};
    for (std::size_t l = 0; l < expected.size(); ++l) EXPECT_NEAR(g4.xs[l], expected[l], 1e-10);
    EXPECT_EQ(g4.xs, g4.ys);
    EXPECT_EQ(g4.xs, g4.zs);
}

TEST(CollocationGrid, FormulaSymmetryAndOrdering) {
    for (int order = 1; order <= 40; ++order) {
        const CollocationGrid g = gcl_points(order);
        ASSERT_EQ(g.xs.size(), static_cast<std::size_t>(order) + 1);
        EXPECT_EQ(g.xs.front(), 1.0);
        EXPECT_EQ(g.xs.back(), 0.0);
        for (int l = 0; l <= order; ++l) {
            const auto idx = static_cast<std::size_t>(l);
            EXPECT_NEAR(g.xs[idx], 0.5 * (1.0 + std::cos(l * std::numbers::pi / order)), 1e-15);
            EXPECT_NEAR(g.xs[idx] + g.xs[static_cast<std::size_t>(order - l)], 1.0, 1e-15);
            if (l > 0) EXPECT_LT(g.xs[idx], g.xs[idx - 1]);
        }
    }
}

TEST(CollocationGrid, RejectsOrderZero) { EXPECT_THROW((void)gcl_points(0), DomainError); }

TEST(TensorEval, LinearExample) {
    std::vector<double> a(8, 0.0);
    a[flat_index(0, 0, 0, 2)] = 1.5;
    a[flat_index(0, 0, 1, 2)] = 0.5;
    a[flat_index(0, 1, 0, 2)] = 0.5;
    a[flat_index(1, 0, 0, 2)] = 0.5;
    const ChebyshevTensorApproximant approx(1, a);
    EXPECT_NEAR(tensor_eval(approx, 0.2, 0.3, 0.4), 0.9, 1e-15);
}

TEST(TensorEval, ZeroAndConstant) {
    const ChebyshevTensorApproximant zero(3, std::vector<double>(64, 0.0));
    EXPECT_EQ(tensor_eval(zero, 0.7, 0.1, 0.9), 0.0);

    std::vector<double> c(64, 0.0);
    c[0] = -2.25;
    const ChebyshevTensorApproximant constant(3, c);
    EXPECT_EQ(tensor_eval(constant, 0.7, 0.1, 0.9), -2.25);
    EXPECT_EQ(tensor_eval(constant, 0.0, 1.0, 0.5), -2.25);
}

TEST(TensorEval, MatchesTripleSumOracle) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int order = 4;
    const int n = order + 1;
    std::vector<double> a(125);
    for (double& v : a) v = coef(rng);
    const ChebyshevTensorApproximant approx(order, a);
    for (int trial = 0; trial < 50; ++trial) {
        const double x = unit(rng), y = unit(rng), z = unit(rng);
        double oracle = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    oracle += a[flat_index(i, j, k, n)] * cosine_oracle(i, x) * cosine_oracle(j, y) * cosine_oracle(k, z);
        EXPECT_NEAR(tensor_eval(approx, x, y, z), oracle, 1e-12);
    }
}

TEST(TensorEval, LinearInCoefficients) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int order = 1 + trial % 5;
        const std::size_t size = static_cast<std::size_t>((order + 1) * (order + 1) * (order + 1));
        std::vector<double> a(size), b(size), mix(size);
        const double alpha = coef(rng), beta = coef(rng);
        for (std::size_t i = 0; i < size; ++i) {
            a[i] = coef(rng);
            b[i] = coef(rng);
            mix[i] = alpha * a[i] + beta * b[i];
        }
        const double x = unit(rng), y = unit(rng), z = unit(rng);
        const double lhs = tensor_eval(ChebyshevTensorApproximant(order, mix), x, y, z);
        const double rhs = alpha * tensor_eval(ChebyshevTensorApproximant(order, a), x, y, z) +
                           beta * tensor_eval(ChebyshevTensorApproximant(order, b), x, y, z);
        EXPECT_NEAR(lhs, rhs, 1e-12);
    }
}

TEST(TensorEval, GeneralBoxMapsToUnitCube) {
    std::vector<double> a(8, 0.0);
    a[flat_index(1, 0, 0, 2)] = 1.0;  // T*_1(x / X)
    const ChebyshevTensorApproximant approx(1, a, Box3{2.0, 3.0, 4.0});
    EXPECT_NEAR(tensor_eval(approx, 1.5, 3.0, 0.0), 2.0 * 0.75 - 1.0, 1e-15);
    EXPECT_THROW((void)tensor_eval(approx, 2.5, 1.0, 1.0), DomainError);
}

TEST(TensorEval, RejectsInvalidApproximants) {
    EXPECT_THROW(ChebyshevTensorApproximant(1, std::vector<double>(7, 0.0)), DomainError);
    EXPECT_THROW(ChebyshevTensorApproximant(0, std::vector<double>{std::nan("")}), DomainError);
    const ChebyshevTensorApproximant ok(1, std::vector<double>(8, 0.0));
    EXPECT_THROW((void)tensor_eval(ok, -0.1, 0.5, 0.5), DomainError);
    EXPECT_THROW((void)tensor_eval(ok, 0.5, 0.5, 1.1), DomainError);
}

TEST(FlatIndex, RoundTrips) {
    for (int n = 1; n <= 6; ++n) {
        for (std::size_t flat = 0; flat < static_cast<std::size_t>(n * n * n); ++flat) {
            const IndexTriple t = unflatten_index(flat, n);
            EXPECT_EQ(flat_index(t.i, t.j, t.k, n), flat);
        }
    }
    EXPECT_EQ(flat_index(0, 0, 1, 2), 1u);
    EXPECT_EQ(flat_index(1, 0, 0, 2), 4u);
}

}  // namespace
}  // namespace voltcheb
