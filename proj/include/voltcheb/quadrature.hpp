#pragma once

#include <array>
#include <functional>
#include <vector>

namespace voltcheb {

/// Gauss-Legendre rule normalized to [0, 1]: nodes ascending, weights summing to 1.
struct QuadratureRule {
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline constexpr int kMaxQuadratureOrder = 256;

/// q-point Gauss-Legendre rule on [0,1], 1 <= q <= 256. Exact for polynomials of degree <= 2q - 1.
[[nodiscard]] QuadratureRule gauss_legendre_rule(int order);

/// Integrand over the variable box: f(x, y, z, r, s, t), where (x, y, z) are the outer
/// coordinates (also the upper limits) and (r, s, t) the integration variables.
using Integrand3 = std::function<double(double x, double y, double z, double r, double s, double t)>;

using Point3 = std::array<double, 3>;

/// Tensor-product quadrature of f over [0,x] x [0,y] x [0,z] with the outer variables bound to
/// `upper`. Returns exactly 0 when any limit is 0. Summation order is fixed (t innermost).
[[nodiscard]] double box_integral(const Integrand3& f, const Point3& upper, const QuadratureRule& rule);

/// Midpoint Riemann sum on an m x m x m grid. Slow; used as an independent reference.
[[nodiscard]] double brute_force_integral(const Integrand3& f, const Point3& upper, int subdivisions);

/// Default points per axis for an order-N expansion.
[[nodiscard]] constexpr int default_quadrature_order(int order) noexcept { return 2 * order + 8; }

}  // namespace voltcheb
