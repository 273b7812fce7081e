#include "voltcheb/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "voltcheb/errors.hpp"

namespace voltcheb {

namespace {

constexpr double kNewtonTolerance = 1e-15;
constexpr int kNewtonMaxIterations = 100;

struct LegendreValue {
    double p;
    double dp;
};

// P_q(x) and P_q'(x) on [-1, 1] by the Bonnet recurrence.
LegendreValue legendre(int q, double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if (q == 0) return {1.0, 0.0};
    const double dp = q * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

void check_upper(const Point3& upper) {
    for (double u : upper) {
        if (!(u >= 0.0) || !std::isfinite(u)) {
            throw QuadratureError("box upper limits must be finite and non-negative");
        }
    }
}

[[noreturn]] void report_non_finite(double value, const Point3& upper, double r, double s, double t) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "non-finite integrand value " << value << " at node (r, s, t) = (" << r << ", " << s << ", " << t
        << ") with outer point (" << upper[0] << ", " << upper[1] << ", " << upper[2] << ")";
    throw QuadratureError(msg.str());
}

}  // namespace

QuadratureRule gauss_legendre_rule(int order) {
    if (order < 1 || order > kMaxQuadratureOrder) {
        throw DomainError("quadrature order must be in [1, " + std::to_string(kMaxQuadratureOrder) + "], got " +
                          std::to_string(order));
    }
    const int q = order;
    QuadratureRule rule;
    rule.order = q;
    rule.nodes.assign(static_cast<std::size_t>(q), 0.0);
    rule.weights.assign(static_cast<std::size_t>(q), 0.0);

    // Roots come in +/- pairs; solve for the positive ones and mirror.
    const int half = (q + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        LegendreValue v = legendre(q, x);
        for (int it = 0; it < kNewtonMaxIterations; ++it) {
            const double dx = v.p / v.dp;
            x -= dx;
            v = legendre(q, x);
            if (std::abs(dx) <= kNewtonTolerance) break;
        }
        if (q % 2 == 1 && i == half - 1) x = 0.0;
        v = legendre(q, x);
        const double w = 2.0 / ((1.0 - x * x) * v.dp * v.dp);
        // x is the i-th largest root; map [-1,1] -> [0,1] and halve the weight.
        const auto hi = static_cast<std::size_t>(q - 1 - i);
        const auto lo = static_cast<std::size_t>(i);
        rule.nodes[hi] = 0.5 * (1.0 + x);
        rule.nodes[lo] = 0.5 * (1.0 - x);
        rule.weights[hi] = 0.5 * w;
        rule.weights[lo] = 0.5 * w;
    }
    return rule;
}

double box_integral(const Integrand3& f, const Point3& upper, const QuadratureRule& rule) {
    check_upper(upper);
    const auto [x, y, z] = upper;
    if (x == 0.0 || y == 0.0 || z == 0.0) return 0.0;

    const auto q = rule.nodes.size();
    double sum = 0.0;
    for (std::size_t a = 0; a < q; ++a) {
        const double r = x * rule.nodes[a];
        double plane = 0.0;
        for (std::size_t b = 0; b < q; ++b) {
            const double s = y * rule.nodes[b];
            double line = 0.0;
            for (std::size_t c = 0; c < q; ++c) {
                const double t = z * rule.nodes[c];
                const double value = f(x, y, z, r, s, t);
                if (!std::isfinite(value)) report_non_finite(value, upper, r, s, t);
                line += rule.weights[c] * value;
            }
            plane += rule.weights[b] * line;
        }
        sum += rule.weights[a] * plane;
    }
    return x * y * z * sum;
}

double brute_force_integral(const Integrand3& f, const Point3& upper, int subdivisions) {
    if (subdivisions < 1) throw DomainError("brute-force integral needs at least one subdivision");
    check_upper(upper);
    const auto [x, y, z] = upper;
    if (x == 0.0 || y == 0.0 || z == 0.0) return 0.0;

    const double m = subdivisions;
    const double hr = x / m;
    const double hs = y / m;
    const double ht = z / m;
    double sum = 0.0;
    for (int a = 0; a < subdivisions; ++a) {
        const double r = (a + 0.5) * hr;
        for (int b = 0; b < subdivisions; ++b) {
            const double s = (b + 0.5) * hs;
            for (int c = 0; c < subdivisions; ++c) {
                const double t = (c + 0.5) * ht;
                const double value = f(x, y, z, r, s, t);
                if (!std::isfinite(value)) report_non_finite(value, upper, r, s, t);
                sum += value;
            }
        }
    }
    return sum * (x * y * z) / (m * m * m);
}

}  // namespace voltcheb
