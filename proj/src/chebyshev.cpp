#include "voltcheb/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "voltcheb/errors.hpp"

namespace voltcheb {

namespace {

void check_argument(int n, double x, int degree_cap) {
    if (n < 0) {
        throw DomainError("shifted Chebyshev degree must be non-negative, got " + std::to_string(n));
    }
    if (n > degree_cap) {
        throw DomainError("shifted Chebyshev degree " + std::to_string(n) + " exceeds cap " +
                          std::to_string(degree_cap));
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("shifted Chebyshev argument must lie in [0,1], got " + std::to_string(x));
    }
}

}  // namespace

double shifted_cheb_eval(int n, double x, int degree_cap) {
    check_argument(n, x, degree_cap);
    const double s = 2.0 * x - 1.0;
    if (n == 0) return 1.0;
    double prev = 1.0;
    double curr = s;
    for (int d = 2; d <= n; ++d) {
        const double next = 2.0 * s * curr - prev;
        prev = curr;
        curr = next;
    }
    return curr;
}

std::vector<double> shifted_cheb_eval_all(int order, double x, int degree_cap) {
    check_argument(order, x, degree_cap);
    std::vector<double> values(static_cast<std::size_t>(order) + 1);
    shifted_cheb_fill(x, values);
    return values;
}

void shifted_cheb_fill(double x, std::span<double> out) {
    if (out.empty()) return;
    const double s = 2.0 * x - 1.0;
    out[0] = 1.0;
    if (out.size() == 1) return;
    out[1] = s;
    for (std::size_t d = 2; d < out.size(); ++d) {
        out[d] = 2.0 * s * out[d - 1] - out[d - 2];
    }
}

CollocationGrid gcl_points(int order) {
    if (order < 1) {
        throw DomainError("collocation grid needs order N >= 1, got " + std::to_string(order));
    }
    CollocationGrid grid;
    grid.order = order;
    grid.xs.resize(static_cast<std::size_t>(order) + 1);
    for (int l = 0; l <= order; ++l) {
        grid.xs[static_cast<std::size_t>(l)] =
            0.5 * (1.0 + std::cos(static_cast<double>(l) * std::numbers::pi / static_cast<double>(order)));
    }
    // cos(l pi / N) is not exactly antisymmetric in floating point; pin the lower half to 1 - upper.
    for (int l = 0; 2 * l < order; ++l) {
        grid.xs[static_cast<std::size_t>(order - l)] = 1.0 - grid.xs[static_cast<std::size_t>(l)];
    }
    if (order % 2 == 0) grid.xs[static_cast<std::size_t>(order / 2)] = 0.5;
    grid.ys = grid.xs;
    grid.zs = grid.xs;
    return grid;
}

ChebyshevTensorApproximant::ChebyshevTensorApproximant(int order, std::vector<double> coeffs, Box3 domain)
    : order_(order), coeffs_(std::move(coeffs)), domain_(domain) {
    if (order_ < 0) throw DomainError("approximant order must be non-negative");
    const auto extent = static_cast<std::size_t>(order_) + 1;
    if (coeffs_.size() != extent * extent * extent) {
        throw DomainError("approximant of order " + std::to_string(order_) + " needs " +
                          std::to_string(extent * extent * extent) + " coefficients, got " +
                          std::to_string(coeffs_.size()));
    }
    for (double c : coeffs_) {
        if (!std::isfinite(c)) throw DomainError("approximant coefficients must be finite");
    }
    validate_box(domain_);
}

double tensor_eval(const ChebyshevTensorApproximant& approx, double x, double y, double z) {
    const Box3& box = approx.domain();
    if (!box.contains(x, y, z)) {
        throw DomainError("evaluation point (" + std::to_string(x) + ", " + std::to_string(y) + ", " +
                          std::to_string(z) + ") lies outside the approximant domain");
    }
    const int n = approx.order() + 1;
    const auto extent = static_cast<std::size_t>(n);
    std::vector<double> bx(extent), by(extent), bz(extent);
    shifted_cheb_fill(x / box.x, bx);
    shifted_cheb_fill(y / box.y, by);
    shifted_cheb_fill(z / box.z, bz);

    const auto& a = approx.coeffs();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double plane = 0.0;
        for (int j = 0; j < n; ++j) {
            double line = 0.0;
            for (int k = 0; k < n; ++k) line += a[flat_index(i, j, k, n)] * bz[static_cast<std::size_t>(k)];
            plane += line * by[static_cast<std::size_t>(j)];
        }
        sum += plane * bx[static_cast<std::size_t>(i)];
    }
    return sum;
}

}  // namespace voltcheb
