#include "voltcheb/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "voltcheb/errors.hpp"

namespace voltcheb {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x) {
    if (x.size() != a.cols()) throw DomainError("matrix-vector size mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto row = a.row(r);
        double sum = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) sum += row[c] * x[c];
        y[r] = sum;
    }
    return y;
}

double norm_inf(std::span<const double> v) noexcept {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

double norm_inf(const DenseMatrix& a) noexcept {
    double m = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double sum = 0.0;
        for (double e : a.row(r)) sum += std::abs(e);
        m = std::max(m, sum);
    }
    return m;
}

}  // namespace voltcheb
