#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "voltcheb/box.hpp"

namespace voltcheb {

/// Largest degree accepted by the shifted Chebyshev evaluators unless a caller asks otherwise.
inline constexpr int kDefaultDegreeCap = 1024;

/// T*_n(x) = T_n(2x - 1) on [0, 1], by the three-term recurrence.
/// Throws DomainError for n < 0, n > degree_cap, or x outside [0, 1].
[[nodiscard]] double shifted_cheb_eval(int n, double x, int degree_cap = kDefaultDegreeCap);

/// T*_0(x) .. T*_order(x) in one pass of the same recurrence.
[[nodiscard]] std::vector<double> shifted_cheb_eval_all(int order, double x,
                                                        int degree_cap = kDefaultDegreeCap);

/// Writes T*_0(x) .. T*_{out.size()-1}(x) into `out`. No allocation; used in the assembly hot loops.
void shifted_cheb_fill(double x, std::span<double> out);

/// Gauss-Chebyshev-Lobatto points (1 + cos(l pi / N)) / 2 along each axis, l = 0..N.
struct CollocationGrid {
    int order = 0;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> zs;
};

/// Builds the grid for order N >= 1; N = 0 is rejected.
[[nodiscard]] CollocationGrid gcl_points(int order);

/// Flat index of the triple (i, j, k) for a tensor of extent n = N + 1 per axis; k varies fastest.
[[nodiscard]] constexpr std::size_t flat_index(int i, int j, int k, int n) noexcept {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(n) +
           static_cast<std::size_t>(k);
}

struct IndexTriple {
    int i = 0;
    int j = 0;
    int k = 0;

    friend bool operator==(const IndexTriple&, const IndexTriple&) = default;
};

[[nodiscard]] constexpr IndexTriple unflatten_index(std::size_t flat, int n) noexcept {
    const auto extent = static_cast<std::size_t>(n);
    return {static_cast<int>(flat / (extent * extent)), static_cast<int>((flat / extent) % extent),
            static_cast<int>(flat % extent)};
}

/// Truncated tensor expansion sum_{i,j,k <= N} a_{ijk} T*_i T*_j T*_k over a box.
/// Coordinates are mapped to [0,1] per axis before the basis is evaluated.
class ChebyshevTensorApproximant {
public:
    ChebyshevTensorApproximant(int order, std::vector<double> coeffs, Box3 domain = {});

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] const std::vector<double>& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] const Box3& domain() const noexcept { return domain_; }

    [[nodiscard]] double coeff(int i, int j, int k) const {
        return coeffs_.at(flat_index(i, j, k, order_ + 1));
    }

private:
    int order_;
    std::vector<double> coeffs_;
    Box3 domain_;
};

/// Evaluates the expansion with one O(N) basis recurrence per axis and an O(N^3) contraction.
/// Throws DomainError if the point lies outside the approximant's box.
[[nodiscard]] double tensor_eval(const ChebyshevTensorApproximant& approx, double x, double y, double z);

}  // namespace voltcheb
