#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "voltcheb/chebyshev.hpp"
#include "voltcheb/dense_matrix.hpp"
#include "voltcheb/problem.hpp"
#include "voltcheb/quadrature.hpp"

namespace voltcheb {

struct AssemblyOptions {
    /// Worker threads for row-parallel assembly. Results do not depend on this value.
    int threads = 1;
};

/// A (l,m,n) x (i,j,k) collocation system. Rows are collocation points, columns basis
/// triples, both flattened with flat_index (last index fastest).
///   A[(l,m,n),(i,j,k)] = T*_i(x_l) T*_j(y_m) T*_k(z_n) - int K T*_i(r) T*_j(s) T*_k(t)
///   b[(l,m,n)]         = f(x_l, y_m, z_n)
struct AssembledLinearSystem {
    int order = 0;
    CollocationGrid grid;
    DenseMatrix matrix;
    std::vector<double> rhs;

    [[nodiscard]] std::size_t size() const noexcept { return rhs.size(); }
    [[nodiscard]] std::size_t row_index(int l, int m, int n) const noexcept { return flat_index(l, m, n, order + 1); }
    [[nodiscard]] std::size_t column_index(int i, int j, int k) const noexcept {
        return flat_index(i, j, k, order + 1);
    }
};

/// Builds the dense system for a linear spec. Specs on a general box are mapped to [0,1]^3
/// first. Throws AssemblyError for a nonlinear spec or a non-finite kernel/forcing sample.
[[nodiscard]] AssembledLinearSystem assemble_linear(const ProblemSpec& spec, int order, const QuadratureRule& rule,
                                                    const AssemblyOptions& options = {});

enum class JacobianMode { analytic, finite_difference };

/// Residual R(a) at every collocation point, with G applied inside the integral, and its Jacobian.
///   R_(l,m,n)(a) = u_N(x_l,y_m,z_n) - int K G(u_N(r,s,t)) - f(x_l,y_m,z_n)
class ResidualSystem {
public:
    ResidualSystem(const ProblemSpec& spec, int order, QuadratureRule rule, AssemblyOptions options = {},
                   JacobianMode mode = JacobianMode::analytic);

    [[nodiscard]] std::size_t size() const noexcept { return forcing_.size(); }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] const CollocationGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const ProblemSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const QuadratureRule& rule() const noexcept { return rule_; }
    [[nodiscard]] JacobianMode jacobian_mode() const noexcept { return mode_; }
    [[nodiscard]] const AssemblyOptions& options() const noexcept { return options_; }

    [[nodiscard]] std::vector<double> residual(std::span<const double> coeffs) const;

    /// dR/da, analytic (via G') or by central differences depending on the mode.
    [[nodiscard]] DenseMatrix jacobian(std::span<const double> coeffs) const;

    [[nodiscard]] DenseMatrix analytic_jacobian(std::span<const double> coeffs) const;
    [[nodiscard]] DenseMatrix finite_difference_jacobian(std::span<const double> coeffs, double step = 1e-6) const;

private:
    ProblemSpec spec_;  // already on the unit box
    Expr derivative_;   // G'(u)
    int order_;
    QuadratureRule rule_;
    AssemblyOptions options_;
    JacobianMode mode_;
    CollocationGrid grid_;
    std::vector<double> forcing_;
};

[[nodiscard]] ResidualSystem build_residual_system(const ProblemSpec& spec, int order, const QuadratureRule& rule,
                                                   const AssemblyOptions& options = {},
                                                   JacobianMode mode = JacobianMode::analytic);

}  // namespace voltcheb
