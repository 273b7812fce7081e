#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "voltcheb/assembler.hpp"
#include "voltcheb/dense_matrix.hpp"

namespace voltcheb {

struct LinearSolveOptions {
    /// A pivot is singular if |pivot| < threshold * (largest |entry| of its original column).
    double pivot_threshold = 1e-12;
    bool compute_residual = true;
};

/// Diagnostics from one factorization and solve.
struct LinearSolveReport {
    std::vector<double> solution;
    /// max |U| / max |A|.
    double growth_factor = 0.0;
    /// Smallest |pivot| / (largest |entry| of its original column).
    double min_relative_pivot = 0.0;
    /// 1-norm condition estimate (Hager's estimator).
    double condition_estimate = 0.0;
    /// ||Ax - b||_inf / (||A||_inf ||x||_inf + ||b||_inf); negative if not computed.
    double relative_residual = -1.0;
};

/// PA = LU with partial pivoting. Keeps the factors for repeated solves.
class LuFactorization {
public:
    /// Throws SingularMatrixError naming the pivot column if a pivot falls below the threshold.
    explicit LuFactorization(const DenseMatrix& a, double pivot_threshold = 1e-12);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::vector<double> solve(std::span<const double> b) const;
    /// Solves A^T x = b.
    [[nodiscard]] std::vector<double> solve_transposed(std::span<const double> b) const;

    [[nodiscard]] double growth_factor() const noexcept { return growth_; }
    [[nodiscard]] double min_relative_pivot() const noexcept { return min_relative_pivot_; }

    /// Estimate of ||A||_1 ||A^-1||_1.
    [[nodiscard]] double condition_estimate() const;

private:
    std::size_t n_ = 0;
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;  // row perm_[k] of A sits in row k of LU
    double norm1_ = 0.0;
    double growth_ = 0.0;
    double min_relative_pivot_ = 0.0;
};

[[nodiscard]] LinearSolveReport lu_solve(const DenseMatrix& a, std::span<const double> b,
                                         const LinearSolveOptions& options = {});

[[nodiscard]] LinearSolveReport lu_solve(const AssembledLinearSystem& sys, const LinearSolveOptions& options = {});

enum class InitialGuess { zero, linearized };

struct NewtonOptions {
    double tolerance = 1e-12;  // on ||R||_inf
    int max_iterations = 50;
    int max_halvings = 20;
    InitialGuess initial_guess = InitialGuess::zero;
    LinearSolveOptions linear;
};

struct NewtonStep {
    int iteration = 0;
    double residual_norm = 0.0;  // after the step
    double step_norm = 0.0;      // ||lambda * delta||_inf
    double damping = 1.0;        // lambda
    int halvings = 0;
};

struct NewtonResult {
    std::vector<double> solution;  // best iterate
    double initial_residual_norm = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string diagnostic;
    std::vector<NewtonStep> trace;
};

/// Damped Newton on R(a) = 0. Each step solves J delta = -R with LU and backtracks by halving
/// until ||R||_inf decreases. Non-convergence is reported through `converged` and `diagnostic`
/// with the best iterate; a singular Jacobian throws SingularMatrixError.
[[nodiscard]] NewtonResult newton_solve(const ResidualSystem& sys, const NewtonOptions& options = {});

}  // namespace voltcheb
