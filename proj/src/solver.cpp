#include "voltcheb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "voltcheb/errors.hpp"

namespace voltcheb {

LuFactorization::LuFactorization(const DenseMatrix& a, double pivot_threshold)
    : n_(a.rows()), lu_(a), perm_(a.rows()) {
    if (a.rows() != a.cols()) throw DomainError("LU factorization needs a square matrix");
    if (!(pivot_threshold > 0.0)) throw DomainError("pivot threshold must be positive");
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});

    double max_a = 0.0;
    std::vector<double> column_scale(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r) {
        for (std::size_t c = 0; c < n_; ++c) {
            const double v = std::abs(a(r, c));
            column_scale[c] = std::max(column_scale[c], v);
            max_a = std::max(max_a, v);
        }
    }
    for (std::size_t c = 0; c < n_; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n_; ++r) sum += std::abs(a(r, c));
        norm1_ = std::max(norm1_, sum);
    }

    double max_u = 0.0;
    min_relative_pivot_ = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t pivot = k;
        double pivot_abs = std::abs(lu_(k, k));
        for (std::size_t r = k + 1; r < n_; ++r) {
            const double v = std::abs(lu_(r, k));
            if (v > pivot_abs) {
                pivot = r;
                pivot_abs = v;
            }
        }
        const double relative = column_scale[k] > 0.0 ? pivot_abs / column_scale[k] : 0.0;
        min_relative_pivot_ = std::min(min_relative_pivot_, relative);
        if (!(relative >= pivot_threshold)) {
            std::ostringstream msg;
            msg << "matrix is numerically singular: pivot " << pivot_abs << " in column " << k
                << " is below the relative threshold " << pivot_threshold;
            throw SingularMatrixError(msg.str(), k);
        }
        if (pivot != k) {
            std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(pivot).begin());
            std::swap(perm_[k], perm_[pivot]);
        }
        const double inv = 1.0 / lu_(k, k);
        for (std::size_t r = k + 1; r < n_; ++r) {
            const double factor = lu_(r, k) * inv;
            lu_(r, k) = factor;
            if (factor == 0.0) continue;
            auto dst = lu_.row(r);
            auto src = lu_.row(k);
            for (std::size_t c = k + 1; c < n_; ++c) dst[c] -= factor * src[c];
        }
        for (std::size_t c = k; c < n_; ++c) max_u = std::max(max_u, std::abs(lu_(k, c)));
    }
    growth_ = max_a > 0.0 ? max_u / max_a : 0.0;
    if (n_ == 0) min_relative_pivot_ = 0.0;
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
    if (b.size() != n_) throw DomainError("right-hand side has the wrong length");
    std::vector<double> x(n_);
    for (std::size_t k = 0; k < n_; ++k) x[k] = b[perm_[k]];
    for (std::size_t r = 0; r < n_; ++r) {
        const auto row = lu_.row(r);
        double sum = x[r];
        for (std::size_t c = 0; c < r; ++c) sum -= row[c] * x[c];
        x[r] = sum;
    }
    for (std::size_t r = n_; r-- > 0;) {
        const auto row = lu_.row(r);
        double sum = x[r];
        for (std::size_t c = r + 1; c < n_; ++c) sum -= row[c] * x[c];
        x[r] = sum / row[r];
    }
    return x;
}

std::vector<double> LuFactorization::solve_transposed(std::span<const double> b) const {
    if (b.size() != n_) throw DomainError("right-hand side has the wrong length");
    // A^T = U^T L^T P, so solve U^T w = b, L^T v = w, then x = P^T v.
    std::vector<double> w(b.begin(), b.end());
    for (std::size_t r = 0; r < n_; ++r) {
        double sum = w[r];
        for (std::size_t c = 0; c < r; ++c) sum -= lu_(c, r) * w[c];
        w[r] = sum / lu_(r, r);
    }
    for (std::size_t r = n_; r-- > 0;) {
        double sum = w[r];
        for (std::size_t c = r + 1; c < n_; ++c) sum -= lu_(c, r) * w[c];
        w[r] = sum;
    }
    std::vector<double> x(n_);
    for (std::size_t k = 0; k < n_; ++k) x[perm_[k]] = w[k];
    return x;
}

double LuFactorization::condition_estimate() const {
    if (n_ == 0) return 0.0;
    std::vector<double> x(n_, 1.0 / static_cast<double>(n_));
    double estimate = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        const std::vector<double> y = solve(x);
        estimate = 0.0;
        for (double v : y) estimate += std::abs(v);
        std::vector<double> sign(n_);
        for (std::size_t i = 0; i < n_; ++i) sign[i] = y[i] >= 0.0 ? 1.0 : -1.0;
        const std::vector<double> z = solve_transposed(sign);
        std::size_t j = 0;
        double zx = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            zx += z[i] * x[i];
            if (std::abs(z[i]) > std::abs(z[j])) j = i;
        }
        if (std::abs(z[j]) <= zx) break;
        std::fill(x.begin(), x.end(), 0.0);
        x[j] = 1.0;
    }
    return norm1_ * estimate;
}

LinearSolveReport lu_solve(const DenseMatrix& a, std::span<const double> b, const LinearSolveOptions& options) {
    const LuFactorization lu(a, options.pivot_threshold);
    LinearSolveReport report;
    report.solution = lu.solve(b);
    report.growth_factor = lu.growth_factor();
    report.min_relative_pivot = lu.min_relative_pivot();
    report.condition_estimate = lu.condition_estimate();
    if (options.compute_residual) {
        std::vector<double> r = multiply(a, report.solution);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
        const double denom = norm_inf(a) * norm_inf(report.solution) + norm_inf(b);
        report.relative_residual = denom > 0.0 ? norm_inf(r) / denom : 0.0;
    }
    return report;
}

LinearSolveReport lu_solve(const AssembledLinearSystem& sys, const LinearSolveOptions& options) {
    return lu_solve(sys.matrix, sys.rhs, options);
}

namespace {

std::vector<double> initial_guess(const ResidualSystem& sys, const NewtonOptions& options) {
    if (options.initial_guess == InitialGuess::zero) return std::vector<double>(sys.size(), 0.0);
    ProblemSpec linearized = sys.spec();
    linearized.nonlinearity = Expr::variable(Var::u);
    const AssembledLinearSystem lin = assemble_linear(linearized, sys.order(), sys.rule(), sys.options());
    return lu_solve(lin, options.linear).solution;
}

}  // namespace

NewtonResult newton_solve(const ResidualSystem& sys, const NewtonOptions& options) {
    if (!(options.tolerance > 0.0)) throw DomainError("Newton tolerance must be positive");
    if (options.max_iterations < 1) throw DomainError("Newton needs max_iterations >= 1");

    NewtonResult result;
    std::vector<double> x = initial_guess(sys, options);
    std::vector<double> r = sys.residual(x);
    double norm = norm_inf(r);
    result.initial_residual_norm = norm;

    int iteration = 0;
    while (norm > options.tolerance) {
        if (iteration == options.max_iterations) {
            std::ostringstream msg;
            msg << "Newton did not reach tolerance " << options.tolerance << " in " << options.max_iterations
                << " iterations (residual " << norm << ")";
            result.diagnostic = msg.str();
            break;
        }
        ++iteration;
        const LuFactorization lu(sys.jacobian(x), options.linear.pivot_threshold);
        std::vector<double> delta = lu.solve(r);  // J delta = R, step is -delta

        double lambda = 1.0;
        int halvings = 0;
        std::vector<double> trial(x.size());
        std::vector<double> trial_r;
        double trial_norm = 0.0;
        while (true) {
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - lambda * delta[i];
            trial_r = sys.residual(trial);
            trial_norm = norm_inf(trial_r);
            if (trial_norm < norm || halvings == options.max_halvings) break;
            lambda *= 0.5;
            ++halvings;
        }
        if (!(trial_norm < norm)) {
            std::ostringstream msg;
            msg << "Newton stalled at iteration " << iteration << ": no decrease after " << halvings
                << " halvings (residual " << norm << ")";
            result.diagnostic = msg.str();
            break;
        }
        result.trace.push_back({iteration, trial_norm, lambda * norm_inf(delta), lambda, halvings});
        x = std::move(trial);
        r = std::move(trial_r);
        norm = trial_norm;
    }

    result.solution = std::move(x);
    result.residual_norm = norm;
    result.iterations = iteration;
    result.converged = norm <= options.tolerance;
    return result;
}

}  // namespace voltcheb
