#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "voltcheb/assembler.hpp"
#include "voltcheb/problem.hpp"
#include "voltcheb/solver.hpp"

namespace voltcheb {

enum class OutputFormat { csv, json };

struct SolveRequest {
    int order = 1;
    /// Points per axis; default_quadrature_order(order) when unset.
    std::optional<int> quadrature_order;
    std::vector<Point3> points;
    /// Per-axis density of the uniform grid used for the max-error summary (>= 2), if any.
    std::optional<int> grid;
    int threads = 1;
    JacobianMode jacobian = JacobianMode::analytic;
    LinearSolveOptions linear;
    NewtonOptions newton;
};

struct CoefficientRow {
    IndexTriple index;
    double value = 0.0;
};

struct ErrorRow {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double exact = 0.0;
    double approx = 0.0;
    double abs_error = 0.0;
};

struct EvaluationRow {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double approx = 0.0;
};

struct PhaseTimings {
    double assembly_s = 0.0;
    double solve_s = 0.0;
    double evaluation_s = 0.0;
};

struct LinearDiagnostics {
    double growth_factor = 0.0;
    double condition_estimate = 0.0;
    double relative_residual = 0.0;
};

struct SolveReport {
    std::string problem;
    int order = 0;
    int quadrature_order = 0;
    bool linear = true;
    std::vector<CoefficientRow> coefficients;
    /// ||R||_inf at the solution over all collocation points.
    double residual_norm = 0.0;
    std::optional<LinearDiagnostics> linear_diagnostics;
    std::vector<NewtonStep> newton_trace;
    int newton_iterations = 0;
    bool has_exact = false;
    /// Filled when the problem has an exact solution and points were requested.
    std::vector<ErrorRow> error_table;
    /// Filled instead of error_table when there is no exact solution.
    std::vector<EvaluationRow> evaluations;
    std::optional<int> grid;
    std::optional<double> max_grid_error;
    PhaseTimings timings;

    [[nodiscard]] std::vector<double> coefficient_values() const;
};

/// Full pipeline: assemble, solve (LU or Newton), evaluate. Throws ConvergenceError if Newton
/// does not reach its tolerance.
[[nodiscard]] SolveReport run_solve(const ProblemSpec& spec, const SolveRequest& request);

struct SweepRequest {
    int n_min = 1;
    int n_max = 1;
    /// Fixed points per axis for every N; 2N + 8 when unset.
    std::optional<int> quadrature_order;
    int grid = 11;
    int threads = 1;
};

struct SweepRow {
    int order = 0;
    int quadrature_order = 0;
    bool ok = false;
    double max_error = 0.0;
    double assembly_s = 0.0;
    double solve_s = 0.0;
    std::string error;
};

struct SweepReport {
    std::string problem;
    int grid = 0;
    std::vector<SweepRow> rows;  // ascending N
};

/// One solve per N in [n_min, n_max]; a failing N is recorded as a failed row. Requires an
/// exact solution. Throws DomainError for an empty range.
[[nodiscard]] SweepReport run_sweep(const ProblemSpec& spec, const SweepRequest& request);

/// Largest |exact - u_N| on a density^3 uniform grid over the domain.
[[nodiscard]] double max_grid_error(const ChebyshevTensorApproximant& approx, const Expr& exact, int density);

/// Points file: one "x y z" per line (commas or whitespace), '#' comments.
[[nodiscard]] std::vector<Point3> parse_points(std::string_view text);
[[nodiscard]] std::vector<Point3> load_points_file(const std::string& path);

/// Number formatting used by every CSV writer: shortest form that round-trips exactly.
[[nodiscard]] std::string format_real(double value);

struct EmitOptions {
    /// Wall-clock timings differ between runs, so they are only written on request.
    bool include_timings = false;
};

/// Error table CSV (x,y,z,exact,approx,abs_error), or x,y,z,approx without an exact solution.
void write_error_table_csv(const SolveReport& report, std::ostream& out);
/// Coefficient CSV (i,j,k,value).
void write_coefficients_csv(const SolveReport& report, std::ostream& out);
void write_sweep_csv(const SweepReport& report, std::ostream& out, const EmitOptions& options = {});

[[nodiscard]] std::string solve_report_json(const SolveReport& report, const EmitOptions& options = {});
[[nodiscard]] std::string sweep_report_json(const SweepReport& report, const EmitOptions& options = {});
[[nodiscard]] SolveReport parse_solve_report_json(std::string_view text);

/// Renders a report in the requested format.
[[nodiscard]] std::string render(const SolveReport& report, OutputFormat format, const EmitOptions& options = {});
[[nodiscard]] std::string render(const SweepReport& report, OutputFormat format, const EmitOptions& options = {});

/// Writes to `path`, or to standard output when empty. Throws IoError with the path.
void emit(const std::string& content, const std::string& path);

}  // namespace voltcheb
