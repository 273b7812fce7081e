// voltcheb: solve three-dimensional Volterra integral equations by shifted Chebyshev collocation.
//
//   voltcheb solve <problem|fixture> --n N [--quad-order q] [--points file] [--grid g]
//                  [--format csv|json] [--out path] [--coeffs path] [--threads k]
//   voltcheb sweep <problem|fixture> --n-min a --n-max b [--grid g] [--quad-order q]
//   voltcheb fixtures
//
// Exit codes: 0 success, 2 usage, 3 parse/problem errors, 4 assembly errors,
// 5 solver failure (singular system or Newton non-convergence), 6 I/O errors.

#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "voltcheb/errors.hpp"
#include "voltcheb/problem.hpp"
#include "voltcheb/report.hpp"

namespace {

using namespace voltcheb;

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kParse = 3,
    kAssembly = 4,
    kSolver = 5,
    kIo = 6,
};

struct Loaded {
    ProblemSpec spec;
    std::vector<Point3> default_points;
};

Loaded load(const std::string& source) {
    if (is_fixture_id(source)) {
        Fixture f = builtin_fixture(source);
        return {std::move(f.spec), std::move(f.table_points)};
    }
    return {load_problem_file(source), {}};
}

int run_fixtures() {
    for (const auto& id : fixture_ids()) {
        const Fixture f = builtin_fixture(id);
        std::cout << id << "\t" << f.description << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shifted Chebyshev collocation solver for 3-D Volterra integral equations"};
    app.require_subcommand(1);

    std::string problem;
    int order = 1;
    std::optional<int> quad_order;
    std::string points_path;
    std::optional<int> grid;
    std::string format = "csv";
    std::string out_path;
    std::string coeffs_path;
    int threads = 1;
    bool timings = false;
    std::string jacobian = "analytic";
    std::string guess = "zero";
    double newton_tol = 1e-12;
    int max_iters = 50;

    const std::map<std::string, OutputFormat> formats{{"csv", OutputFormat::csv}, {"json", OutputFormat::json}};

    auto* solve = app.add_subcommand("solve", "Solve one problem at a fixed order");
    solve->add_option("problem", problem, "Problem file or built-in fixture id")->required();
    solve->add_option("--n", order, "Truncation order N (>= 1)")->required()->check(CLI::Range(1, 1000));
    solve->add_option("--quad-order", quad_order, "Gauss-Legendre points per axis (default 2N+8)")
        ->check(CLI::Range(1, kMaxQuadratureOrder));
    solve->add_option("--points", points_path, "Evaluation points file (x y z per line)");
    solve->add_option("--grid", grid, "Report max error on a g^3 uniform grid")->check(CLI::Range(2, 1000));
    solve->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    solve->add_option("--out", out_path, "Output path (default: standard output)");
    solve->add_option("--coeffs", coeffs_path, "Also write the coefficient table as CSV to this path");
    solve->add_option("--threads", threads, "Assembly worker threads")->check(CLI::Range(1, 1024));
    solve->add_flag("--timings", timings, "Include wall-clock timings in JSON output");
    solve->add_option("--jacobian", jacobian, "Newton Jacobian")->check(CLI::IsMember({"analytic", "fd"}));
    solve->add_option("--initial-guess", guess, "Newton starting point")
        ->check(CLI::IsMember({"zero", "linearized"}));
    solve->add_option("--newton-tol", newton_tol, "Newton residual tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--max-iters", max_iters, "Newton iteration limit")->check(CLI::Range(1, 100000));

    int n_min = 1;
    int n_max = 1;
    int sweep_grid = 11;
    auto* sweep = app.add_subcommand("sweep", "Convergence study over a range of orders");
    sweep->add_option("problem", problem, "Problem file or built-in fixture id")->required();
    sweep->add_option("--n-min", n_min, "Smallest order")->required()->check(CLI::Range(1, 1000));
    sweep->add_option("--n-max", n_max, "Largest order")->required()->check(CLI::Range(1, 1000));
    sweep->add_option("--grid", sweep_grid, "Per-axis density of the error grid")->check(CLI::Range(2, 1000));
    sweep->add_option("--quad-order", quad_order, "Fixed points per axis (default 2N+8 per N)")
        ->check(CLI::Range(1, kMaxQuadratureOrder));
    sweep->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--out", out_path, "Output path (default: standard output)");
    sweep->add_option("--threads", threads, "Assembly worker threads")->check(CLI::Range(1, 1024));
    sweep->add_flag("--timings", timings, "Include wall-clock timings");

    app.add_subcommand("fixtures", "List built-in fixtures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        const EmitOptions emit_options{timings};
        if (app.got_subcommand("fixtures")) return run_fixtures();

        const Loaded loaded = load(problem);
        if (app.got_subcommand("solve")) {
            SolveRequest request;
            request.order = order;
            request.quadrature_order = quad_order;
            request.points = points_path.empty() ? loaded.default_points : load_points_file(points_path);
            request.grid = grid;
            request.threads = threads;
            request.jacobian = jacobian == "fd" ? JacobianMode::finite_difference : JacobianMode::analytic;
            request.newton.tolerance = newton_tol;
            request.newton.max_iterations = max_iters;
            request.newton.initial_guess = guess == "linearized" ? InitialGuess::linearized : InitialGuess::zero;
            const SolveReport report = run_solve(loaded.spec, request);
            emit(render(report, formats.at(format), emit_options), out_path);
            if (!coeffs_path.empty()) {
                std::ostringstream coeffs;
                write_coefficients_csv(report, coeffs);
                emit(coeffs.str(), coeffs_path);
            }
            return kOk;
        }

        SweepRequest request;
        request.n_min = n_min;
        request.n_max = n_max;
        request.quadrature_order = quad_order;
        request.grid = sweep_grid;
        request.threads = threads;
        const SweepReport report = run_sweep(loaded.spec, request);
        emit(render(report, formats.at(format), emit_options), out_path);
        return kOk;
    } catch (const IoError& e) {
        std::cerr << "voltcheb: I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const ParseError& e) {
        std::cerr << "voltcheb: parse error: " << e.what() << "\n";
        return kParse;
    } catch (const ProblemError& e) {
        std::cerr << "voltcheb: problem error: " << e.what() << "\n";
        return kParse;
    } catch (const EvalError& e) {
        std::cerr << "voltcheb: evaluation error: " << e.what() << "\n";
        return kParse;
    } catch (const AssemblyError& e) {
        std::cerr << "voltcheb: assembly error: " << e.what() << "\n";
        return kAssembly;
    } catch (const QuadratureError& e) {
        std::cerr << "voltcheb: assembly error: " << e.what() << "\n";
        return kAssembly;
    } catch (const SingularMatrixError& e) {
        std::cerr << "voltcheb: solver error: " << e.what() << "\n";
        return kSolver;
    } catch (const ConvergenceError& e) {
        std::cerr << "voltcheb: solver error: " << e.what() << "\n";
        return kSolver;
    } catch (const DomainError& e) {
        std::cerr << "voltcheb: invalid argument: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "voltcheb: internal error: " << e.what() << "\n";
        return kInternal;
    }
}
