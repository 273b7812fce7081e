#include "voltcheb/report.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "voltcheb/errors.hpp"

namespace voltcheb {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int resolve_quadrature_order(int order, const std::optional<int>& requested) {
    return requested.value_or(default_quadrature_order(order));
}

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double real_from(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::vector<double> SolveReport::coefficient_values() const {
    std::vector<double> v;
    v.reserve(coefficients.size());
    for (const auto& c : coefficients) v.push_back(c.value);
    return v;
}

double max_grid_error(const ChebyshevTensorApproximant& approx, const Expr& exact, int density) {
    if (density < 2) throw DomainError("error grid density must be at least 2");
    const Box3& box = approx.domain();
    double worst = 0.0;
    for (int a = 0; a < density; ++a) {
        const double x = box.x * a / (density - 1);
        for (int b = 0; b < density; ++b) {
            const double y = box.y * b / (density - 1);
            for (int c = 0; c < density; ++c) {
                const double z = box.z * c / (density - 1);
                const double err = std::abs(eval(exact, Bindings::point(x, y, z)) - tensor_eval(approx, x, y, z));
                worst = std::max(worst, err);
            }
        }
    }
    return worst;
}

SolveReport run_solve(const ProblemSpec& spec, const SolveRequest& request) {
    if (request.order < 1) throw DomainError("order N must be >= 1");
    if (request.grid && *request.grid < 2) throw DomainError("error grid density must be at least 2");
    validate_problem(spec);

    SolveReport report;
    report.problem = spec.id;
    report.order = request.order;
    report.quadrature_order = resolve_quadrature_order(request.order, request.quadrature_order);
    report.linear = spec.is_linear();
    report.has_exact = spec.exact_solution.has_value();
    report.grid = request.grid;

    const QuadratureRule rule = gauss_legendre_rule(report.quadrature_order);
    const AssemblyOptions assembly{request.threads};
    std::vector<double> coeffs;

    if (report.linear) {
        auto start = Clock::now();
        const AssembledLinearSystem sys = assemble_linear(spec, request.order, rule, assembly);
        report.timings.assembly_s = seconds_since(start);
        start = Clock::now();
        LinearSolveOptions linear = request.linear;
        linear.compute_residual = true;
        const LinearSolveReport solved = lu_solve(sys, linear);
        coeffs = solved.solution;
        std::vector<double> r = multiply(sys.matrix, coeffs);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= sys.rhs[i];
        report.residual_norm = norm_inf(r);
        report.linear_diagnostics =
            LinearDiagnostics{solved.growth_factor, solved.condition_estimate, solved.relative_residual};
        report.timings.solve_s = seconds_since(start);
    } else {
        auto start = Clock::now();
        const ResidualSystem sys = build_residual_system(spec, request.order, rule, assembly, request.jacobian);
        report.timings.assembly_s = seconds_since(start);
        start = Clock::now();
        NewtonResult newton = newton_solve(sys, request.newton);
        report.timings.solve_s = seconds_since(start);
        if (!newton.converged) throw ConvergenceError(newton.diagnostic);
        coeffs = std::move(newton.solution);
        report.residual_norm = newton.residual_norm;
        report.newton_trace = std::move(newton.trace);
        report.newton_iterations = newton.iterations;
    }

    const int n = request.order + 1;
    for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
        report.coefficients.push_back({unflatten_index(flat, n), coeffs[flat]});
    }

    const auto start = Clock::now();
    const ChebyshevTensorApproximant approx(request.order, coeffs, spec.domain);
    for (const auto& [x, y, z] : request.points) {
        const double approx_value = tensor_eval(approx, x, y, z);
        if (spec.exact_solution) {
            const double exact = eval(*spec.exact_solution, Bindings::point(x, y, z));
            report.error_table.push_back({x, y, z, exact, approx_value, std::abs(exact - approx_value)});
        } else {
            report.evaluations.push_back({x, y, z, approx_value});
        }
    }
    if (request.grid && spec.exact_solution) {
        report.max_grid_error = max_grid_error(approx, *spec.exact_solution, *request.grid);
    }
    report.timings.evaluation_s = seconds_since(start);
    return report;
}

SweepReport run_sweep(const ProblemSpec& spec, const SweepRequest& request) {
    if (request.n_min < 1) throw DomainError("sweep needs n-min >= 1");
    if (request.n_max < request.n_min) {
        throw DomainError("empty sweep range [" + std::to_string(request.n_min) + ", " +
                          std::to_string(request.n_max) + "]");
    }
    if (request.grid < 2) throw DomainError("error grid density must be at least 2");
    if (!spec.exact_solution) throw ProblemError("sweep needs a problem with an exact solution");

    SweepReport report;
    report.problem = spec.id;
    report.grid = request.grid;
    for (int order = request.n_min; order <= request.n_max; ++order) {
        SweepRow row;
        row.order = order;
        row.quadrature_order = resolve_quadrature_order(order, request.quadrature_order);
        try {
            SolveRequest solve;
            solve.order = order;
            solve.quadrature_order = row.quadrature_order;
            solve.grid = request.grid;
            solve.threads = request.threads;
            const SolveReport solved = run_solve(spec, solve);
            row.ok = true;
            row.max_error = solved.max_grid_error.value_or(0.0);
            row.assembly_s = solved.timings.assembly_s;
            row.solve_s = solved.timings.solve_s;
        } catch (const Error& e) {
            row.ok = false;
            row.max_error = std::numeric_limits<double>::quiet_NaN();
            row.error = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<Point3> parse_points(std::string_view text) {
    std::vector<Point3> points;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        Point3 p{};
        std::size_t count = 0;
        std::size_t pos = 0;
        auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
        while (true) {
            while (pos < line.size() && is_sep(line[pos])) ++pos;
            if (pos == line.size()) break;
            std::size_t stop = pos;
            while (stop < line.size() && !is_sep(line[stop])) ++stop;
            const std::string_view token = line.substr(pos, stop - pos);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec != std::errc() || ptr != token.data() + token.size() || count == 3) {
                throw ParseError("points line " + std::to_string(line_no) + ": expected three reals",
                                 static_cast<std::size_t>(token.data() - text.data()));
            }
            p[count++] = v;
            pos = stop;
        }
        if (count == 0) continue;
        if (count != 3) {
            throw ParseError("points line " + std::to_string(line_no) + ": expected three reals",
                             static_cast<std::size_t>(line.data() - text.data()));
        }
        points.push_back(p);
    }
    return points;
}

std::vector<Point3> load_points_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open points file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_points(buffer.str());
}

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    // Shortest representation that parses back to the same double.
    std::array<char, 40> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), result.ptr);
}

void write_error_table_csv(const SolveReport& report, std::ostream& out) {
    if (report.has_exact) {
        out << "x,y,z,exact,approx,abs_error\n";
        for (const auto& r : report.error_table) {
            out << format_real(r.x) << ',' << format_real(r.y) << ',' << format_real(r.z) << ','
                << format_real(r.exact) << ',' << format_real(r.approx) << ',' << format_real(r.abs_error) << '\n';
        }
    } else {
        out << "x,y,z,approx\n";
        for (const auto& r : report.evaluations) {
            out << format_real(r.x) << ',' << format_real(r.y) << ',' << format_real(r.z) << ','
                << format_real(r.approx) << '\n';
        }
    }
}

void write_coefficients_csv(const SolveReport& report, std::ostream& out) {
    out << "i,j,k,value\n";
    for (const auto& c : report.coefficients) {
        out << c.index.i << ',' << c.index.j << ',' << c.index.k << ',' << format_real(c.value) << '\n';
    }
}

void write_sweep_csv(const SweepReport& report, std::ostream& out, const EmitOptions& options) {
    out << "n,quad_order,status,max_error";
    if (options.include_timings) out << ",assembly_s,solve_s";
    out << ",message\n";
    for (const auto& r : report.rows) {
        out << r.order << ',' << r.quadrature_order << ',' << (r.ok ? "ok" : "failed") << ','
            << (r.ok ? format_real(r.max_error) : std::string("nan"));
        if (options.include_timings) out << ',' << format_real(r.assembly_s) << ',' << format_real(r.solve_s);
        // Quote the message; embedded quotes are doubled.
        std::string message;
        for (char ch : r.error) {
            if (ch == '"') message += '"';
            if (ch != '\n') message += ch;
        }
        out << ",\"" << message << "\"\n";
    }
}

std::string solve_report_json(const SolveReport& report, const EmitOptions& options) {
    json j;
    j["problem"] = report.problem;
    j["order"] = report.order;
    j["quadrature_order"] = report.quadrature_order;
    j["linear"] = report.linear;
    json coeffs = json::array();
    for (const auto& c : report.coefficients) {
        coeffs.push_back({{"i", c.index.i}, {"j", c.index.j}, {"k", c.index.k}, {"value", c.value}});
    }
    j["coefficients"] = std::move(coeffs);
    j["residual_norm"] = report.residual_norm;
    if (report.linear_diagnostics) {
        j["linear_diagnostics"] = {{"growth_factor", report.linear_diagnostics->growth_factor},
                                   {"condition_estimate", real_or_null(report.linear_diagnostics->condition_estimate)},
                                   {"relative_residual", report.linear_diagnostics->relative_residual}};
    }
    if (!report.linear) {
        json trace = json::array();
        for (const auto& s : report.newton_trace) {
            trace.push_back({{"iteration", s.iteration},
                             {"residual_norm", s.residual_norm},
                             {"step_norm", s.step_norm},
                             {"damping", s.damping},
                             {"halvings", s.halvings}});
        }
        j["newton_iterations"] = report.newton_iterations;
        j["newton_trace"] = std::move(trace);
    }
    j["has_exact"] = report.has_exact;
    json table = json::array();
    for (const auto& r : report.error_table) {
        table.push_back({{"x", r.x}, {"y", r.y}, {"z", r.z}, {"exact", r.exact}, {"approx", r.approx},
                         {"abs_error", r.abs_error}});
    }
    j["error_table"] = std::move(table);
    json evals = json::array();
    for (const auto& r : report.evaluations) {
        evals.push_back({{"x", r.x}, {"y", r.y}, {"z", r.z}, {"approx", r.approx}});
    }
    j["evaluations"] = std::move(evals);
    if (report.grid) j["grid"] = *report.grid;
    if (report.max_grid_error) j["max_grid_error"] = *report.max_grid_error;
    if (options.include_timings) {
        j["timings"] = {{"assembly_s", report.timings.assembly_s},
                        {"solve_s", report.timings.solve_s},
                        {"evaluation_s", report.timings.evaluation_s}};
    }
    return j.dump(2) + "\n";
}

SolveReport parse_solve_report_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid report JSON: ") + e.what(), e.byte);
    }
    try {
        SolveReport r;
        r.problem = j.at("problem").get<std::string>();
        r.order = j.at("order").get<int>();
        r.quadrature_order = j.at("quadrature_order").get<int>();
        r.linear = j.at("linear").get<bool>();
        for (const auto& c : j.at("coefficients")) {
            r.coefficients.push_back(
                {{c.at("i").get<int>(), c.at("j").get<int>(), c.at("k").get<int>()}, c.at("value").get<double>()});
        }
        r.residual_norm = j.at("residual_norm").get<double>();
        if (j.contains("linear_diagnostics")) {
            const auto& d = j["linear_diagnostics"];
            r.linear_diagnostics = LinearDiagnostics{d.at("growth_factor").get<double>(),
                                                     real_from(d.at("condition_estimate")),
                                                     d.at("relative_residual").get<double>()};
        }
        if (j.contains("newton_trace")) {
            r.newton_iterations = j.at("newton_iterations").get<int>();
            for (const auto& s : j["newton_trace"]) {
                r.newton_trace.push_back({s.at("iteration").get<int>(), s.at("residual_norm").get<double>(),
                                          s.at("step_norm").get<double>(), s.at("damping").get<double>(),
                                          s.at("halvings").get<int>()});
            }
        }
        r.has_exact = j.at("has_exact").get<bool>();
        for (const auto& e : j.at("error_table")) {
            r.error_table.push_back({e.at("x").get<double>(), e.at("y").get<double>(), e.at("z").get<double>(),
                                     e.at("exact").get<double>(), e.at("approx").get<double>(),
                                     e.at("abs_error").get<double>()});
        }
        for (const auto& e : j.at("evaluations")) {
            r.evaluations.push_back(
                {e.at("x").get<double>(), e.at("y").get<double>(), e.at("z").get<double>(), e.at("approx").get<double>()});
        }
        if (j.contains("grid")) r.grid = j["grid"].get<int>();
        if (j.contains("max_grid_error")) r.max_grid_error = j["max_grid_error"].get<double>();
        if (j.contains("timings")) {
            const auto& t = j["timings"];
            r.timings = {t.at("assembly_s").get<double>(), t.at("solve_s").get<double>(),
                         t.at("evaluation_s").get<double>()};
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed report JSON: ") + e.what(), 0);
    }
}

std::string sweep_report_json(const SweepReport& report, const EmitOptions& options) {
    json j;
    j["problem"] = report.problem;
    j["grid"] = report.grid;
    json rows = json::array();
    for (const auto& r : report.rows) {
        json row{{"order", r.order}, {"quadrature_order", r.quadrature_order}, {"ok", r.ok},
                 {"max_error", real_or_null(r.max_error)}};
        if (options.include_timings) {
            row["assembly_s"] = r.assembly_s;
            row["solve_s"] = r.solve_s;
        }
        if (!r.ok) row["error"] = r.error;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::string render(const SolveReport& report, OutputFormat format, const EmitOptions& options) {
    if (format == OutputFormat::json) return solve_report_json(report, options);
    std::ostringstream out;
    write_error_table_csv(report, out);
    return out.str();
}

std::string render(const SweepReport& report, OutputFormat format, const EmitOptions& options) {
    if (format == OutputFormat::json) return sweep_report_json(report, options);
    std::ostringstream out;
    write_sweep_csv(report, out, options);
    return out.str();
}

void emit(const std::string& content, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        if (!std::cout) throw IoError("failed writing to standard output");
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace voltcheb
