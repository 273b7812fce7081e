// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../reference_tables.hpp"
#include "../test_polynomials.hpp"
#include "voltcheb/report.hpp"

using namespace voltcheb;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
};

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = a.size() == b.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) { return max_abs_diff(a.data(), b.data()); }

double at(const Expr& e, double x, double y, double z) { return eval(e, Bindings::point(x, y, z)); }

// ---------------------------------------------------------------------------

Outcome exact_recovery_ex31() {
    Outcome o;
    const Fixture fx = builtin_fixture("ex3_1");
    SolveRequest req;
    req.order = 1;
    req.quadrature_order = 8;
    req.grid = 5;
    const SolveReport r = run_solve(fx.spec, req);
    const std::vector<double> expected{1.5, 0.5, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0};
    const double coeff_err = max_abs_diff(r.coefficient_values(), expected);
    o.check(coeff_err <= 1e-10, "coefficients, max deviation " + sci(coeff_err));
    o.check(r.max_grid_error && *r.max_grid_error <= 1e-10, "5x5x5 grid error " + sci(r.max_grid_error.value_or(NAN)));
    return o;
}

Outcome coefficients_ex32() {
    Outcome o;
    SolveRequest req;
    req.order = 2;
    req.quadrature_order = 12;
    const SolveReport r = run_solve(builtin_fixture("ex3_2").spec, req);
    const std::vector<double> expected{
        1.0 / 2, 3.0 / 8, 1.0 / 16, 1.0 / 2, 3.0 / 8, 1.0 / 16, 0, 0, 0,
        3.0 / 8, 1.0 / 8, 0, 3.0 / 8, 1.0 / 8, 0, 0, 0, 0,
        1.0 / 16, 0, 0, 1.0 / 16, 0, 0, 0, 0, 0,
    };
    const double err = max_abs_diff(r.coefficient_values(), expected);
    o.check(err <= 1e-9, "27 coefficients, max deviation " + sci(err));
    return o;
}

Outcome nonlinear_ex33() {
    Outcome o;
    const ResidualSystem sys = build_residual_system(builtin_fixture("ex3_3").spec, 1, gauss_legendre_rule(12));
    const NewtonResult n = newton_solve(sys);
    o.check(n.converged, "converged" + (n.diagnostic.empty() ? "" : " (" + n.diagnostic + ")"));
    o.check(n.residual_norm <= 1e-12, "residual " + sci(n.residual_norm));
    o.check(n.iterations <= 10, "iterations " + std::to_string(n.iterations));
    const double err = max_abs_diff(n.solution, std::vector<double>(8, 0.125));
    o.check(err <= 1e-8, "coefficients vs 1/8, max deviation " + sci(err));
    return o;
}

Outcome table_replication(const char* id, const std::array<testing::ReferenceRow, 7>& table, bool check_exact) {
    Outcome o;
    const Fixture fx = builtin_fixture(id);
    SolveRequest req;
    req.order = 2;
    req.quadrature_order = 12;
    req.points = fx.table_points;
    const SolveReport r = run_solve(fx.spec, req);
    if (r.error_table.size() != table.size()) {
        o.check(false, "error table has " + std::to_string(r.error_table.size()) + " rows");
        return o;
    }
    double worst_rel = 0.0, worst_exact = 0.0;
    bool exact_ok = true, points_ok = true;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const ErrorRow& row = r.error_table[i];
        const testing::ReferenceRow& ref = table[i];
        points_ok = points_ok && row.x == ref.x && row.y == ref.y && row.z == ref.z;
        worst_rel = std::max(worst_rel, std::abs(row.abs_error - ref.abs_error) / ref.abs_error);
        worst_exact = std::max(worst_exact, std::abs(row.exact - ref.exact));
        exact_ok = exact_ok && std::abs(row.exact - ref.exact) <= ref.exact_resolution;
    }
    o.check(points_ok, "seven built-in evaluation points");
    o.check(worst_rel <= 0.01, "absolute errors, worst relative deviation " + fmt("%.4f%%", 100 * worst_rel));
    if (check_exact) o.check(exact_ok, "exact column at printed precision, worst " + sci(worst_exact));
    o.notes.push_back("     abs error at (0.1,0.1,0.1) = " + fmt("%.8e", r.error_table.front().abs_error));
    return o;
}

Outcome fixture_self_consistency() {
    Outcome o;
    const QuadratureRule rule = gauss_legendre_rule(16);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const std::string& id : fixture_ids()) {
        const ProblemSpec spec = builtin_fixture(id).spec;
        if (!spec.exact_solution) continue;
        const Expr& u = *spec.exact_solution;
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double x = unit(rng), y = unit(rng), z = unit(rng);
            const Integrand3 integrand = [&](double px, double py, double pz, double r, double s, double t) {
                Bindings k = Bindings::point(px, py, pz);
                k.set(Var::r, r).set(Var::s, s).set(Var::t, t);
                Bindings g;
                g.set(Var::u, at(u, r, s, t));
                return eval(spec.kernel, k) * eval(spec.nonlinearity, g);
            };
            worst = std::max(worst, std::abs(at(u, x, y, z) - at(spec.f, x, y, z) - box_integral(integrand, {x, y, z}, rule)));
        }
        o.check(worst <= 1e-10, id + " defect " + sci(worst));
    }
    return o;
}

Outcome property_suite() {
    Outcome o;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    {  // Chebyshev recurrence vs cosine form
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double x = unit(rng);
            for (int n = 0; n <= 64; ++n)
                worst = std::max(worst, std::abs(shifted_cheb_eval(n, x) - std::cos(n * std::acos(2 * x - 1))));
        }
        o.check(worst <= 1e-12, "Chebyshev cosine identity, n <= 64, 1000 points: " + sci(worst));
    }
    {  // exactness up to per-axis degree 2q - 1
        double worst = 0.0;
        for (int q : {1, 2, 4, 6, 12}) {
            const QuadratureRule rule = gauss_legendre_rule(q);
            for (int trial = 0; trial < 10; ++trial) {
                const testing::Polynomial p = testing::random_polynomial(rng, 2 * q - 1, 6);
                const double x = unit(rng), y = unit(rng), z = unit(rng);
                const double got = box_integral(
                    [&](double, double, double, double r, double s, double t) { return p(r, s, t); }, {x, y, z}, rule);
                worst = std::max(worst, std::abs(got - p.box_integral(x, y, z)));
            }
        }
        o.check(worst <= 1e-12, "quadrature polynomial exactness: " + sci(worst));
    }
    {  // Gauss-Legendre vs brute force and analytic
        const QuadratureRule rule = gauss_legendre_rule(12);
        double worst_brute = 0.0, worst_exact = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const testing::Polynomial p = testing::random_polynomial(rng, 6, 5);
            const Integrand3 f = [&](double, double, double, double r, double s, double t) { return p(r, s, t); };
            const double x = unit(rng), y = unit(rng), z = unit(rng);
            const double got = box_integral(f, {x, y, z}, rule);
            worst_brute = std::max(worst_brute, std::abs(got - brute_force_integral(f, {x, y, z}, 256)));
            worst_exact = std::max(worst_exact, std::abs(got - p.box_integral(x, y, z)));
        }
        o.check(worst_brute <= 1e-3, "quadrature vs brute force (m = 256), 50 integrands: " + sci(worst_brute));
        o.check(worst_exact <= 1e-12, "quadrature vs analytic, 50 integrands: " + sci(worst_exact));
    }
    {  // analytic Jacobian vs central differences
        const ProblemSpec smooth =
            load_problem("f = \"x*y + z\"\nkernel = \"0.3*(1 + r*s - t)\"\nnonlinearity = \"sin(u) + u^3/5\"\n", "smooth");
        std::uniform_real_distribution<double> coeff(-1.0, 1.0);
        double worst = 0.0;
        for (const ProblemSpec& spec : {builtin_fixture("ex3_3").spec, smooth}) {
            for (int order = 1; order <= 2; ++order) {
                const ResidualSystem res =
                    build_residual_system(spec, order, gauss_legendre_rule(default_quadrature_order(order)));
                std::vector<double> a(res.size());
                for (double& v : a) v = coeff(rng);
                worst = std::max(worst, max_abs_diff(res.analytic_jacobian(a), res.finite_difference_jacobian(a, 1e-6)));
            }
        }
        o.check(worst <= 1e-5, "Jacobian vs finite differences: " + sci(worst));
    }
    {  // linear and Newton paths
        double worst = 0.0;
        for (const char* id : {"ex3_1", "ex3_2", "ex3_4", "ex3_5"}) {
            for (int order = 1; order <= 2; ++order) {
                const ProblemSpec spec = builtin_fixture(id).spec;
                const QuadratureRule rule = gauss_legendre_rule(default_quadrature_order(order));
                const NewtonResult n = newton_solve(build_residual_system(spec, order, rule));
                const LinearSolveReport l = lu_solve(assemble_linear(spec, order, rule));
                worst = std::max(worst, n.converged ? max_abs_diff(n.solution, l.solution) : INFINITY);
            }
        }
        o.check(worst <= 1e-9, "linear vs Newton path, linear fixtures N = 1,2: " + sci(worst));
    }
    {  // determinism across thread counts
        bool same = true;
        for (const char* id : {"ex3_4", "ex3_5"}) {
            const QuadratureRule rule = gauss_legendre_rule(14);
            const AssembledLinearSystem ref = assemble_linear(builtin_fixture(id).spec, 3, rule, {1});
            for (int threads : {2, 3, 8}) {
                const AssembledLinearSystem other = assemble_linear(builtin_fixture(id).spec, 3, rule, {threads});
                same = same && other.matrix == ref.matrix && other.rhs == ref.rhs;
            }
        }
        const ResidualSystem r1 = build_residual_system(builtin_fixture("ex3_3").spec, 2, gauss_legendre_rule(12), {1});
        const ResidualSystem r4 = build_residual_system(builtin_fixture("ex3_3").spec, 2, gauss_legendre_rule(12), {4});
        const std::vector<double> a(27, 0.3);
        same = same && r1.residual(a) == r4.residual(a) && r1.jacobian(a) == r4.jacobian(a);
        o.check(same, "bitwise-identical assembly for 1, 2, 3, 4, 8 threads");
    }
    {  // polynomial fixtures are exact once N reaches their degree
        double worst = 0.0;
        for (const auto& [id, degree] : {std::pair<const char*, int>{"ex3_1", 1}, {"ex3_2", 2}, {"ex3_3", 1}}) {
            SweepRequest req;
            req.n_min = degree;
            req.n_max = degree + 2;
            req.grid = 5;
            for (const SweepRow& row : run_sweep(builtin_fixture(id).spec, req).rows)
                worst = std::max(worst, row.ok ? row.max_error : INFINITY);
        }
        o.check(worst <= 1e-9, "polynomial-exactness solves: " + sci(worst));
    }
    return o;
}

Outcome convergence_sanity() {
    Outcome o;
    SweepRequest req;
    req.n_min = 1;
    req.n_max = 5;
    const SweepReport sweep = run_sweep(builtin_fixture("ex3_5").spec, req);
    bool decreasing = sweep.rows.size() == 5;
    std::ostringstream errors;
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
        decreasing = decreasing && sweep.rows[i].ok && (i == 0 || sweep.rows[i].max_error < sweep.rows[i - 1].max_error);
        errors << (i ? " " : "") << sci(sweep.rows[i].max_error);
    }
    o.check(decreasing, "strictly decreasing grid error N = 1..5: " + errors.str());
    double worst_table = 0.0;
    for (const auto& row : testing::kTableEx35) worst_table = std::max(worst_table, row.abs_error);
    const double last = sweep.rows.empty() ? INFINITY : sweep.rows.back().max_error;
    o.check(last * 10 <= worst_table, "N = 5 error " + sci(last) + " vs N = 2 table worst " + sci(worst_table));
    return o;
}

struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"ex3_1 exact recovery", 1.0, exact_recovery_ex31},
        {"ex3_2 coefficient table", 10.0, coefficients_ex32},
        {"ex3_3 nonlinear recovery", 5.0, nonlinear_ex33},
        {"ex3_4 error table replication", 10.0, [] { return table_replication("ex3_4", testing::kTableEx34, true); }},
        {"ex3_5 error table replication", 10.0, [] { return table_replication("ex3_5", testing::kTableEx35, true); }},
        {"Fixture self-consistency", 60.0, fixture_self_consistency},
        {"Property suite", 120.0, property_suite},
        {"Convergence sanity (ex3_5 sweep)", 60.0, convergence_sanity},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const Criterion& c = criteria[i];
        Outcome outcome;
        const auto start = std::chrono::steady_clock::now();
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome.check(false, std::string("exception: ") + e.what());
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        outcome.check(elapsed < c.budget_s, "runtime " + fmt("%.3f s", elapsed) + " < " + fmt("%g s", c.budget_s));
        if (!outcome.pass) ++failures;
        std::printf("%s  %zu. %s (%.3f s)\n", outcome.pass ? "PASS" : "FAIL", i + 1, c.name, elapsed);
        for (const std::string& note : outcome.notes) std::printf("        %s\n", note.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
