#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "voltcheb/box.hpp"
#include "voltcheb/expr.hpp"
#include "voltcheb/quadrature.hpp"

namespace voltcheb {

/// u(x,y,z) = f(x,y,z) + int_0^z int_0^y int_0^x K(x,y,z,r,s,t) G(u(r,s,t)) dr ds dt on a box.
/// Any leading sign of the integral term lives in the kernel.
struct ProblemSpec {
    std::string id;
    Expr f;
    Expr kernel;
    Expr nonlinearity = Expr::variable(Var::u);
    Box3 domain;
    std::optional<Expr> exact_solution;

    /// True when G is the bare variable u.
    [[nodiscard]] bool is_linear() const noexcept { return is_variable(nonlinearity, Var::u); }
};

inline const VarSet kOuterVars{Var::x, Var::y, Var::z};
inline const VarSet kKernelVars{Var::x, Var::y, Var::z, Var::r, Var::s, Var::t};
inline const VarSet kNonlinearityVars{Var::u};

/// Throws ProblemError if an expression references a variable outside its permitted set.
void validate_problem(const ProblemSpec& spec);

/// Parses the key/value problem-file format (docs/problem-format.md).
[[nodiscard]] ProblemSpec load_problem(std::string_view text, std::string id = "problem");

/// Reads and parses a problem file. Throws IoError if it cannot be read.
[[nodiscard]] ProblemSpec load_problem_file(const std::string& path);

/// Problem-file text for `spec`; load_problem(print_problem(spec)) is equivalent to spec.
[[nodiscard]] std::string print_problem(const ProblemSpec& spec);

/// Change of variables onto [0,1]^3: every argument is scaled by its axis extent and the
/// kernel picks up the Jacobian X*Y*Z. Returns the spec unchanged for the unit box.
[[nodiscard]] ProblemSpec to_unit_box(const ProblemSpec& spec);

struct Fixture {
    ProblemSpec spec;
    std::string description;
    /// Evaluation points shipped with the fixture (the reference error-table points, if any).
    std::vector<Point3> table_points;
};

[[nodiscard]] const std::vector<std::string>& fixture_ids();
[[nodiscard]] bool is_fixture_id(std::string_view id);

/// One of ex3_1 .. ex3_5. Throws ProblemError for an unknown id.
[[nodiscard]] Fixture builtin_fixture(std::string_view id);

}  // namespace voltcheb
