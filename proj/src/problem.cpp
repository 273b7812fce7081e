#include "voltcheb/problem.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "voltcheb/errors.hpp"

namespace voltcheb {

namespace {

void check_vars(const Expr& e, VarSet allowed, std::string_view key, std::string_view allowed_text) {
    if (!variables(e).subset_of(allowed)) {
        throw ProblemError("'" + std::string(key) + "' = \"" + to_string(e) + "\" may only reference " +
                           std::string(allowed_text));
    }
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string location(std::size_t line, std::string_view key) {
    return "line " + std::to_string(line) + " ('" + std::string(key) + "')";
}

Box3 parse_domain(std::string_view value, std::size_t line) {
    std::array<double, 3> extents{};
    std::size_t count = 0;
    std::size_t pos = 0;
    while (true) {
        while (pos < value.size() && (value[pos] == ' ' || value[pos] == '\t' || value[pos] == ',')) ++pos;
        if (pos == value.size()) break;
        std::size_t end = pos;
        while (end < value.size() && value[end] != ' ' && value[end] != '\t' && value[end] != ',') ++end;
        const std::string_view token = value.substr(pos, end - pos);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || ptr != token.data() + token.size() || count == 3) {
            throw ProblemError(location(line, "domain") + ": expected three positive reals");
        }
        extents[count++] = v;
        pos = end;
    }
    if (count != 3) throw ProblemError(location(line, "domain") + ": expected three positive reals");
    Box3 box{extents[0], extents[1], extents[2]};
    try {
        validate_box(box);
    } catch (const ProblemError& e) {
        throw ProblemError(location(line, "domain") + ": " + e.what());
    }
    return box;
}

// Shortest decimal that round-trips.
std::string format_extent(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

}  // namespace

void validate_problem(const ProblemSpec& spec) {
    check_vars(spec.f, kOuterVars, "f", "x, y, z");
    check_vars(spec.kernel, kKernelVars, "kernel", "x, y, z, r, s, t");
    check_vars(spec.nonlinearity, kNonlinearityVars, "nonlinearity", "u");
    if (spec.exact_solution) check_vars(*spec.exact_solution, kOuterVars, "exact", "x, y, z");
    validate_box(spec.domain);
}

ProblemSpec load_problem(std::string_view text, std::string id) {
    ProblemSpec spec;
    spec.id = std::move(id);
    std::map<std::string, std::size_t, std::less<>> seen;

    std::size_t line_no = 0;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        const std::size_t line_end = std::min(text.find('\n', line_start), text.size());
        ++line_no;
        std::string_view line = text.substr(line_start, line_end - line_start);
        line_start = line_end + 1;

        // Comments start at a '#' outside quotes.
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ProblemError("line " + std::to_string(line_no) + ": expected key = \"expression\"");
        }
        const std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (seen.contains(key)) {
            throw ProblemError(location(line_no, key) + ": duplicate key (first on line " +
                               std::to_string(seen.find(key)->second) + ")");
        }
        seen.emplace(std::string(key), line_no);

        const bool has_quotes = value.size() >= 2 && value.front() == '"' && value.back() == '"';
        if (has_quotes) value = value.substr(1, value.size() - 2);

        if (key == "domain") {
            spec.domain = parse_domain(value, line_no);
            continue;
        }
        if (key != "f" && key != "kernel" && key != "nonlinearity" && key != "exact") {
            throw ProblemError(location(line_no, key) + ": unknown key");
        }
        if (!has_quotes) {
            throw ProblemError(location(line_no, key) + ": expression must be enclosed in double quotes");
        }
        Expr e;
        try {
            e = parse(value);
        } catch (const ParseError& err) {
            throw ParseError(location(line_no, key) + ": " + err.detail(), err.offset());
        }
        if (key == "f") {
            spec.f = e;
        } else if (key == "kernel") {
            spec.kernel = e;
        } else if (key == "nonlinearity") {
            spec.nonlinearity = e;
        } else {
            spec.exact_solution = e;
        }
    }

    for (const char* required : {"f", "kernel"}) {
        if (!seen.contains(std::string_view(required))) {
            throw ProblemError(std::string("missing mandatory key '") + required + "'");
        }
    }
    validate_problem(spec);
    return spec;
}

ProblemSpec load_problem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open problem file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("failed reading problem file '" + path + "'");
    return load_problem(buffer.str(), path);
}

std::string print_problem(const ProblemSpec& spec) {
    std::string out;
    out += "f = \"" + to_string(spec.f) + "\"\n";
    out += "kernel = \"" + to_string(spec.kernel) + "\"\n";
    out += "nonlinearity = \"" + to_string(spec.nonlinearity) + "\"\n";
    if (spec.exact_solution) out += "exact = \"" + to_string(*spec.exact_solution) + "\"\n";
    out += "domain = " + format_extent(spec.domain.x) + " " + format_extent(spec.domain.y) + " " +
           format_extent(spec.domain.z) + "\n";
    return out;
}

ProblemSpec to_unit_box(const ProblemSpec& spec) {
    if (spec.domain.is_unit()) return spec;
    validate_box(spec.domain);
    const Expr sx = Expr::number(spec.domain.x);
    const Expr sy = Expr::number(spec.domain.y);
    const Expr sz = Expr::number(spec.domain.z);
    std::array<std::optional<Expr>, kVarCount> scale;
    scale[static_cast<std::size_t>(Var::x)] = sx * Expr::variable(Var::x);
    scale[static_cast<std::size_t>(Var::y)] = sy * Expr::variable(Var::y);
    scale[static_cast<std::size_t>(Var::z)] = sz * Expr::variable(Var::z);
    scale[static_cast<std::size_t>(Var::r)] = sx * Expr::variable(Var::r);
    scale[static_cast<std::size_t>(Var::s)] = sy * Expr::variable(Var::s);
    scale[static_cast<std::size_t>(Var::t)] = sz * Expr::variable(Var::t);

    ProblemSpec unit = spec;
    unit.domain = Box3{};
    unit.f = substitute(spec.f, scale);
    unit.kernel = Expr::number(spec.domain.x * spec.domain.y * spec.domain.z) * substitute(spec.kernel, scale);
    if (spec.exact_solution) unit.exact_solution = substitute(*spec.exact_solution, scale);
    return unit;
}

// ---------------------------------------------------------------------------------------------
// Built-in fixtures

namespace {

struct FixtureSource {
    const char* id;
    const char* description;
    const char* f;
    const char* kernel;
    const char* nonlinearity;
    const char* exact;
    bool reference_table;
};

// Reference error-table points, shared by ex3_4 and ex3_5.
const std::vector<Point3> kTablePoints{
    {0.1, 0.1, 0.1},       {0.01, 0.1, 0.1},     {0.01, 0.01, 0.1},     {0.01, 0.01, 0.01},
    {0.001, 0.01, 0.01},   {0.001, 0.001, 0.01}, {0.001, 0.001, 0.001},
};

const std::array<FixtureSource, 5> kFixtures{{
    {"ex3_1", "linear, K = -1, exact u = x + y + z", "x + y + z + (x^2*y*z + x*y^2*z + x*y*z^2)/2", "-1", "u",
     "x + y + z", false},
    {"ex3_2", "linear, K = -24 x^2 y, exact u = x^2 y + y z^2 + x y z",
     "x^2*y + y*z^2 + x*y*z + 24*x^2*y*(x*y^2*z^3/6 + x^2*y^2*z^2/8 + x^3*y^2*z/6)", "-24*x^2*y", "u",
     "x^2*y + y*z^2 + x*y*z", false},
    // The forcing xyz alone leaves a defect of (xyz)^6/729 for u = xyz; this forcing makes
    // xyz the exact solution with the given kernel and nonlinearity.
    {"ex3_3", "nonlinear, G(u) = u^2, K = -(xyz)^3/27, exact u = xyz", "x*y*z + (x*y*z)^6/729",
     "-(x*y*z)^3/27", "u^2", "x*y*z", false},
    {"ex3_4", "linear, K = r s^2, exact u = x cos z", "x*cos(z) - (x^3*y^3)/9*sin(z)", "r*s^2", "u",
     "x*cos(z)", true},
    {"ex3_5", "linear, K = 1, exact u = exp(x + y + z)",
     "exp(x + y) + exp(x + z) + exp(y + z) - exp(x) - exp(y) - exp(z) + 1", "1", "u", "exp(x + y + z)", true},
}};

}  // namespace

const std::vector<std::string>& fixture_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& src : kFixtures) v.emplace_back(src.id);
        return v;
    }();
    return ids;
}

bool is_fixture_id(std::string_view id) {
    for (const auto& src : kFixtures) {
        if (id == src.id) return true;
    }
    return false;
}

Fixture builtin_fixture(std::string_view id) {
    for (const auto& src : kFixtures) {
        if (id != src.id) continue;
        Fixture fixture;
        fixture.spec.id = src.id;
        fixture.spec.f = parse(src.f);
        fixture.spec.kernel = parse(src.kernel);
        fixture.spec.nonlinearity = parse(src.nonlinearity);
        fixture.spec.exact_solution = parse(src.exact);
        fixture.description = src.description;
        if (src.reference_table) fixture.table_points = kTablePoints;
        validate_problem(fixture.spec);
        return fixture;
    }
    throw ProblemError("unknown fixture '" + std::string(id) + "'");
}

}  // namespace voltcheb
