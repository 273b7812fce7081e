#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace voltcheb {

/// The fixed variable set of problem files: outer point, integration point, and the
/// nonlinearity argument.
enum class Var : std::uint8_t { x, y, z, r, s, t, u };
inline constexpr std::size_t kVarCount = 7;

enum class Func : std::uint8_t { sin, cos, tan, exp, ln, sqrt, abs };
enum class BinaryOp : std::uint8_t { add, sub, mul, div, pow };
enum class NamedConstant : std::uint8_t { pi, e };

[[nodiscard]] std::string_view var_name(Var v) noexcept;
[[nodiscard]] std::string_view func_name(Func f) noexcept;

/// Set of variables, one bit per Var.
class VarSet {
public:
    constexpr VarSet() = default;
    constexpr VarSet(std::initializer_list<Var> vars) {
        for (Var v : vars) insert(v);
    }

    constexpr void insert(Var v) noexcept { bits_ |= bit(v); }
    [[nodiscard]] constexpr bool contains(Var v) const noexcept { return (bits_ & bit(v)) != 0; }
    [[nodiscard]] constexpr bool empty() const noexcept { return bits_ == 0; }
    [[nodiscard]] constexpr bool subset_of(VarSet other) const noexcept { return (bits_ & ~other.bits_) == 0; }
    constexpr VarSet& operator|=(VarSet other) noexcept {
        bits_ |= other.bits_;
        return *this;
    }
    friend constexpr bool operator==(VarSet, VarSet) = default;

private:
    static constexpr std::uint8_t bit(Var v) noexcept { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(v)); }
    std::uint8_t bits_ = 0;
};

struct ExprNode;

/// Immutable expression tree. Copies share structure.
class Expr {
public:
    Expr();  // the literal 0
    explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

    [[nodiscard]] static Expr number(double value);
    [[nodiscard]] static Expr variable(Var v);
    [[nodiscard]] static Expr constant(NamedConstant c);
    [[nodiscard]] static Expr negate(Expr operand);
    [[nodiscard]] static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
    [[nodiscard]] static Expr call(Func f, Expr arg);

    [[nodiscard]] const ExprNode& node() const noexcept { return *node_; }

private:
    std::shared_ptr<const ExprNode> node_;
};

struct NumberNode {
    double value;
};
struct VariableNode {
    Var var;
};
struct ConstantNode {
    NamedConstant which;
};
struct NegateNode {
    Expr operand;
};
struct BinaryNode {
    BinaryOp op;
    Expr lhs;
    Expr rhs;
};
struct CallNode {
    Func func;
    Expr arg;
};

struct ExprNode {
    std::variant<NumberNode, VariableNode, ConstantNode, NegateNode, BinaryNode, CallNode> value;
};

[[nodiscard]] Expr operator+(Expr a, Expr b);
[[nodiscard]] Expr operator-(Expr a, Expr b);
[[nodiscard]] Expr operator*(Expr a, Expr b);
[[nodiscard]] Expr operator/(Expr a, Expr b);
[[nodiscard]] Expr operator-(Expr a);

/// Values for a subset of the variables.
class Bindings {
public:
    Bindings() = default;

    Bindings& set(Var v, double value) noexcept {
        values_[static_cast<std::size_t>(v)] = value;
        bound_.insert(v);
        return *this;
    }
    [[nodiscard]] bool is_bound(Var v) const noexcept { return bound_.contains(v); }
    [[nodiscard]] double get(Var v) const noexcept { return values_[static_cast<std::size_t>(v)]; }

    [[nodiscard]] static Bindings point(double x, double y, double z) {
        Bindings b;
        b.set(Var::x, x).set(Var::y, y).set(Var::z, z);
        return b;
    }

private:
    std::array<double, kVarCount> values_{};
    VarSet bound_;
};

/// Parses `src` per the grammar in docs/expression-grammar.md. Throws ParseError with a byte offset.
[[nodiscard]] Expr parse(std::string_view src);

/// IEEE double evaluation. Throws EvalError on an unbound variable, a domain error, or a
/// non-finite intermediate; the message names the offending sub-expression.
[[nodiscard]] double eval(const Expr& e, const Bindings& b);

/// Canonical text form; parse(to_string(e)) evaluates bit-identically to e.
[[nodiscard]] std::string to_string(const Expr& e);

[[nodiscard]] VarSet variables(const Expr& e);

[[nodiscard]] bool is_variable(const Expr& e, Var v) noexcept;

/// Replaces every occurrence of a variable with the expression mapped to it, if any.
[[nodiscard]] Expr substitute(const Expr& e, const std::array<std::optional<Expr>, kVarCount>& replacements);

/// Symbolic derivative with respect to u. Throws ProblemError if e mentions any other variable.
[[nodiscard]] Expr differentiate_u(const Expr& e);

}  // namespace voltcheb
