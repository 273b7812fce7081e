#include "voltcheb/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

#include "voltcheb/errors.hpp"

namespace voltcheb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::array<std::string_view, kVarCount> kVarNames{"x", "y", "z", "r", "s", "t", "u"};
constexpr std::array<std::string_view, 7> kFuncNames{"sin", "cos", "tan", "exp", "ln", "sqrt", "abs"};

// Integer exponents up to this magnitude are evaluated by repeated multiplication.
constexpr int kMaxMultiplyExponent = 16;

Expr make(ExprNode node) { return Expr(std::make_shared<const ExprNode>(std::move(node))); }

// ---------------------------------------------------------------------------------------------
// Lexer / parser

enum class TokenKind { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
    TokenKind kind;
    std::size_t offset;
    std::string_view text;
    double number = 0.0;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                      src_[pos_] == '\r')) {
            ++pos_;
        }
        const std::size_t start = pos_;
        if (pos_ == src_.size()) return {TokenKind::end, start, {}};
        const char c = src_[pos_];
        if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
            return lex_number(start);
        }
        if (is_ident_start(c)) {
            while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
            return {TokenKind::ident, start, src_.substr(start, pos_ - start)};
        }
        ++pos_;
        switch (c) {
            case '+': return {TokenKind::plus, start, src_.substr(start, 1)};
            case '-': return {TokenKind::minus, start, src_.substr(start, 1)};
            case '*': return {TokenKind::star, start, src_.substr(start, 1)};
            case '/': return {TokenKind::slash, start, src_.substr(start, 1)};
            case '^': return {TokenKind::caret, start, src_.substr(start, 1)};
            case '(': return {TokenKind::lparen, start, src_.substr(start, 1)};
            case ')': return {TokenKind::rparen, start, src_.substr(start, 1)};
            default: break;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }

private:
    Token lex_number(std::size_t start) {
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            // "2e" followed by a non-digit is the number 2 then the identifier e... which the
            // grammar forbids anyway (no implicit multiplication), so only consume a full exponent.
            if (look < src_.size() && is_digit(src_[look])) {
                pos_ = look;
                while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
            }
        }
        const std::string_view text = src_.substr(start, pos_ - start);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
            throw ParseError("malformed number '" + std::string(text) + "'", start);
        }
        return {TokenKind::number, start, text, value};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src), src_(src) { advance(); }

    Expr parse_all() {
        if (current_.kind == TokenKind::end) throw ParseError("empty expression", 0);
        Expr e = parse_sum();
        if (current_.kind == TokenKind::rparen) throw ParseError("unbalanced ')'", current_.offset);
        if (current_.kind != TokenKind::end) {
            throw ParseError("unexpected '" + std::string(current_.text) + "' after complete expression",
                             current_.offset);
        }
        return e;
    }

private:
    void advance() { current_ = lexer_.next(); }

    // sum := product (('+' | '-') product)*
    Expr parse_sum() {
        Expr lhs = parse_product();
        while (current_.kind == TokenKind::plus || current_.kind == TokenKind::minus) {
            const BinaryOp op = current_.kind == TokenKind::plus ? BinaryOp::add : BinaryOp::sub;
            advance();
            lhs = Expr::binary(op, std::move(lhs), parse_product());
        }
        return lhs;
    }

    // product := unary (('*' | '/') unary)*
    Expr parse_product() {
        Expr lhs = parse_unary();
        while (current_.kind == TokenKind::star || current_.kind == TokenKind::slash) {
            const BinaryOp op = current_.kind == TokenKind::star ? BinaryOp::mul : BinaryOp::div;
            advance();
            lhs = Expr::binary(op, std::move(lhs), parse_unary());
        }
        return lhs;
    }

    // unary := ('-' | '+') unary | power
    Expr parse_unary() {
        if (current_.kind == TokenKind::minus) {
            advance();
            return Expr::negate(parse_unary());
        }
        if (current_.kind == TokenKind::plus) {
            advance();
            return parse_unary();
        }
        return parse_power();
    }

    // power := primary ('^' unary)?     (right-associative through unary -> power)
    Expr parse_power() {
        Expr base = parse_primary();
        if (current_.kind == TokenKind::caret) {
            advance();
            return Expr::binary(BinaryOp::pow, std::move(base), parse_unary());
        }
        return base;
    }

    // primary := number | constant | variable | func '(' sum ')' | '(' sum ')'
    Expr parse_primary() {
        const Token tok = current_;
        switch (tok.kind) {
            case TokenKind::number:
                advance();
                return Expr::number(tok.number);
            case TokenKind::lparen: {
                advance();
                Expr inner = parse_sum();
                expect_rparen(tok.offset);
                return inner;
            }
            case TokenKind::ident:
                advance();
                return parse_identifier(tok);
            case TokenKind::end:
                throw ParseError("expected operand, found end of input", tok.offset);
            case TokenKind::rparen:
                throw ParseError("expected operand before ')'", tok.offset);
            default:
                throw ParseError("expected operand, found '" + std::string(tok.text) + "'", tok.offset);
        }
    }

    Expr parse_identifier(const Token& tok) {
        for (std::size_t f = 0; f < kFuncNames.size(); ++f) {
            if (tok.text != kFuncNames[f]) continue;
            if (current_.kind != TokenKind::lparen) {
                throw ParseError("function '" + std::string(tok.text) + "' requires a parenthesized argument",
                                 current_.offset);
            }
            const std::size_t open = current_.offset;
            advance();
            Expr arg = parse_sum();
            expect_rparen(open);
            return Expr::call(static_cast<Func>(f), std::move(arg));
        }
        Expr value;
        if (tok.text == "pi") {
            value = Expr::constant(NamedConstant::pi);
        } else if (tok.text == "e") {
            value = Expr::constant(NamedConstant::e);
        } else {
            bool found = false;
            for (std::size_t v = 0; v < kVarNames.size(); ++v) {
                if (tok.text == kVarNames[v]) {
                    value = Expr::variable(static_cast<Var>(v));
                    found = true;
                    break;
                }
            }
            if (!found) throw ParseError("unknown identifier '" + std::string(tok.text) + "'", tok.offset);
        }
        if (current_.kind == TokenKind::lparen) {
            throw ParseError("'" + std::string(tok.text) + "' is not a function", tok.offset);
        }
        return value;
    }

    void expect_rparen(std::size_t open_offset) {
        if (current_.kind == TokenKind::rparen) {
            advance();
            return;
        }
        if (current_.kind == TokenKind::end) {
            throw ParseError("unbalanced '(' opened here", open_offset);
        }
        throw ParseError("expected ')', found '" + std::string(current_.text) + "'", current_.offset);
    }

    Lexer lexer_;
    std::string_view src_;
    Token current_{TokenKind::end, 0, {}};
};

// ---------------------------------------------------------------------------------------------
// Printing

enum Precedence : int { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

int precedence(const Expr& e) {
    return std::visit(overloaded{
                          [](const NumberNode& n) { return std::signbit(n.value) ? int{kUnary} : int{kAtom}; },
                          [](const VariableNode&) { return int{kAtom}; },
                          [](const ConstantNode&) { return int{kAtom}; },
                          [](const NegateNode&) { return int{kUnary}; },
                          [](const BinaryNode& b) {
                              switch (b.op) {
                                  case BinaryOp::add:
                                  case BinaryOp::sub: return int{kSum};
                                  case BinaryOp::mul:
                                  case BinaryOp::div: return int{kProduct};
                                  case BinaryOp::pow: return int{kPower};
                              }
                              return int{kAtom};
                          },
                          [](const CallNode&) { return int{kAtom}; },
                      },
                      e.node().value);
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::string& out) {
    if (parens) out += '(';
    print(e, out);
    if (parens) out += ')';
}

void print_number(double value, std::string& out) {
    if (std::signbit(value)) {
        out += '-';
        value = -value;
    }
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    (void)ec;
    out.append(buf.data(), ptr);
}

void print(const Expr& e, std::string& out) {
    std::visit(overloaded{
                   [&](const NumberNode& n) { print_number(n.value, out); },
                   [&](const VariableNode& v) { out += var_name(v.var); },
                   [&](const ConstantNode& c) { out += c.which == NamedConstant::pi ? "pi" : "e"; },
                   [&](const NegateNode& n) {
                       out += '-';
                       print_wrapped(n.operand, precedence(n.operand) < kUnary, out);
                   },
                   [&](const BinaryNode& b) {
                       switch (b.op) {
                           case BinaryOp::add:
                           case BinaryOp::sub:
                               print_wrapped(b.lhs, precedence(b.lhs) < kSum, out);
                               out += b.op == BinaryOp::add ? " + " : " - ";
                               print_wrapped(b.rhs, precedence(b.rhs) <= kSum, out);
                               break;
                           case BinaryOp::mul:
                           case BinaryOp::div:
                               print_wrapped(b.lhs, precedence(b.lhs) < kProduct, out);
                               out += b.op == BinaryOp::mul ? "*" : "/";
                               print_wrapped(b.rhs, precedence(b.rhs) <= kProduct, out);
                               break;
                           case BinaryOp::pow:
                               print_wrapped(b.lhs, precedence(b.lhs) < kAtom, out);
                               out += '^';
                               print_wrapped(b.rhs, precedence(b.rhs) < kUnary, out);
                               break;
                       }
                   },
                   [&](const CallNode& c) {
                       out += func_name(c.func);
                       out += '(';
                       print(c.arg, out);
                       out += ')';
                   },
               },
               e.node().value);
}

// ---------------------------------------------------------------------------------------------
// Evaluation

[[noreturn]] void fail(const std::string& what, const Expr& at) {
    throw EvalError(what + " in '" + to_string(at) + "'");
}

double checked(double value, const Expr& at) {
    if (!std::isfinite(value)) fail("non-finite result", at);
    return value;
}

double integer_power(double base, long exponent) {
    const bool invert = exponent < 0;
    long n = invert ? -exponent : exponent;
    double result = 1.0;
    for (long i = 0; i < n; ++i) result *= base;
    return invert ? 1.0 / result : result;
}

double eval_node(const Expr& e, const Bindings& b) {
    return std::visit(
        overloaded{
            [](const NumberNode& n) { return n.value; },
            [&](const VariableNode& v) {
                if (!b.is_bound(v.var)) fail("unbound variable '" + std::string(var_name(v.var)) + "'", e);
                return b.get(v.var);
            },
            [](const ConstantNode& c) { return c.which == NamedConstant::pi ? std::numbers::pi : std::numbers::e; },
            [&](const NegateNode& n) { return -eval_node(n.operand, b); },
            [&](const BinaryNode& bin) {
                const double lhs = eval_node(bin.lhs, b);
                const double rhs = eval_node(bin.rhs, b);
                switch (bin.op) {
                    case BinaryOp::add: return checked(lhs + rhs, e);
                    case BinaryOp::sub: return checked(lhs - rhs, e);
                    case BinaryOp::mul: return checked(lhs * rhs, e);
                    case BinaryOp::div:
                        if (rhs == 0.0) fail("division by zero", e);
                        return checked(lhs / rhs, e);
                    case BinaryOp::pow: {
                        if (rhs == std::trunc(rhs) && std::abs(rhs) <= kMaxMultiplyExponent) {
                            if (lhs == 0.0 && rhs < 0.0) fail("division by zero", e);
                            return checked(integer_power(lhs, static_cast<long>(rhs)), e);
                        }
                        if (lhs < 0.0 && rhs != std::trunc(rhs)) fail("negative base with non-integer exponent", e);
                        if (lhs == 0.0 && rhs < 0.0) fail("division by zero", e);
                        return checked(std::pow(lhs, rhs), e);
                    }
                }
                return 0.0;
            },
            [&](const CallNode& c) {
                const double arg = eval_node(c.arg, b);
                switch (c.func) {
                    case Func::sin: return std::sin(arg);
                    case Func::cos: return std::cos(arg);
                    case Func::tan: return checked(std::tan(arg), e);
                    case Func::exp: return checked(std::exp(arg), e);
                    case Func::ln:
                        if (!(arg > 0.0)) fail("logarithm of non-positive value", e);
                        return std::log(arg);
                    case Func::sqrt:
                        if (arg < 0.0) fail("square root of negative value", e);
                        return std::sqrt(arg);
                    case Func::abs: return std::abs(arg);
                }
                return 0.0;
            },
        },
        e.node().value);
}

// ---------------------------------------------------------------------------------------------
// Differentiation helpers with light constant folding.

std::optional<double> as_number(const Expr& e) {
    if (const auto* n = std::get_if<NumberNode>(&e.node().value)) return n->value;
    return std::nullopt;
}

bool is_number(const Expr& e, double value) {
    const auto n = as_number(e);
    return n && *n == value;
}

Expr add(Expr a, Expr b) {
    if (is_number(a, 0.0)) return b;
    if (is_number(b, 0.0)) return a;
    return a + b;
}

Expr sub(Expr a, Expr b) {
    if (is_number(b, 0.0)) return a;
    if (is_number(a, 0.0)) return -b;
    return a - b;
}

Expr mul(Expr a, Expr b) {
    if (is_number(a, 0.0) || is_number(b, 0.0)) return Expr::number(0.0);
    if (is_number(a, 1.0)) return b;
    if (is_number(b, 1.0)) return a;
    const auto na = as_number(a);
    const auto nb = as_number(b);
    if (na && nb) return Expr::number(*na * *nb);
    return a * b;
}

Expr div(Expr a, Expr b) {
    if (is_number(a, 0.0)) return Expr::number(0.0);
    if (is_number(b, 1.0)) return a;
    return a / b;
}

Expr power(Expr base, Expr exponent) {
    if (is_number(exponent, 1.0)) return base;
    if (is_number(exponent, 0.0)) return Expr::number(1.0);
    return Expr::binary(BinaryOp::pow, std::move(base), std::move(exponent));
}

Expr derive(const Expr& e) {
    return std::visit(
        overloaded{
            [](const NumberNode&) { return Expr::number(0.0); },
            [](const ConstantNode&) { return Expr::number(0.0); },
            [](const VariableNode& v) { return Expr::number(v.var == Var::u ? 1.0 : 0.0); },
            [](const NegateNode& n) {
                Expr d = derive(n.operand);
                return is_number(d, 0.0) ? d : -d;
            },
            [&](const BinaryNode& b) -> Expr {
                const Expr da = derive(b.lhs);
                const Expr db = derive(b.rhs);
                switch (b.op) {
                    case BinaryOp::add: return add(da, db);
                    case BinaryOp::sub: return sub(da, db);
                    case BinaryOp::mul: return add(mul(da, b.rhs), mul(b.lhs, db));
                    case BinaryOp::div:
                        // (a/b)' = a'/b - a b' / b^2
                        return sub(div(da, b.rhs), div(mul(b.lhs, db), power(b.rhs, Expr::number(2.0))));
                    case BinaryOp::pow: {
                        if (is_number(db, 0.0)) {
                            // constant exponent: n a^(n-1) a'
                            Expr reduced = as_number(b.rhs) ? Expr::number(*as_number(b.rhs) - 1.0)
                                                            : sub(b.rhs, Expr::number(1.0));
                            return mul(mul(b.rhs, power(b.lhs, reduced)), da);
                        }
                        const Expr ln_base = Expr::call(Func::ln, b.lhs);
                        if (is_number(da, 0.0)) return mul(mul(e, ln_base), db);
                        return mul(e, add(mul(db, ln_base), div(mul(b.rhs, da), b.lhs)));
                    }
                }
                return Expr::number(0.0);
            },
            [&](const CallNode& c) -> Expr {
                const Expr da = derive(c.arg);
                if (is_number(da, 0.0)) return Expr::number(0.0);
                switch (c.func) {
                    case Func::sin: return mul(Expr::call(Func::cos, c.arg), da);
                    case Func::cos: return -mul(Expr::call(Func::sin, c.arg), da);
                    case Func::tan:
                        return div(da, power(Expr::call(Func::cos, c.arg), Expr::number(2.0)));
                    case Func::exp: return mul(e, da);
                    case Func::ln: return div(da, c.arg);
                    case Func::sqrt: return div(da, mul(Expr::number(2.0), e));
                    case Func::abs: return mul(da, div(c.arg, e));
                }
                return Expr::number(0.0);
            },
        },
        e.node().value);
}

}  // namespace

std::string_view var_name(Var v) noexcept { return kVarNames[static_cast<std::size_t>(v)]; }
std::string_view func_name(Func f) noexcept { return kFuncNames[static_cast<std::size_t>(f)]; }

Expr::Expr() : node_(std::make_shared<const ExprNode>(ExprNode{NumberNode{0.0}})) {}

Expr Expr::number(double value) { return make({NumberNode{value}}); }
Expr Expr::variable(Var v) { return make({VariableNode{v}}); }
Expr Expr::constant(NamedConstant c) { return make({ConstantNode{c}}); }
Expr Expr::negate(Expr operand) { return make({NegateNode{std::move(operand)}}); }
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) { return make({BinaryNode{op, std::move(lhs), std::move(rhs)}}); }
Expr Expr::call(Func f, Expr arg) { return make({CallNode{f, std::move(arg)}}); }

Expr operator+(Expr a, Expr b) { return Expr::binary(BinaryOp::add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(BinaryOp::sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(BinaryOp::mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(BinaryOp::div, std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::negate(std::move(a)); }

Expr parse(std::string_view src) { return Parser(src).parse_all(); }

double eval(const Expr& e, const Bindings& b) { return eval_node(e, b); }

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

VarSet variables(const Expr& e) {
    return std::visit(overloaded{
                          [](const NumberNode&) { return VarSet{}; },
                          [](const ConstantNode&) { return VarSet{}; },
                          [](const VariableNode& v) { return VarSet{v.var}; },
                          [](const NegateNode& n) { return variables(n.operand); },
                          [](const BinaryNode& b) {
                              VarSet s = variables(b.lhs);
                              s |= variables(b.rhs);
                              return s;
                          },
                          [](const CallNode& c) { return variables(c.arg); },
                      },
                      e.node().value);
}

bool is_variable(const Expr& e, Var v) noexcept {
    const auto* node = std::get_if<VariableNode>(&e.node().value);
    return node != nullptr && node->var == v;
}

Expr substitute(const Expr& e, const std::array<std::optional<Expr>, kVarCount>& replacements) {
    return std::visit(overloaded{
                          [&](const NumberNode&) { return e; },
                          [&](const ConstantNode&) { return e; },
                          [&](const VariableNode& v) {
                              const auto& rep = replacements[static_cast<std::size_t>(v.var)];
                              return rep ? *rep : e;
                          },
                          [&](const NegateNode& n) { return Expr::negate(substitute(n.operand, replacements)); },
                          [&](const BinaryNode& b) {
                              return Expr::binary(b.op, substitute(b.lhs, replacements),
                                                  substitute(b.rhs, replacements));
                          },
                          [&](const CallNode& c) { return Expr::call(c.func, substitute(c.arg, replacements)); },
                      },
                      e.node().value);
}

Expr differentiate_u(const Expr& e) {
    if (!variables(e).subset_of(VarSet{Var::u})) {
        throw ProblemError("nonlinearity '" + to_string(e) + "' may only reference the variable u");
    }
    return derive(e);
}

}  // namespace voltcheb
