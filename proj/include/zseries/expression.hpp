#pragma once

/**
 * @file expression.hpp
 * @brief A small arithmetic expression language for term magnitudes.
 *
 * Grammar (one free variable: n, k or x):
 *
 *     expr     := term (("+"|"-") term)*
 *     term     := unary (("*"|"/") unary)*
 *     unary    := "-" unary | power
 *     power    := primary ("^" exponent)?
 *     exponent := primary ("^" exponent)?
 *     primary  := number | ident | ident "(" expr ")" | "(" expr ")"
 *
 * So `^` binds tighter than unary minus (`-2^2` is -4), `^` is
 * right-associative, and an exponent may not start with a bare minus:
 * `2^-k` must be written `2^(-k)`.
 *
 * Functions: sin cos ln exp sqrt abs floor. Constants: pi e.
 */

#include <boost/rational.hpp>

#include <cctype>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "zseries/error.hpp"
#include "zseries/real.hpp"

namespace zseries {

enum class BinaryOp { add, sub, mul, div, pow };
enum class Function { sin, cos, ln, exp, sqrt, abs, floor };
enum class Constant { pi, e };

namespace ast {

struct Node;
using NodePtr = std::shared_ptr<Node const>;

struct Number {
    std::string text;  // literal as written: digits with optional fraction
};
struct Variable {
    std::string name;
};
struct NamedConstant {
    Constant which;
};
struct Negate {
    NodePtr operand;
};
struct Binary {
    BinaryOp op;
    NodePtr lhs;
    NodePtr rhs;
};
struct Call {
    Function fn;
    NodePtr arg;
};

struct Node {
    std::variant<Number, Variable, NamedConstant, Negate, Binary, Call> value;
};

inline bool equal(Node const& a, Node const& b);

inline bool equal(NodePtr const& a, NodePtr const& b)
{
    if (a == b) {
        return true;
    }
    return a && b && equal(*a, *b);
}

inline bool equal(Node const& a, Node const& b)
{
    if (a.value.index() != b.value.index()) {
        return false;
    }
    return std::visit(
        [&b](auto const& lhs) -> bool {
            using T = std::decay_t<decltype(lhs)>;
            auto const& rhs = std::get<T>(b.value);
            if constexpr (std::is_same_v<T, Number>) {
                return lhs.text == rhs.text;
            } else if constexpr (std::is_same_v<T, Variable>) {
                return lhs.name == rhs.name;
            } else if constexpr (std::is_same_v<T, NamedConstant>) {
                return lhs.which == rhs.which;
            } else if constexpr (std::is_same_v<T, Negate>) {
                return equal(lhs.operand, rhs.operand);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return lhs.op == rhs.op && equal(lhs.lhs, rhs.lhs) && equal(lhs.rhs, rhs.rhs);
            } else {
                return lhs.fn == rhs.fn && equal(lhs.arg, rhs.arg);
            }
        },
        a.value);
}

template <typename T>
NodePtr make(T value)
{
    return std::make_shared<Node const>(Node{std::move(value)});
}

} // namespace ast

inline std::string_view function_name(Function f)
{
    switch (f) {
    case Function::sin:
        return "sin";
    case Function::cos:
        return "cos";
    case Function::ln:
        return "ln";
    case Function::exp:
        return "exp";
    case Function::sqrt:
        return "sqrt";
    case Function::abs:
        return "abs";
    case Function::floor:
        return "floor";
    }
    return "?";
}

/// x ↦ slope·x + intercept with rational coefficients.
struct AffineMap {
    boost::rational<std::int64_t> slope;
    boost::rational<std::int64_t> intercept;

    [[nodiscard]] boost::rational<std::int64_t> operator()(std::int64_t x) const
    {
        return slope * x + intercept;
    }

    friend bool operator==(AffineMap const&, AffineMap const&) = default;
};

/// Immutable expression tree. Cheap to copy (shared structure).
class Expression {
public:
    Expression() = default;
    explicit Expression(ast::NodePtr root) : root_(std::move(root)) {}

    [[nodiscard]] ast::NodePtr const& root() const noexcept { return root_; }
    [[nodiscard]] bool empty() const noexcept { return root_ == nullptr; }

    /// Name of the free variable, if the expression has one.
    [[nodiscard]] std::optional<std::string> variable() const
    {
        std::optional<std::string> found;
        collect_variable(root_, found);
        return found;
    }

    /// Evaluates with the free variable bound to `x`, at `bits` precision.
    /// Throws eval_error when any intermediate is not a finite real.
    [[nodiscard]] Real evaluate(Real const& x, unsigned bits) const { return eval(*root_, &x, bits); }

    [[nodiscard]] Real evaluate(std::int64_t x, unsigned bits) const
    {
        return evaluate(Real::from_int(x, bits), bits);
    }

    /// Evaluates an expression with no free variable.
    [[nodiscard]] Real evaluate_constant(unsigned bits) const { return eval(*root_, nullptr, bits); }

    /// Exact affine form when the tree is built from +, -, *, / with at most
    /// linear dependence on the variable; nullopt otherwise.
    [[nodiscard]] std::optional<AffineMap> as_affine() const { return affine_of(*root_); }

    [[nodiscard]] std::string to_string() const
    {
        std::string out;
        print(*root_, out);
        return out;
    }

    friend bool operator==(Expression const& a, Expression const& b) { return ast::equal(a.root_, b.root_); }

private:
    static void collect_variable(ast::NodePtr const& node, std::optional<std::string>& found)
    {
        if (!node) {
            return;
        }
        std::visit(
            [&found](auto const& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ast::Variable>) {
                    found = n.name;
                } else if constexpr (std::is_same_v<T, ast::Negate>) {
                    collect_variable(n.operand, found);
                } else if constexpr (std::is_same_v<T, ast::Binary>) {
                    collect_variable(n.lhs, found);
                    collect_variable(n.rhs, found);
                } else if constexpr (std::is_same_v<T, ast::Call>) {
                    collect_variable(n.arg, found);
                }
            },
            node->value);
    }

    static Real checked(Real value, char const* what)
    {
        if (!value.is_finite()) {
            throw eval_error(std::string("non-finite result in ") + what);
        }
        return value;
    }

    static Real literal(std::string const& text, unsigned bits)
    {
        if (text.size() < 18 && text.find('.') == std::string::npos) {
            return Real::from_int(std::stoll(text), bits);
        }
        return Real::from_string(text, bits);
    }

    static Real eval(ast::Node const& node, Real const* x, unsigned bits)
    {
        return std::visit(
            [x, bits](auto const& n) -> Real {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ast::Number>) {
                    return literal(n.text, bits);
                } else if constexpr (std::is_same_v<T, ast::Variable>) {
                    if (x == nullptr) {
                        throw eval_error("variable '" + n.name + "' is unbound");
                    }
                    return round_to(*x, bits);
                } else if constexpr (std::is_same_v<T, ast::NamedConstant>) {
                    return n.which == Constant::pi ? Real::pi(bits) : Real::e(bits);
                } else if constexpr (std::is_same_v<T, ast::Negate>) {
                    return -eval(*n.operand, x, bits);
                } else if constexpr (std::is_same_v<T, ast::Binary>) {
                    Real lhs = eval(*n.lhs, x, bits);
                    Real rhs = eval(*n.rhs, x, bits);
                    switch (n.op) {
                    case BinaryOp::add:
                        return checked(lhs + rhs, "addition");
                    case BinaryOp::sub:
                        return checked(lhs - rhs, "subtraction");
                    case BinaryOp::mul:
                        return checked(lhs * rhs, "multiplication");
                    case BinaryOp::div:
                        if (rhs.is_zero()) {
                            throw eval_error("division by zero");
                        }
                        return checked(lhs / rhs, "division");
                    case BinaryOp::pow:
                        return checked(pow(lhs, rhs), "power");
                    }
                    throw eval_error("unknown operator");
                } else {
                    Real arg = eval(*n.arg, x, bits);
                    switch (n.fn) {
                    case Function::sin:
                        return checked(sin(std::move(arg)), "sin");
                    case Function::cos:
                        return checked(cos(std::move(arg)), "cos");
                    case Function::ln:
                        if (arg.sign() <= 0) {
                            throw eval_error("ln of a non-positive argument");
                        }
                        return checked(log(std::move(arg)), "ln");
                    case Function::exp:
                        return checked(exp(std::move(arg)), "exp");
                    case Function::sqrt:
                        if (arg.sign() < 0) {
                            throw eval_error("sqrt of a negative argument");
                        }
                        return checked(sqrt(std::move(arg)), "sqrt");
                    case Function::abs:
                        return abs(std::move(arg));
                    case Function::floor:
                        return floor(std::move(arg));
                    }
                    throw eval_error("unknown function");
                }
            },
            node.value);
    }

    using Rational = boost::rational<std::int64_t>;

    static std::optional<Rational> decimal_rational(std::string const& text)
    {
        auto const dot = text.find('.');
        std::string digits = text;
        std::int64_t den = 1;
        if (dot != std::string::npos) {
            digits = text.substr(0, dot) + text.substr(dot + 1);
            std::size_t const frac = text.size() - dot - 1;
            if (frac > 15) {
                return std::nullopt;
            }
            for (std::size_t i = 0; i < frac; ++i) {
                den *= 10;
            }
        }
        if (digits.size() > 17) {
            return std::nullopt;
        }
        return Rational(std::stoll(digits), den);
    }

    static std::optional<AffineMap> affine_of(ast::Node const& node)
    {
        return std::visit(
            [](auto const& n) -> std::optional<AffineMap> {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ast::Number>) {
                    auto const value = decimal_rational(n.text);
                    if (!value) {
                        return std::nullopt;
                    }
                    return AffineMap{Rational(0), *value};
                } else if constexpr (std::is_same_v<T, ast::Variable>) {
                    return AffineMap{Rational(1), Rational(0)};
                } else if constexpr (std::is_same_v<T, ast::Negate>) {
                    auto inner = affine_of(*n.operand);
                    if (!inner) {
                        return std::nullopt;
                    }
                    return AffineMap{-inner->slope, -inner->intercept};
                } else if constexpr (std::is_same_v<T, ast::Binary>) {
                    auto lhs = affine_of(*n.lhs);
                    auto rhs = affine_of(*n.rhs);
                    if (!lhs || !rhs) {
                        return std::nullopt;
                    }
                    switch (n.op) {
                    case BinaryOp::add:
                        return AffineMap{lhs->slope + rhs->slope, lhs->intercept + rhs->intercept};
                    case BinaryOp::sub:
                        return AffineMap{lhs->slope - rhs->slope, lhs->intercept - rhs->intercept};
                    case BinaryOp::mul:
                        if (lhs->slope.numerator() == 0) {
                            return AffineMap{rhs->slope * lhs->intercept, rhs->intercept * lhs->intercept};
                        }
                        if (rhs->slope.numerator() == 0) {
                            return AffineMap{lhs->slope * rhs->intercept, lhs->intercept * rhs->intercept};
                        }
                        return std::nullopt;
                    case BinaryOp::div:
                        if (rhs->slope.numerator() != 0 || rhs->intercept.numerator() == 0) {
                            return std::nullopt;
                        }
                        return AffineMap{lhs->slope / rhs->intercept, lhs->intercept / rhs->intercept};
                    case BinaryOp::pow:
                        return std::nullopt;
                    }
                    return std::nullopt;
                } else {
                    return std::nullopt;
                }
            },
            node.value);
    }

    // Precedence levels used by the printer.
    static int precedence(ast::Node const& node)
    {
        if (auto const* b = std::get_if<ast::Binary>(&node.value)) {
            switch (b->op) {
            case BinaryOp::add:
            case BinaryOp::sub:
                return 1;
            case BinaryOp::mul:
            case BinaryOp::div:
                return 2;
            case BinaryOp::pow:
                return 4;
            }
        }
        if (std::holds_alternative<ast::Negate>(node.value)) {
            return 3;
        }
        return 5;
    }

    static void print_child(ast::Node const& child, int min_prec, std::string& out)
    {
        if (precedence(child) < min_prec) {
            out += '(';
            print(child, out);
            out += ')';
        } else {
            print(child, out);
        }
    }

    static void print(ast::Node const& node, std::string& out)
    {
        std::visit(
            [&out](auto const& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ast::Number>) {
                    out += n.text;
                } else if constexpr (std::is_same_v<T, ast::Variable>) {
                    out += n.name;
                } else if constexpr (std::is_same_v<T, ast::NamedConstant>) {
                    out += n.which == Constant::pi ? "pi" : "e";
                } else if constexpr (std::is_same_v<T, ast::Negate>) {
                    out += '-';
                    print_child(*n.operand, 3, out);
                } else if constexpr (std::is_same_v<T, ast::Binary>) {
                    switch (n.op) {
                    case BinaryOp::add:
                    case BinaryOp::sub:
                        print_child(*n.lhs, 1, out);
                        out += n.op == BinaryOp::add ? " + " : " - ";
                        print_child(*n.rhs, 2, out);
                        break;
                    case BinaryOp::mul:
                    case BinaryOp::div:
                        print_child(*n.lhs, 2, out);
                        out += n.op == BinaryOp::mul ? "*" : "/";
                        print_child(*n.rhs, 3, out);
                        break;
                    case BinaryOp::pow:
                        print_child(*n.lhs, 5, out);
                        out += '^';
                        print_child(*n.rhs, 4, out);
                        break;
                    }
                } else {
                    out += function_name(n.fn);
                    out += '(';
                    print(*n.arg, out);
                    out += ')';
                }
            },
            node.value);
    }

    ast::NodePtr root_;
};

namespace detail {

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view text) : text_(text) {}

    Expression parse()
    {
        skip_space();
        if (at_end()) {
            throw parse_error(parse_error::kind::syntax, pos_, "empty expression");
        }
        ast::NodePtr root = parse_expr();
        skip_space();
        if (!at_end()) {
            throw parse_error(parse_error::kind::syntax, pos_,
                              "unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return Expression(std::move(root));
    }

private:
    [[nodiscard]] bool at_end() const { return pos_ >= text_.size(); }

    void skip_space()
    {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_space();
        if (!at_end() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            throw parse_error(parse_error::kind::syntax, pos_,
                              std::string("expected '") + c + "'" +
                                  (at_end() ? " at end of input" : ", found '" + std::string(1, text_[pos_]) + "'"));
        }
    }

    ast::NodePtr parse_expr()
    {
        ast::NodePtr lhs = parse_term();
        while (true) {
            if (accept('+')) {
                lhs = ast::make(ast::Binary{BinaryOp::add, lhs, parse_term()});
            } else if (accept('-')) {
                lhs = ast::make(ast::Binary{BinaryOp::sub, lhs, parse_term()});
            } else {
                return lhs;
            }
        }
    }

    ast::NodePtr parse_term()
    {
        ast::NodePtr lhs = parse_unary();
        while (true) {
            if (accept('*')) {
                lhs = ast::make(ast::Binary{BinaryOp::mul, lhs, parse_unary()});
            } else if (accept('/')) {
                lhs = ast::make(ast::Binary{BinaryOp::div, lhs, parse_unary()});
            } else {
                return lhs;
            }
        }
    }

    ast::NodePtr parse_unary()
    {
        if (accept('-')) {
            return ast::make(ast::Negate{parse_unary()});
        }
        return parse_power();
    }

    ast::NodePtr parse_power()
    {
        ast::NodePtr base = parse_primary();
        if (accept('^')) {
            return ast::make(ast::Binary{BinaryOp::pow, base, parse_exponent()});
        }
        return base;
    }

    ast::NodePtr parse_exponent()
    {
        skip_space();
        if (!at_end() && text_[pos_] == '-') {
            throw parse_error(parse_error::kind::syntax, pos_,
                              "a negative exponent must be parenthesized, e.g. 2^(-k)");
        }
        return parse_power();
    }

    ast::NodePtr parse_primary()
    {
        skip_space();
        if (at_end()) {
            throw parse_error(parse_error::kind::syntax, pos_, "unexpected end of input");
        }
        char const c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
            return parse_identifier();
        }
        if (accept('(')) {
            ast::NodePtr inner = parse_expr();
            expect(')');
            return inner;
        }
        throw parse_error(parse_error::kind::syntax, pos_, "unexpected '" + std::string(1, c) + "'");
    }

    ast::NodePtr parse_number()
    {
        std::size_t const begin = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
            ++pos_;
        }
        if (!at_end() && text_[pos_] == '.') {
            ++pos_;
            std::size_t const frac_begin = pos_;
            while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
                ++pos_;
            }
            if (pos_ == frac_begin) {
                throw parse_error(parse_error::kind::syntax, pos_, "expected digits after '.'");
            }
        }
        return ast::make(ast::Number{std::string(text_.substr(begin, pos_ - begin))});
    }

    // Called after '(' was consumed; leaves pos_ after the matching ')'.
    // Returns the argument count and the first argument.
    std::pair<std::size_t, ast::NodePtr> parse_call_arguments()
    {
        if (accept(')')) {
            return {0, nullptr};
        }
        ast::NodePtr first = parse_expr();
        std::size_t count = 1;
        while (accept(',')) {
            parse_expr();
            ++count;
        }
        expect(')');
        return {count, std::move(first)};
    }

    ast::NodePtr parse_identifier()
    {
        std::size_t const begin = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0 || text_[pos_] == '_')) {
            ++pos_;
        }
        std::string const name(text_.substr(begin, pos_ - begin));

        static constexpr std::pair<std::string_view, Function> functions[] = {
            {"sin", Function::sin},   {"cos", Function::cos}, {"ln", Function::ln},
            {"exp", Function::exp},   {"sqrt", Function::sqrt}, {"abs", Function::abs},
            {"floor", Function::floor},
        };

        bool const called = accept('(');
        auto const [arity, argument] = called ? parse_call_arguments() : std::pair<std::size_t, ast::NodePtr>{};

        for (auto const& [fname, fn] : functions) {
            if (name == fname) {
                if (!called || arity != 1) {
                    throw parse_error(parse_error::kind::arity, begin,
                                      "function '" + name + "' takes exactly one argument, got " +
                                          std::to_string(arity));
                }
                return ast::make(ast::Call{fn, argument});
            }
        }

        auto leaf = [&]() -> ast::NodePtr {
            if (name == "pi") {
                return ast::make(ast::NamedConstant{Constant::pi});
            }
            if (name == "e") {
                return ast::make(ast::NamedConstant{Constant::e});
            }
            if (name == "n" || name == "k" || name == "x") {
                if (variable_ && *variable_ != name) {
                    throw parse_error(parse_error::kind::multiple_variables, begin,
                                      "expression uses both '" + *variable_ + "' and '" + name + "'");
                }
                variable_ = name;
                return ast::make(ast::Variable{name});
            }
            throw parse_error(parse_error::kind::unknown_identifier, begin, "unknown identifier '" + name + "'");
        }();
        if (called) {
            throw parse_error(parse_error::kind::arity, begin, "'" + name + "' is not a function");
        }
        return leaf;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::optional<std::string> variable_;
};

} // namespace detail

/// Parses `text` into an expression tree. Throws parse_error.
inline Expression parse_expression(std::string_view text) { return detail::ExpressionParser(text).parse(); }

} // namespace zseries
