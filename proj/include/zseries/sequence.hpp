#pragma once

/**
 * @file sequence.hpp
 * @brief Term sequences: nonnegative magnitudes |a_n| plus a sign convention.
 *
 * The series is sum_{n >= start} sign(n) * a_n. Magnitudes come from one of
 *   - a closed-form expression in n,
 *   - piece rules dispatched on n mod modulus, each mapping n to k through an
 *     affine integer map and evaluating an expression in k,
 *   - an explicit finite table,
 *   - a strided view of another sequence (used by the subseries decomposition).
 *
 * Sequences are immutable after construction and every operation is a pure
 * function of (sequence, index, precision).
 */

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zseries/error.hpp"
#include "zseries/expression.hpp"
#include "zseries/real.hpp"

namespace zseries {

enum class SignKind {
    alternating_plus,   ///< (-1)^(n+1): positive at odd n
    alternating_minus,  ///< (-1)^n: positive at even n
    explicit_sign,      ///< sign of a user expression in n
};

struct SignConvention {
    SignKind kind = SignKind::alternating_plus;
    Expression expr;  // explicit_sign only

    static SignConvention alternating_plus() { return {SignKind::alternating_plus, {}}; }
    static SignConvention alternating_minus() { return {SignKind::alternating_minus, {}}; }
    static SignConvention from_expression(Expression e) { return {SignKind::explicit_sign, std::move(e)}; }

    [[nodiscard]] bool is_alternating() const noexcept { return kind != SignKind::explicit_sign; }
};

/// n ≡ residue (mod modulus) ↦ k = index_map(n) ↦ magnitude(k).
struct PieceRule {
    std::int64_t modulus = 1;
    std::int64_t residue = 0;
    Expression index_map;
    Expression magnitude;
};

class TermSequence;

namespace detail {

/// k = (num·n + offset) / den, exact.
struct IntegerAffine {
    std::int64_t num = 1;
    std::int64_t offset = 0;
    std::int64_t den = 1;

    [[nodiscard]] std::int64_t apply(std::int64_t n) const
    {
        __int128 const v = static_cast<__int128>(num) * n + offset;
        return static_cast<std::int64_t>(v / den);
    }
};

struct CompiledPiece {
    PieceRule rule;
    IntegerAffine map;
};

struct ClosedForm {
    Expression expr;
};
struct Piecewise {
    std::vector<CompiledPiece> pieces;
    std::vector<int> by_residue;  // filled when all moduli agree
};
struct Table {
    std::vector<std::string> values;
};
struct Strided {
    std::shared_ptr<TermSequence const> parent;
    std::int64_t first = 0;
    std::int64_t stride = 1;
};

} // namespace detail

class TermSequence {
public:
    /// a_n = expr(n).
    static TermSequence closed_form(std::string name, std::int64_t start, Expression magnitude,
                                    SignConvention sign = SignConvention::alternating_plus())
    {
        check_start(start);
        require_at_most_variable(magnitude, "magnitude");
        check_sign(sign);
        return TermSequence(std::move(name), start, detail::ClosedForm{std::move(magnitude)}, std::move(sign));
    }

    static TermSequence closed_form(std::string name, std::int64_t start, std::string_view magnitude,
                                    SignConvention sign = SignConvention::alternating_plus())
    {
        return closed_form(std::move(name), start, parse_expression(magnitude), std::move(sign));
    }

    /// Piecewise by residue class. Validates coverage and the index maps.
    static TermSequence piecewise(std::string name, std::int64_t start, std::vector<PieceRule> rules,
                                  SignConvention sign = SignConvention::alternating_plus())
    {
        check_start(start);
        check_sign(sign);
        if (rules.empty()) {
            throw usage_error("piecewise magnitude needs at least one rule");
        }
        detail::Piecewise pw;
        std::int64_t period = 1;
        for (auto& rule : rules) {
            if (rule.modulus < 1) {
                throw usage_error("piece modulus must be positive");
            }
            if (rule.residue < 0 || rule.residue >= rule.modulus) {
                throw usage_error("piece residue " + std::to_string(rule.residue) + " outside [0, " +
                                  std::to_string(rule.modulus) + ")");
            }
            require_at_most_variable(rule.magnitude, "piece magnitude");
            pw.pieces.push_back({rule, compile_index_map(rule, start)});
            period = std::lcm(period, rule.modulus);
            if (period > 1'000'000) {
                throw usage_error("combined piece period is too large");
            }
        }
        // Every residue class mod lcm is matched by exactly one rule.
        for (std::int64_t r = 0; r < period; ++r) {
            int matches = 0;
            for (auto const& p : pw.pieces) {
                matches += (r % p.rule.modulus == p.rule.residue) ? 1 : 0;
            }
            if (matches != 1) {
                throw usage_error("residue " + std::to_string(r) + " mod " + std::to_string(period) + " is covered by " +
                                  std::to_string(matches) + " rules (need exactly one)");
            }
        }
        bool const uniform = std::all_of(pw.pieces.begin(), pw.pieces.end(),
                                         [&](auto const& p) { return p.rule.modulus == period; });
        if (uniform) {
            pw.by_residue.assign(static_cast<std::size_t>(period), -1);
            for (std::size_t i = 0; i < pw.pieces.size(); ++i) {
                pw.by_residue[static_cast<std::size_t>(pw.pieces[i].rule.residue)] = static_cast<int>(i);
            }
        }
        return TermSequence(std::move(name), start, std::move(pw), std::move(sign));
    }

    /// a_{start+i} = values[i]; indices past the table are out of domain.
    static TermSequence table(std::string name, std::int64_t start, std::vector<std::string> values,
                              SignConvention sign = SignConvention::alternating_plus())
    {
        check_start(start);
        check_sign(sign);
        for (auto const& v : values) {
            (void)Real::from_string(v, 64);
        }
        return TermSequence(std::move(name), start, detail::Table{std::move(values)}, std::move(sign));
    }

    static TermSequence table(std::string name, std::int64_t start, std::vector<double> const& values,
                              SignConvention sign = SignConvention::alternating_plus())
    {
        std::vector<std::string> text;
        text.reserve(values.size());
        for (double v : values) {
            std::array<char, 64> buf{};
            auto const res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
            text.emplace_back(buf.data(), res.ptr);
        }
        return table(std::move(name), start, std::move(text), std::move(sign));
    }

    /// View j ↦ parent(first + j·stride), j >= 0. Signs come from the parent.
    static TermSequence strided(std::shared_ptr<TermSequence const> parent, std::int64_t first, std::int64_t stride)
    {
        if (!parent) {
            throw usage_error("strided view needs a parent sequence");
        }
        if (stride < 1 || first < parent->start()) {
            throw usage_error("strided view must start inside the parent domain with a positive stride");
        }
        std::string name = parent->name() + "[" + std::to_string(first) + "::" + std::to_string(stride) + "]";
        SignConvention sign = parent->sign();
        return TermSequence(std::move(name), 0, detail::Strided{std::move(parent), first, stride}, std::move(sign));
    }

    [[nodiscard]] std::string const& name() const noexcept { return name_; }
    [[nodiscard]] std::int64_t start() const noexcept { return start_; }
    [[nodiscard]] SignConvention const& sign() const noexcept { return sign_; }

    /// Last valid index for finite (table) sequences.
    [[nodiscard]] std::optional<std::int64_t> last_index() const
    {
        if (auto const* t = std::get_if<detail::Table>(&magnitude_)) {
            return start_ + static_cast<std::int64_t>(t->values.size()) - 1;
        }
        if (auto const* s = std::get_if<detail::Strided>(&magnitude_)) {
            auto const parent_last = s->parent->last_index();
            if (!parent_last) {
                return std::nullopt;
            }
            return (*parent_last - s->first) / s->stride;
        }
        return std::nullopt;
    }

    [[nodiscard]] bool is_closed_form() const noexcept
    {
        return std::holds_alternative<detail::ClosedForm>(magnitude_);
    }
    [[nodiscard]] bool is_piecewise() const noexcept { return std::holds_alternative<detail::Piecewise>(magnitude_); }
    [[nodiscard]] bool is_table() const noexcept { return std::holds_alternative<detail::Table>(magnitude_); }

    [[nodiscard]] Expression const* closed_form_expression() const
    {
        auto const* c = std::get_if<detail::ClosedForm>(&magnitude_);
        return c ? &c->expr : nullptr;
    }

    [[nodiscard]] std::vector<PieceRule> pieces() const
    {
        std::vector<PieceRule> out;
        if (auto const* p = std::get_if<detail::Piecewise>(&magnitude_)) {
            for (auto const& piece : p->pieces) {
                out.push_back(piece.rule);
            }
        }
        return out;
    }

    [[nodiscard]] std::vector<std::string> const* table_values() const
    {
        auto const* t = std::get_if<detail::Table>(&magnitude_);
        return t ? &t->values : nullptr;
    }

    /// |a_n| at `ctx` precision.
    [[nodiscard]] Real magnitude(std::int64_t n, PrecisionContext const& ctx) const
    {
        check_index(n);
        Real value = std::visit([&](auto const& m) { return raw_magnitude(m, n, ctx); }, magnitude_);
        if (value.sign() < 0) {
            throw eval_error("negative magnitude a_" + std::to_string(n) + " = " + value.to_string(12) + " in '" +
                             name_ + "'");
        }
        if (value.is_zero() && sign_.kind == SignKind::explicit_sign &&
            !std::holds_alternative<detail::Strided>(magnitude_)) {
            throw eval_error("zero magnitude a_" + std::to_string(n) + " in explicit-sign series '" + name_ + "'");
        }
        return value;
    }

    /// +1 or -1: the sign convention at n, independent of the magnitude.
    [[nodiscard]] int sign_at(std::int64_t n, PrecisionContext const& ctx) const
    {
        check_index(n);
        if (auto const* s = std::get_if<detail::Strided>(&magnitude_)) {
            return s->parent->sign_at(s->first + n * s->stride, ctx);
        }
        switch (sign_.kind) {
        case SignKind::alternating_plus:
            return (n % 2 != 0) ? 1 : -1;
        case SignKind::alternating_minus:
            return (n % 2 == 0) ? 1 : -1;
        case SignKind::explicit_sign:
            break;
        }
        int const s = sign_.expr.evaluate(n, ctx.bits).sign();
        if (s == 0) {
            throw eval_error("sign expression is zero at n = " + std::to_string(n));
        }
        return s;
    }

private:
    using Storage = std::variant<detail::ClosedForm, detail::Piecewise, detail::Table, detail::Strided>;

    TermSequence(std::string name, std::int64_t start, Storage magnitude, SignConvention sign)
        : name_(std::move(name)), start_(start), magnitude_(std::move(magnitude)), sign_(std::move(sign))
    {
    }

    static void check_start(std::int64_t start)
    {
        if (start < 0) {
            throw usage_error("series start must be >= 0");
        }
    }

    static void require_at_most_variable(Expression const& e, char const* what)
    {
        if (e.empty()) {
            throw usage_error(std::string(what) + " expression is empty");
        }
    }

    static void check_sign(SignConvention const& sign)
    {
        if (sign.kind == SignKind::explicit_sign && sign.expr.empty()) {
            throw usage_error("explicit sign convention needs an expression");
        }
    }

    static detail::IntegerAffine compile_index_map(PieceRule const& rule, std::int64_t start)
    {
        auto const affine = rule.index_map.as_affine();
        if (!affine) {
            throw usage_error("index map '" + rule.index_map.to_string() + "' is not affine in n");
        }
        auto const& slope = affine->slope;
        auto const& intercept = affine->intercept;
        std::int64_t const den = std::lcm(slope.denominator(), intercept.denominator());
        detail::IntegerAffine map{slope.numerator() * (den / slope.denominator()),
                                  intercept.numerator() * (den / intercept.denominator()), den};

        std::int64_t first = rule.residue;
        if (first < start) {
            first += ((start - first + rule.modulus - 1) / rule.modulus) * rule.modulus;
        }
        auto const k_first = (*affine)(first);
        auto const step = slope * rule.modulus;
        if (k_first.denominator() != 1 || step.denominator() != 1) {
            throw usage_error("index map '" + rule.index_map.to_string() + "' is not integral on residue " +
                              std::to_string(rule.residue) + " mod " + std::to_string(rule.modulus));
        }
        if (slope.numerator() < 0 || k_first.numerator() < 1) {
            throw usage_error("index map '" + rule.index_map.to_string() + "' must give positive k for n >= " +
                              std::to_string(start));
        }
        return map;
    }

    void check_index(std::int64_t n) const
    {
        if (n < start_) {
            throw eval_error("index " + std::to_string(n) + " is below the series start " + std::to_string(start_));
        }
        if (auto last = last_index(); last && n > *last) {
            throw eval_error("index " + std::to_string(n) + " is beyond the end of '" + name_ + "' (last " +
                             std::to_string(*last) + ")");
        }
    }

    Real raw_magnitude(detail::ClosedForm const& m, std::int64_t n, PrecisionContext const& ctx) const
    {
        return m.expr.evaluate(n, ctx.bits);
    }

    Real raw_magnitude(detail::Piecewise const& m, std::int64_t n, PrecisionContext const& ctx) const
    {
        detail::CompiledPiece const* piece = nullptr;
        if (!m.by_residue.empty()) {
            auto const mod = static_cast<std::int64_t>(m.by_residue.size());
            piece = &m.pieces[static_cast<std::size_t>(m.by_residue[static_cast<std::size_t>(n % mod)])];
        } else {
            for (auto const& p : m.pieces) {
                if (n % p.rule.modulus == p.rule.residue) {
                    piece = &p;
                    break;
                }
            }
        }
        std::int64_t const k = piece->map.apply(n);
        return piece->rule.magnitude.evaluate(k, ctx.bits);
    }

    Real raw_magnitude(detail::Table const& m, std::int64_t n, PrecisionContext const& ctx) const
    {
        return Real::from_string(m.values[static_cast<std::size_t>(n - start_)], ctx.bits);
    }

    Real raw_magnitude(detail::Strided const& m, std::int64_t n, PrecisionContext const& ctx) const
    {
        return m.parent->magnitude(m.first + n * m.stride, ctx);
    }

    std::string name_;
    std::int64_t start_ = 0;
    Storage magnitude_;
    SignConvention sign_;
};

// ---- operations --------------------------------------------------------

/// |a_n| at the requested precision.
inline Real eval_term(TermSequence const& seq, std::int64_t n, PrecisionContext const& ctx)
{
    return seq.magnitude(n, ctx);
}

/// sign(n) · |a_n|.
inline Real signed_term(TermSequence const& seq, std::int64_t n, PrecisionContext const& ctx)
{
    Real value = seq.magnitude(n, ctx);
    return seq.sign_at(n, ctx) > 0 ? value : -value;
}

} // namespace zseries
