#pragma once

/**
 * @file summation.hpp
 * @brief Partial sums, certified summation to a tolerance, and the
 * decomposition of a Z(2ω-1) series into 2ω-1 interleaved Leibniz series.
 *
 * `sum_to_tolerance` scans m = start, start+1, ... (step 1, since the bounds
 * fluctuate with period 2ω-1) and stops at the first m whose selected bound is
 * valid and <= tol. Preconditions over the tail window [m+1, m+W] are tracked
 * incrementally: each new term is compared once against its predecessors, and
 * a window is clean when its last violation lies before the window start.
 */

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zseries/bounds.hpp"
#include "zseries/error.hpp"
#include "zseries/real.hpp"
#include "zseries/sequence.hpp"

namespace zseries {

/// Σ_{n=start}^{m} signed a_n in index order, rounded to nearest at ctx.bits.
inline Real partial_sum(TermSequence const& seq, std::int64_t m, PrecisionContext const& ctx)
{
    if (m < seq.start()) {
        throw usage_error("partial_sum needs m >= start (" + std::to_string(seq.start()) + "), got " +
                          std::to_string(m));
    }
    Real acc(ctx.bits);
    for (std::int64_t n = seq.start(); n <= m; ++n) {
        acc = add(acc, signed_term(seq, n, ctx), Round::nearest, ctx.bits);
    }
    return acc;
}

struct SummationOptions {
    std::int64_t max_index = 10'000'000;
    /// Tail window over which preconditions must hold at the stopping index.
    std::int64_t tail_window = 256;
};

struct SummationResult {
    Real sum;
    std::int64_t m = 0;
    RemainderBound bound;
    Real tolerance;
    bool certified = false;
    std::int64_t terms_evaluated = 0;
    bool assumed_limit_zero = false;
    std::vector<std::string> notes;
};

namespace detail {

/// Sliding buffer of magnitudes and signs with one violation tracker per check.
class TailScanner {
public:
    struct Check {
        std::string name;
        std::int64_t span;  // p for pairs, 2s for convexity triples
        std::int64_t p;
        std::function<bool(TailScanner const&, std::int64_t k)> violated;
        std::int64_t last_bad = std::numeric_limits<std::int64_t>::min();
    };

    TailScanner(TermSequence const& seq, PrecisionContext ctx) : seq_(seq), ctx_(ctx), lo_(seq.start()), hi_(lo_ - 1)
    {
    }

    void add_check(Check c) { checks_.push_back(std::move(c)); }

    [[nodiscard]] Real const& at(std::int64_t n) const { return values_[static_cast<std::size_t>(n - lo_)]; }
    [[nodiscard]] int sign(std::int64_t n) const { return signs_[static_cast<std::size_t>(n - lo_)]; }
    [[nodiscard]] std::int64_t hi() const noexcept { return hi_; }
    [[nodiscard]] std::int64_t evaluated() const noexcept { return evaluated_; }

    /// Extends the buffer through index `target` (clipped to the end of a table).
    /// Returns the new upper end.
    std::int64_t extend(std::int64_t target)
    {
        if (auto last = seq_.last_index()) {
            target = std::min(target, *last);
        }
        while (hi_ < target) {
            ++hi_;
            values_.push_back(eval_term(seq_, hi_, ctx_));
            signs_.push_back(seq_.sign_at(hi_, ctx_));
            ++evaluated_;
            for (auto& c : checks_) {
                std::int64_t const k = hi_ - c.span;
                if (k >= lo_ && c.violated(*this, k)) {
                    c.last_bad = k;
                }
            }
        }
        return hi_;
    }

    /// Drops indices below `n` (they are no longer needed by any check).
    void drop_before(std::int64_t n)
    {
        while (lo_ < n && !values_.empty()) {
            values_.pop_front();
            signs_.pop_front();
            ++lo_;
        }
    }

    /// Precondition records for the window [w.lo, hi()]: a check holds when
    /// its last violation precedes w.lo.
    [[nodiscard]] std::vector<PreconditionRecord> records(Window w) const
    {
        std::vector<PreconditionRecord> out;
        for (auto const& c : checks_) {
            bool const ok = c.last_bad < w.lo;
            PreconditionRecord r{c.name, c.p, w, ok, ok ? 0u : 1u, std::nullopt};
            if (!ok) {
                r.first_violation = c.last_bad;
            }
            out.push_back(r);
        }
        return out;
    }

    [[nodiscard]] bool clean(Window w) const
    {
        return std::all_of(checks_.begin(), checks_.end(), [&](auto const& c) { return c.last_bad < w.lo; });
    }

private:
    TermSequence const& seq_;
    PrecisionContext ctx_;
    std::int64_t lo_;
    std::int64_t hi_;
    std::deque<Real> values_;
    std::deque<int> signs_;
    std::vector<Check> checks_;
    std::int64_t evaluated_ = 0;
};

struct MethodShape {
    std::int64_t p = 1;         // period for Z-monotonicity / strands
    std::int64_t first = 1;     // window starts at m + first (0 for half bounds)
    std::int64_t count = 1;     // terms a_{m+1..m+count} needed
    bool convex = false;        // convexity along stride p
};

inline MethodShape shape_of(BoundMethod method, std::int64_t omega)
{
    std::int64_t const p = period_of(omega);
    switch (method) {
    case BoundMethod::leibniz:
        return {1, 1, 1, false};
    case BoundMethod::z_simple:
    case BoundMethod::z_improved:
    case BoundMethod::enclosure:
        return {p, 1, p, false};
    case BoundMethod::z_stated:
        return {p, 1, p + 1, false};
    case BoundMethod::half_upper:
        return {1, 0, 1, true};
    case BoundMethod::delta_upper:
        return {p, 1, p, true};
    case BoundMethod::half_lower:
    case BoundMethod::delta_lower:
        break;
    }
    throw usage_error("'" + method_name(method) + "' is a lower bound and cannot certify a tolerance");
}

} // namespace detail

/// Scans m = start, start+1, ... and stops at the first m whose `method`
/// bound is valid and <= tol. Requires the caller to assert lim a_n = 0.
inline SummationResult sum_to_tolerance(TermSequence const& seq, std::int64_t omega, Real const& tol,
                                        BoundMethod method, PrecisionContext const& ctx, bool limit_zero_asserted,
                                        SummationOptions const& opts = {})
{
    if (!limit_zero_asserted) {
        throw usage_error("sum_to_tolerance requires the caller to assert that the terms tend to zero");
    }
    if (!(tol.sign() > 0) || !tol.is_finite()) {
        throw usage_error("tolerance must be positive and finite");
    }
    if (opts.tail_window < 1) {
        throw usage_error("tail window must be positive");
    }
    auto const shape = detail::shape_of(method, omega);
    std::int64_t const p = shape.p;
    std::int64_t const width = std::max(opts.tail_window, 2 * p + 2);

    detail::TailScanner scan(seq, ctx);
    scan.add_check({"z_monotone", p, p,
                    [p](detail::TailScanner const& s, std::int64_t k) { return s.at(k + p) > s.at(k); }});
    if (shape.convex) {
        scan.add_check({"convexity", 2 * p, p, [p](detail::TailScanner const& s, std::int64_t k) {
                            return ldexp(s.at(k + p), 1) > exact_add(s.at(k), s.at(k + 2 * p));
                        }});
    }
    if (!seq.sign().is_alternating() || p % 2 == 0) {
        scan.add_check({"sign_pattern", p, p, [p](detail::TailScanner const& s, std::int64_t k) {
                            return s.sign(k) != -s.sign(k + p);
                        }});
    }

    SummationResult result;
    result.tolerance = tol;
    result.assumed_limit_zero = true;
    Real sum(ctx.bits);

    auto const candidate = [&](std::int64_t m) -> Real {
        switch (method) {
        case BoundMethod::leibniz:
            return round_to(scan.at(m + 1), ctx.bits, Round::up);
        case BoundMethod::half_upper:
            return round_to(half(scan.at(m)), ctx.bits, Round::up);
        case BoundMethod::z_simple:
        case BoundMethod::z_stated: {
            Real acc(ctx.bits);
            for (std::int64_t j = 1; j <= shape.count; ++j) {
                acc = add(acc, scan.at(m + j), Round::up, ctx.bits);
            }
            return acc;
        }
        case BoundMethod::z_improved:
        case BoundMethod::enclosure: {
            Real pos(ctx.bits);
            Real neg(ctx.bits);
            for (std::int64_t j = 1; j <= p; ++j) {
                if (scan.sign(m + j) > 0) {
                    pos = add(pos, scan.at(m + j), Round::up, ctx.bits);
                } else {
                    neg = add(neg, scan.at(m + j), Round::up, ctx.bits);
                }
            }
            return max(pos, neg);
        }
        default:
            return Real::infinity(ctx.bits);
        }
    };

    auto const full_bound = [&](std::int64_t m) -> RemainderBound {
        BoundOptions const bo{width};
        switch (method) {
        case BoundMethod::leibniz:
            return leibniz_bound(seq, m, ctx, bo);
        case BoundMethod::z_simple:
            return z_bound(seq, m, omega, ctx, ZVariant::proof, bo);
        case BoundMethod::z_stated:
            return z_bound(seq, m, omega, ctx, ZVariant::stated, bo);
        case BoundMethod::z_improved:
            return z_bound_improved(seq, m, omega, ctx, bo);
        case BoundMethod::enclosure:
            return remainder_enclosure(seq, m, omega, ctx, bo);
        case BoundMethod::half_upper:
            return half_bounds(seq, m, ctx, bo).second;
        case BoundMethod::delta_upper:
            return delta_bounds(seq, m, p, ctx, false, bo).second;
        default:
            throw usage_error("unsupported summation method");
        }
    };

    std::optional<std::int64_t> const last = seq.last_index();
    for (std::int64_t m = seq.start();; ++m) {
        std::int64_t const wlo = m + shape.first;
        std::int64_t const reach = scan.extend(wlo + width - 1);
        scan.drop_before(m);
        sum = add(sum, seq.sign_at(m, ctx) > 0 ? scan.at(m) : -scan.at(m), Round::nearest, ctx.bits);

        bool const has_terms = reach >= m + shape.count;
        if (has_terms && scan.clean(Window{wlo, reach})) {
            Real value = method == BoundMethod::delta_upper ? full_bound(m).value : candidate(m);
            if (value <= tol) {
                RemainderBound b = full_bound(m);
                if (b.valid && b.value <= tol) {
                    result.sum = sum;
                    result.m = m;
                    result.bound = std::move(b);
                    result.certified = true;
                    result.terms_evaluated = scan.evaluated();
                    return result;
                }
            }
        }

        bool const exhausted = m >= opts.max_index || (last && m + shape.count > *last);
        if (exhausted) {
            result.sum = sum;
            result.m = m;
            result.certified = false;
            result.terms_evaluated = scan.evaluated();
            if (has_terms) {
                RemainderBound b;
                b.m = m;
                b.method = method;
                b.value = candidate(m);
                b.preconditions = scan.records(Window{wlo, reach});
                detail::finalize(b);
                result.bound = std::move(b);
            } else {
                result.bound.m = m;
                result.bound.method = method;
                result.bound.value = Real::infinity(ctx.bits);
                result.bound.valid = false;
                result.bound.notes.push_back("not enough terms for the bound");
            }
            result.notes.push_back(last && m + shape.count > *last
                                       ? "table ends at index " + std::to_string(*last) + " before certification"
                                       : "max index " + std::to_string(opts.max_index) + " reached");
            return result;
        }
    }
}

// ---- decomposition into interleaved Leibniz series ------------------------

struct SubseriesDecomposition {
    std::int64_t omega = 1;
    std::int64_t period = 1;
    /// components[k-1] holds a_{start + (k-1) + j·period}, j >= 0.
    std::vector<TermSequence> components;
    /// Parent index of each component's first term.
    std::vector<std::int64_t> first_index;
};

inline SubseriesDecomposition decompose(TermSequence const& seq, std::int64_t omega)
{
    std::int64_t const p = detail::period_of(omega);
    auto parent = std::make_shared<TermSequence const>(seq);
    SubseriesDecomposition d{omega, p, {}, {}};
    for (std::int64_t k = 0; k < p; ++k) {
        d.components.push_back(TermSequence::strided(parent, seq.start() + k, p));
        d.first_index.push_back(seq.start() + k);
    }
    return d;
}

/// Number of terms of a component that lie at parent indices <= m.
inline std::int64_t component_count(SubseriesDecomposition const& d, std::size_t k, std::int64_t m)
{
    std::int64_t const first = d.first_index[k];
    return m < first ? 0 : (m - first) / d.period + 1;
}

struct CrossCheckReport {
    std::int64_t m = 0;
    Real direct;
    Real recombined;
    std::vector<Real> component_sums;
    std::vector<RemainderBound> component_bounds;
    /// Σ of the per-component Leibniz bounds, accumulated in parent index order.
    Real max_component_bound;
    bool components_valid = true;
};

/// Recombines the component partial sums cut at parent index m and compares
/// them with the direct partial sum.
inline CrossCheckReport cross_check(TermSequence const& seq, std::int64_t omega, std::int64_t m,
                                    PrecisionContext const& ctx, BoundOptions const& opts = {})
{
    auto const d = decompose(seq, omega);
    CrossCheckReport r;
    r.m = m;
    r.direct = partial_sum(seq, m, ctx);
    r.recombined = Real(ctx.bits);

    std::vector<std::pair<std::int64_t, Real>> next_terms;
    BoundOptions const component_opts{std::max<std::int64_t>(2, opts.tail_window / d.period)};
    for (std::size_t k = 0; k < d.components.size(); ++k) {
        auto const& comp = d.components[k];
        std::int64_t const count = component_count(d, k, m);
        Real s(ctx.bits);
        for (std::int64_t j = 0; j < count; ++j) {
            s = add(s, signed_term(comp, j, ctx), Round::nearest, ctx.bits);
        }
        r.recombined = add(r.recombined, s, Round::nearest, ctx.bits);
        r.component_sums.push_back(std::move(s));

        RemainderBound b = leibniz_bound(comp, count - 1, ctx, component_opts);
        r.components_valid = r.components_valid && b.valid;
        next_terms.emplace_back(d.first_index[k] + count * d.period, b.value);
        r.component_bounds.push_back(std::move(b));
    }
    std::sort(next_terms.begin(), next_terms.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
    r.max_component_bound = Real(ctx.bits);
    for (auto const& [index, value] : next_terms) {
        r.max_component_bound = add(r.max_component_bound, value, Round::up, ctx.bits);
    }
    return r;
}

/// |direct - recombined| at every cut m in [start, m_hi], in one pass.
inline std::vector<Real> recombination_gaps(TermSequence const& seq, std::int64_t omega, std::int64_t m_hi,
                                            PrecisionContext const& ctx)
{
    auto const d = decompose(seq, omega);
    std::vector<Real> component_sums(d.components.size(), Real(ctx.bits));
    std::vector<Real> gaps;
    Real direct(ctx.bits);
    for (std::int64_t m = seq.start(); m <= m_hi; ++m) {
        direct = add(direct, signed_term(seq, m, ctx), Round::nearest, ctx.bits);
        auto const k = static_cast<std::size_t>((m - seq.start()) % d.period);
        std::int64_t const j = (m - d.first_index[k]) / d.period;
        component_sums[k] = add(component_sums[k], signed_term(d.components[k], j, ctx), Round::nearest, ctx.bits);
        Real recombined(ctx.bits);
        for (auto const& s : component_sums) {
            recombined = add(recombined, s, Round::nearest, ctx.bits);
        }
        gaps.push_back(abs(sub(direct, recombined, Round::nearest, ctx.bits)));
    }
    return gaps;
}

} // namespace zseries
