#pragma once

/**
 * @file bounds.hpp
 * @brief Remainder estimators for alternating and Z(2ω-1)-alternating series.
 *
 * With R_m = S - S_m and p = 2ω - 1, for magnitudes that are Z(p)-monotone
 * decreasing to zero:
 *
 *   leibniz      |R_m| <= a_{m+1}                                   (ω = 1)
 *   z (proof)    |R_m| <= a_{m+1} + ... + a_{m+p}
 *   z (stated)   |R_m| <= a_{m+1} + ... + a_{m+p+1}
 *   z improved   |R_m| <= max(sum of the positive first-omitted terms,
 *                             sum of the negative first-omitted terms)
 *   enclosure    R_m in [-(negative sum), +(positive sum)]
 *
 * The series splits into p interleaved alternating strands; the remainder of
 * each strand has the sign of its first omitted term, which lies among
 * a_{m+1}..a_{m+p}. That gives the enclosure, and its larger side is the
 * improved bound. With alternating signs and odd p the groups are exactly
 * the odd and even offsets.
 *
 * Under convexity the classic sandwich a_{m+1}/2 <= |R_m| <= a_m/2 holds
 * (`half_bounds`); applied per strand it gives the δ-decomposition bounds
 * (`delta_bounds`).
 *
 * Bounds never throw on failed mathematical preconditions: they are returned
 * with valid = false and the failing reports attached. Upper bounds are
 * rounded toward +inf and lower bounds toward -inf.
 */

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zseries/error.hpp"
#include "zseries/monotonicity.hpp"
#include "zseries/real.hpp"
#include "zseries/sequence.hpp"

namespace zseries {

enum class BoundMethod {
    leibniz,
    z_simple,  ///< proof variant: 2ω-1 terms
    z_stated,  ///< as printed: 2ω terms
    z_improved,
    half_upper,
    half_lower,
    delta_upper,
    delta_lower,
    enclosure,
};

inline std::string method_name(BoundMethod m)
{
    switch (m) {
    case BoundMethod::leibniz:
        return "leibniz";
    case BoundMethod::z_simple:
        return "z_simple";
    case BoundMethod::z_stated:
        return "z_stated";
    case BoundMethod::z_improved:
        return "z_improved";
    case BoundMethod::half_upper:
        return "half_upper";
    case BoundMethod::half_lower:
        return "half_lower";
    case BoundMethod::delta_upper:
        return "delta_upper";
    case BoundMethod::delta_lower:
        return "delta_lower";
    case BoundMethod::enclosure:
        return "enclosure";
    }
    return "unknown";
}

enum class ZVariant { stated, proof };

/// Summary of a precondition report, kept with the bound it supports.
struct PreconditionRecord {
    std::string check;  // z_monotone / convexity / slow_decay / sign_pattern / domain
    std::int64_t p = 1;
    Window window;
    bool holds = true;
    std::size_t violation_count = 0;
    std::optional<std::int64_t> first_violation;

    static PreconditionRecord from(ZReport const& r)
    {
        PreconditionRecord rec{check_name(r.check), r.p, r.window, r.holds, r.violations.size(), std::nullopt};
        if (!r.violations.empty()) {
            rec.first_violation = r.violations.front().k;
        }
        return rec;
    }

    static PreconditionRecord from(SignPatternReport const& r)
    {
        PreconditionRecord rec{"sign_pattern", r.omega, r.window, r.holds, r.violations.size(), std::nullopt};
        if (!r.violations.empty()) {
            rec.first_violation = r.violations.front();
        }
        return rec;
    }
};

struct RemainderBound {
    std::int64_t m = 0;
    BoundMethod method = BoundMethod::leibniz;
    /// Nonnegative magnitude bound; for enclosures max(|lo|, hi).
    Real value;
    std::optional<Real> lo;  // enclosure only
    std::optional<Real> hi;  // enclosure only
    std::vector<PreconditionRecord> preconditions;
    bool valid = true;
    /// Value before flooring or symmetrisation (δ bounds).
    std::optional<Real> raw;
    std::vector<std::string> notes;
};

struct BoundOptions {
    /// Number of tail terms over which preconditions are verified.
    std::int64_t tail_window = 256;
};

/// Magnitudes and signs for a contiguous index range.
struct TermSample {
    Window window;
    std::vector<Real> values;
    std::vector<int> signs;

    [[nodiscard]] Real const& at(std::int64_t n) const { return values[static_cast<std::size_t>(n - window.lo)]; }
    [[nodiscard]] int sign(std::int64_t n) const { return signs[static_cast<std::size_t>(n - window.lo)]; }

    /// The sub-range of values for [lo, hi] (must lie inside the sample).
    [[nodiscard]] std::span<Real const> slice(Window w) const
    {
        return std::span<Real const>(values).subspan(static_cast<std::size_t>(w.lo - window.lo),
                                                     static_cast<std::size_t>(w.size()));
    }

    static TermSample take(TermSequence const& seq, Window w, PrecisionContext const& ctx)
    {
        if (auto last = seq.last_index()) {
            w.hi = std::min(w.hi, *last);
        }
        TermSample s{w, evaluate_window(seq, w, ctx), {}};
        s.signs.reserve(s.values.size());
        for (std::int64_t n = w.lo; n <= w.hi; ++n) {
            s.signs.push_back(seq.sign_at(n, ctx));
        }
        return s;
    }
};

// ---- arithmetic kernels --------------------------------------------------
//
// Shared by this module, the summation driver, and the oracle, so that
// identical inputs always produce bit-identical bounds.

namespace kernels {

/// Sum rounded upward, accumulated in index order.
inline Real sum_up(std::span<Real const> terms, unsigned bits)
{
    Real acc(bits);
    for (auto const& t : terms) {
        acc = add(acc, t, Round::up, bits);
    }
    return acc;
}

/// Sum rounded downward, accumulated in index order.
inline Real sum_down(std::span<Real const> terms, unsigned bits)
{
    Real acc(bits);
    for (auto const& t : terms) {
        acc = add(acc, t, Round::down, bits);
    }
    return acc;
}

struct SignedSums {
    Real positive;
    Real negative;
};

/// Upward-rounded sums of the terms with positive and with negative sign.
inline SignedSums signed_group_sums(std::span<Real const> terms, std::span<int const> signs, unsigned bits)
{
    SignedSums s{Real(bits), Real(bits)};
    for (std::size_t j = 0; j < terms.size(); ++j) {
        if (signs[j] > 0) {
            s.positive = add(s.positive, terms[j], Round::up, bits);
        } else {
            s.negative = add(s.negative, terms[j], Round::up, bits);
        }
    }
    return s;
}

} // namespace kernels

namespace detail {

inline std::int64_t period_of(std::int64_t omega)
{
    if (omega < 1) {
        throw usage_error("omega must be >= 1, got " + std::to_string(omega));
    }
    return 2 * omega - 1;
}

inline void require_cut(TermSequence const& seq, std::int64_t m, std::int64_t min_m)
{
    if (m < min_m) {
        throw usage_error("cut index m = " + std::to_string(m) + " is before " + std::to_string(min_m) + " for '" +
                          seq.name() + "'");
    }
}

/// Tail window [lo, lo + max(W, span) - 1].
inline Window tail_window(std::int64_t lo, std::int64_t span, BoundOptions const& opts)
{
    return Window{lo, lo + std::max(opts.tail_window, span) - 1};
}

inline void require_terms(TermSample const& sample, std::int64_t hi)
{
    if (sample.window.hi < hi) {
        throw eval_error("bound needs a_" + std::to_string(hi) + " but the series ends at " +
                         std::to_string(sample.window.hi));
    }
}

/// Attaches Z(p) (and, for explicit signs, the period-p sign pattern) on the sample.
inline void attach_strand_preconditions(RemainderBound& b, TermSequence const& seq, TermSample const& sample,
                                        std::int64_t p)
{
    auto const z = scan_z_monotone(sample.values, sample.window, p);
    b.preconditions.push_back(PreconditionRecord::from(z));
    if (!seq.sign().is_alternating() || p % 2 == 0) {
        SignPatternReport sp{p, sample.window, true, {}};
        for (std::int64_t k = sample.window.lo; k + p <= sample.window.hi; ++k) {
            if (sample.sign(k) != -sample.sign(k + p)) {
                sp.violations.push_back(k);
            }
        }
        sp.holds = sp.violations.empty();
        b.preconditions.push_back(PreconditionRecord::from(sp));
    }
}

inline void finalize(RemainderBound& b)
{
    b.valid = std::all_of(b.preconditions.begin(), b.preconditions.end(), [](auto const& r) { return r.holds; });
    if (!b.valid) {
        for (auto const& r : b.preconditions) {
            if (!r.holds) {
                b.notes.push_back("precondition " + r.check + "(p=" + std::to_string(r.p) + ") fails on [" +
                                  std::to_string(r.window.lo) + ", " + std::to_string(r.window.hi) + "]" +
                                  (r.first_violation ? " first at k=" + std::to_string(*r.first_violation) : ""));
            }
        }
    }
}

} // namespace detail

// ---- bounds from a precomputed sample -------------------------------------
//
// The sample must start at m+1 (m for the half bounds, m+1-p for the slow
// δ variant) and reach far enough for the terms involved.

inline RemainderBound z_bound_from(TermSequence const& seq, TermSample const& sample, std::int64_t m,
                                   std::int64_t omega, ZVariant variant, PrecisionContext const& ctx)
{
    std::int64_t const p = detail::period_of(omega);
    std::int64_t const count = variant == ZVariant::proof ? p : p + 1;
    detail::require_terms(sample, m + count);
    RemainderBound b;
    b.m = m;
    b.method = variant == ZVariant::proof ? BoundMethod::z_simple : BoundMethod::z_stated;
    b.value = kernels::sum_up(sample.slice({m + 1, m + count}), ctx.bits);
    detail::attach_strand_preconditions(b, seq, sample, p);
    if (variant == ZVariant::stated) {
        b.notes.push_back("stated variant sums 2*omega terms; the proof variant (2*omega-1 terms) is tighter");
    }
    detail::finalize(b);
    return b;
}

inline RemainderBound remainder_enclosure_from(TermSequence const& seq, TermSample const& sample, std::int64_t m,
                                               std::int64_t omega, PrecisionContext const& ctx)
{
    std::int64_t const p = detail::period_of(omega);
    detail::require_terms(sample, m + p);
    Window const w{m + 1, m + p};
    auto const sums = kernels::signed_group_sums(
        sample.slice(w), std::span<int const>(sample.signs).subspan(static_cast<std::size_t>(w.lo - sample.window.lo),
                                                                    static_cast<std::size_t>(p)),
        ctx.bits);
    RemainderBound b;
    b.m = m;
    b.method = BoundMethod::enclosure;
    b.lo = -sums.negative;
    b.hi = sums.positive;
    b.value = max(sums.positive, sums.negative);
    detail::attach_strand_preconditions(b, seq, sample, p);
    detail::finalize(b);
    return b;
}

inline RemainderBound z_bound_improved_from(TermSequence const& seq, TermSample const& sample, std::int64_t m,
                                            std::int64_t omega, PrecisionContext const& ctx)
{
    RemainderBound b = remainder_enclosure_from(seq, sample, m, omega, ctx);
    b.method = BoundMethod::z_improved;
    b.lo.reset();
    b.hi.reset();
    return b;
}

// ---- public operations -----------------------------------------------------

/// |R_m| <= a_{m+1}, valid when the tail is monotone.
inline RemainderBound leibniz_bound(TermSequence const& seq, std::int64_t m, PrecisionContext const& ctx,
                                    BoundOptions const& opts = {})
{
    detail::require_cut(seq, m, seq.start() - 1);
    auto const sample = TermSample::take(seq, detail::tail_window(m + 1, 2, opts), ctx);
    detail::require_terms(sample, m + 1);
    RemainderBound b;
    b.m = m;
    b.method = BoundMethod::leibniz;
    b.value = round_to(sample.at(m + 1), ctx.bits, Round::up);
    detail::attach_strand_preconditions(b, seq, sample, 1);
    detail::finalize(b);
    return b;
}

/// Sum of the next 2ω-1 (proof) or 2ω (stated) magnitudes.
inline RemainderBound z_bound(TermSequence const& seq, std::int64_t m, std::int64_t omega, PrecisionContext const& ctx,
                              ZVariant variant = ZVariant::proof, BoundOptions const& opts = {})
{
    std::int64_t const p = detail::period_of(omega);
    detail::require_cut(seq, m, seq.start() - 1);
    auto const sample = TermSample::take(seq, detail::tail_window(m + 1, 2 * p + 2, opts), ctx);
    return z_bound_from(seq, sample, m, omega, variant, ctx);
}

/// max of the positive-group and negative-group sums among a_{m+1..m+2ω-1}.
inline RemainderBound z_bound_improved(TermSequence const& seq, std::int64_t m, std::int64_t omega,
                                       PrecisionContext const& ctx, BoundOptions const& opts = {})
{
    std::int64_t const p = detail::period_of(omega);
    detail::require_cut(seq, m, seq.start() - 1);
    auto const sample = TermSample::take(seq, detail::tail_window(m + 1, 2 * p + 1, opts), ctx);
    return z_bound_improved_from(seq, sample, m, omega, ctx);
}

/// Signed interval [lo, hi] containing R_m = S - S_m.
inline RemainderBound remainder_enclosure(TermSequence const& seq, std::int64_t m, std::int64_t omega,
                                          PrecisionContext const& ctx, BoundOptions const& opts = {})
{
    std::int64_t const p = detail::period_of(omega);
    detail::require_cut(seq, m, seq.start() - 1);
    auto const sample = TermSample::take(seq, detail::tail_window(m + 1, 2 * p + 1, opts), ctx);
    return remainder_enclosure_from(seq, sample, m, omega, ctx);
}

/// a_{m+1}/2 <= |R_m| <= a_m/2 for monotone, convex tails. Returns (lower, upper).
inline std::pair<RemainderBound, RemainderBound> half_bounds(TermSequence const& seq, std::int64_t m,
                                                             PrecisionContext const& ctx, BoundOptions const& opts = {})
{
    detail::require_cut(seq, m, seq.start());
    auto const sample = TermSample::take(seq, detail::tail_window(m, 3, opts), ctx);
    detail::require_terms(sample, m + 1);

    RemainderBound upper;
    upper.m = m;
    upper.method = BoundMethod::half_upper;
    upper.value = round_to(half(sample.at(m)), ctx.bits, Round::up);
    detail::attach_strand_preconditions(upper, seq, sample, 1);
    upper.preconditions.push_back(PreconditionRecord::from(scan_convexity(sample.values, sample.window, 1)));
    detail::finalize(upper);

    RemainderBound lower;
    lower.m = m;
    lower.method = BoundMethod::half_lower;
    lower.value = round_to(half(sample.at(m + 1)), ctx.bits, Round::down);
    lower.preconditions = upper.preconditions;
    detail::finalize(lower);
    return {std::move(lower), std::move(upper)};
}

/// Bounds from R_m = ±(δ_1 - δ_2 + ... + δ_p), each δ_i the remainder of one
/// strand, with a_{m+i}/2 <= δ_i <= a_{m+i} (or <= a_{m+i-p}/2 under slow
/// decay a_n <= 2 a_{n+p}). Returns (lower, upper).
inline std::pair<RemainderBound, RemainderBound> delta_bounds(TermSequence const& seq, std::int64_t m, std::int64_t p,
                                                              PrecisionContext const& ctx, bool slow_decay = false,
                                                              BoundOptions const& opts = {})
{
    if (p < 1 || p % 2 == 0) {
        throw usage_error("delta_bounds needs an odd period p >= 1");
    }
    detail::require_cut(seq, m, seq.start() - 1);
    unsigned const bits = ctx.bits;

    bool const slow_defined = !slow_decay || m + 1 - p >= seq.start();
    bool const use_slow = slow_decay && slow_defined;
    std::int64_t const lo = use_slow ? m + 1 - p : m + 1;
    auto const sample = TermSample::take(seq, Window{lo, std::max(m + p, lo + std::max(opts.tail_window, 2 * p + 1) - 1)}, ctx);
    detail::require_terms(sample, m + p);

    std::vector<Real> odd_first;   // a_{m+i}, i odd
    std::vector<Real> even_first;  // a_{m+i}, i even
    std::vector<Real> odd_prev;    // a_{m+i-p}, i odd (slow)
    std::vector<Real> even_prev;   // a_{m+i-p}, i even (slow)
    for (std::int64_t i = 1; i <= p; ++i) {
        (i % 2 == 1 ? odd_first : even_first).push_back(sample.at(m + i));
        if (use_slow) {
            (i % 2 == 1 ? odd_prev : even_prev).push_back(sample.at(m + i - p));
        }
    }

    // Bounds on Σ_odd δ and Σ_even δ.
    Real const odd_lo = half(kernels::sum_down(odd_first, bits));
    Real const even_lo = half(kernels::sum_down(even_first, bits));
    Real const odd_hi = use_slow ? half(kernels::sum_up(odd_prev, bits)) : kernels::sum_up(odd_first, bits);
    Real const even_hi = use_slow ? half(kernels::sum_up(even_prev, bits)) : kernels::sum_up(even_first, bits);

    Real const displayed_upper = sub(odd_hi, even_lo, Round::up, bits);
    Real const mirrored_upper = sub(even_hi, odd_lo, Round::up, bits);
    Real const displayed_lower = sub(odd_lo, even_hi, Round::down, bits);
    Real const mirrored_lower = sub(even_lo, odd_hi, Round::down, bits);

    std::vector<PreconditionRecord> pre;
    pre.push_back(PreconditionRecord::from(scan_z_monotone(sample.values, sample.window, p)));
    pre.push_back(PreconditionRecord::from(scan_convexity(sample.values, sample.window, p)));
    if (slow_decay) {
        if (use_slow) {
            pre.push_back(PreconditionRecord::from(scan_slow_decay(sample.values, sample.window, p)));
        } else {
            pre.push_back(PreconditionRecord{"domain", p, Window{m + 1 - p, m}, false, 1, m + 1 - p});
        }
    }
    if (!seq.sign().is_alternating()) {
        RemainderBound probe;
        detail::attach_strand_preconditions(probe, seq, sample, p);
        pre.push_back(probe.preconditions.back());
    }

    RemainderBound upper;
    upper.m = m;
    upper.method = BoundMethod::delta_upper;
    upper.value = max(displayed_upper, mirrored_upper);
    upper.raw = displayed_upper;
    upper.preconditions = pre;
    if (slow_decay && !use_slow) {
        upper.notes.push_back("slow-decay variant needs a_{m+1-p}: requires m >= start + p - 1");
    }
    detail::finalize(upper);

    RemainderBound lower;
    lower.m = m;
    lower.method = BoundMethod::delta_lower;
    Real const zero(bits);
    lower.value = max(max(displayed_lower, mirrored_lower), zero);
    lower.raw = displayed_lower;
    lower.preconditions = pre;
    if (displayed_lower.sign() < 0) {
        lower.notes.push_back("displayed lower bound is negative (" + displayed_lower.to_string(12) +
                              "); floored at 0");
    }
    if (slow_decay && !use_slow) {
        lower.notes.push_back("slow-decay variant needs a_{m+1-p}: requires m >= start + p - 1");
    }
    detail::finalize(lower);
    return {std::move(lower), std::move(upper)};
}

} // namespace zseries
