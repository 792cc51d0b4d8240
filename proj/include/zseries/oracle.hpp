#pragma once

/**
 * @file oracle.hpp
 * @brief High-precision reference sums and remainders for testing bounds.
 *
 * The oracle always works at twice the consumer's precision. It uses a
 * closed form when the caller supplies one, and otherwise sums far into the
 * tail until the improved Z-bound drops below the oracle tolerance.
 */

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zseries/bounds.hpp"
#include "zseries/error.hpp"
#include "zseries/real.hpp"
#include "zseries/sequence.hpp"
#include "zseries/summation.hpp"

namespace zseries {

/// Exact sum of a series, evaluated at the requested precision.
using ClosedSum = std::function<Real(unsigned bits)>;

enum class ReferenceSource { closed_form, far_summation };

inline std::string source_name(ReferenceSource s)
{
    return s == ReferenceSource::closed_form ? "closed_form" : "far_summation";
}

struct ReferenceSum {
    Real value;
    ReferenceSource source = ReferenceSource::closed_form;
    std::int64_t far_index = 0;
    std::optional<RemainderBound> residual_bound;
    unsigned bits = 0;
};

struct OracleOptions {
    std::int64_t max_index = 10'000'000;
    std::int64_t tail_window = 64;
};

inline PrecisionContext oracle_context(PrecisionContext const& ctx) { return ctx.scaled(2); }

/// S, from `closed` when given, else by far summation at 2x precision.
inline ReferenceSum reference_sum(TermSequence const& seq, std::int64_t omega, Real const& oracle_tol,
                                  PrecisionContext const& ctx, ClosedSum const& closed = {},
                                  OracleOptions const& opts = {})
{
    PrecisionContext const octx = oracle_context(ctx);
    if (closed) {
        return ReferenceSum{closed(octx.bits), ReferenceSource::closed_form, 0, std::nullopt, octx.bits};
    }
    SummationOptions so;
    so.max_index = opts.max_index;
    so.tail_window = opts.tail_window;
    auto r = sum_to_tolerance(seq, omega, round_to(oracle_tol, octx.bits), BoundMethod::z_improved, octx, true, so);
    if (!r.certified) {
        throw oracle_error("oracle for '" + seq.name() + "' did not reach " + oracle_tol.to_string(6) +
                           " by index " + std::to_string(r.m));
    }
    return ReferenceSum{std::move(r.sum), ReferenceSource::far_summation, r.m, std::move(r.bound), octx.bits};
}

/// R_m = S - S_m at the oracle precision.
inline Real reference_remainder(TermSequence const& seq, ReferenceSum const& ref, std::int64_t m)
{
    PrecisionContext const octx{ref.bits};
    if (m < seq.start()) {
        return ref.value;
    }
    return sub(ref.value, partial_sum(seq, m, octx), Round::nearest, ref.bits);
}

inline Real reference_remainder(TermSequence const& seq, std::int64_t m, std::int64_t omega, Real const& oracle_tol,
                                PrecisionContext const& ctx, ClosedSum const& closed = {},
                                OracleOptions const& opts = {})
{
    return reference_remainder(seq, reference_sum(seq, omega, oracle_tol, ctx, closed, opts), m);
}

/// R_m for every m in [m_lo, m_hi], in one pass over the partial sums.
inline std::vector<Real> reference_remainders(TermSequence const& seq, ReferenceSum const& ref, std::int64_t m_lo,
                                              std::int64_t m_hi)
{
    if (m_lo < seq.start()) {
        throw usage_error("reference_remainders needs m_lo >= start");
    }
    PrecisionContext const octx{ref.bits};
    std::vector<Real> out;
    Real s(ref.bits);
    for (std::int64_t n = seq.start(); n <= m_hi; ++n) {
        s = add(s, signed_term(seq, n, octx), Round::nearest, ref.bits);
        if (n >= m_lo) {
            out.push_back(sub(ref.value, s, Round::nearest, ref.bits));
        }
    }
    return out;
}

} // namespace zseries
