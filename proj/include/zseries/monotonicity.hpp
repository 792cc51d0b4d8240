#pragma once

/**
 * @file monotonicity.hpp
 * @brief Finite-window checks on term magnitudes.
 *
 * - Z(p)-monotone decrease: a_{k+p} <= a_k.
 * - Convexity (optionally along a stride s): a_{k+s} <= (a_k + a_{k+2s}) / 2.
 * - Slow decay: a_k <= 2 a_{k+p}.
 * - Periodic sign pattern: sign(a_k) = -sign(a_{k+omega}).
 *
 * All comparisons are exact on the computed values; there is no epsilon.
 * Reports are empirical certificates for the stated window only.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zseries/error.hpp"
#include "zseries/real.hpp"
#include "zseries/sequence.hpp"

namespace zseries {

struct Window {
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    [[nodiscard]] std::int64_t size() const noexcept { return hi - lo + 1; }
    [[nodiscard]] bool contains(std::int64_t k) const noexcept { return lo <= k && k <= hi; }
    [[nodiscard]] bool covers(Window const& other) const noexcept { return lo <= other.lo && other.hi <= hi; }

    friend bool operator==(Window const&, Window const&) = default;
};

enum class CheckKind { z_monotone, convexity, slow_decay };

inline std::string check_name(CheckKind kind)
{
    switch (kind) {
    case CheckKind::z_monotone:
        return "z_monotone";
    case CheckKind::convexity:
        return "convexity";
    case CheckKind::slow_decay:
        return "slow_decay";
    }
    return "unknown";
}

/// One failed comparison: the first index and the magnitudes involved
/// ((a_k, a_{k+p}) or (a_k, a_{k+s}, a_{k+2s})).
struct Violation {
    std::int64_t k = 0;
    std::vector<Real> values;
};

struct ZReport {
    CheckKind check = CheckKind::z_monotone;
    std::int64_t p = 1;  // period, or stride for convexity
    Window window;
    bool holds = true;
    std::vector<Violation> violations;
    /// Smallest slack over the window (negative when the check fails).
    std::optional<Real> margin;
};

struct SignPatternReport {
    std::int64_t omega = 1;
    Window window;
    bool holds = true;
    std::vector<std::int64_t> violations;
};

/// Magnitudes a_lo..a_hi.
inline std::vector<Real> evaluate_window(TermSequence const& seq, Window w, PrecisionContext const& ctx)
{
    std::vector<Real> values;
    values.reserve(static_cast<std::size_t>(std::max<std::int64_t>(w.size(), 0)));
    for (std::int64_t n = w.lo; n <= w.hi; ++n) {
        values.push_back(eval_term(seq, n, ctx));
    }
    return values;
}

namespace detail {

inline void require_window(TermSequence const& seq, Window w, std::int64_t span, char const* what)
{
    if (w.lo < seq.start()) {
        throw usage_error(std::string(what) + ": window starts at " + std::to_string(w.lo) +
                          ", before the series start " + std::to_string(seq.start()));
    }
    if (w.hi < w.lo + span) {
        throw usage_error(std::string(what) + ": window [" + std::to_string(w.lo) + ", " + std::to_string(w.hi) +
                          "] is too small (need n_hi >= n_lo + " + std::to_string(span) + ")");
    }
}

inline void track_margin(std::optional<Real>& margin, Real slack)
{
    if (!margin || slack < *margin) {
        margin = std::move(slack);
    }
}

} // namespace detail

// ---- scans over precomputed values ---------------------------------------
//
// `values[i]` holds a_{w.lo + i} for every index in `w`.

inline ZReport scan_z_monotone(std::span<Real const> values, Window w, std::int64_t p)
{
    ZReport report{CheckKind::z_monotone, p, w, true, {}, std::nullopt};
    for (std::int64_t k = w.lo; k + p <= w.hi; ++k) {
        Real const& ak = values[static_cast<std::size_t>(k - w.lo)];
        Real const& akp = values[static_cast<std::size_t>(k + p - w.lo)];
        detail::track_margin(report.margin, ak - akp);
        if (akp > ak) {
            report.violations.push_back({k, {ak, akp}});
        }
    }
    report.holds = report.violations.empty();
    return report;
}

inline ZReport scan_convexity(std::span<Real const> values, Window w, std::int64_t stride = 1)
{
    ZReport report{CheckKind::convexity, stride, w, true, {}, std::nullopt};
    for (std::int64_t k = w.lo; k + 2 * stride <= w.hi; ++k) {
        Real const& a0 = values[static_cast<std::size_t>(k - w.lo)];
        Real const& a1 = values[static_cast<std::size_t>(k + stride - w.lo)];
        Real const& a2 = values[static_cast<std::size_t>(k + 2 * stride - w.lo)];
        Real const outer = exact_add(a0, a2);
        Real const twice_mid = ldexp(a1, 1);
        detail::track_margin(report.margin, half(outer - twice_mid));
        if (twice_mid > outer) {
            report.violations.push_back({k, {a0, a1, a2}});
        }
    }
    report.holds = report.violations.empty();
    return report;
}

inline ZReport scan_slow_decay(std::span<Real const> values, Window w, std::int64_t p)
{
    ZReport report{CheckKind::slow_decay, p, w, true, {}, std::nullopt};
    for (std::int64_t k = w.lo; k + p <= w.hi; ++k) {
        Real const& ak = values[static_cast<std::size_t>(k - w.lo)];
        Real const twice = ldexp(values[static_cast<std::size_t>(k + p - w.lo)], 1);
        detail::track_margin(report.margin, twice - ak);
        if (ak > twice) {
            report.violations.push_back({k, {ak, values[static_cast<std::size_t>(k + p - w.lo)]}});
        }
    }
    report.holds = report.violations.empty();
    return report;
}

// ---- operations over sequences -------------------------------------------

/// Z(p)-monotone decrease on [n_lo, n_hi]: a_{k+p} <= a_k for k in [n_lo, n_hi - p].
inline ZReport check_z_monotone(TermSequence const& seq, std::int64_t p, std::int64_t n_lo, std::int64_t n_hi,
                                PrecisionContext const& ctx)
{
    if (p < 1) {
        throw usage_error("period p must be positive");
    }
    Window const w{n_lo, n_hi};
    detail::require_window(seq, w, p, "check_z_monotone");
    auto const values = evaluate_window(seq, w, ctx);
    return scan_z_monotone(values, w, p);
}

/// Smallest odd p <= p_max for which Z(p) holds on the window.
inline std::optional<std::int64_t> infer_min_odd_period(TermSequence const& seq, std::int64_t n_lo,
                                                        std::int64_t n_hi, std::int64_t p_max,
                                                        PrecisionContext const& ctx)
{
    if (p_max < 1 || p_max % 2 == 0) {
        throw usage_error("p_max must be a positive odd integer");
    }
    Window const w{n_lo, n_hi};
    detail::require_window(seq, w, p_max, "infer_min_odd_period");
    auto const values = evaluate_window(seq, w, ctx);
    for (std::int64_t p = 1; p <= p_max; p += 2) {
        if (scan_z_monotone(values, w, p).holds) {
            return p;
        }
    }
    return std::nullopt;
}

/// a_{k+s} <= (a_k + a_{k+2s}) / 2 for k in [n_lo, n_hi - 2s]. With s = 1 this
/// is ordinary discrete convexity; s = p checks each interleaved strand.
inline ZReport check_convexity(TermSequence const& seq, std::int64_t n_lo, std::int64_t n_hi,
                               PrecisionContext const& ctx, std::int64_t stride = 1)
{
    if (stride < 1) {
        throw usage_error("convexity stride must be positive");
    }
    Window const w{n_lo, n_hi};
    detail::require_window(seq, w, 2 * stride, "check_convexity");
    auto const values = evaluate_window(seq, w, ctx);
    return scan_convexity(values, w, stride);
}

/// a_k <= 2 a_{k+p} for k in [n_lo, n_hi - p].
inline ZReport check_slow_decay(TermSequence const& seq, std::int64_t p, std::int64_t n_lo, std::int64_t n_hi,
                                PrecisionContext const& ctx)
{
    if (p < 1) {
        throw usage_error("period p must be positive");
    }
    Window const w{n_lo, n_hi};
    detail::require_window(seq, w, p, "check_slow_decay");
    auto const values = evaluate_window(seq, w, ctx);
    return scan_slow_decay(values, w, p);
}

/// sign(a_k) = -sign(a_{k+omega}) for k in [n_lo, n_hi - omega].
/// Every term in the window must be nonzero.
inline SignPatternReport check_sign_pattern(TermSequence const& seq, std::int64_t omega, std::int64_t n_lo,
                                            std::int64_t n_hi, PrecisionContext const& ctx)
{
    if (omega < 1) {
        throw usage_error("omega must be positive");
    }
    Window const w{n_lo, n_hi};
    detail::require_window(seq, w, omega, "check_sign_pattern");
    std::vector<int> signs;
    signs.reserve(static_cast<std::size_t>(w.size()));
    for (std::int64_t n = w.lo; n <= w.hi; ++n) {
        if (eval_term(seq, n, ctx).is_zero()) {
            throw eval_error("zero term a_" + std::to_string(n) + " in sign-pattern window");
        }
        signs.push_back(seq.sign_at(n, ctx));
    }
    SignPatternReport report{omega, w, true, {}};
    for (std::int64_t k = w.lo; k + omega <= w.hi; ++k) {
        if (signs[static_cast<std::size_t>(k - w.lo)] != -signs[static_cast<std::size_t>(k + omega - w.lo)]) {
            report.violations.push_back(k);
        }
    }
    report.holds = report.violations.empty();
    return report;
}

} // namespace zseries
