#pragma once

/**
 * @file envelope.hpp
 * @brief Zv-monotonicity of term functions via monotone envelopes.
 *
 * If φ1 <= f <= φ2 with φ1, φ2 increasing and φ1(x+T) > φ2(x) for all x, then
 * f(x+T') >= f(x) for every T' >= T, so T bounds the Zv parameter from above.
 * For decreasing envelopes the certified inequality is φ2(x+T) < φ1(x).
 *
 * Certificates are empirical: they hold on a finite grid only.
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zseries/error.hpp"
#include "zseries/expression.hpp"
#include "zseries/real.hpp"

namespace zseries {

enum class Direction { increasing, decreasing };

inline std::string direction_name(Direction d) { return d == Direction::increasing ? "inc" : "dec"; }

inline Direction parse_direction(std::string const& text)
{
    if (text == "inc" || text == "increasing") {
        return Direction::increasing;
    }
    if (text == "dec" || text == "decreasing") {
        return Direction::decreasing;
    }
    throw usage_error("direction must be 'inc' or 'dec', got '" + text + "'");
}

struct EnvelopePair {
    Expression lower;
    Expression upper;
    double domain_start = 0.0;
    Direction direction = Direction::increasing;
    /// Function the envelopes enclose, when known.
    std::optional<Expression> function;
};

/// Sample points start, start+step, ..., up to end.
struct Grid {
    double start = 0.0;
    double end = 0.0;
    double step = 1.0;

    [[nodiscard]] std::int64_t size() const
    {
        if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(end) || !std::isfinite(step) || end < start) {
            return 0;
        }
        return static_cast<std::int64_t>(std::floor((end - start) / step + 1e-9)) + 1;
    }

    [[nodiscard]] std::vector<Real> points(unsigned bits) const
    {
        std::int64_t const n = size();
        if (n <= 0) {
            throw usage_error("empty grid");
        }
        Real const x0 = Real::from_double(start, bits);
        Real const h = Real::from_double(step, bits);
        std::vector<Real> out;
        out.reserve(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) {
            out.push_back(x0 + Real::from_int(i, bits) * h);
        }
        return out;
    }
};

struct EnvelopeReport {
    bool holds = true;
    std::int64_t points = 0;
    /// min over the grid of f - φ1 and φ2 - f.
    std::optional<Real> lower_slack;
    std::optional<Real> upper_slack;
    /// Grid points where φ1 <= f <= φ2 fails (first 10).
    std::vector<double> violations;
    std::int64_t violation_count = 0;
};

struct ZvCertificate {
    Real T;
    Grid grid;
    /// min over the grid of φ1(x+T) - φ2(x) (increasing) or φ1(x) - φ2(x+T) (decreasing).
    Real margin;
    bool empirical = true;
    int bisection_steps = 0;
};

struct ParameterSearch {
    double t_max = 100.0;
    double tolerance = 1e-6;
    /// Required margin, as a power of two; 0 means 2^(-bits/2).
    long margin_exponent = 0;
};

namespace detail {

inline void require_grid(EnvelopePair const& env, Grid const& grid)
{
    if (grid.size() <= 0) {
        throw usage_error("empty grid");
    }
    if (grid.start < env.domain_start) {
        throw usage_error("grid starts at " + std::to_string(grid.start) + ", before the envelope domain " +
                          std::to_string(env.domain_start));
    }
}

inline void keep_min(std::optional<Real>& slot, Real v)
{
    if (!slot || v < *slot) {
        slot = std::move(v);
    }
}

/// min over the grid of the certified gap at shift T.
inline Real shifted_margin(EnvelopePair const& env, std::vector<Real> const& xs, Real const& T, unsigned bits)
{
    std::optional<Real> m;
    for (auto const& x : xs) {
        Real const shifted = x + T;
        Real gap = env.direction == Direction::increasing
                       ? env.lower.evaluate(shifted, bits) - env.upper.evaluate(x, bits)
                       : env.lower.evaluate(x, bits) - env.upper.evaluate(shifted, bits);
        keep_min(m, std::move(gap));
    }
    return *m;
}

inline bool monotone_on(Expression const& e, std::vector<Real> const& xs, Direction d, unsigned bits)
{
    for (std::size_t i = 1; i < xs.size(); ++i) {
        Real const a = e.evaluate(xs[i - 1], bits);
        Real const b = e.evaluate(xs[i], bits);
        if (d == Direction::increasing ? b < a : b > a) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// φ1(x) <= f(x) <= φ2(x) at every grid point.
inline EnvelopeReport verify_envelope(EnvelopePair const& env, Expression const& f, Grid const& grid,
                                      PrecisionContext const& ctx)
{
    detail::require_grid(env, grid);
    EnvelopeReport r;
    for (auto const& x : grid.points(ctx.bits)) {
        Real const fx = f.evaluate(x, ctx.bits);
        Real lo = fx - env.lower.evaluate(x, ctx.bits);
        Real hi = env.upper.evaluate(x, ctx.bits) - fx;
        bool const bad = lo.sign() < 0 || hi.sign() < 0;
        detail::keep_min(r.lower_slack, std::move(lo));
        detail::keep_min(r.upper_slack, std::move(hi));
        ++r.points;
        if (bad) {
            ++r.violation_count;
            if (r.violations.size() < 10) {
                r.violations.push_back(x.to_double());
            }
        }
    }
    r.holds = r.violation_count == 0;
    return r;
}

/// Smallest grid-certified T in [0, t_max] (up to the bisection tolerance).
/// T = 0 is returned only when the envelopes coincide and are monotone on the grid.
inline ZvCertificate bound_parameter(EnvelopePair const& env, Grid const& grid, PrecisionContext const& ctx,
                                     ParameterSearch const& search = {})
{
    detail::require_grid(env, grid);
    if (!(search.t_max > 0.0) || !(search.tolerance > 0.0)) {
        throw usage_error("parameter search needs t_max > 0 and tolerance > 0");
    }
    unsigned const bits = ctx.bits;
    auto const xs = grid.points(bits);
    long const e = search.margin_exponent != 0 ? search.margin_exponent : -static_cast<long>(bits / 2);
    Real const threshold = ldexp(Real::from_int(1, bits), e);

    Real const zero(bits);
    Real const zero_gap = detail::shifted_margin(env, xs, zero, bits);
    if (zero_gap.sign() >= 0 && detail::monotone_on(env.lower, xs, env.direction, bits) &&
        detail::monotone_on(env.upper, xs, env.direction, bits)) {
        return ZvCertificate{zero, grid, zero_gap, true, 0};
    }

    auto const certified = [&](Real const& T) { return detail::shifted_margin(env, xs, T, bits) > threshold; };

    Real hi = Real::from_double(search.t_max, bits);
    if (!certified(hi)) {
        throw certification_error("no shift T <= " + std::to_string(search.t_max) + " certifies the envelopes");
    }
    Real lo(bits);
    Real const tol = Real::from_double(search.tolerance, bits);
    int steps = 0;
    while (hi - lo > tol) {
        Real mid = half(lo + hi);
        if (certified(mid)) {
            hi = std::move(mid);
        } else {
            lo = std::move(mid);
        }
        ++steps;
    }
    Real margin = detail::shifted_margin(env, xs, hi, bits);
    return ZvCertificate{std::move(hi), grid, std::move(margin), true, steps};
}

/// Smallest odd integer >= max(T, 1).
inline std::int64_t parameter_to_window(double T)
{
    if (!(T >= 0.0) || !std::isfinite(T)) {
        throw usage_error("parameter must be finite and nonnegative");
    }
    auto w = static_cast<std::int64_t>(std::ceil(std::max(T, 1.0)));
    return w % 2 == 0 ? w + 1 : w;
}

inline std::int64_t parameter_to_window(Real const& T)
{
    if (!T.is_finite() || T.sign() < 0) {
        throw usage_error("parameter must be finite and nonnegative");
    }
    Real const one = Real::from_int(1, T.precision());
    Real c = T < one ? one : T;
    mpfr_ceil(c.get(), c.get());
    long w = c.to_long();
    return w % 2 == 0 ? w + 1 : w;
}

struct TangentBound {
    Real T;
    /// Solution of r(x1) = q(x0).
    Real x1;
};

/// Bound on the Zv parameter of f(x) = x^α + p(x) x^(α-1) with |p| <= M,
/// from the envelopes q = x^α + M x^(α-1) and r = x^α - M x^(α-1):
/// T(x0) = 2M / (α - M(1-α)/x1).
inline TangentBound tangent_parameter_bound(Real const& M, Real const& alpha, Real const& x0,
                                            PrecisionContext const& ctx)
{
    unsigned const bits = ctx.bits;
    Real const one = Real::from_int(1, bits);
    if (M.sign() < 0 || !M.is_finite()) {
        throw usage_error("M must be finite and nonnegative");
    }
    if (!(alpha.sign() > 0) || alpha > one) {
        throw usage_error("alpha must lie in (0, 1]");
    }
    if (!(x0.sign() > 0) || !(x0 > (one - alpha) * M / alpha)) {
        throw usage_error("x0 must exceed (1 - alpha) M / alpha");
    }
    if (M.is_zero()) {
        return TangentBound{Real(bits), x0};
    }

    Real const am1 = alpha - one;
    auto const q = [&](Real const& x) { return pow(x, alpha) + M * pow(x, am1); };
    auto const r = [&](Real const& x) { return pow(x, alpha) - M * pow(x, am1); };
    Real const target = q(x0);

    Real lo = x0;
    Real hi = x0 + ldexp(M, 1) + one;
    int expansions = 0;
    while (r(hi) < target) {
        lo = hi;
        hi = ldexp(hi, 1);
        if (++expansions > 2000 || !hi.is_finite()) {
            throw certification_error("root bracket for r(x1) = q(x0) not found");
        }
    }
    for (unsigned i = 0; i < bits + 8; ++i) {
        Real mid = half(lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        if (r(mid) < target) {
            lo = std::move(mid);
        } else {
            hi = std::move(mid);
        }
    }
    Real x1 = hi;

    Real const denom = alpha - M * (one - alpha) / x1;
    if (!(denom.sign() > 0)) {
        throw usage_error("denominator alpha - M(1-alpha)/x1 is not positive; choose a larger x0");
    }
    Real T = div(ldexp(M, 1), denom, Round::up, bits);
    return TangentBound{std::move(T), std::move(x1)};
}

} // namespace zseries
