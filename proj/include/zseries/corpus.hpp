#pragma once

/**
 * @file corpus.hpp
 * @brief Built-in worked series and seeded random Z(p) families.
 *
 * | id        | magnitude                                   | sign | ω | sum  |
 * |-----------|---------------------------------------------|------|---|------|
 * | div_z2    | a_{2k-1} = 1/k^2, a_{2k} = 1/k               | (-1)^n     | - | +inf |
 * | z3_sum2   | six-case pattern, Z(3)                      | (-1)^(n+1) | 2 | 2    |
 * | ln2       | 1/n                                         | (-1)^(n+1) | 1 | ln 2 |
 * | rd2       | a_{2k-1} = 1/k, a_{2k} = 1/k - 2^-k          | (-1)^(n+1) | 1 | 1    |
 * | cos_shift | 1/(n + 2 cos n)                             | (-1)^(n+1) | 3 | -    |
 */

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "zseries/envelope.hpp"
#include "zseries/error.hpp"
#include "zseries/expression.hpp"
#include "zseries/monotonicity.hpp"
#include "zseries/oracle.hpp"
#include "zseries/real.hpp"
#include "zseries/sequence.hpp"

namespace zseries {

/// A check and the verdict the entry is known to produce.
struct Expectation {
    std::string check;  // z_monotone | convexity | slow_decay | infer_period
    std::int64_t p = 1;
    std::int64_t lo = 1;
    std::int64_t hi = 1;
    bool verdict = true;
    /// infer_period: expected result (nullopt: none up to p).
    std::optional<std::int64_t> period;
};

/// Partial sums exceed `threshold` at some m <= max_m.
struct DivergenceWitness {
    double threshold = 10.0;
    std::int64_t max_m = 100'000;
};

struct CorpusEntry {
    std::string id;
    TermSequence sequence;
    std::int64_t omega = 1;
    /// Known odd window parameters 2ω-1, tightest last.
    std::vector<std::int64_t> windows;
    ClosedSum closed_sum;
    std::function<Real(std::int64_t m, unsigned bits)> remainder_formula;
    std::vector<Expectation> expected;
    std::optional<DivergenceWitness> divergence;
    std::vector<EnvelopePair> envelopes;
    std::string notes;
};

namespace detail {

inline PieceRule piece(std::int64_t modulus, std::int64_t residue, std::string_view index, std::string_view expr)
{
    return PieceRule{modulus, residue, parse_expression(index), parse_expression(expr)};
}

inline Real pow2(long e, unsigned bits) { return ldexp(Real::from_int(1, bits), e); }

inline Real recip(std::int64_t k, unsigned bits)
{
    return div(Real::from_int(1, bits), Real::from_int(k, bits), Round::nearest, bits);
}

inline CorpusEntry make_div_z2()
{
    CorpusEntry e{"div_z2",
                  TermSequence::piecewise("div_z2", 1,
                                          {piece(2, 1, "(n+1)/2", "1/k^2"), piece(2, 0, "n/2", "1/k")},
                                          SignConvention::alternating_minus()),
                  1,
                  {2},
                  {},
                  {},
                  {},
                  DivergenceWitness{10.0, 100'000},
                  {},
                  "Z(2)-monotone but divergent: even periods do not suffice"};
    e.expected = {
        {"z_monotone", 2, 1, 2000, true, std::nullopt},
        {"z_monotone", 1, 1, 2000, false, std::nullopt},
    };
    return e;
}

inline CorpusEntry make_z3_sum2()
{
    auto seq = TermSequence::piecewise("z3_sum2", 1,
                                       {
                                           piece(6, 1, "(n+5)/6", "1/k + 1/2^k"),
                                           piece(6, 2, "(n+4)/6", "1/10^k"),
                                           piece(6, 3, "(n+3)/6", "1/k + 1/2^k"),
                                           piece(6, 4, "(n+2)/6", "1/k"),
                                           piece(6, 5, "(n+1)/6", "1/10^k"),
                                           piece(6, 0, "n/6", "1/k"),
                                       });
    CorpusEntry e{"z3_sum2", std::move(seq), 2, {3}, {}, {}, {}, std::nullopt, {}, "Z(3)-monotone, sum 2"};
    e.closed_sum = [](unsigned bits) { return Real::from_int(2, bits); };
    // R_m = 2 - S_m with S_m in closed form on each residue class mod 6.
    e.remainder_formula = [](std::int64_t m, unsigned bits) {
        if (m < 0) {
            throw usage_error("z3_sum2 remainder needs m >= 0");
        }
        std::int64_t const k = m / 6;
        std::int64_t const r = m % 6;
        Real const two = Real::from_int(2, bits);
        Real const t = two * (Real::from_int(1, bits) - pow2(-k, bits));
        Real const u = recip(k + 1, bits);
        Real const v = pow2(-(k + 1), bits);
        Real const w = pow(Real::from_int(10, bits), Real::from_int(-(k + 1), bits));
        Real s(bits);
        switch (r) {
        case 0:
            s = t;
            break;
        case 1:
            s = t + u + v;
            break;
        case 2:
            s = t + u + v - w;
            break;
        case 3:
            s = t + two * u + two * v - w;
            break;
        case 4:
            s = t + u + two * v - w;
            break;
        default:
            s = t + u + two * v;
            break;
        }
        return two - s;
    };
    e.expected = {
        {"z_monotone", 3, 1, 600, true, std::nullopt},
        {"z_monotone", 1, 1, 600, false, std::nullopt},
        {"infer_period", 9, 1, 600, true, 3},
    };
    return e;
}

inline CorpusEntry make_ln2()
{
    CorpusEntry e{"ln2", TermSequence::closed_form("ln2", 1, "1/n"), 1, {1}, {}, {}, {}, std::nullopt, {},
                  "classic Leibniz series"};
    e.closed_sum = [](unsigned bits) { return Real::ln2(bits); };
    e.expected = {
        {"z_monotone", 1, 1, 100, true, std::nullopt},
        {"convexity", 1, 1, 1000, true, std::nullopt},
        {"slow_decay", 1, 1, 100, true, std::nullopt},
        {"infer_period", 9, 1, 100, true, 1},
    };
    return e;
}

inline CorpusEntry make_rd2()
{
    auto seq = TermSequence::piecewise("rd2", 1, {piece(2, 1, "(n+1)/2", "1/k"), piece(2, 0, "n/2", "1/k - 2^(-k)")});
    CorpusEntry e{"rd2", std::move(seq), 1, {1}, {}, {}, {}, std::nullopt, {},
                  "monotone from n = 10; remainder alternates between 2^-k and about 1/k"};
    e.closed_sum = [](unsigned bits) { return Real::from_int(1, bits); };
    // R_{2k} = 2^-k, R_{2k-1} = 2^-(k-1) - 1/k.
    e.remainder_formula = [](std::int64_t m, unsigned bits) {
        if (m < 1) {
            throw usage_error("rd2 remainder needs m >= 1");
        }
        if (m % 2 == 0) {
            return pow2(-(m / 2), bits);
        }
        std::int64_t const k = (m + 1) / 2;
        return pow2(-(k - 1), bits) - recip(k, bits);
    };
    e.expected = {
        {"z_monotone", 1, 10, 500, true, std::nullopt},
        {"z_monotone", 1, 1, 500, false, std::nullopt},
        {"convexity", 1, 8, 500, false, std::nullopt},
    };
    return e;
}

inline CorpusEntry make_cos_shift()
{
    CorpusEntry e{"cos_shift", TermSequence::closed_form("cos_shift", 1, "1/(n + 2*cos(n))"), 3, {7, 5}, {}, {}, {},
                  std::nullopt, {}, "Zv-monotone with parameter at most 4"};
    e.expected = {
        {"z_monotone", 5, 1, 5000, true, std::nullopt},
        {"z_monotone", 3, 1, 5000, false, std::nullopt},
        {"infer_period", 9, 1, 5000, true, 5},
    };
    e.envelopes.push_back(EnvelopePair{parse_expression("x - 2"), parse_expression("x + 2"), 1.0,
                                       Direction::increasing, parse_expression("x + 2*cos(x)")});
    e.envelopes.push_back(EnvelopePair{parse_expression("1/(x + 2)"), parse_expression("1/(x - 2)"), 3.0,
                                       Direction::decreasing, parse_expression("1/(x + 2*cos(x))")});
    return e;
}

inline std::vector<CorpusEntry> const& registry()
{
    static std::vector<CorpusEntry> const entries = {make_div_z2(), make_z3_sum2(), make_ln2(), make_rd2(),
                                                     make_cos_shift()};
    return entries;
}

} // namespace detail

namespace corpus {

inline std::vector<std::string> list()
{
    std::vector<std::string> ids;
    for (auto const& e : detail::registry()) {
        ids.push_back(e.id);
    }
    return ids;
}

inline CorpusEntry const& get(std::string const& id)
{
    for (auto const& e : detail::registry()) {
        if (e.id == id) {
            return e;
        }
    }
    throw usage_error("unknown corpus id '" + id + "'");
}

} // namespace corpus

/// Runs one expectation and returns the observed verdict (for infer_period:
/// whether the inferred period equals the expected one).
inline bool observe(CorpusEntry const& entry, Expectation const& x, PrecisionContext const& ctx)
{
    if (x.check == "z_monotone") {
        return check_z_monotone(entry.sequence, x.p, x.lo, x.hi, ctx).holds;
    }
    if (x.check == "convexity") {
        return check_convexity(entry.sequence, x.lo, x.hi, ctx, x.p).holds;
    }
    if (x.check == "slow_decay") {
        return check_slow_decay(entry.sequence, x.p, x.lo, x.hi, ctx).holds;
    }
    if (x.check == "infer_period") {
        return infer_min_odd_period(entry.sequence, x.lo, x.hi, x.p, ctx) == x.period;
    }
    throw usage_error("unknown expectation '" + x.check + "'");
}

inline ReferenceSum reference_sum(CorpusEntry const& entry, Real const& oracle_tol, PrecisionContext const& ctx,
                                  OracleOptions const& opts = {})
{
    return reference_sum(entry.sequence, entry.omega, oracle_tol, ctx, entry.closed_sum, opts);
}

// ---- random Z(p) families -------------------------------------------------

enum class DecayProfile { harmonic, geometric, mixed };

inline DecayProfile parse_profile(std::string const& s)
{
    if (s == "harmonic") {
        return DecayProfile::harmonic;
    }
    if (s == "geometric") {
        return DecayProfile::geometric;
    }
    if (s == "mixed") {
        return DecayProfile::mixed;
    }
    throw usage_error("decay profile must be harmonic, geometric or mixed");
}

/// One interleaved strand, b_j for j = 1, 2, ...: c·r^(j-1) or c/(j-1+a).
struct Strand {
    bool geometric = true;
    std::string c;
    std::string r;      // geometric ratio
    std::string a;      // harmonic shift
    std::string scale;  // optional extra factor

    [[nodiscard]] std::string coefficient() const { return scale.empty() ? c : c + " * " + scale; }

    [[nodiscard]] std::string expression() const
    {
        return geometric ? coefficient() + " * (" + r + ")^(k - 1)" : coefficient() + " / (k - 1 + " + a + ")";
    }

    /// Σ_{j>=1} (-1)^(j-1) b_j.
    [[nodiscard]] Real alternating_sum(unsigned bits) const
    {
        Real cc = Real::from_string(c, bits);
        if (!scale.empty()) {
            cc = cc * Real::from_string(scale, bits);
        }
        Real const one = Real::from_int(1, bits);
        if (geometric) {
            return cc / (one + Real::from_string(r, bits));
        }
        Real const aa = Real::from_string(a, bits);
        return cc * half(digamma(half(aa + one)) - digamma(half(aa)));
    }
};

struct RandomSeries {
    TermSequence sequence;
    std::int64_t period = 1;
    std::vector<Strand> strands;
    ClosedSum closed_sum;
};

namespace detail {

inline std::string dyadic(std::int64_t num, int log2_den)
{
    // num / 2^log2_den as an exact decimal.
    double const value = std::ldexp(static_cast<double>(num), -log2_den);
    std::array<char, 64> buf{};
    auto const res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
    return std::string(buf.data(), res.ptr);
}

inline std::string shortest(double v)
{
    std::array<char, 64> buf{};
    auto const res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

} // namespace detail

/// Interleaves p independent decreasing strands (start 1, sign (-1)^(n+1)):
/// a_{k + (j-1)p} is term j of strand k. Each strand is convex and decays
/// slowly enough that b_j <= 2 b_{j+1}. `scales` multiplies strand k's terms.
inline RandomSeries make_random_series(std::int64_t p, std::uint64_t seed, DecayProfile profile,
                                       std::vector<double> const& scales = {})
{
    if (p < 1 || p % 2 == 0) {
        throw usage_error("p must be a positive odd integer");
    }
    if (!scales.empty() && static_cast<std::int64_t>(scales.size()) != p) {
        throw usage_error("need one scale per strand");
    }
    std::mt19937_64 rng(seed);
    auto const uniform = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };

    RandomSeries out{TermSequence::closed_form("placeholder", 1, "1"), p, {}, {}};
    std::vector<PieceRule> rules;
    for (std::int64_t k = 1; k <= p; ++k) {
        Strand s;
        s.geometric = profile == DecayProfile::geometric || (profile == DecayProfile::mixed && uniform(0, 1) == 0);
        s.c = detail::dyadic(uniform(32, 128), 6);  // [0.5, 2]
        if (!scales.empty()) {
            s.scale = detail::shortest(scales[static_cast<std::size_t>(k - 1)]);
        }
        if (s.geometric) {
            s.r = detail::dyadic(uniform(32, 58), 6);  // [0.5, 0.906]
        } else {
            s.a = detail::dyadic(uniform(64, 256), 6);  // [1, 4]
        }
        rules.push_back(PieceRule{p, k % p, parse_expression("(n + " + std::to_string(p - k) + ")/" + std::to_string(p)),
                                  parse_expression(s.expression())});
        out.strands.push_back(std::move(s));
    }
    std::string const name = "random_p" + std::to_string(p) + "_s" + std::to_string(seed);
    out.sequence = TermSequence::piecewise(name, 1, std::move(rules));
    auto strands = out.strands;
    out.closed_sum = [strands](unsigned bits) {
        // Strand k starts at parent index k, whose sign is (-1)^(k+1).
        Real total(bits);
        for (std::size_t i = 0; i < strands.size(); ++i) {
            Real const s = strands[i].alternating_sum(bits);
            total = i % 2 == 0 ? total + s : total - s;
        }
        return total;
    };
    return out;
}

inline TermSequence make_random_z_series(std::int64_t p, std::uint64_t seed, DecayProfile profile,
                                         std::vector<double> const& scales = {})
{
    return make_random_series(p, seed, profile, scales).sequence;
}

} // namespace zseries
