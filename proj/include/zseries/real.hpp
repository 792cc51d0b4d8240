#pragma once

/**
 * @file real.hpp
 * @brief Extended-precision binary floating point with explicit precision.
 *
 * `Real` is a value-semantic RAII handle around an MPFR number. Every value
 * carries its own precision; arithmetic through the overloaded operators
 * rounds to nearest at the wider operand precision. Certified bounds use the
 * free functions taking a `Round` argument so that an upper bound is always
 * rounded toward +inf and a lower bound toward -inf.
 *
 * Precision is never a hidden global: callers pass a `PrecisionContext`.
 */

#include <mpfr.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>

#include "zseries/error.hpp"

namespace zseries {

/// Working precision for term evaluation and bound arithmetic.
struct PrecisionContext {
    unsigned bits = 256;

    void validate() const
    {
        if (bits < 64) {
            throw usage_error("precision must be at least 64 bits, got " + std::to_string(bits));
        }
        if (bits > (1u << 20)) {
            throw usage_error("precision of " + std::to_string(bits) + " bits is unreasonably large");
        }
    }

    /// The same context at a multiple of the precision.
    [[nodiscard]] PrecisionContext scaled(unsigned factor) const { return PrecisionContext{bits * factor}; }

    friend bool operator==(PrecisionContext const&, PrecisionContext const&) = default;
};

enum class Round { nearest, up, down };

namespace detail {
inline mpfr_rnd_t to_mpfr(Round r) noexcept
{
    switch (r) {
    case Round::up:
        return MPFR_RNDU;
    case Round::down:
        return MPFR_RNDD;
    case Round::nearest:
        break;
    }
    return MPFR_RNDN;
}
} // namespace detail

class Real {
public:
    explicit Real(unsigned bits = 256)
    {
        mpfr_init2(v_, static_cast<mpfr_prec_t>(bits));
        mpfr_set_zero(v_, 1);
    }

    explicit Real(PrecisionContext const& ctx) : Real(ctx.bits) {}

    Real(Real const& other)
    {
        mpfr_init2(v_, mpfr_get_prec(other.v_));
        mpfr_set(v_, other.v_, MPFR_RNDN);
    }

    Real(Real&& other) noexcept
    {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, other.v_);
    }

    Real& operator=(Real const& other)
    {
        if (this != &other) {
            mpfr_set_prec(v_, mpfr_get_prec(other.v_));
            mpfr_set(v_, other.v_, MPFR_RNDN);
        }
        return *this;
    }

    Real& operator=(Real&& other) noexcept
    {
        mpfr_swap(v_, other.v_);
        return *this;
    }

    ~Real() { mpfr_clear(v_); }

    // ---- construction helpers -------------------------------------------

    static Real from_int(std::int64_t value, unsigned bits)
    {
        Real r(bits);
        mpfr_set_si(r.v_, static_cast<long>(value), MPFR_RNDN);
        return r;
    }
    static Real from_int(std::int64_t value, PrecisionContext const& ctx) { return from_int(value, ctx.bits); }

    /// Exact conversion when `bits` >= 53.
    static Real from_double(double value, unsigned bits)
    {
        Real r(bits);
        mpfr_set_d(r.v_, value, MPFR_RNDN);
        return r;
    }
    static Real from_double(double value, PrecisionContext const& ctx) { return from_double(value, ctx.bits); }

    /// Parses a decimal literal (optionally signed, optional exponent), rounding to nearest.
    static Real from_string(std::string_view text, unsigned bits)
    {
        Real r(bits);
        std::string const s(text);
        char* end = nullptr;
        if (!s.empty()) {
            mpfr_strtofr(r.v_, s.c_str(), &end, 10, MPFR_RNDN);
        }
        if (s.empty() || end != s.c_str() + s.size() || !r.is_finite()) {
            throw usage_error("not a decimal number: '" + s + "'");
        }
        return r;
    }
    static Real from_string(std::string_view text, PrecisionContext const& ctx)
    {
        return from_string(text, ctx.bits);
    }

    static Real pi(unsigned bits)
    {
        Real r(bits);
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }
    static Real e(unsigned bits)
    {
        Real r(bits);
        mpfr_set_ui(r.v_, 1, MPFR_RNDN);
        mpfr_exp(r.v_, r.v_, MPFR_RNDN);
        return r;
    }
    static Real ln2(unsigned bits)
    {
        Real r(bits);
        mpfr_const_log2(r.v_, MPFR_RNDN);
        return r;
    }
    static Real infinity(unsigned bits)
    {
        Real r(bits);
        mpfr_set_inf(r.v_, 1);
        return r;
    }

    // ---- observers ------------------------------------------------------

    [[nodiscard]] unsigned precision() const noexcept { return static_cast<unsigned>(mpfr_get_prec(v_)); }
    [[nodiscard]] bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
    [[nodiscard]] bool is_nan() const noexcept { return mpfr_nan_p(v_) != 0; }
    [[nodiscard]] bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
    [[nodiscard]] bool is_integer() const noexcept { return mpfr_integer_p(v_) != 0; }
    /// -1, 0 or +1.
    [[nodiscard]] int sign() const noexcept { return mpfr_sgn(v_) > 0 ? 1 : (mpfr_sgn(v_) < 0 ? -1 : 0); }
    [[nodiscard]] double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
    [[nodiscard]] long to_long() const noexcept { return mpfr_get_si(v_, MPFR_RNDZ); }

    /// Scientific notation with `digits` significant digits.
    [[nodiscard]] std::string to_string(int digits = 40) const
    {
        if (is_nan()) {
            return "nan";
        }
        if (mpfr_inf_p(v_) != 0) {
            return sign() > 0 ? "inf" : "-inf";
        }
        char* buf = nullptr;
        mpfr_asprintf(&buf, "%.*Re", std::max(digits - 1, 0), v_);
        std::string out(buf);
        mpfr_free_str(buf);
        return out;
    }

    /// Same precision and same value (NaN never compares identical).
    [[nodiscard]] bool identical(Real const& other) const noexcept
    {
        return precision() == other.precision() && mpfr_equal_p(v_, other.v_) != 0;
    }

    [[nodiscard]] mpfr_srcptr get() const noexcept { return v_; }
    [[nodiscard]] mpfr_ptr get() noexcept { return v_; }

    // ---- arithmetic -----------------------------------------------------

    Real& operator+=(Real const& rhs)
    {
        widen_to(rhs);
        mpfr_add(v_, v_, rhs.v_, MPFR_RNDN);
        return *this;
    }
    Real& operator-=(Real const& rhs)
    {
        widen_to(rhs);
        mpfr_sub(v_, v_, rhs.v_, MPFR_RNDN);
        return *this;
    }
    Real& operator*=(Real const& rhs)
    {
        widen_to(rhs);
        mpfr_mul(v_, v_, rhs.v_, MPFR_RNDN);
        return *this;
    }
    Real& operator/=(Real const& rhs)
    {
        widen_to(rhs);
        mpfr_div(v_, v_, rhs.v_, MPFR_RNDN);
        return *this;
    }

    friend Real operator+(Real lhs, Real const& rhs) { return lhs += rhs; }
    friend Real operator-(Real lhs, Real const& rhs) { return lhs -= rhs; }
    friend Real operator*(Real lhs, Real const& rhs) { return lhs *= rhs; }
    friend Real operator/(Real lhs, Real const& rhs) { return lhs /= rhs; }
    friend Real operator-(Real value)
    {
        mpfr_neg(value.v_, value.v_, MPFR_RNDN);
        return value;
    }

    friend bool operator==(Real const& a, Real const& b) noexcept { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend bool operator<(Real const& a, Real const& b) noexcept { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator<=(Real const& a, Real const& b) noexcept { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
    friend bool operator>(Real const& a, Real const& b) noexcept { return mpfr_greater_p(a.v_, b.v_) != 0; }
    friend bool operator>=(Real const& a, Real const& b) noexcept
    {
        return mpfr_greaterequal_p(a.v_, b.v_) != 0;
    }

private:
    void widen_to(Real const& rhs)
    {
        if (mpfr_get_prec(rhs.v_) > mpfr_get_prec(v_)) {
            mpfr_prec_round(v_, mpfr_get_prec(rhs.v_), MPFR_RNDN);
        }
    }

    mpfr_t v_;
};

// ---- directed-rounding arithmetic ---------------------------------------
//
// Result precision is `bits`; rounding direction is explicit.

inline Real add(Real const& a, Real const& b, Round r, unsigned bits)
{
    Real out(bits);
    mpfr_add(out.get(), a.get(), b.get(), detail::to_mpfr(r));
    return out;
}

inline Real sub(Real const& a, Real const& b, Round r, unsigned bits)
{
    Real out(bits);
    mpfr_sub(out.get(), a.get(), b.get(), detail::to_mpfr(r));
    return out;
}

inline Real mul(Real const& a, Real const& b, Round r, unsigned bits)
{
    Real out(bits);
    mpfr_mul(out.get(), a.get(), b.get(), detail::to_mpfr(r));
    return out;
}

inline Real div(Real const& a, Real const& b, Round r, unsigned bits)
{
    Real out(bits);
    mpfr_div(out.get(), a.get(), b.get(), detail::to_mpfr(r));
    return out;
}

/// a * 2^e, exact unless the exponent range is exceeded.
inline Real ldexp(Real a, long e)
{
    mpfr_mul_2si(a.get(), a.get(), e, MPFR_RNDN);
    return a;
}

inline Real half(Real a) { return ldexp(std::move(a), -1); }

/// a + b computed without rounding error (precision grows as needed).
inline Real exact_add(Real const& a, Real const& b)
{
    if (a.is_zero() || !a.is_finite() || !b.is_finite()) {
        Real out(std::max(a.precision(), b.precision()));
        mpfr_add(out.get(), a.get(), b.get(), MPFR_RNDN);
        return out;
    }
    if (b.is_zero()) {
        return a;
    }
    long const ea = mpfr_get_exp(a.get());
    long const eb = mpfr_get_exp(b.get());
    long const lo = std::min(ea - static_cast<long>(a.precision()), eb - static_cast<long>(b.precision()));
    long const hi = std::max(ea, eb) + 1;
    Real out(static_cast<unsigned>(std::max<long>(hi - lo, 2)));
    mpfr_add(out.get(), a.get(), b.get(), MPFR_RNDN);
    return out;
}

inline Real abs(Real a)
{
    mpfr_abs(a.get(), a.get(), MPFR_RNDN);
    return a;
}

inline Real sqrt(Real a)
{
    mpfr_sqrt(a.get(), a.get(), MPFR_RNDN);
    return a;
}

inline Real exp(Real a)
{
    mpfr_exp(a.get(), a.get(), MPFR_RNDN);
    return a;
}

inline Real log(Real a)
{
    mpfr_log(a.get(), a.get(), MPFR_RNDN);
    return a;
}

inline Real log1p(Real a)
{
    mpfr_log1p(a.get(), a.get(), MPFR_RNDN);
    return a;
}

inline Real sin(Real a)
{
    mpfr_sin(a.get(), a.get(), MPFR_RNDN);
    return a;
}

inline Real cos(Real a)
{
    mpfr_cos(a.get(), a.get(), MPFR_RNDN);
    return a;
}

inline Real floor(Real a)
{
    mpfr_floor(a.get(), a.get());
    return a;
}

inline Real digamma(Real a)
{
    mpfr_digamma(a.get(), a.get(), MPFR_RNDN);
    return a;
}

inline Real pow(Real const& base, Real const& exponent)
{
    Real out(std::max(base.precision(), exponent.precision()));
    mpfr_pow(out.get(), base.get(), exponent.get(), MPFR_RNDN);
    return out;
}

inline Real const& max(Real const& a, Real const& b) { return a < b ? b : a; }
inline Real const& min(Real const& a, Real const& b) { return b < a ? b : a; }

/// Rounds `a` to `bits` in the given direction.
inline Real round_to(Real const& a, unsigned bits, Round r = Round::nearest)
{
    Real out(bits);
    mpfr_set(out.get(), a.get(), detail::to_mpfr(r));
    return out;
}

/// Number of leading bits on which `a` and `b` agree, relative to max(|a|, |b|).
/// Returns `cap` when the values are equal.
inline unsigned agreeing_bits(Real const& a, Real const& b, unsigned cap)
{
    unsigned const bits = std::max(a.precision(), b.precision()) + 8;
    Real diff = sub(a, b, Round::nearest, bits);
    if (diff.is_zero()) {
        return cap;
    }
    Real scale = max(abs(a), abs(b));
    if (scale.is_zero()) {
        return cap;
    }
    long const gap = mpfr_get_exp(scale.get()) - mpfr_get_exp(diff.get());
    if (gap <= 0) {
        return 0;
    }
    return static_cast<unsigned>(std::min<long>(gap, cap));
}

} // namespace zseries
