#include <catch_amalgamated.hpp>

#include "zseries/corpus.hpp"
#include "zseries/oracle.hpp"

using namespace zseries;

namespace {

PrecisionContext const ctx{256};

Real tol(double v) { return Real::from_double(v, 256); }

} // namespace

TEST_CASE("closed-form reference sums")
{
    auto const z3 = reference_sum(corpus::get("z3_sum2"), tol(1e-40), ctx);
    CHECK(z3.source == ReferenceSource::closed_form);
    CHECK(z3.bits == 512);
    CHECK(z3.value == Real::from_int(2, 512));

    auto const ln2 = reference_sum(corpus::get("ln2"), tol(1e-40), ctx);
    CHECK(ln2.value.identical(Real::ln2(512)));

    auto const rd2 = reference_sum(corpus::get("rd2"), tol(1e-40), ctx);
    CHECK(rd2.value == Real::from_int(1, 512));
}

TEST_CASE("reference remainders match the known formulas")
{
    Real const eps = ldexp(Real::from_int(1, 512), -400);
    auto const& z3 = corpus::get("z3_sum2");
    auto const z3ref = reference_sum(z3, tol(1e-40), ctx);
    for (std::int64_t k = 1; k <= 40; ++k) {
        Real const r = reference_remainder(z3.sequence, z3ref, 6 * k);
        CHECK(abs(r - ldexp(Real::from_int(1, 512), -(k - 1))) < eps);
        CHECK(abs(r - z3.remainder_formula(6 * k, 512)) < eps);
    }

    auto const& rd2 = corpus::get("rd2");
    auto const rdref = reference_sum(rd2, tol(1e-40), ctx);
    for (std::int64_t k = 1; k <= 60; ++k) {
        Real const even = reference_remainder(rd2.sequence, rdref, 2 * k);
        CHECK(abs(even - ldexp(Real::from_int(1, 512), -k)) < eps);
        Real const odd = reference_remainder(rd2.sequence, rdref, 2 * k - 1);
        Real const expected =
            ldexp(Real::from_int(1, 512), -(k - 1)) - Real::from_int(1, 512) / Real::from_int(k, 512);
        CHECK(abs(odd - expected) < eps);
    }
    CHECK(reference_remainder(rd2.sequence, rdref, 1).is_zero());
}

TEST_CASE("one-pass remainders agree with single evaluations")
{
    auto const& e = corpus::get("z3_sum2");
    auto const ref = reference_sum(e, tol(1e-40), ctx);
    auto const all = reference_remainders(e.sequence, ref, 5, 80);
    REQUIRE(all.size() == 76);
    for (std::int64_t m = 5; m <= 80; ++m) {
        CHECK(all[static_cast<std::size_t>(m - 5)].identical(reference_remainder(e.sequence, ref, m)));
    }
    CHECK_THROWS_AS(reference_remainders(e.sequence, ref, 0, 10), usage_error);
}

TEST_CASE("far summation agrees with the closed form")
{
    auto const& e = corpus::get("z3_sum2");
    Real const t = tol(1e-4);
    auto const closed = reference_sum(e, t, ctx);
    auto const far = reference_sum(e.sequence, e.omega, t, ctx);
    CHECK(far.source == ReferenceSource::far_summation);
    REQUIRE(far.residual_bound);
    CHECK(far.residual_bound->valid);
    CHECK(far.residual_bound->value < Real::from_double(1e-4, 512));
    CHECK(abs(far.value - closed.value) <= Real::from_double(1e-4, 512) + far.residual_bound->value);

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto const rs = make_random_series(3, seed, DecayProfile::geometric);
        auto const c = reference_sum(rs.sequence, 2, tol(1e-30), ctx, rs.closed_sum);
        auto const f = reference_sum(rs.sequence, 2, tol(1e-30), ctx);
        REQUIRE(f.residual_bound);
        CHECK(abs(c.value - f.value) <= Real::from_double(1e-30, 512) + f.residual_bound->value);
    }
}

TEST_CASE("oracle error when the tolerance is out of reach")
{
    OracleOptions opts;
    opts.max_index = 1000;
    CHECK_THROWS_AS(reference_sum(corpus::get("ln2").sequence, 1, tol(1e-20), ctx, {}, opts), oracle_error);
}

TEST_CASE("ln 2 remainders sit inside the integral sandwich")
{
    auto const& e = corpus::get("ln2");
    auto const ref = reference_sum(e, tol(1e-40), ctx);
    auto const R = reference_remainders(e.sequence, ref, 2, 10000);
    Real const one = Real::from_int(1, 512);
    for (std::int64_t m = 2; m <= 10000; ++m) {
        Real const r = abs(R[static_cast<std::size_t>(m - 2)]);
        Real const lo = half(log(one + one / Real::from_int(m + 1, 512)));
        Real const hi = half(log(one + one / Real::from_int(m - 1, 512)));
        INFO("m=" << m);
        REQUIRE(lo < r);
        REQUIRE(r < hi);
    }
}
