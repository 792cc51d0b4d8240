#include <catch_amalgamated.hpp>

#include "zseries/corpus.hpp"
#include "zseries/series_io.hpp"
#include "zseries/summation.hpp"

using namespace zseries;

namespace {

PrecisionContext const ctx{256};

} // namespace

TEST_CASE("registry lookup")
{
    auto const ids = corpus::list();
    CHECK(ids == std::vector<std::string>{"div_z2", "z3_sum2", "ln2", "rd2", "cos_shift"});

    auto const& z3 = corpus::get("z3_sum2");
    REQUIRE(z3.closed_sum);
    CHECK(z3.closed_sum(256) == Real::from_int(2, 256));
    CHECK(z3.omega == 2);

    auto const& div = corpus::get("div_z2");
    CHECK_FALSE(div.closed_sum);
    REQUIRE(div.divergence);
    CHECK(div.divergence->threshold == 10.0);

    CHECK(corpus::get("ln2").omega == 1);
    CHECK(corpus::get("cos_shift").windows == std::vector<std::int64_t>{7, 5});
    CHECK(corpus::get("cos_shift").envelopes.size() == 2);
    CHECK_THROWS_AS(corpus::get("nope"), usage_error);
}

TEST_CASE("every expected verdict is reproduced")
{
    for (auto const& id : corpus::list()) {
        auto const& e = corpus::get(id);
        for (auto const& x : e.expected) {
            INFO(id << " " << x.check << " p=" << x.p << " [" << x.lo << "," << x.hi << "]");
            CHECK(observe(e, x, ctx) == x.verdict);
        }
    }
}

TEST_CASE("rd2 closed print matches the case form")
{
    auto const& seq = corpus::get("rd2").sequence;
    auto const closed = parse_expression("1/floor((n+1)/2) - (1+(-1)^n)/2^(n/2+1)");
    for (std::int64_t n = 1; n <= 40; ++n) {
        INFO("n=" << n);
        CHECK(closed.evaluate(n, 256) == eval_term(seq, n, ctx));
    }
}

TEST_CASE("registered remainder formulas agree with direct summation")
{
    for (auto const& id : {"z3_sum2", "rd2"}) {
        auto const& e = corpus::get(id);
        REQUIRE(e.remainder_formula);
        Real const S = e.closed_sum(256);
        for (std::int64_t m = 1; m <= 120; ++m) {
            INFO(id << " m=" << m);
            Real const diff = abs(S - partial_sum(e.sequence, m, ctx) - e.remainder_formula(m, 256));
            CHECK(diff < ldexp(Real::from_int(1, 256), -240));
        }
    }
}

TEST_CASE("the Z(2) example drifts upward")
{
    auto const& e = corpus::get("div_z2");
    CHECK(check_z_monotone(e.sequence, 2, 1, 2000, ctx).holds);
    Real const s1 = partial_sum(e.sequence, 1000, ctx);
    Real const s2 = partial_sum(e.sequence, 4000, ctx);
    // Between the cuts the odd-indexed terms 1/k, k in (500, 2000], add about ln 4.
    CHECK((s2 - s1).to_double() == Catch::Approx(std::log(4.0)).epsilon(0.01));
}

TEST_CASE("random generator examples")
{
    auto const geo = make_random_z_series(1, 7, DecayProfile::geometric);
    CHECK(check_z_monotone(geo, 1, 1, 500, ctx).holds);

    auto const mixed = make_random_z_series(3, 42, DecayProfile::mixed);
    CHECK(check_z_monotone(mixed, 3, 1, 3000, ctx).holds);

    auto const scaled = make_random_z_series(3, 42, DecayProfile::mixed, {1, 0.01, 1});
    CHECK(check_z_monotone(scaled, 3, 1, 600, ctx).holds);
    CHECK_FALSE(check_z_monotone(scaled, 1, 1, 600, ctx).holds);

    CHECK_THROWS_AS(make_random_z_series(2, 1, DecayProfile::mixed), usage_error);
    CHECK_THROWS_AS(make_random_z_series(3, 1, DecayProfile::mixed, {1, 2}), usage_error);
    CHECK_THROWS_AS(parse_profile("linear"), usage_error);
    CHECK(parse_profile("harmonic") == DecayProfile::harmonic);
}

TEST_CASE("random series are Z(p), convex along strands, and slowly decaying")
{
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        for (auto profile : {DecayProfile::harmonic, DecayProfile::geometric, DecayProfile::mixed}) {
            for (std::int64_t p : {1, 3, 5, 7}) {
                auto const seq = make_random_z_series(p, seed, profile);
                INFO("seed " << seed << " p " << p);
                CHECK(check_z_monotone(seq, p, 1, 50 * p, ctx).holds);
                CHECK(check_convexity(seq, 1, 50 * p, ctx, p).holds);
                CHECK(check_slow_decay(seq, p, 1, 50 * p, ctx).holds);
            }
        }
    }
}

TEST_CASE("generator is deterministic in its seed")
{
    auto const a = make_random_series(5, 99, DecayProfile::mixed);
    auto const b = make_random_series(5, 99, DecayProfile::mixed);
    for (std::int64_t n = 1; n < 100; ++n) {
        CHECK(eval_term(a.sequence, n, ctx).identical(eval_term(b.sequence, n, ctx)));
    }
    CHECK(a.closed_sum(256).identical(b.closed_sum(256)));
    auto const c = make_random_series(5, 100, DecayProfile::mixed);
    bool differs = false;
    for (std::int64_t n = 1; n < 20; ++n) {
        differs = differs || !(eval_term(a.sequence, n, ctx) == eval_term(c.sequence, n, ctx));
    }
    CHECK(differs);
}

TEST_CASE("random closed sums match partial sums")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto const rs = make_random_series(3, seed, DecayProfile::geometric);
        Real const S = rs.closed_sum(256);
        Real const Sm = partial_sum(rs.sequence, 6000, ctx);
        CHECK(abs(S - Sm) < Real::from_double(1e-60, 256));
    }
}

TEST_CASE("export round trip")
{
    for (auto const& id : corpus::list()) {
        auto const& e = corpus::get(id);
        auto const j = entry_to_json(e);
        auto const back = parse_series(json::parse(j.dump()));
        INFO(id);
        REQUIRE(back.omega);
        CHECK(*back.omega == e.omega);
        CHECK(back.sequence.start() == e.sequence.start());
        CHECK(back.envelopes.size() == e.envelopes.size());
        for (std::int64_t n = e.sequence.start(); n < e.sequence.start() + 200; ++n) {
            CHECK(signed_term(back.sequence, n, ctx).identical(signed_term(e.sequence, n, ctx)));
        }
        CHECK(entry_to_json(CorpusEntry{e.id, back.sequence, *back.omega, {}, {}, {}, {}, {}, back.envelopes, {}})
                  .dump() == j.dump());
    }
}
