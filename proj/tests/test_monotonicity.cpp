#include <catch_amalgamated.hpp>

#include "zseries/corpus.hpp"
#include "zseries/monotonicity.hpp"

using namespace zseries;

namespace {

PrecisionContext const ctx{256};

TermSequence pattern_series(char const* sign_expr)
{
    return TermSequence::closed_form("signs", 1, "1/n", SignConvention::from_expression(parse_expression(sign_expr)));
}

} // namespace

TEST_CASE("Z-monotonicity on known sequences")
{
    auto const harmonic = TermSequence::closed_form("h", 1, "1/n");
    auto const r = check_z_monotone(harmonic, 1, 1, 100, ctx);
    CHECK(r.holds);
    CHECK(r.violations.empty());
    REQUIRE(r.margin);
    CHECK(r.margin->sign() > 0);

    auto const& z3 = corpus::get("z3_sum2").sequence;
    CHECK(check_z_monotone(z3, 3, 1, 600, ctx).holds);

    auto const fails = check_z_monotone(z3, 1, 1, 600, ctx);
    CHECK_FALSE(fails.holds);
    REQUIRE_FALSE(fails.violations.empty());
    auto const& v = fails.violations.front();
    CHECK(v.k == 2);
    CHECK(v.values[0].to_double() == Catch::Approx(0.1));
    CHECK(v.values[1].to_double() == Catch::Approx(1.5));
    CHECK(fails.margin->sign() < 0);
    for (auto const& viol : fails.violations) {
        CHECK(fails.window.contains(viol.k));
    }
}

TEST_CASE("window preconditions")
{
    auto const harmonic = TermSequence::closed_form("h", 1, "1/n");
    CHECK_THROWS_AS(check_z_monotone(harmonic, 3, 1, 3, ctx), usage_error);
    CHECK_THROWS_AS(check_z_monotone(harmonic, 1, 0, 10, ctx), usage_error);
    CHECK_THROWS_AS(check_convexity(harmonic, 1, 2, ctx), usage_error);
    CHECK_THROWS_AS(infer_min_odd_period(harmonic, 1, 100, 4, ctx), usage_error);
}

TEST_CASE("smallest odd period")
{
    auto const harmonic = TermSequence::closed_form("h", 1, "1/n");
    CHECK(infer_min_odd_period(harmonic, 1, 100, 9, ctx) == 1);
    CHECK(infer_min_odd_period(corpus::get("z3_sum2").sequence, 1, 600, 9, ctx) == 3);
    CHECK(infer_min_odd_period(corpus::get("cos_shift").sequence, 1, 5000, 9, ctx) == 5);
}

TEST_CASE("an oscillating log term has no small odd period")
{
    // ln n + n sin^2 n is Zv-increasing with parameter 2π; 1/φ is decreasing
    // only along non-integer strides, so small odd periods fail.
    auto const seq = TermSequence::closed_form("logsin", 2, "1/(ln(n) + n*sin(n)^2)");
    CHECK_FALSE(infer_min_odd_period(seq, 2, 2000, 5, ctx).has_value());
}

TEST_CASE("convexity")
{
    auto const harmonic = TermSequence::closed_form("h", 1, "1/n");
    CHECK(check_convexity(harmonic, 1, 1000, ctx).holds);

    auto const table = TermSequence::table("t", 1, std::vector<std::string>{"1", "0.9", "0.1"});
    auto const r = check_convexity(table, 1, 3, ctx);
    CHECK_FALSE(r.holds);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].k == 1);
    CHECK(r.violations[0].values.size() == 3);

    // Terms a_{2k} = 1/k - 2^-k sit too close to a_{2k-1} = 1/k for the
    // sequence to stay convex.
    auto const rd2 = check_convexity(corpus::get("rd2").sequence, 8, 500, ctx);
    CHECK_FALSE(rd2.holds);
}

TEST_CASE("slow decay")
{
    auto const harmonic = TermSequence::closed_form("h", 1, "1/n");
    CHECK(check_slow_decay(harmonic, 1, 1, 100, ctx).holds);

    auto const half = TermSequence::closed_form("g", 1, "1/2^n");
    auto const eq = check_slow_decay(half, 1, 1, 50, ctx);
    CHECK(eq.holds);
    CHECK(eq.margin->is_zero());

    auto const quarter = TermSequence::closed_form("q", 1, "1/4^n");
    auto const r = check_slow_decay(quarter, 1, 1, 50, ctx);
    CHECK_FALSE(r.holds);
    CHECK(r.violations.size() == 49);
}

TEST_CASE("sign patterns")
{
    auto const alternating = TermSequence::closed_form("alt", 1, "1/n");
    CHECK(check_sign_pattern(alternating, 1, 1, 100, ctx).holds);

    auto const pp = pattern_series("cos(pi*(n-1)/2) + sin(pi*(n-1)/2)");
    CHECK(check_sign_pattern(pp, 2, 1, 100, ctx).holds);
    auto const r = check_sign_pattern(pp, 1, 1, 100, ctx);
    CHECK_FALSE(r.holds);
    for (auto k : r.violations) {
        CHECK(pp.sign_at(k, ctx) == pp.sign_at(k + 1, ctx));
    }
    CHECK(r.violations.size() == 50);

    auto const zero = TermSequence::table("z", 1, std::vector<std::string>{"1", "0", "1"});
    CHECK_THROWS_AS(check_sign_pattern(zero, 1, 1, 3, ctx), eval_error);
}

TEST_CASE("Z(p) implies Z(mp) and Z(1) implies Z(p)")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        for (std::int64_t p : {1, 3, 5}) {
            auto const seq = make_random_z_series(p, seed, DecayProfile::mixed);
            REQUIRE(check_z_monotone(seq, p, 1, 400, ctx).holds);
            for (std::int64_t m : {3, 5}) {
                CHECK(check_z_monotone(seq, m * p, 1, 400, ctx).holds);
            }
        }
    }
    auto const harmonic = TermSequence::closed_form("h", 1, "1/n");
    REQUIRE(check_z_monotone(harmonic, 1, 1, 200, ctx).holds);
    for (std::int64_t p = 2; p <= 12; ++p) {
        CHECK(check_z_monotone(harmonic, p, 1, 200, ctx).holds);
    }
}

TEST_CASE("inferred period is minimal")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto const seq = make_random_z_series(5, seed, DecayProfile::mixed, {1, 0.01, 1, 0.01, 1});
        auto const p = infer_min_odd_period(seq, 1, 300, 9, ctx);
        REQUIRE(p);
        CHECK(check_z_monotone(seq, *p, 1, 300, ctx).holds);
        for (std::int64_t q = 1; q < *p; q += 2) {
            CHECK_FALSE(check_z_monotone(seq, q, 1, 300, ctx).holds);
        }
    }
}

TEST_CASE("reports are deterministic")
{
    auto const& seq = corpus::get("cos_shift").sequence;
    auto const a = check_z_monotone(seq, 3, 1, 500, ctx);
    auto const b = check_z_monotone(seq, 3, 1, 500, ctx);
    REQUIRE(a.violations.size() == b.violations.size());
    for (std::size_t i = 0; i < a.violations.size(); ++i) {
        CHECK(a.violations[i].k == b.violations[i].k);
    }
    CHECK(a.margin->identical(*b.margin));
}
