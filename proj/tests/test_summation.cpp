#include <catch_amalgamated.hpp>

#include "zseries/corpus.hpp"
#include "zseries/summation.hpp"

using namespace zseries;

namespace {

PrecisionContext const ctx{256};

Real pow2(long e) { return ldexp(Real::from_int(1, 256), e); }
Real recip(std::int64_t k) { return Real::from_int(1, 256) / Real::from_int(k, 256); }

Real const& tiny()
{
    static Real const t = ldexp(Real::from_int(1, 256), -240);
    return t;
}

} // namespace

TEST_CASE("partial sums of the six-case series")
{
    auto const& seq = corpus::get("z3_sum2").sequence;
    for (std::int64_t k = 1; k <= 40; ++k) {
        Real const two = Real::from_int(2, 256);
        CHECK(abs(partial_sum(seq, 6 * k, ctx) - two * (Real::from_int(1, 256) - pow2(-k))) <= tiny());
        Real const s5 = two * (Real::from_int(1, 256) - pow2(-(k + 1))) + recip(k + 1);
        CHECK(abs(partial_sum(seq, 6 * k + 5, ctx) - s5) <= tiny());
    }
    CHECK(partial_sum(seq, 1, ctx).identical(signed_term(seq, 1, ctx)));
    CHECK_THROWS_AS(partial_sum(seq, 0, ctx), usage_error);
}

TEST_CASE("ln 2 to a millionth with the half bound")
{
    auto const& e = corpus::get("ln2");
    auto const r = sum_to_tolerance(e.sequence, 1, Real::from_double(1e-6, 256), BoundMethod::half_upper, ctx, true);
    REQUIRE(r.certified);
    CHECK(r.bound.valid);
    CHECK(r.bound.value <= r.tolerance);
    CHECK(r.assumed_limit_zero);
    // 1/(2m) <= 1e-6 needs m >= 500000; the double nearest 1e-6 sits just below it.
    CHECK(r.m >= 500000);
    CHECK(r.m <= 500001);
    CHECK(std::abs(r.sum.to_double() - std::log(2.0)) < 1e-6);
}

TEST_CASE("caller must assert the limit and give a positive tolerance")
{
    auto const& seq = corpus::get("ln2").sequence;
    CHECK_THROWS_AS(sum_to_tolerance(seq, 1, Real::from_double(1e-3, 256), BoundMethod::leibniz, ctx, false),
                    usage_error);
    CHECK_THROWS_AS(sum_to_tolerance(seq, 1, Real(256), BoundMethod::leibniz, ctx, true), usage_error);
    CHECK_THROWS_AS(sum_to_tolerance(seq, 1, Real::from_double(1e-3, 256), BoundMethod::half_lower, ctx, true),
                    usage_error);
}

TEST_CASE("rd2 converges too slowly to certify 1e-8 within the index budget")
{
    auto const& seq = corpus::get("rd2").sequence;
    SummationOptions opts;
    opts.max_index = 200000;
    auto const r = sum_to_tolerance(seq, 1, Real::from_double(1e-8, 256), BoundMethod::leibniz, ctx, true, opts);
    CHECK_FALSE(r.certified);
    CHECK(r.m == 200000);
    CHECK_FALSE(r.notes.empty());
    // At an even cut the true remainder is 2^-k, so the value is already close.
    CHECK(std::abs(r.sum.to_double() - 1.0) < 1e-8);

    auto const loose = sum_to_tolerance(seq, 1, Real::from_double(1e-3, 256), BoundMethod::leibniz, ctx, true);
    REQUIRE(loose.certified);
    CHECK(loose.m >= 10);
    CHECK(std::abs(loose.sum.to_double() - 1.0) <= 1e-3);
}

TEST_CASE("an all-zero table certifies at its first index")
{
    auto const zeros = TermSequence::table("zeros", 1, std::vector<std::string>(20, "0"));
    auto const r = sum_to_tolerance(zeros, 1, Real::from_double(1e-12, 256), BoundMethod::leibniz, ctx, true);
    REQUIRE(r.certified);
    CHECK(r.m == 1);
    CHECK(r.bound.value.is_zero());
    CHECK(r.sum.is_zero());
}

TEST_CASE("a table that ends early stays uncertified")
{
    auto const t = TermSequence::table("short", 1, std::vector<std::string>{"1", "0.5", "0.25", "0.125"});
    auto const r = sum_to_tolerance(t, 1, Real::from_double(1e-6, 256), BoundMethod::leibniz, ctx, true);
    CHECK_FALSE(r.certified);
    REQUIRE_FALSE(r.notes.empty());
    CHECK(r.notes.front().find("table ends") != std::string::npos);
}

TEST_CASE("looser tolerances never stop later")
{
    auto const& z3 = corpus::get("z3_sum2").sequence;
    for (auto method : {BoundMethod::z_simple, BoundMethod::z_stated, BoundMethod::z_improved}) {
        std::int64_t previous = std::numeric_limits<std::int64_t>::max();
        for (double tol : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
            auto const r = sum_to_tolerance(z3, 2, Real::from_double(tol, 256), method, ctx, true);
            REQUIRE(r.certified);
            CHECK(r.m <= previous);
            previous = r.m;
        }
    }
    auto const& ln2 = corpus::get("ln2").sequence;
    std::int64_t previous = std::numeric_limits<std::int64_t>::max();
    for (double tol : {1e-4, 1e-3, 1e-2}) {
        auto const r = sum_to_tolerance(ln2, 1, Real::from_double(tol, 256), BoundMethod::delta_upper, ctx, true);
        REQUIRE(r.certified);
        CHECK(r.m <= previous);
        previous = r.m;
    }
}

TEST_CASE("the stopping index is the first certifiable one")
{
    auto const& z3 = corpus::get("z3_sum2").sequence;
    Real const tol = Real::from_double(0.02, 256);
    auto const r = sum_to_tolerance(z3, 2, tol, BoundMethod::z_improved, ctx, true);
    REQUIRE(r.certified);
    for (std::int64_t m = 1; m < r.m; ++m) {
        auto const b = z_bound_improved(z3, m, 2, ctx);
        CHECK_FALSE((b.valid && b.value <= tol));
    }
    CHECK(r.bound.value.identical(z_bound_improved(z3, r.m, 2, ctx).value));
}

TEST_CASE("certified sums are within tolerance of the known sums")
{
    for (auto const& id : {"z3_sum2", "ln2", "rd2"}) {
        auto const& e = corpus::get(id);
        Real const exact = e.closed_sum(256);
        for (auto method : {BoundMethod::leibniz, BoundMethod::z_simple, BoundMethod::z_improved,
                            BoundMethod::enclosure}) {
            SummationOptions opts;
            opts.max_index = 20000;
            auto const r =
                sum_to_tolerance(e.sequence, e.omega, Real::from_double(1e-3, 256), method, ctx, true, opts);
            INFO(id << " " << method_name(method));
            if (method == BoundMethod::leibniz && e.omega > 1) {
                // Its terms are not monotone, so the Leibniz bound never applies.
                CHECK_FALSE(r.certified);
                continue;
            }
            REQUIRE(r.certified);
            // The bound can be attained (z3_sum2 at m = 6k+1), so allow for rounding in the summed value.
            CHECK(abs(r.sum - exact) <= r.bound.value + pow2(-230));
        }
    }
}

TEST_CASE("summation is deterministic")
{
    auto const& seq = corpus::get("cos_shift").sequence;
    auto const a = sum_to_tolerance(seq, 3, Real::from_double(1e-3, 256), BoundMethod::z_improved, ctx, true);
    auto const b = sum_to_tolerance(seq, 3, Real::from_double(1e-3, 256), BoundMethod::z_improved, ctx, true);
    CHECK(a.m == b.m);
    CHECK(a.sum.identical(b.sum));
    CHECK(a.bound.value.identical(b.bound.value));
    CHECK(a.certified == b.certified);
    CHECK(a.terms_evaluated == b.terms_evaluated);
}

TEST_CASE("decomposition into interleaved series")
{
    auto const& z3 = corpus::get("z3_sum2").sequence;
    auto const one = decompose(z3, 1);
    REQUIRE(one.components.size() == 1);
    for (std::int64_t j = 0; j < 50; ++j) {
        CHECK(eval_term(one.components[0], j, ctx).identical(eval_term(z3, 1 + j, ctx)));
    }

    auto const d = decompose(z3, 2);
    REQUIRE(d.components.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::int64_t j = 0; j < 40; ++j) {
            std::int64_t const n = 1 + static_cast<std::int64_t>(k) + 3 * j;
            CHECK(eval_term(d.components[k], j, ctx).identical(eval_term(z3, n, ctx)));
            CHECK(signed_term(d.components[k], j, ctx).identical(signed_term(z3, n, ctx)));
        }
    }
    CHECK_THROWS_AS(decompose(z3, 0), usage_error);
}

TEST_CASE("cross check recombines the component sums")
{
    auto const harmonic = TermSequence::closed_form("h", 1, "1/n");
    auto const r1 = cross_check(harmonic, 1, 100, ctx);
    CHECK(r1.direct.identical(r1.recombined));

    auto const& z3 = corpus::get("z3_sum2").sequence;
    for (std::int64_t m : {60, 61, 62, 100}) {
        auto const r = cross_check(z3, 2, m, ctx);
        CHECK(abs(r.direct - r.recombined) < pow2(-(256 - 10)));
        CHECK(r.component_sums.size() == 3);
        CHECK(r.max_component_bound.identical(z_bound(z3, m, 2, ctx, ZVariant::proof).value));
        CHECK(r.components_valid);
    }
}

TEST_CASE("recombination gaps stay at rounding level")
{
    Real const limit = pow2(-(256 - 10));
    for (auto const& id : corpus::list()) {
        auto const& seq = corpus::get(id).sequence;
        for (std::int64_t omega : {1, 2, 3}) {
            auto const gaps = recombination_gaps(seq, omega, 2000, ctx);
            for (auto const& g : gaps) {
                REQUIRE(g < limit);
            }
        }
    }
}
