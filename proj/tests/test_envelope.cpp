#include <catch_amalgamated.hpp>

#include <numbers>

#include "zseries/corpus.hpp"
#include "zseries/envelope.hpp"
#include "zseries/monotonicity.hpp"

using namespace zseries;

namespace {

PrecisionContext const ctx{256};

EnvelopePair envelope(char const* lower, char const* upper, double from, Direction d = Direction::increasing)
{
    return EnvelopePair{parse_expression(lower), parse_expression(upper), from, d, std::nullopt};
}

Real R(double v) { return Real::from_double(v, 256); }

} // namespace

TEST_CASE("verify_envelope")
{
    auto const env = envelope("x - 2", "x + 2", 1);
    auto const ok = verify_envelope(env, parse_expression("x + 2*cos(x)"), Grid{1, 1000, 0.25}, ctx);
    CHECK(ok.holds);
    CHECK(ok.points == 3997);
    CHECK(ok.violation_count == 0);

    auto const flat = envelope("x", "x", 1);
    auto const zero = verify_envelope(flat, parse_expression("x"), Grid{1, 50, 1}, ctx);
    CHECK(zero.holds);
    CHECK(zero.lower_slack->is_zero());
    CHECK(zero.upper_slack->is_zero());

    auto const tight = envelope("x - 2", "x + 1", 0);
    auto const bad = verify_envelope(tight, parse_expression("x + 2*cos(x)"), Grid{0.1, 20, 0.1}, ctx);
    CHECK_FALSE(bad.holds);
    REQUIRE_FALSE(bad.violations.empty());
    CHECK(bad.violations.front() == Catch::Approx(0.1));
    CHECK(bad.violations.size() <= 10);
    CHECK(bad.violation_count >= static_cast<std::int64_t>(bad.violations.size()));
}

TEST_CASE("grid validation")
{
    auto const env = envelope("x - 2", "x + 2", 1);
    CHECK_THROWS_AS(verify_envelope(env, parse_expression("x"), Grid{5, 1, 1}, ctx), usage_error);
    CHECK_THROWS_AS(verify_envelope(env, parse_expression("x"), Grid{0, 10, 1}, ctx), usage_error);
    CHECK_THROWS_AS(bound_parameter(env, Grid{1, 10, 0}, ctx), usage_error);
}

TEST_CASE("bound_parameter examples")
{
    auto const inc = bound_parameter(envelope("x - 2", "x + 2", 1), Grid{1, 1000, 0.25}, ctx);
    CHECK(inc.T.to_double() == Catch::Approx(4.0).margin(1e-5));
    CHECK(inc.T.to_double() >= 4.0);
    CHECK(inc.margin.sign() > 0);
    CHECK(inc.empirical);

    auto const same = bound_parameter(envelope("x", "x", 1), Grid{1, 100, 0.5}, ctx);
    CHECK(same.T.is_zero());
    CHECK(same.bisection_steps == 0);

    auto const dec_env = envelope("1/(x+2)", "1/(x-2)", 3, Direction::decreasing);
    auto const dec = bound_parameter(dec_env, Grid{3, 1000, 0.25}, ctx);
    CHECK(dec.T.to_double() == Catch::Approx(4.0).margin(1e-5));
    CHECK(dec.margin.sign() > 0);

    CHECK_THROWS_AS(bound_parameter(envelope("1 - 1/x", "x", 1), Grid{1, 100, 1}, ctx), certification_error);
}

TEST_CASE("parameter to window")
{
    CHECK(parameter_to_window(2 * std::numbers::pi) == 7);
    CHECK(parameter_to_window(4.0) == 5);
    CHECK(parameter_to_window(0.0) == 1);
    CHECK(parameter_to_window(0.5) == 1);
    CHECK(parameter_to_window(3.0) == 3);
    CHECK(parameter_to_window(Real::pi(256) * Real::from_int(2, 256)) == 7);
    CHECK(parameter_to_window(R(4.0000001)) == 5);
    CHECK(parameter_to_window(Real(256)) == 1);
    CHECK_THROWS_AS(parameter_to_window(-1.0), usage_error);
}

TEST_CASE("tangent-line bound")
{
    for (double x0 : {1.0, 10.0, 1000.0}) {
        auto const t = tangent_parameter_bound(R(2), R(1), R(x0), ctx);
        CHECK(t.T.to_double() == Catch::Approx(4.0));
    }
    CHECK(tangent_parameter_bound(R(0), R(0.5), R(10), ctx).T.is_zero());

    auto const t = tangent_parameter_bound(R(1), R(0.5), R(10), ctx);
    auto const env = envelope("x^0.5 - x^(-0.5)", "x^0.5 + x^(-0.5)", 10);
    auto const cert = bound_parameter(env, Grid{10, 10000, 2}, ctx);
    INFO("tangent T " << t.T.to_double() << " grid T " << cert.T.to_double());
    CHECK(cert.T <= t.T);

    CHECK_THROWS_AS(tangent_parameter_bound(R(1), R(1.5), R(10), ctx), usage_error);
    CHECK_THROWS_AS(tangent_parameter_bound(R(-1), R(0.5), R(10), ctx), usage_error);
    CHECK_THROWS_AS(tangent_parameter_bound(R(4), R(0.5), R(3), ctx), usage_error);
}

TEST_CASE("tangent bound decreases as x0 grows")
{
    Real previous = Real::infinity(256);
    for (double x0 : {2.0, 5.0, 10.0, 50.0, 200.0, 1000.0, 1e5}) {
        auto const t = tangent_parameter_bound(R(1), R(0.5), R(x0), ctx);
        CHECK(t.T <= previous);
        CHECK(t.T.to_double() > 4.0);
        previous = t.T;
    }
}

TEST_CASE("larger grids never certify a smaller parameter")
{
    auto const env = envelope("x^0.5 - x^(-0.5)", "x^0.5 + x^(-0.5)", 10);
    double const t_coarse = bound_parameter(env, Grid{20, 200, 2}, ctx).T.to_double();
    double const t_fine = bound_parameter(env, Grid{20, 200, 0.5}, ctx).T.to_double();
    double const t_wide = bound_parameter(env, Grid{10, 200, 0.5}, ctx).T.to_double();
    ParameterSearch const search{};
    CHECK(t_fine >= t_coarse - search.tolerance);
    CHECK(t_wide >= t_fine - search.tolerance);
}

TEST_CASE("certified window matches the inferred period")
{
    auto const& e = corpus::get("cos_shift");
    for (auto const& env : e.envelopes) {
        Grid const g{env.domain_start, env.domain_start + 1000, 0.25};
        REQUIRE(env.function);
        CHECK(verify_envelope(env, *env.function, g, ctx).holds);
        auto const cert = bound_parameter(env, g, ctx);
        CHECK(parameter_to_window(cert.T) == 5);
    }
    auto const p = infer_min_odd_period(e.sequence, 1, 5000, 9, ctx);
    REQUIRE(p);
    CHECK(*p <= 5);
}

TEST_CASE("zero parameter only for monotone samples")
{
    auto const env = envelope("x^2", "x^2", 1);
    auto const cert = bound_parameter(env, Grid{1, 30, 0.5}, ctx);
    REQUIRE(cert.T.is_zero());
    auto const pts = cert.grid.points(256);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(parse_expression("x^2").evaluate(pts[i], 256) >= parse_expression("x^2").evaluate(pts[i - 1], 256));
    }
    // Coinciding but non-monotone envelopes need a positive parameter.
    auto const wavy = envelope("x + 2*cos(x)", "x + 2*cos(x)", 1);
    CHECK(bound_parameter(wavy, Grid{1, 100, 0.25}, ctx).T.sign() > 0);
}
