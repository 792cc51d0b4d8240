#pragma once

/**
 * @file report.hpp
 * @brief JSON serialization of reports and results.
 *
 * Extended-precision values are written as decimal strings so no digits are
 * lost; a few fields carry a double alongside for convenience.
 */

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zseries/bounds.hpp"
#include "zseries/envelope.hpp"
#include "zseries/monotonicity.hpp"
#include "zseries/oracle.hpp"
#include "zseries/summation.hpp"

namespace zseries {

using json = nlohmann::json;

inline constexpr int report_digits = 40;
inline constexpr std::size_t sample_violations = 10;

inline json real_json(Real const& r) { return r.to_string(report_digits); }

inline json window_json(Window const& w) { return json::array({w.lo, w.hi}); }

inline json to_json(ZReport const& r)
{
    json violations = json::array();
    for (std::size_t i = 0; i < r.violations.size() && i < sample_violations; ++i) {
        json values = json::array();
        for (auto const& v : r.violations[i].values) {
            values.push_back(real_json(v));
        }
        violations.push_back({{"k", r.violations[i].k}, {"values", values}});
    }
    json j{{"check", check_name(r.check)},
           {"p", r.p},
           {"window", window_json(r.window)},
           {"holds", r.holds},
           {"violation_count", r.violations.size()},
           {"violations", violations},
           {"empirical", true}};
    j["margin"] = r.margin ? real_json(*r.margin) : json(nullptr);
    return j;
}

inline json to_json(SignPatternReport const& r)
{
    std::vector<std::int64_t> sample(r.violations.begin(),
                                     r.violations.begin() +
                                         static_cast<std::ptrdiff_t>(std::min(r.violations.size(), sample_violations)));
    return json{{"check", "sign_pattern"},
                {"p", r.omega},
                {"window", window_json(r.window)},
                {"holds", r.holds},
                {"violation_count", r.violations.size()},
                {"violations", sample},
                {"empirical", true}};
}

inline json to_json(PreconditionRecord const& r)
{
    json j{{"check", r.check},
           {"p", r.p},
           {"window", window_json(r.window)},
           {"holds", r.holds},
           {"violation_count", r.violation_count}};
    j["first_violation"] = r.first_violation ? json(*r.first_violation) : json(nullptr);
    return j;
}

inline json to_json(RemainderBound const& b)
{
    json pre = json::array();
    for (auto const& r : b.preconditions) {
        pre.push_back(to_json(r));
    }
    json j{{"m", b.m},
           {"method", method_name(b.method)},
           {"value", real_json(b.value)},
           {"value_double", b.value.to_double()},
           {"valid", b.valid},
           {"preconditions", pre},
           {"notes", b.notes}};
    if (b.lo && b.hi) {
        j["lo"] = real_json(*b.lo);
        j["hi"] = real_json(*b.hi);
    }
    if (b.raw) {
        j["raw"] = real_json(*b.raw);
    }
    return j;
}

inline json to_json(SummationResult const& r)
{
    return json{{"sum", real_json(r.sum)},
                {"sum_double", r.sum.to_double()},
                {"m", r.m},
                {"bound", to_json(r.bound)},
                {"tolerance", real_json(r.tolerance)},
                {"certified", r.certified},
                {"terms_evaluated", r.terms_evaluated},
                {"assumed_limit_zero", r.assumed_limit_zero},
                {"notes", r.notes}};
}

inline json to_json(EnvelopeReport const& r)
{
    json j{{"holds", r.holds},
           {"points", r.points},
           {"violation_count", r.violation_count},
           {"violations", r.violations},
           {"empirical", true}};
    j["lower_slack"] = r.lower_slack ? real_json(*r.lower_slack) : json(nullptr);
    j["upper_slack"] = r.upper_slack ? real_json(*r.upper_slack) : json(nullptr);
    return j;
}

inline json to_json(ZvCertificate const& c)
{
    return json{{"T", real_json(c.T)},
                {"T_double", c.T.to_double()},
                {"grid", {{"start", c.grid.start}, {"end", c.grid.end}, {"step", c.grid.step}}},
                {"margin", real_json(c.margin)},
                {"empirical", c.empirical},
                {"bisection_steps", c.bisection_steps}};
}

inline json to_json(ReferenceSum const& r)
{
    json j{{"value", real_json(r.value)}, {"source", source_name(r.source)}, {"bits", r.bits}};
    if (r.source == ReferenceSource::far_summation) {
        j["far_index"] = r.far_index;
    }
    if (r.residual_bound) {
        j["residual_bound"] = to_json(*r.residual_bound);
    }
    return j;
}

} // namespace zseries
