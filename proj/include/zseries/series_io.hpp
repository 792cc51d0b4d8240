#pragma once

/**
 * @file series_io.hpp
 * @brief Series-definition JSON files.
 *
 *     {
 *       "name": "...",
 *       "start": 1,
 *       "sign": "alternating+" | "alternating-" | {"expr": "..."},
 *       "magnitude": {"expr": "..."}
 *                  | {"pieces": [{"modulus": 6, "residue": 1, "index": "(n+5)/6", "expr": "1/k"}, ...]}
 *                  | {"table": ["1", "0.5", ...]},
 *       "omega": 2,                                   (optional)
 *       "envelopes": [{"lower": "...", "upper": "...", "from": 1, "direction": "inc",
 *                      "function": "..."}]            (optional; a single object is accepted)
 *     }
 */

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zseries/corpus.hpp"
#include "zseries/envelope.hpp"
#include "zseries/error.hpp"
#include "zseries/sequence.hpp"

namespace zseries {

using json = nlohmann::json;

struct SeriesDefinition {
    TermSequence sequence;
    std::optional<std::int64_t> omega;
    std::vector<EnvelopePair> envelopes;
};

namespace detail {

inline json const& require_field(json const& j, char const* key, char const* where)
{
    if (!j.is_object() || !j.contains(key)) {
        throw usage_error(std::string(where) + ": missing \"" + key + "\"");
    }
    return j.at(key);
}

inline std::string require_string(json const& j, char const* key, char const* where)
{
    auto const& v = require_field(j, key, where);
    if (!v.is_string()) {
        throw usage_error(std::string(where) + ": \"" + key + "\" must be a string");
    }
    return v.get<std::string>();
}

inline std::int64_t require_integer(json const& j, char const* key, char const* where)
{
    auto const& v = require_field(j, key, where);
    if (!v.is_number_integer()) {
        throw usage_error(std::string(where) + ": \"" + key + "\" must be an integer");
    }
    return v.get<std::int64_t>();
}

inline SignConvention parse_sign(json const& j)
{
    if (j.is_string()) {
        auto const s = j.get<std::string>();
        if (s == "alternating+") {
            return SignConvention::alternating_plus();
        }
        if (s == "alternating-") {
            return SignConvention::alternating_minus();
        }
        throw usage_error("sign must be \"alternating+\", \"alternating-\" or {\"expr\": ...}");
    }
    return SignConvention::from_expression(parse_expression(require_string(j, "expr", "sign")));
}

inline EnvelopePair parse_envelope(json const& j)
{
    EnvelopePair env{parse_expression(require_string(j, "lower", "envelope")),
                     parse_expression(require_string(j, "upper", "envelope")), 0.0, Direction::increasing,
                     std::nullopt};
    auto const& from = require_field(j, "from", "envelope");
    if (!from.is_number()) {
        throw usage_error("envelope: \"from\" must be a number");
    }
    env.domain_start = from.get<double>();
    env.direction = parse_direction(require_string(j, "direction", "envelope"));
    if (j.contains("function")) {
        env.function = parse_expression(require_string(j, "function", "envelope"));
    }
    return env;
}

} // namespace detail

inline SeriesDefinition parse_series(json const& j)
{
    if (!j.is_object()) {
        throw usage_error("series definition must be a JSON object");
    }
    std::string const name = detail::require_string(j, "name", "series");
    std::int64_t const start = detail::require_integer(j, "start", "series");
    SignConvention sign = detail::parse_sign(detail::require_field(j, "sign", "series"));
    auto const& mag = detail::require_field(j, "magnitude", "series");

    std::optional<TermSequence> seq;
    if (mag.contains("expr")) {
        seq = TermSequence::closed_form(name, start, detail::require_string(mag, "expr", "magnitude"), sign);
    } else if (mag.contains("pieces")) {
        std::vector<PieceRule> rules;
        for (auto const& p : mag.at("pieces")) {
            rules.push_back(PieceRule{detail::require_integer(p, "modulus", "piece"),
                                      detail::require_integer(p, "residue", "piece"),
                                      parse_expression(detail::require_string(p, "index", "piece")),
                                      parse_expression(detail::require_string(p, "expr", "piece"))});
        }
        seq = TermSequence::piecewise(name, start, std::move(rules), sign);
    } else if (mag.contains("table")) {
        std::vector<std::string> values;
        for (auto const& v : mag.at("table")) {
            if (v.is_string()) {
                values.push_back(v.get<std::string>());
            } else if (v.is_number()) {
                values.push_back(v.dump());
            } else {
                throw usage_error("table entries must be numbers or numeric strings");
            }
        }
        seq = TermSequence::table(name, start, std::move(values), sign);
    } else {
        throw usage_error("magnitude needs one of \"expr\", \"pieces\" or \"table\"");
    }

    SeriesDefinition def{std::move(*seq), std::nullopt, {}};
    if (j.contains("omega")) {
        def.omega = detail::require_integer(j, "omega", "series");
    }
    if (j.contains("envelopes")) {
        auto const& e = j.at("envelopes");
        if (e.is_array()) {
            for (auto const& item : e) {
                def.envelopes.push_back(detail::parse_envelope(item));
            }
        } else {
            def.envelopes.push_back(detail::parse_envelope(e));
        }
    }
    return def;
}

inline SeriesDefinition load_series_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw usage_error("cannot open series file '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (json::exception const& e) {
        throw usage_error("invalid JSON in '" + path + "': " + e.what());
    }
    return parse_series(j);
}

inline json envelope_to_json(EnvelopePair const& env)
{
    json j{{"lower", env.lower.to_string()},
           {"upper", env.upper.to_string()},
           {"from", env.domain_start},
           {"direction", direction_name(env.direction)}};
    if (env.function) {
        j["function"] = env.function->to_string();
    }
    return j;
}

inline json series_to_json(TermSequence const& seq, std::optional<std::int64_t> omega = std::nullopt,
                           std::vector<EnvelopePair> const& envelopes = {})
{
    json j;
    j["name"] = seq.name();
    j["start"] = seq.start();
    switch (seq.sign().kind) {
    case SignKind::alternating_plus:
        j["sign"] = "alternating+";
        break;
    case SignKind::alternating_minus:
        j["sign"] = "alternating-";
        break;
    case SignKind::explicit_sign:
        j["sign"] = json{{"expr", seq.sign().expr.to_string()}};
        break;
    }
    if (auto const* e = seq.closed_form_expression()) {
        j["magnitude"] = json{{"expr", e->to_string()}};
    } else if (seq.is_piecewise()) {
        json pieces = json::array();
        for (auto const& p : seq.pieces()) {
            pieces.push_back({{"modulus", p.modulus},
                              {"residue", p.residue},
                              {"index", p.index_map.to_string()},
                              {"expr", p.magnitude.to_string()}});
        }
        j["magnitude"] = json{{"pieces", pieces}};
    } else if (auto const* t = seq.table_values()) {
        j["magnitude"] = json{{"table", *t}};
    } else {
        throw usage_error("sequence '" + seq.name() + "' cannot be exported");
    }
    if (omega) {
        j["omega"] = *omega;
    }
    if (!envelopes.empty()) {
        json env = json::array();
        for (auto const& e : envelopes) {
            env.push_back(envelope_to_json(e));
        }
        j["envelopes"] = env;
    }
    return j;
}

inline json entry_to_json(CorpusEntry const& entry)
{
    return series_to_json(entry.sequence, entry.omega, entry.envelopes);
}

} // namespace zseries
