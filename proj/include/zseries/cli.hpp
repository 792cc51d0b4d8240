#pragma once

/**
 * @file cli.hpp
 * @brief The `zseries` command-line front end.
 *
 *     zseries check  (--series FILE | --corpus ID) [--p P] [--from N] [--to N] ...
 *     zseries sum    (--series FILE | --corpus ID) --tol T --assume-limit-zero [--method M] [--omega W]
 *     zseries bounds (--series FILE | --corpus ID) --m A..B [--omega W] [--method M]
 *     zseries zv     (--series FILE | --corpus ID) [--grid-from X] [--grid-to X] [--grid-step H]
 *     zseries corpus list | export ID [--out FILE]
 *
 * Exit codes: 0 ok, 1 a mathematical verdict is false, 2 usage or input
 * error, 3 summation not certified.
 */

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "zseries/bounds.hpp"
#include "zseries/corpus.hpp"
#include "zseries/envelope.hpp"
#include "zseries/monotonicity.hpp"
#include "zseries/oracle.hpp"
#include "zseries/report.hpp"
#include "zseries/series_io.hpp"
#include "zseries/summation.hpp"

namespace zseries::cli {

enum ExitCode : int { exit_ok = 0, exit_false = 1, exit_usage = 2, exit_uncertified = 3 };

inline constexpr char const* precision_env = "ZSERIES_PRECISION_BITS";
inline constexpr std::int64_t default_p_max = 15;
inline constexpr std::int64_t default_span = 1000;

struct Loaded {
    TermSequence sequence;
    std::optional<std::int64_t> omega;
    std::vector<EnvelopePair> envelopes;
    ClosedSum closed_sum;
    std::string source;
};

inline Loaded load(std::string const& series_file, std::string const& corpus_id)
{
    if (series_file.empty() == corpus_id.empty()) {
        throw usage_error("give exactly one of --series FILE or --corpus ID");
    }
    if (!corpus_id.empty()) {
        auto const& e = corpus::get(corpus_id);
        return Loaded{e.sequence, e.omega, e.envelopes, e.closed_sum, "corpus:" + corpus_id};
    }
    auto def = load_series_file(series_file);
    return Loaded{std::move(def.sequence), def.omega, std::move(def.envelopes), {}, series_file};
}

/// --precision, else $ZSERIES_PRECISION_BITS, else 256.
inline PrecisionContext resolve_precision(std::optional<long long> flag)
{
    long long bits = 256;
    if (flag) {
        bits = *flag;
    } else if (char const* env = std::getenv(precision_env); env && *env) {
        char* end = nullptr;
        bits = std::strtoll(env, &end, 10);
        if (*end != '\0') {
            throw usage_error(std::string(precision_env) + " must be an integer, got '" + env + "'");
        }
    }
    if (bits < 64 || bits > (1 << 20)) {
        throw usage_error("precision must be between 64 and 1048576 bits");
    }
    PrecisionContext ctx{static_cast<unsigned>(bits)};
    ctx.validate();
    return ctx;
}

inline BoundMethod parse_method(std::string const& s)
{
    if (s == "leibniz") {
        return BoundMethod::leibniz;
    }
    if (s == "proof" || s == "z" || s == "z_simple" || s == "z_proof") {
        return BoundMethod::z_simple;
    }
    if (s == "stated" || s == "z_stated") {
        return BoundMethod::z_stated;
    }
    if (s == "improved" || s == "z_improved") {
        return BoundMethod::z_improved;
    }
    if (s == "enclosure") {
        return BoundMethod::enclosure;
    }
    if (s == "half" || s == "half_upper") {
        return BoundMethod::half_upper;
    }
    if (s == "half_lower") {
        return BoundMethod::half_lower;
    }
    if (s == "delta" || s == "delta_upper") {
        return BoundMethod::delta_upper;
    }
    if (s == "delta_lower") {
        return BoundMethod::delta_lower;
    }
    throw usage_error("unknown method '" + s +
                      "' (leibniz, proof, stated, improved, enclosure, half, delta)");
}

/// "a..b" or "a".
inline std::pair<std::int64_t, std::int64_t> parse_range(std::string const& s)
{
    auto const to_int = [&](std::string const& t) {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(t, &pos);
        } catch (std::exception const&) {
            throw usage_error("bad index range '" + s + "'");
        }
        if (pos != t.size()) {
            throw usage_error("bad index range '" + s + "'");
        }
        return static_cast<std::int64_t>(v);
    };
    auto const dots = s.find("..");
    if (dots == std::string::npos) {
        auto const v = to_int(s);
        return {v, v};
    }
    auto const lo = to_int(s.substr(0, dots));
    auto const hi = to_int(s.substr(dots + 2));
    if (hi < lo) {
        throw usage_error("empty index range '" + s + "'");
    }
    return {lo, hi};
}

inline Real parse_positive(std::string const& text, PrecisionContext const& ctx, char const* what)
{
    Real v = Real::from_string(text, ctx);
    if (!(v.sign() > 0)) {
        throw usage_error(std::string(what) + " must be positive");
    }
    return v;
}

/// Period 2ω-1 from --omega, the series file, or inference over [start, start+999].
inline std::pair<std::int64_t, bool> resolve_omega(Loaded const& in, std::optional<std::int64_t> flag,
                                                   PrecisionContext const& ctx)
{
    if (flag) {
        if (*flag < 1) {
            throw usage_error("--omega must be >= 1");
        }
        return {*flag, false};
    }
    if (in.omega) {
        return {*in.omega, false};
    }
    std::int64_t const lo = in.sequence.start();
    std::int64_t hi = lo + default_span - 1;
    if (auto last = in.sequence.last_index()) {
        hi = std::min(hi, *last);
    }
    auto const p = infer_min_odd_period(in.sequence, lo, hi, default_p_max, ctx);
    if (!p) {
        throw usage_error("no odd period <= " + std::to_string(default_p_max) +
                          " found; pass --omega explicitly");
    }
    return {(*p + 1) / 2, true};
}

struct Outcome {
    json report;
    int code = exit_ok;
};

inline json base_report(std::string const& command, std::vector<std::string> const& argv)
{
    return json{{"command", command},
                {"argv", argv},
                {"inputs", json::object()},
                {"outputs", json::object()},
                {"warnings", json::array()}};
}

// ---- check ------------------------------------------------------------------

struct CheckArgs {
    std::string series, corpus;
    std::optional<std::int64_t> p, from, to, sign_pattern;
    std::int64_t p_max = default_p_max;
    std::int64_t stride = 1;
    bool convexity = false;
    bool slow_decay = false;
};

inline Outcome cmd_check(CheckArgs const& a, PrecisionContext const& ctx, std::vector<std::string> const& argv,
                         std::ostream& text)
{
    auto const in = load(a.series, a.corpus);
    auto const& seq = in.sequence;
    Outcome o{base_report("check", argv)};
    std::int64_t const lo = a.from.value_or(seq.start());
    std::int64_t hi = a.to.value_or(lo + default_span - 1);
    if (auto last = seq.last_index(); last && !a.to) {
        hi = std::min(hi, *last);
    }
    o.report["inputs"] = {{"series", seq.name()}, {"source", in.source}, {"window", {lo, hi}},
                          {"precision", ctx.bits}};

    json reports = json::array();
    bool all = true;
    std::int64_t p = 1;
    if (a.p) {
        p = *a.p;
        o.report["inputs"]["p"] = p;
    } else {
        auto const inferred = infer_min_odd_period(seq, lo, hi, a.p_max, ctx);
        o.report["outputs"]["inferred_period"] = inferred ? json(*inferred) : json(nullptr);
        o.report["inputs"]["p_max"] = a.p_max;
        text << "inferred period: " << (inferred ? std::to_string(*inferred) : "none") << " (p_max " << a.p_max
             << ")\n";
        if (!inferred) {
            all = false;
        }
        p = inferred.value_or(a.p_max);
    }
    auto const z = check_z_monotone(seq, p, lo, hi, ctx);
    reports.push_back(to_json(z));
    all = all && z.holds;
    auto const print = [&](std::string const& what, bool holds, std::size_t count, std::optional<std::int64_t> k) {
        text << std::left << std::setw(22) << what << (holds ? "holds" : "FAILS");
        if (!holds) {
            text << "  (" << count << " violations, first at k=" << (k ? std::to_string(*k) : "?") << ")";
        }
        text << "\n";
    };
    auto const first = [](ZReport const& r) {
        return r.violations.empty() ? std::optional<std::int64_t>{} : r.violations.front().k;
    };
    print("z_monotone(p=" + std::to_string(p) + ")", z.holds, z.violations.size(), first(z));

    if (a.convexity) {
        auto const c = check_convexity(seq, lo, hi, ctx, a.stride);
        reports.push_back(to_json(c));
        all = all && c.holds;
        print("convexity(s=" + std::to_string(a.stride) + ")", c.holds, c.violations.size(), first(c));
    }
    if (a.slow_decay) {
        auto const s = check_slow_decay(seq, p, lo, hi, ctx);
        reports.push_back(to_json(s));
        all = all && s.holds;
        print("slow_decay(p=" + std::to_string(p) + ")", s.holds, s.violations.size(), first(s));
    }
    if (a.sign_pattern) {
        auto const s = check_sign_pattern(seq, *a.sign_pattern, lo, hi, ctx);
        reports.push_back(to_json(s));
        all = all && s.holds;
        print("sign_pattern(w=" + std::to_string(*a.sign_pattern) + ")", s.holds, s.violations.size(),
              s.violations.empty() ? std::optional<std::int64_t>{} : s.violations.front());
    }
    o.report["outputs"]["reports"] = reports;
    o.report["outputs"]["holds"] = all;
    o.report["warnings"].push_back("finite-window check on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                   "]: an empirical certificate only");
    o.code = all ? exit_ok : exit_false;
    return o;
}

// ---- sum --------------------------------------------------------------------

struct SumArgs {
    std::string series, corpus;
    std::string tol;
    std::string method = "proof";
    std::optional<std::int64_t> omega;
    std::int64_t max_index = 10'000'000;
    std::int64_t tail_window = 256;
    bool assume_limit_zero = false;
};

inline Outcome cmd_sum(SumArgs const& a, PrecisionContext const& ctx, std::vector<std::string> const& argv,
                       std::ostream& text)
{
    if (!a.assume_limit_zero) {
        throw usage_error("sum requires --assume-limit-zero: the terms must tend to zero, which cannot be checked");
    }
    if (a.tol.empty()) {
        throw usage_error("sum requires --tol");
    }
    auto const in = load(a.series, a.corpus);
    Real const tol = parse_positive(a.tol, ctx, "--tol");
    BoundMethod const method = parse_method(a.method);
    auto const [omega, inferred] = resolve_omega(in, a.omega, ctx);
    if (a.max_index < in.sequence.start()) {
        throw usage_error("--max-index is before the series start");
    }

    Outcome o{base_report("sum", argv)};
    o.report["inputs"] = {{"series", in.sequence.name()}, {"source", in.source}, {"omega", omega},
                          {"omega_inferred", inferred}, {"tolerance", a.tol}, {"method", method_name(method)},
                          {"precision", ctx.bits}, {"max_index", a.max_index}};
    o.report["warnings"].push_back("lim a_n = 0 asserted by the caller (--assume-limit-zero), not verified");
    if (method == BoundMethod::z_stated) {
        o.report["warnings"].push_back("stated Z-bound sums 2*omega terms; the proof variant needs only 2*omega-1");
    }
    SummationOptions so;
    so.max_index = a.max_index;
    so.tail_window = a.tail_window;
    auto const r = sum_to_tolerance(in.sequence, omega, tol, method, ctx, true, so);
    o.report["outputs"] = to_json(r);

    text << "series     " << in.sequence.name() << " (omega " << omega << (inferred ? ", inferred" : "") << ")\n"
         << "sum        " << r.sum.to_string(30) << "\n"
         << "m          " << r.m << "\n"
         << "bound      " << method_name(r.bound.method) << " = " << r.bound.value.to_string(12)
         << (r.bound.valid ? "" : " (preconditions fail)") << "\n"
         << "certified  " << (r.certified ? "yes" : "NO") << "\n";
    for (auto const& n : r.notes) {
        text << "note: " << n << "\n";
    }
    o.code = r.certified ? exit_ok : exit_uncertified;
    return o;
}

// ---- bounds -----------------------------------------------------------------

struct BoundsArgs {
    std::string series, corpus;
    std::string m = "";
    std::optional<std::int64_t> omega;
    std::string method;
    std::string oracle_tol = "1e-12";
    std::int64_t oracle_max_index = 10'000'000;
    std::int64_t tail_window = 64;
    bool slow_decay = false;
};

inline Outcome cmd_bounds(BoundsArgs const& a, PrecisionContext const& ctx, std::vector<std::string> const& argv,
                          std::ostream& text)
{
    if (a.m.empty()) {
        throw usage_error("bounds requires --m A..B");
    }
    auto const in = load(a.series, a.corpus);
    auto const& seq = in.sequence;
    auto const [m_lo, m_hi] = parse_range(a.m);
    if (m_lo < seq.start()) {
        throw usage_error("--m must start at or after the series start " + std::to_string(seq.start()));
    }
    auto const [omega, inferred] = resolve_omega(in, a.omega, ctx);
    std::int64_t const p = 2 * omega - 1;
    std::optional<BoundMethod> only;
    if (!a.method.empty()) {
        only = parse_method(a.method);
    }
    auto const wanted = [&](std::initializer_list<BoundMethod> ms) {
        if (!only) {
            return true;
        }
        for (auto m : ms) {
            if (m == *only) {
                return true;
            }
        }
        return false;
    };

    Outcome o{base_report("bounds", argv)};
    o.report["inputs"] = {{"series", seq.name()}, {"source", in.source}, {"omega", omega},
                          {"omega_inferred", inferred}, {"m", {m_lo, m_hi}}, {"precision", ctx.bits},
                          {"oracle_tol", a.oracle_tol}};
    if (only) {
        o.report["inputs"]["method"] = method_name(*only);
    }

    OracleOptions oo;
    oo.max_index = a.oracle_max_index;
    auto const ref = reference_sum(seq, omega, parse_positive(a.oracle_tol, ctx, "--oracle-tol"), ctx,
                                   in.closed_sum, oo);
    Real const oracle_err = ref.residual_bound ? ref.residual_bound->value : Real(ref.bits);
    auto const remainders = reference_remainders(seq, ref, m_lo, m_hi);
    o.report["outputs"]["reference"] = to_json(ref);
    if (wanted({BoundMethod::z_stated})) {
        o.report["warnings"].push_back(
            "z_stated sums 2*omega terms as printed; z_simple is the 2*omega-1 term bound the proof gives");
    }

    BoundOptions const bo{a.tail_window};
    json rows = json::array();
    bool all_sound = true;
    text << std::left << std::setw(8) << "m" << std::setw(16) << "oracle R_m";
    bool header_done = false;
    std::ostringstream body;

    for (std::int64_t m = m_lo; m <= m_hi; ++m) {
        Real const& R = remainders[static_cast<std::size_t>(m - m_lo)];
        Real const absR = abs(R);
        std::vector<RemainderBound> bs;
        json skipped = json::array();
        auto const attempt = [&](auto&& f) {
            try {
                f();
            } catch (error const& e) {
                skipped.push_back(e.what());
            }
        };
        if (wanted({BoundMethod::leibniz})) {
            attempt([&] { bs.push_back(leibniz_bound(seq, m, ctx, bo)); });
        }
        if (wanted({BoundMethod::z_simple})) {
            attempt([&] { bs.push_back(z_bound(seq, m, omega, ctx, ZVariant::proof, bo)); });
        }
        if (wanted({BoundMethod::z_stated})) {
            attempt([&] { bs.push_back(z_bound(seq, m, omega, ctx, ZVariant::stated, bo)); });
        }
        if (wanted({BoundMethod::z_improved})) {
            attempt([&] { bs.push_back(z_bound_improved(seq, m, omega, ctx, bo)); });
        }
        if (wanted({BoundMethod::enclosure})) {
            attempt([&] { bs.push_back(remainder_enclosure(seq, m, omega, ctx, bo)); });
        }
        if (wanted({BoundMethod::half_lower, BoundMethod::half_upper})) {
            attempt([&] {
                auto [lo, up] = half_bounds(seq, m, ctx, bo);
                bs.push_back(std::move(lo));
                bs.push_back(std::move(up));
            });
        }
        if (wanted({BoundMethod::delta_lower, BoundMethod::delta_upper})) {
            attempt([&] {
                auto [lo, up] = delta_bounds(seq, m, p, ctx, a.slow_decay, bo);
                bs.push_back(std::move(lo));
                bs.push_back(std::move(up));
            });
        }

        json row{{"m", m}, {"oracle_remainder", real_json(R)}, {"oracle_abs", absR.to_double()}};
        json bj = json::array();
        json sound = json::object();
        bool row_sound = true;
        if (!header_done) {
            for (auto const& b : bs) {
                text << std::setw(14) << method_name(b.method);
            }
            text << "sound\n";
            header_done = true;
        }
        body << std::left << std::setw(8) << m << std::setw(16) << R.to_string(8);
        for (auto const& b : bs) {
            bj.push_back(to_json(b));
            bool ok = true;
            if (b.valid) {
                if (b.method == BoundMethod::enclosure) {
                    ok = *b.lo - oracle_err <= R && R <= *b.hi + oracle_err;
                } else if (b.method == BoundMethod::half_lower || b.method == BoundMethod::delta_lower) {
                    ok = absR + oracle_err >= b.value;
                } else {
                    ok = absR - oracle_err <= b.value;
                }
                sound[method_name(b.method)] = ok;
            } else {
                sound[method_name(b.method)] = nullptr;
            }
            row_sound = row_sound && ok;
            body << std::setw(14) << (b.value.to_string(6) + (b.valid ? "" : "*"));
        }
        body << (row_sound ? "yes" : "NO") << "\n";
        row["bounds"] = bj;
        row["sound"] = sound;
        row["all_sound"] = row_sound;
        if (!skipped.empty()) {
            row["skipped"] = skipped;
        }
        all_sound = all_sound && row_sound;
        rows.push_back(row);
    }
    text << body.str() << "(* = preconditions fail on the tail window; not used for soundness)\n";
    o.report["outputs"]["rows"] = rows;
    o.report["outputs"]["all_sound"] = all_sound;
    o.code = all_sound ? exit_ok : exit_false;
    return o;
}

// ---- zv ---------------------------------------------------------------------

struct ZvArgs {
    std::string series, corpus;
    std::optional<std::int64_t> envelope;
    std::optional<double> grid_from, grid_to;
    double grid_step = 0.25;
    double grid_span = 1000.0;
    double t_max = 100.0;
    double bisect_tol = 1e-6;
};

inline Outcome cmd_zv(ZvArgs const& a, PrecisionContext const& ctx, std::vector<std::string> const& argv,
                      std::ostream& text)
{
    auto const in = load(a.series, a.corpus);
    if (in.envelopes.empty()) {
        throw usage_error("series '" + in.sequence.name() + "' has no envelopes");
    }
    Outcome o{base_report("zv", argv)};
    o.report["inputs"] = {{"series", in.sequence.name()}, {"source", in.source}, {"precision", ctx.bits},
                          {"t_max", a.t_max}, {"bisection_tolerance", a.bisect_tol}};
    o.report["warnings"].push_back("envelope certificates are checked on a finite grid only");

    json results = json::array();
    bool all = true;
    for (std::size_t i = 0; i < in.envelopes.size(); ++i) {
        if (a.envelope && static_cast<std::size_t>(*a.envelope) != i) {
            continue;
        }
        auto const& env = in.envelopes[i];
        Grid g{a.grid_from.value_or(env.domain_start), 0.0, a.grid_step};
        g.end = a.grid_to.value_or(g.start + a.grid_span);
        json r{{"index", i},
               {"direction", direction_name(env.direction)},
               {"lower", env.lower.to_string()},
               {"upper", env.upper.to_string()},
               {"from", env.domain_start},
               {"grid", {{"start", g.start}, {"end", g.end}, {"step", g.step}}}};
        text << "envelope " << i << " (" << direction_name(env.direction) << "): " << env.lower.to_string()
             << " <= f <= " << env.upper.to_string() << "\n";

        std::optional<Expression> f = env.function;
        if (!f && env.direction == Direction::decreasing) {
            if (auto const* e = in.sequence.closed_form_expression()) {
                f = *e;
            }
        }
        if (f) {
            auto const v = verify_envelope(env, *f, g, ctx);
            r["function"] = f->to_string();
            r["verification"] = to_json(v);
            all = all && v.holds;
            text << "  enclosure of " << f->to_string() << ": " << (v.holds ? "holds" : "FAILS") << " on "
                 << v.points << " points\n";
        } else {
            r["verification"] = nullptr;
            o.report["warnings"].push_back("envelope " + std::to_string(i) + " has no function to verify against");
        }
        try {
            auto const cert = bound_parameter(env, g, ctx, ParameterSearch{a.t_max, a.bisect_tol, 0});
            std::int64_t const w = parameter_to_window(cert.T);
            r["certificate"] = to_json(cert);
            r["window"] = w;
            text << "  T = " << cert.T.to_string(12) << ", margin " << cert.margin.to_string(6) << ", window Z("
                 << w << ")\n";
        } catch (certification_error const& e) {
            r["certificate"] = nullptr;
            r["window"] = nullptr;
            r["error"] = e.what();
            all = false;
            text << "  no certificate: " << e.what() << "\n";
        }
        results.push_back(r);
    }
    if (results.empty()) {
        throw usage_error("--envelope index out of range");
    }
    o.report["outputs"]["envelopes"] = results;
    o.report["outputs"]["holds"] = all;
    o.code = all ? exit_ok : exit_false;
    return o;
}

// ---- driver -----------------------------------------------------------------

inline int run(int argc, char const* const* argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"Certified summation and remainder bounds for Z-monotone alternating series", "zseries"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    bool as_json = false;
    long long precision = 0;
    auto const add_common = [&](CLI::App* sub, std::string& series, std::string& corpus) {
        sub->add_option("--series", series, "series-definition JSON file");
        sub->add_option("--corpus", corpus, "built-in series id");
        sub->add_flag("--json", as_json, "print the report as JSON");
        sub->add_option("--precision", precision, "working precision in bits");
    };

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "finite-window monotonicity checks");
    add_common(check, ca.series, ca.corpus);
    std::int64_t c_p = 0, c_from = 0, c_to = 0, c_sign = 0;
    auto* o_p = check->add_option("--p", c_p, "period to test (default: smallest odd period found)");
    auto* o_from = check->add_option("--from", c_from, "first index of the window");
    auto* o_to = check->add_option("--to", c_to, "last index of the window");
    auto* o_sign = check->add_option("--sign-pattern", c_sign, "check sign(a_k) = -sign(a_{k+w})");
    check->add_option("--p-max", ca.p_max, "largest odd period tried when inferring");
    check->add_flag("--convexity", ca.convexity, "also check convexity");
    check->add_option("--stride", ca.stride, "convexity stride");
    check->add_flag("--slow-decay", ca.slow_decay, "also check a_k <= 2 a_{k+p}");

    SumArgs sa;
    auto* sum = app.add_subcommand("sum", "sum until a bound certifies the tolerance");
    add_common(sum, sa.series, sa.corpus);
    std::int64_t s_omega = 0;
    sum->add_option("--tol", sa.tol, "target tolerance");
    sum->add_option("--method", sa.method, "leibniz, proof, stated, improved, enclosure, half, delta");
    auto* o_somega = sum->add_option("--omega", s_omega, "window parameter (period 2*omega-1)");
    sum->add_option("--max-index", sa.max_index, "give up after this index");
    sum->add_option("--tail-window", sa.tail_window, "terms over which preconditions are checked");
    sum->add_flag("--assume-limit-zero", sa.assume_limit_zero, "assert that the terms tend to zero");

    BoundsArgs ba;
    auto* bounds = app.add_subcommand("bounds", "tabulate remainder bounds against the oracle");
    add_common(bounds, ba.series, ba.corpus);
    std::int64_t b_omega = 0;
    bounds->add_option("--m", ba.m, "cut index or range A..B");
    auto* o_bomega = bounds->add_option("--omega", b_omega, "window parameter (period 2*omega-1)");
    bounds->add_option("--method", ba.method, "restrict to one bound family");
    bounds->add_option("--oracle-tol", ba.oracle_tol, "oracle tolerance when no closed form is known");
    bounds->add_option("--oracle-max-index", ba.oracle_max_index, "oracle summation limit");
    bounds->add_option("--tail-window", ba.tail_window, "terms over which preconditions are checked");
    bounds->add_flag("--slow-decay", ba.slow_decay, "use the slow-decay variant of the delta bounds");

    ZvArgs za;
    auto* zv = app.add_subcommand("zv", "certify envelope parameters");
    add_common(zv, za.series, za.corpus);
    std::int64_t z_env = 0;
    double z_from = 0, z_to = 0;
    auto* o_env = zv->add_option("--envelope", z_env, "only this envelope (0-based)");
    auto* o_gfrom = zv->add_option("--grid-from", z_from, "first grid point");
    auto* o_gto = zv->add_option("--grid-to", z_to, "last grid point");
    zv->add_option("--grid-step", za.grid_step, "grid spacing");
    zv->add_option("--t-max", za.t_max, "largest parameter tried");
    zv->add_option("--bisect-tol", za.bisect_tol, "bisection tolerance");

    auto* corpus_cmd = app.add_subcommand("corpus", "built-in series");
    corpus_cmd->require_subcommand(1);
    auto* list = corpus_cmd->add_subcommand("list", "list ids");
    list->add_flag("--json", as_json, "print JSON");
    auto* export_cmd = corpus_cmd->add_subcommand("export", "print a series definition");
    std::string export_id, export_out;
    export_cmd->add_option("id", export_id, "corpus id")->required();
    export_cmd->add_option("--out", export_out, "write to this file");

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return exit_ok;
    } catch (CLI::CallForAllHelp const&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (CLI::ParseError const& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (corpus_cmd->parsed()) {
            if (list->parsed()) {
                auto const ids = corpus::list();
                if (as_json) {
                    out << json{{"command", "corpus list"}, {"ids", ids}}.dump(2) << "\n";
                } else {
                    for (auto const& id : ids) {
                        out << id << "  " << corpus::get(id).notes << "\n";
                    }
                }
                return exit_ok;
            }
            json const j = entry_to_json(corpus::get(export_id));
            if (export_out.empty()) {
                out << j.dump(2) << "\n";
            } else {
                std::ofstream f(export_out);
                if (!f) {
                    throw usage_error("cannot write '" + export_out + "'");
                }
                f << j.dump(2) << "\n";
            }
            return exit_ok;
        }

        auto const ctx = resolve_precision(precision != 0 ? std::optional<long long>(precision) : std::nullopt);
        std::ostringstream text;
        Outcome o;
        if (check->parsed()) {
            if (*o_p) {
                ca.p = c_p;
            }
            if (*o_from) {
                ca.from = c_from;
            }
            if (*o_to) {
                ca.to = c_to;
            }
            if (*o_sign) {
                ca.sign_pattern = c_sign;
            }
            o = cmd_check(ca, ctx, args, text);
        } else if (sum->parsed()) {
            if (*o_somega) {
                sa.omega = s_omega;
            }
            o = cmd_sum(sa, ctx, args, text);
        } else if (bounds->parsed()) {
            if (*o_bomega) {
                ba.omega = b_omega;
            }
            o = cmd_bounds(ba, ctx, args, text);
        } else if (zv->parsed()) {
            if (*o_env) {
                za.envelope = z_env;
            }
            if (*o_gfrom) {
                za.grid_from = z_from;
            }
            if (*o_gto) {
                za.grid_to = z_to;
            }
            o = cmd_zv(za, ctx, args, text);
        }
        o.report["exit_code"] = o.code;
        if (as_json) {
            out << o.report.dump(2) << "\n";
        } else {
            out << text.str();
            for (auto const& w : o.report["warnings"]) {
                out << "warning: " << w.get<std::string>() << "\n";
            }
        }
        return o.code;
    } catch (usage_error const& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (parse_error const& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (error const& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

} // namespace zseries::cli
