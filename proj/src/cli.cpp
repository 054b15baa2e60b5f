#include "wfix/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "wfix/bounds.hpp"
#include "wfix/experiments.hpp"
#include "wfix/format.hpp"
#include "wfix/mappings.hpp"
#include "wfix/schemes.hpp"
#include "wfix/wspace.hpp"

namespace wfix::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "' expects true/false, got '" + v + "'");
}

std::size_t parse_count(const std::string& what, const std::string& v) {
    const real r = parse_real(v);
    if (!(r >= 1) || r != static_cast<real>(static_cast<std::size_t>(r))) {
        throw ConfigError(what + " must be a positive integer, got '" + v + "'");
    }
    return static_cast<std::size_t>(r);
}

real parse_positive(const std::string& what, const std::string& v) {
    const real r = parse_real(v);
    if (!(r > 0)) throw ConfigError(what + " must be > 0, got '" + v + "'");
    return r;
}

std::string default_mapping(const Space& space) {
    const std::string name = space.name();
    if (name == "tripod") return "tripod-radial:0.5";
    if (name == "halfplane") return "halfplane-contract:0.5";
    return "halving";
}

std::string default_x0(const Space& space) {
    const std::string name = space.name();
    if (name == "tripod") return "A:1";
    if (name == "halfplane") return "1,2";
    return "1";
}

struct Resolved {
    SpacePtr space;
    ContractiveLike mapping;
    std::optional<ApproximateOperator> approx;
    Schedule schedule;
    Point x0;
    InnerSolverConfig inner;
};

Resolved resolve(const RunConfig& cfg, bool allow_perturbed) {
    Resolved r;
    r.space = make_space(cfg.space);
    const std::string mapping = cfg.mapping.empty() ? default_mapping(*r.space) : cfg.mapping;
    if (mapping.rfind("perturb:", 0) == 0) {
        if (!allow_perturbed) throw ConfigError("perturbed mappings are only accepted by datadep");
        ContractiveLike base;
        r.approx = make_approximate(mapping, r.space, &base);
        r.mapping = std::move(base);
    } else {
        r.mapping = make_mapping(mapping, r.space);
    }
    r.schedule = make_schedule(cfg.schedule);
    r.x0 = r.space->parse(cfg.x0.empty() ? default_x0(*r.space) : cfg.x0);
    r.space->validate(r.x0);
    if (!cfg.tolerance.empty()) r.inner.tolerance = parse_positive("tol", cfg.tolerance);
    r.inner.max_iterations = parse_count("max-inner", cfg.max_inner);
    r.inner.mode = parse_inner_mode(cfg.inner_mode);
    r.inner.validate();
    return r;
}

std::size_t n_max_or(const RunConfig& cfg, std::size_t fallback) {
    return cfg.n_max.empty() ? fallback : parse_count("n-max", cfg.n_max);
}

void check_format(const RunConfig& cfg, std::initializer_list<std::string_view> allowed) {
    if (cfg.format.empty()) return;
    if (std::find(allowed.begin(), allowed.end(), cfg.format) == allowed.end()) {
        throw ConfigError("unsupported --format '" + cfg.format + "' for this subcommand");
    }
}

/// Writes to --output when given, otherwise to `out`.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
    if (cfg.output.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + cfg.output + "'");
    f << text;
}

int cmd_table(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    check_format(cfg, {"table", "csv"});
    Resolved r = resolve(cfg, false);
    TableSetup setup{r.space, r.mapping, r.schedule, r.x0, n_max_or(cfg, 50), r.inner, cfg.all_rows};
    const ComparisonTable table = reproduce_table(setup);
    emit(cfg, out, cfg.format == "csv" ? table_csv(table, cfg.digits) : table_text(table, cfg.digits));
    if (!cfg.verify) return kOk;
    const auto mismatches = verify_against_reference(table);
    for (const auto& m : mismatches) {
        err << "mismatch n=" << m.n << " " << m.column << ": expected " << m.expected << " got " << m.actual << '\n';
    }
    out << "verify: " << (mismatches.empty() ? "all 42 cells match" : std::to_string(mismatches.size()) + " mismatches")
        << '\n';
    return mismatches.empty() ? kOk : kCheckFailed;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    check_format(cfg, {"table"});
    Resolved r = resolve(cfg, false);
    const std::size_t horizon = parse_count("horizon", cfg.horizon);
    RaceSetup setup{r.space,
                    r.mapping,
                    r.schedule,
                    r.x0,
                    horizon,
                    parse_positive("threshold", cfg.threshold),
                    r.inner,
                    cfg.literal ? EnvelopeForm::literal : EnvelopeForm::product};
    RaceReport report;
    if (cfg.schemes.empty()) {
        report = rate_race(setup);
    } else if (cfg.schemes.size() == 2) {
        report = compare_pair(setup, parse_scheme(cfg.schemes[0]), parse_scheme(cfg.schemes[1]));
    } else {
        throw ConfigError("compare takes no --scheme or exactly two (lhs, rhs)");
    }
    emit(cfg, out, race_text(report, cfg.digits));
    if (!cfg.assert_faster) return kOk;
    return report.all_faster() ? kOk : kCheckFailed;
}

std::string columns_text(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                         bool csv) {
    std::ostringstream o;
    if (csv) {
        for (std::size_t i = 0; i < header.size(); ++i) o << (i ? "," : "") << header[i];
        o << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) o << (i ? "," : "") << row[i];
            o << '\n';
        }
        return o.str();
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        width[i] = header[i].size();
        for (const auto& row : rows) width[i] = std::max(width[i], row[i].size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) o << "  ";
            o << std::string(width[i] - cells[i].size(), ' ') << cells[i];
        }
        o << '\n';
    };
    line(header);
    for (const auto& row : rows) line(row);
    return o.str();
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    check_format(cfg, {"csv", "table"});
    Resolved r = resolve(cfg, false);
    if (!r.mapping.fixed_point) throw ConfigError("bounds needs a mapping with a known fixed point");
    const Point& p = *r.mapping.fixed_point;
    const std::size_t n_max = n_max_or(cfg, 50);
    const real d0 = r.space->distance(r.x0, p);
    const auto env = bound_sequences(r.schedule, r.mapping.delta, d0, n_max,
                                     cfg.literal ? EnvelopeForm::literal : EnvelopeForm::product);
    const auto isi = run(*r.space, r.mapping, Scheme::implicit_s, r.schedule, r.x0, n_max, r.inner, p).distances();
    const auto iii =
        run(*r.space, r.mapping, Scheme::implicit_ishikawa, r.schedule, r.x0, n_max, r.inner, p).distances();
    const auto imi = run(*r.space, r.mapping, Scheme::implicit_mann, r.schedule, r.x0, n_max, r.inner, p).distances();

    std::vector<std::vector<std::string>> rows;
    rows.reserve(n_max);
    for (std::size_t i = 0; i < n_max; ++i) {
        const int d = cfg.digits;
        rows.push_back({std::to_string(i + 1), format_fixed(env.a[i], d), format_fixed(env.b[i], d),
                        format_fixed(env.c[i], d), format_fixed(env.exp_bound[i], d), format_fixed(isi[i], d),
                        format_fixed(iii[i], d), format_fixed(imi[i], d)});
    }
    emit(cfg, out,
         columns_text({"n", "a_n", "b_n", "c_n", "exp_bound", "isi", "iii", "imi"}, rows, cfg.format != "table"));
    return kOk;
}

std::string datadep_json(const Space& space, const DataDepReport& r, int digits) {
    nlohmann::ordered_json j;
    auto num = [&](real v) { return format_fixed(v, digits); };
    j["epsilon"] = num(r.epsilon);
    j["sampled_epsilon"] = num(r.sampled_epsilon);
    j["delta"] = num(r.delta);
    j["p"] = space.format(r.p, digits);
    j["q"] = space.format(r.q, digits);
    if (r.q_closed_form) j["q_closed_form"] = space.format(*r.q_closed_form, digits);
    j["observed"] = num(r.observed);
    if (r.observed_closed_form) j["observed_closed_form"] = num(*r.observed_closed_form);
    j["bound"] = num(r.bound);
    j["margin"] = num(r.margin);
    j["steps"] = r.steps;
    j["tail_converged"] = r.tail_converged;
    j["recursion_hypothesis"] = r.recursion.hypothesis_holds() ? "holds" : "violated";
    if (r.recursion.first_violation) j["recursion_first_violation"] = *r.recursion.first_violation;
    j["recursion_max_excess"] = num(r.recursion.max_violation);
    j["status"] = std::string(datadep_status_id(r.status));
    return j.dump(2) + "\n";
}

int cmd_datadep(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    check_format(cfg, {"text", "json"});
    Resolved r = resolve(cfg, true);
    if (r.approx && !cfg.perturb.empty()) throw ConfigError("give either a perturb: mapping or --perturb, not both");
    if (!r.approx) {
        if (cfg.perturb.empty()) throw ConfigError("datadep needs --perturb <offset> or a perturb:<base>:<offset> mapping");
        r.approx = perturb(*r.space, r.mapping, cfg.perturb);
    }
    DataDepConfig dd;
    dd.n_max = n_max_or(cfg, dd.n_max);
    dd.inner = r.inner;
    dd.variant = cfg.proof_variant ? DataDepVariant::proof : DataDepVariant::as_stated;
    const Point u0 = cfg.u0.empty() ? r.x0 : r.space->parse(cfg.u0);
    const DataDepReport report = run_datadep(*r.space, r.mapping, *r.approx, r.schedule, r.x0, u0, dd);
    emit(cfg, out,
         cfg.format == "json" ? datadep_json(*r.space, report, cfg.digits) : datadep_text(*r.space, report, cfg.digits));
    switch (report.status) {
        case DataDepStatus::holds:
            return kOk;
        case DataDepStatus::violated:
            return kCheckFailed;
        case DataDepStatus::inconclusive:
            return kInconclusive;
    }
    return kInconclusive;
}

int cmd_axiom_check(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    check_format(cfg, {"text"});
    const SpacePtr space = make_space(cfg.space);
    const real tol = cfg.tolerance.empty() ? real{1e-9} : parse_positive("tol", cfg.tolerance);
    const std::size_t samples = parse_count("samples", cfg.samples);
    const real seed = parse_real(cfg.seed);
    if (!(seed >= 0)) throw ConfigError("seed must be nonnegative");
    const AxiomReport report =
        check_axioms(*space, space->default_sampler(), samples, tol, static_cast<std::uint64_t>(seed));
    std::ostringstream o;
    o << "space=" << space->name() << " samples=" << report.n_samples << " tol=" << format_sci(tol, 1)
      << '\n';
    for (const auto& row : report.rows) {
        o << "axiom " << row.axiom << ": max_violation=" << format_fixed(row.max_violation, cfg.digits);
        if (!row.pass && row.worst_sample) o << " worst_sample=" << *row.worst_sample;
        o << ' ' << (row.pass ? "pass" : "VIOLATED") << '\n';
    }
    o << "result=" << (report.passed() ? "pass" : "fail") << '\n';
    emit(cfg, out, o.str());
    return report.passed() ? kOk : kCheckFailed;
}

// Option names accepted both as flags and as config-file keys.
using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"space", [](RunConfig& c, const std::string& v) { c.space = v; }},
        {"mapping", [](RunConfig& c, const std::string& v) { c.mapping = v; }},
        {"scheme", [](RunConfig& c, const std::string& v) { c.schemes = split(v, ','); }},
        {"schedule", [](RunConfig& c, const std::string& v) { c.schedule = v; }},
        {"x0", [](RunConfig& c, const std::string& v) { c.x0 = v; }},
        {"u0", [](RunConfig& c, const std::string& v) { c.u0 = v; }},
        {"n-max", [](RunConfig& c, const std::string& v) { c.n_max = v; }},
        {"tol", [](RunConfig& c, const std::string& v) { c.tolerance = v; }},
        {"inner-mode", [](RunConfig& c, const std::string& v) { c.inner_mode = v; }},
        {"max-inner", [](RunConfig& c, const std::string& v) { c.max_inner = v; }},
        {"output", [](RunConfig& c, const std::string& v) { c.output = v; }},
        {"format", [](RunConfig& c, const std::string& v) { c.format = v; }},
        {"digits",
         [](RunConfig& c, const std::string& v) {
             const real d = parse_real(v);
             if (!(d >= 0 && d <= 30) || d != static_cast<int>(d)) throw ConfigError("digits must be in 0..30");
             c.digits = static_cast<int>(d);
         }},
        {"verify", [](RunConfig& c, const std::string& v) { c.verify = parse_bool("verify", v); }},
        {"all-rows", [](RunConfig& c, const std::string& v) { c.all_rows = parse_bool("all-rows", v); }},
        {"assert-faster", [](RunConfig& c, const std::string& v) { c.assert_faster = parse_bool("assert-faster", v); }},
        {"horizon", [](RunConfig& c, const std::string& v) { c.horizon = v; }},
        {"threshold", [](RunConfig& c, const std::string& v) { c.threshold = v; }},
        {"literal", [](RunConfig& c, const std::string& v) { c.literal = parse_bool("literal", v); }},
        {"perturb", [](RunConfig& c, const std::string& v) { c.perturb = v; }},
        {"proof-variant", [](RunConfig& c, const std::string& v) { c.proof_variant = parse_bool("proof-variant", v); }},
        {"samples", [](RunConfig& c, const std::string& v) { c.samples = v; }},
        {"seed", [](RunConfig& c, const std::string& v) { c.seed = v; }},
    };
    return table;
}

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    return path;
}

void add_options(CLI::App* sub, RunConfig& cfg, std::vector<std::string> names) {
    sub->add_option("--config")->description("key=value config file; flags override it");
    auto& s = setters();
    for (const auto& name : names) {
        const Setter& set = s.at(name);
        auto* opt = sub->add_option_function<std::vector<std::string>>(
            "--" + name, [&cfg, set, name](const std::vector<std::string>& vals) {
                if (name == "scheme") {
                    cfg.schemes = vals;
                } else {
                    set(cfg, vals.back());
                }
            });
        if (name != "scheme") opt->expected(1);
    }
}

void add_flag(CLI::App* sub, RunConfig& cfg, const std::string& name, const std::string& help) {
    const Setter& set = setters().at(name);
    sub->add_flag_callback("--" + name, [&cfg, set] { set(cfg, "true"); }, help);
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        out[trim(std::string_view(t).substr(0, eq))] = trim(std::string_view(t).substr(eq + 1));
    }
    return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto& s = setters();
    const auto it = s.find(key);
    if (it == s.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, value);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Implicit fixed-point iterations in W-hyperbolic spaces"};
    app.name("wfix");
    app.require_subcommand(1);

    const std::vector<std::string> common{"space",      "mapping", "schedule", "x0",     "n-max", "tol",
                                          "inner-mode", "max-inner", "output", "format", "digits"};
    auto with = [&](std::vector<std::string> extra) {
        std::vector<std::string> all = common;
        all.insert(all.end(), extra.begin(), extra.end());
        return all;
    };

    auto* table = app.add_subcommand("table", "Run the three schemes and print the comparison table");
    add_options(table, cfg, with({}));
    add_flag(table, cfg, "verify", "Check every reference cell at 15 decimals");
    add_flag(table, cfg, "all-rows", "Print every n instead of the reference rows");

    auto* compare = app.add_subcommand("compare", "Rate comparison on traces and envelopes");
    add_options(compare, cfg, with({"scheme", "horizon", "threshold"}));
    add_flag(compare, cfg, "assert-faster", "Exit 1 unless every verdict is 'faster'");
    add_flag(compare, cfg, "literal", "Use the literal power form of the envelopes");

    auto* bounds = app.add_subcommand("bounds", "Envelopes next to the observed distances");
    add_options(bounds, cfg, with({}));
    add_flag(bounds, cfg, "literal", "Use the literal power form of the envelopes");

    auto* datadep = app.add_subcommand("datadep", "Distance between fixed points of T and a perturbation S");
    add_options(datadep, cfg, with({"perturb", "u0"}));
    add_flag(datadep, cfg, "proof-variant", "Apply S instead of T to v_n in the perturbed sequence");

    auto* axioms = app.add_subcommand("axiom-check", "Sample the convexity axioms of a space");
    add_options(axioms, cfg, {"space", "samples", "seed", "tol", "output", "format", "digits"});

    try {
        if (auto path = find_config_path(args)) {
            for (const auto& [k, v] : read_config_file(*path)) apply_setting(cfg, k, v);
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e, out, err);
        } catch (const CLI::CallForAllHelp& e) {
            return app.exit(e, out, err);
        } catch (const CLI::ParseError& e) {
            app.exit(e, out, err);
            return kConfigError;
        }

        if (table->parsed()) return cmd_table(cfg, out, err);
        if (compare->parsed()) return cmd_compare(cfg, out, err);
        if (bounds->parsed()) return cmd_bounds(cfg, out, err);
        if (datadep->parsed()) return cmd_datadep(cfg, out, err);
        if (axioms->parsed()) return cmd_axiom_check(cfg, out, err);
        return kConfigError;
    } catch (const RunFailure& e) {
        err << "scheme failure: " << e.what() << " (last residual " << format_fixed(e.last_residual(), 20) << ")\n";
        return kSchemeFailure;
    } catch (const NonConvergence& e) {
        err << "scheme failure: " << e.what() << '\n';
        return kSchemeFailure;
    } catch (const DegenerateComparison& e) {
        err << "degenerate comparison: " << e.what() << '\n';
        return kInconclusive;
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace wfix::cli
