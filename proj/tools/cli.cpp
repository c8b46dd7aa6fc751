#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "abelcount/counting.hpp"
#include "abelcount/errors.hpp"
#include "battery.hpp"
#include "report.hpp"

namespace abelcount::cli {

namespace {

struct RunConfig {
    std::string group = "Z/2";
    std::string a = "1";
    std::string bound;
    std::string ladder;
    std::string s;
    std::vector<std::string> lambda;
    std::optional<i64> prime_bound;
    u64 seed = 1;
    std::string format = "tsv";
    int shards = 1;
    int threads = 0;
    i64 height = 30;
    std::string field;
    std::optional<std::string> field_group;
    std::string alpha;
    std::string x;
    i64 samples = 0;
    std::string suite = "quick";
    int only = 0;
};

// "100000", "1e5" or "10^5"
i64 parse_bound(const std::string& tok) {
    auto bad = [&] { return ConfigError("bad bound '" + tok + "'"); };
    auto digits = [&](const std::string& s) {
        if (s.empty() || s.size() > 18 || !std::all_of(s.begin(), s.end(), ::isdigit)) throw bad();
        return std::stoll(s);
    };
    for (const char* sep : {"e", "E", "^"}) {
        const auto at = tok.find(sep);
        if (at == std::string::npos) continue;
        const i64 mant = digits(tok.substr(0, at));
        const i64 exp = digits(tok.substr(at + 1));
        const i64 base = std::string(sep) == "^" ? mant : 10;
        const i64 lead = std::string(sep) == "^" ? 1 : mant;
        if (exp > 18) throw bad();
        i64 v = lead;
        for (i64 i = 0; i < exp; ++i) {
            if (v > (i64{1} << 62) / std::max<i64>(base, 1)) throw bad();
            v *= base;
        }
        if (v < 1) throw bad();
        return v;
    }
    const i64 v = digits(tok);
    if (v < 1) throw bad();
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

LocalConditions build_conditions(const RunConfig& cfg) {
    const auto g = parse_group(cfg.group);
    NormSubgroup a(parse_rational_list(cfg.a));
    std::optional<PlaceSet> s;
    if (!cfg.s.empty()) s = parse_places(cfg.s);
    std::map<Place, LocalPredicate> lambda;
    for (const auto& item : cfg.lambda) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("bad --lambda '" + item + "', expected place:predicate");
        const auto places = parse_places(item.substr(0, colon));
        if (places.size() != 1) throw ConfigError("bad --lambda place '" + item.substr(0, colon) + "'");
        const Place v = *places.begin();
        if (lambda.count(v)) throw ConfigError("repeated --lambda place '" + v.to_string() + "'");
        lambda[v] = parse_predicate(item.substr(colon + 1), g);
    }
    return LocalConditions(g, a, s, lambda);
}

GChar field_character(const std::string& spec) {
    const auto parts = split(spec, ',');
    std::vector<i64> r;
    for (const auto& p : parts) {
        std::size_t used = 0;
        i64 v = 0;
        try {
            v = std::stoll(p, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (p.empty() || used != p.size() || v == 0) throw ConfigError("bad --field radicand '" + p + "'");
        r.push_back(v);
    }
    try {
        if (r.size() == 1) return quadratic_character(r[0]);
        if (r.size() == 2) return biquadratic_character(r[0], r[1]);
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("bad --field '") + spec + "': " + e.what());
    }
    throw ConfigError("bad --field '" + spec + "', expected one or two radicands");
}

GChar field_character(const std::string& spec, const std::optional<std::string>& group) {
    GChar chi = field_character(spec);
    if (group && !(parse_group(*group) == *chi.group))
        throw ConfigError("--field '" + spec + "' has group " + chi.group->to_string() + ", not '" + *group + "'");
    return chi;
}

std::string tuple_string(const std::vector<FactoredRational>& t) {
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "\t" : "") + t[i].to_string();
    return s;
}

void emit(std::ostream& out, const RunConfig& cfg, const json& j, const std::string& tsv) {
    out << (cfg.format == "json" ? dump(j) : tsv);
}

int cmd_count(const RunConfig& cfg, std::ostream& out) {
    const auto conds = build_conditions(cfg);
    std::vector<i64> ladder;
    if (!cfg.ladder.empty())
        for (const auto& tok : split(cfg.ladder, ',')) ladder.push_back(parse_bound(tok));
    else
        ladder.push_back(parse_bound(cfg.bound.empty() ? "1e4" : cfg.bound));
    if (!std::is_sorted(ladder.begin(), ladder.end())) throw ConfigError("--ladder must be ascending");
    CountOptions opts{.shards = cfg.shards, .threads = cfg.threads};
    opts.norm.witness_height = cfg.height;
    auto rep = count_with_conditions(conds, ladder, opts);
    if (cfg.prime_bound) rep.constant = leading_constant(conds, *cfg.prime_bound);
    emit(out, cfg, to_json(rep), to_tsv(rep));
    return 0;
}

int cmd_varpi(const RunConfig& cfg, std::ostream& out) {
    const auto g = parse_group(cfg.group);
    NormSubgroup a(parse_rational_list(cfg.a));
    const Rational w = varpi(g, a);
    json j{{"group", g.to_string()}, {"A", a.to_string()}, {"varpi", to_string(w)}};
    std::string tsv = to_string(w) + "\n";
    if (!cfg.x.empty()) {
        const auto x = parse_rational_list(cfg.x);
        if (static_cast<int>(x.size()) != g.rank())
            throw ConfigError("--x needs " + std::to_string(g.rank()) + " components, got '" + cfg.x + "'");
        const i64 p = cfg.prime_bound.value_or(100'000);
        const auto m = varpi_x(g, a, x, p, cfg.seed, cfg.samples);
        const bool top = is_max_mean(g, a, x);
        j["x"] = cfg.x;
        j["varpi_x"] = approx(m.mean);
        j["std_error"] = approx(m.std_error);
        j["samples"] = m.samples;
        j["in_X"] = top;
        tsv += approx(m.mean) + "\t" + approx(m.std_error) + "\t" + (top ? "in_X" : "not_in_X") + "\n";
    }
    emit(out, cfg, j, tsv);
    return 0;
}

int cmd_x_group(const RunConfig& cfg, std::ostream& out) {
    const auto g = parse_group(cfg.group);
    NormSubgroup a(parse_rational_list(cfg.a));
    const PlaceSet s = cfg.s.empty() ? minimal_admissible(g, a) : parse_places(cfg.s);
    require_admissible(s, g, a);
    const auto x = big_X(g, a, s);
    json elems = json::array();
    std::string tsv;
    for (const auto& t : x.elements) {
        json row = json::array();
        for (const auto& c : t) row.push_back(c.to_string());
        elems.push_back(row);
        tsv += tuple_string(t) + "\n";
    }
    emit(out, cfg, json{{"group", g.to_string()}, {"A", a.to_string()}, {"S", to_string(s)}, {"order", x.order()},
                        {"elements", elems}},
         tsv);
    return 0;
}

int cmd_constant(const RunConfig& cfg, std::ostream& out) {
    const auto conds = build_conditions(cfg);
    const auto k = leading_constant(conds, cfg.prime_bound.value_or(100'000));
    auto j = to_json(k);
    std::string tsv;
    for (const auto& [key, v] : j.items()) tsv += key + "\t" + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
    j["group"] = conds.group().to_string();
    j["A"] = conds.a().to_string();
    j["S"] = to_string(conds.s());
    emit(out, cfg, j, tsv);
    return 0;
}

int cmd_hnp(const RunConfig& cfg, std::ostream& out) {
    const auto chi = field_character(cfg.field, cfg.field_group);
    const bool holds = hnp_holds(chi);
    const auto knot = knot_group(chi);
    emit(out, cfg,
         json{{"field", cfg.field}, {"conductor", chi.conductor()}, {"hnp_holds", holds}, {"knot_group", knot.to_string()}},
         std::string(holds ? "holds" : "fails") + "\t" + knot.to_string() + "\n");
    return 0;
}

int cmd_norm(const RunConfig& cfg, std::ostream& out) {
    const auto chi = field_character(cfg.field, cfg.field_group);
    if (cfg.alpha.empty()) throw ConfigError("norm needs --alpha");
    const NormOptions opts{.witness_height = cfg.height, .attach_witness = true};
    json rows = json::array();
    std::string tsv;
    for (const auto& alpha : parse_rational_list(cfg.alpha)) {
        const auto st = global_norm_status(chi, alpha, opts);
        json row{{"alpha", alpha.to_string()}, {"status", to_string(st.tag)}, {"certificate", to_string(st.certificate)}};
        std::string extra;
        if (st.place) {
            row["place"] = st.place->to_string();
            extra = "place=" + st.place->to_string();
        }
        if (st.witness) {
            row["witness"] = st.witness->to_string();
            extra = "witness=" + st.witness->to_string();
        }
        if (st.obstruction) {
            row["obstruction"] = *st.obstruction;
            extra = "obstruction=" + std::to_string(*st.obstruction);
        }
        rows.push_back(row);
        tsv += alpha.to_string() + "\t" + to_string(st.tag) + "\t" + to_string(st.certificate) +
               (extra.empty() ? "" : "\t" + extra) + "\n";
    }
    emit(out, cfg, json{{"field", cfg.field}, {"statuses", rows}}, tsv);
    return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const Suite suite = parse_suite(cfg.suite);
    if (cfg.only < 0 || cfg.only > 12) throw ConfigError("--only must name a criterion 1..12");
    json rows = json::array();
    const auto results = run_battery(suite, [&](const CriterionResult& r) {
        if (cfg.format != "json") out << format_line(r) << std::endl;
    }, cfg.only);
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        rows.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
    }
    if (cfg.format == "json") out << dump(json{{"suite", cfg.suite}, {"criteria", rows}, {"pass", all}});
    return all ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Counting abelian extensions with norm conditions", "abelcount"};
    app.require_subcommand(1);

    auto group_opts = [&](CLI::App* c) {
        c->add_option("--group", cfg.group, "finite abelian group, e.g. \"Z/2 x Z/4\"");
        c->add_option("--A", cfg.a, "generators of the norm subgroup, e.g. \"-1,5\"");
    };
    auto place_opts = [&](CLI::App* c) {
        c->add_option("--S", cfg.s, "finite set of places, e.g. \"inf,2,3\"");
        c->add_option("--lambda", cfg.lambda, "local condition place:predicate (repeatable)")->take_all();
    };
    auto format_opt = [&](CLI::App* c) {
        c->add_option("--format", cfg.format, "json or tsv")->check(CLI::IsMember({"json", "tsv"}));
    };

    auto* count = app.add_subcommand("count", "count sub-G-characters by conductor");
    group_opts(count);
    place_opts(count);
    format_opt(count);
    count->add_option("--B", cfg.bound, "conductor bound");
    count->add_option("--ladder", cfg.ladder, "ascending bounds, e.g. \"1e4,1e5,1e6\"");
    count->add_option("--P", cfg.prime_bound, "also report the leading constant truncated at P");
    count->add_option("--shards", cfg.shards, "conductor intervals")->check(CLI::PositiveNumber);
    count->add_option("--threads", cfg.threads, "worker threads, 0 for automatic")->check(CLI::NonNegativeNumber);
    count->add_option("--height", cfg.height, "witness search height")->check(CLI::Range(i64{0}, kWitnessHeightCap));

    auto* vp = app.add_subcommand("varpi", "the exponent invariant, optionally the mean attached to x");
    group_opts(vp);
    format_opt(vp);
    vp->add_option("--x", cfg.x, "one class per cyclic factor");
    vp->add_option("--P", cfg.prime_bound, "prime bound for the mean");
    vp->add_option("--seed", cfg.seed, "sampling seed");
    vp->add_option("--samples", cfg.samples, "sampled primes, 0 for all")->check(CLI::NonNegativeNumber);

    auto* xg = app.add_subcommand("x-group", "elements of X(Q, G, A)");
    group_opts(xg);
    format_opt(xg);
    xg->add_option("--S", cfg.s, "finite set of places");

    auto* cst = app.add_subcommand("constant", "leading constant of the counting function");
    group_opts(cst);
    place_opts(cst);
    format_opt(cst);
    cst->add_option("--P", cfg.prime_bound, "Euler product truncation (>= 1000)");

    auto* hnp = app.add_subcommand("hnp", "Hasse norm principle for one extension");
    format_opt(hnp);
    hnp->add_option("--group", cfg.field_group, "optional check on the field's group");
    hnp->add_option("--field", cfg.field, "radicands \"a\" or \"a,b\"")->required();

    auto* nrm = app.add_subcommand("norm", "global norm statuses");
    format_opt(nrm);
    nrm->add_option("--group", cfg.field_group, "optional check on the field's group");
    nrm->add_option("--field", cfg.field, "radicands \"a\" or \"a,b\"")->required();
    nrm->add_option("--alpha", cfg.alpha, "rationals, e.g. \"25,16\"")->required();
    nrm->add_option("--height", cfg.height, "witness search height")->check(CLI::Range(i64{0}, kWitnessHeightCap));

    auto* ver = app.add_subcommand("verify", "acceptance battery");
    format_opt(ver);
    ver->add_option("suite", cfg.suite, "quick or full");
    ver->add_option("--only", cfg.only, "run a single criterion");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (count->parsed()) return cmd_count(cfg, out);
        if (vp->parsed()) return cmd_varpi(cfg, out);
        if (xg->parsed()) return cmd_x_group(cfg, out);
        if (cst->parsed()) return cmd_constant(cfg, out);
        if (hnp->parsed()) return cmd_hnp(cfg, out);
        if (nrm->parsed()) return cmd_norm(cfg, out);
        if (ver->parsed()) return cmd_verify(cfg, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace abelcount::cli
