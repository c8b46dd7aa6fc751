#include "report.hpp"

#include <cstdio>
#include <sstream>

#include "abelcount/errors.hpp"

namespace abelcount::cli {

std::string approx(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "~%.6g", x);
    return buf;
}

double parse_approx(const std::string& text) {
    if (text.size() < 2 || text[0] != '~') throw ConfigError("expected an approximate value, got '" + text + "'");
    std::size_t used = 0;
    double x = 0;
    try {
        x = std::stod(text.substr(1), &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() - 1) throw ConfigError("bad approximate value '" + text + "'");
    return x;
}

namespace {

Rational parse_fraction(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(text));
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::exception&) {
        throw ConfigError("bad fraction '" + text + "'");
    }
}

std::string ratio(i64 num, i64 den) { return den == 0 ? "0" : to_string(Rational(num, den)); }

}  // namespace

json to_json(const ConstantReport& c) {
    return json{{"varpi", to_string(c.varpi)},
                {"gamma", approx(c.gamma)},
                {"unit_factor", c.unit_factor},
                {"local_factor", c.local_factor},
                {"x_order", c.x_order},
                {"s_sum", to_string(c.s_sum)},
                {"s_zeta", approx(c.s_zeta)},
                {"P", c.prime_bound},
                {"euler", approx(c.euler)},
                {"euler_half", approx(c.euler_half)},
                {"value", approx(c.value)},
                {"value_half", approx(c.value_half)}};
}

json to_json(const CountReport& r) {
    json points = json::array();
    for (const auto& p : r.points)
        points.push_back({{"B", p.bound},
                          {"N", p.n},
                          {"N_lambda", p.n_lambda},
                          {"N_loc", p.n_loc},
                          {"N_glob_lower", p.n_glob_lower},
                          {"N_glob_upper", p.n_glob_upper},
                          {"hnp_fail", p.hnp_fail},
                          {"hnp_ratio", ratio(p.hnp_fail, p.n_loc)}});
    json fits = json::object();
    for (const auto& [name, f] : r.fits)
        fits[name] = {{"exponent", approx(f.exponent)}, {"band", approx(f.band)}, {"std_error", approx(f.std_error)},
                      {"points", f.points}};
    json out{{"group", r.group}, {"A", r.a}, {"S", r.s}, {"lambda", r.lambda}, {"points", points}, {"fit", fits}};
    out["constant"] = r.constant ? to_json(*r.constant) : json(nullptr);
    return out;
}

std::string to_tsv(const CountReport& r) {
    std::ostringstream os;
    os << "B\tN\tN_lambda\tN_loc\tN_glob_lower\tN_glob_upper\thnp_fail\thnp_ratio\n";
    for (const auto& p : r.points)
        os << p.bound << '\t' << p.n << '\t' << p.n_lambda << '\t' << p.n_loc << '\t' << p.n_glob_lower << '\t'
           << p.n_glob_upper << '\t' << p.hnp_fail << '\t' << ratio(p.hnp_fail, p.n_loc) << '\n';
    return os.str();
}

CountReport count_report_from_json(const json& j) {
    try {
        CountReport r;
        r.group = j.at("group").get<std::string>();
        r.a = j.at("A").get<std::string>();
        r.s = j.at("S").get<std::string>();
        r.lambda = j.at("lambda").get<std::vector<std::string>>();
        for (const auto& p : j.at("points")) {
            LadderPoint lp;
            lp.bound = p.at("B").get<i64>();
            lp.n = p.at("N").get<i64>();
            lp.n_lambda = p.at("N_lambda").get<i64>();
            lp.n_loc = p.at("N_loc").get<i64>();
            lp.n_glob_lower = p.at("N_glob_lower").get<i64>();
            lp.n_glob_upper = p.at("N_glob_upper").get<i64>();
            lp.hnp_fail = p.at("hnp_fail").get<i64>();
            if (p.at("hnp_ratio").get<std::string>() != ratio(lp.hnp_fail, lp.n_loc))
                throw ConfigError("inconsistent hnp_ratio at B = " + std::to_string(lp.bound));
            r.points.push_back(lp);
        }
        for (const auto& [name, f] : j.at("fit").items())
            r.fits[name] = ExponentFit{parse_approx(f.at("exponent").get<std::string>()),
                                       parse_approx(f.at("band").get<std::string>()),
                                       parse_approx(f.at("std_error").get<std::string>()), f.at("points").get<int>()};
        if (const auto& c = j.at("constant"); !c.is_null()) {
            ConstantReport k;
            k.varpi = parse_fraction(c.at("varpi").get<std::string>());
            k.gamma = parse_approx(c.at("gamma").get<std::string>());
            k.unit_factor = c.at("unit_factor").get<i64>();
            k.local_factor = c.at("local_factor").get<i64>();
            k.x_order = c.at("x_order").get<i64>();
            k.s_sum = parse_fraction(c.at("s_sum").get<std::string>());
            k.s_zeta = parse_approx(c.at("s_zeta").get<std::string>());
            k.prime_bound = c.at("P").get<i64>();
            k.euler = parse_approx(c.at("euler").get<std::string>());
            k.euler_half = parse_approx(c.at("euler_half").get<std::string>());
            k.value = parse_approx(c.at("value").get<std::string>());
            k.value_half = parse_approx(c.at("value_half").get<std::string>());
            r.constant = k;
        }
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed count report: ") + e.what());
    }
}

std::string dump(const json& j) { return j.dump() + "\n"; }

}  // namespace abelcount::cli
