#include "battery.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

#include "abelcount/counting.hpp"
#include "abelcount/errors.hpp"
#include "oracles/cyclotomic_roots.hpp"
#include "oracles/quadratic_sieve.hpp"

namespace abelcount::cli {

Suite parse_suite(std::string_view name) {
    if (name == "quick") return Suite::Quick;
    if (name == "full") return Suite::Full;
    throw ConfigError("unknown suite '" + std::string(name) + "'");
}

namespace {

AbelianGroup grp(std::vector<i64> d) { return AbelianGroup::from_cyclic_orders(d); }
FactoredRational q(i64 n, i64 d = 1) { return FactoredRational::from_fraction(n, d); }
NormSubgroup sub(const char* gens) { return NormSubgroup(parse_rational_list(gens)); }

struct Outcome {
    bool pass = true;
    std::string failures;
    std::ostringstream info;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        failures += (pass ? "FAILED " : "; ") + what;
        pass = false;
    }
    template <class T>
    Outcome& operator<<(const T& x) {
        info << x;
        return *this;
    }
    std::string detail() const { return pass ? info.str() : failures + " | " + info.str(); }
};

std::string fixed(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

// 1 --------------------------------------------------------------------------
void grunwald_wang(Suite, Outcome& out) {
    const auto g = grp({8});
    LocalConditions c(g, sub("1"), parse_places("inf,2,3,5,7"),
                      {{Place::prime(2), parse_predicate("unramified-order-8", g)}});
    const auto k = leading_constant(c, 1000);
    i64 surjections = 0;
    for_each_character(g, 1, 100'000, true, [&](const GChar& chi) {
        if (c.meets_lambda(chi) && c.norms_outside_s(chi)) ++surjections;
    });
    out.require(k.s_sum.numerator() == 0, "S-part sum " + to_string(k.s_sum) + " != 0");
    out.require(surjections == 0, std::to_string(surjections) + " qualifying surjections");
    out << "S-part sum " << to_string(k.s_sum) << ", surjections with conductor <= 10^5: " << surjections;
}

// 2 --------------------------------------------------------------------------
void poisson(Suite, Outcome& out) {
    const std::vector<std::pair<AbelianGroup, const char*>> rows{{grp({2}), "1"}, {grp({2}), "5"}, {grp({4}), "-1"}};
    for (const auto& [g, a] : rows) {
        const auto rep = poisson_identity_check(LocalConditions(g, sub(a)), 1000);
        out.require(rep.equal, g.to_string() + " A=<" + a + "> differs at n = " +
                                   std::to_string(rep.first_mismatch.value_or(0)));
        out << g.to_string() << " <" << a << ">: equal; ";
    }
    out << "B = 10^3";
}

// 3 --------------------------------------------------------------------------
void product_formula(Suite, Outcome& out) {
    std::mt19937_64 rng(314159);
    std::vector<std::vector<GChar>> pools;
    for (const auto& g : {grp({2}), grp({4}), grp({3}), grp({2, 2}), grp({6}), grp({8}), grp({2, 4})})
        pools.push_back(enumerate_by_conductor(g, 3000, false));
    std::uniform_int_distribution<i64> num(-5000, 5000), den(1, 300);
    int bad = 0;
    for (int trial = 0; trial < 10'000; ++trial) {
        const auto& pool = pools[trial % pools.size()];
        const auto& chi = pool[rng() % pool.size()];
        i64 n = 0;
        while (n == 0) n = num(rng);
        const auto alpha = q(n, den(rng));
        std::set<Place> places{Place::infinity()};
        for (const auto& b : chi.blocks) places.insert(Place::prime(b.p));
        for (i64 p : alpha.support()) places.insert(Place::prime(p));
        GroupElement total = chi.group->zero();
        for (const auto& v : places) total = chi.group->add(total, evaluate_local(local_component(chi, v), alpha));
        bad += !total.is_zero();
    }
    out.require(bad == 0, std::to_string(bad) + " of 10^4 pairs violate the product formula");
    out << "10^4 random pairs, all local sums trivial";
}

// 4 --------------------------------------------------------------------------
void varpi_table(Suite, Outcome& out) {
    struct Row {
        AbelianGroup g;
        const char* a;
        Rational want;
    };
    const std::vector<Row> rows{{grp({2}), "5", Rational(1, 2)},
                                {grp({2}), "1", Rational(1)},
                                {grp({2, 2}), "1", Rational(3)},
                                {grp({8}), "16", Rational(3)},
                                {grp({8}), "1", Rational(3)}};
    int proper = 0;
    for (const auto& r : rows) {
        const Rational w = varpi(r.g, sub(r.a));
        out.require(w == r.want, "varpi(" + r.g.to_string() + ", <" + r.a + ">) = " + to_string(w));
        for (const auto& info : subgroups(r.g)) {
            if (info.subgroup.is_whole()) continue;
            ++proper;
            const Rational h = varpi(info.subgroup.iso_class(), sub(r.a));
            out.require(h < w, "varpi(" + info.subgroup.iso_class().to_string() + ") >= varpi(" + r.g.to_string() + ")");
        }
        out << to_string(w) << " ";
    }
    out << "; strict drop on " << proper << " proper subgroups";
}

// 5 --------------------------------------------------------------------------
std::set<FactoredRational> first_components(const BigXGroup& x) {
    std::set<FactoredRational> out;
    for (const auto& t : x.elements) out.insert(t.at(0));
    return out;
}

void x_and_sha(Suite, Outcome& out) {
    const auto x4 = first_components(big_X(grp({4}), sub("-1"), parse_places("inf,2,3")));
    out.require(x4 == std::set<FactoredRational>{q(1), q(-1), q(4), q(-4)}, "X(Z/4, <-1>)");
    const auto x8 = first_components(big_X(grp({8}), sub("1"), parse_places("inf,2,3,5,7")));
    out.require(x8 == std::set<FactoredRational>{q(1), q(16)}, "X(Z/8, 1)");
    const int s2 = sha_omega(2).order, s12 = sha_omega(12).order, s8 = sha_omega(8).order;
    out.require(s2 == 1 && s12 == 1 && s8 == 2, "Sha_omega orders " + std::to_string(s2) + "," +
                                                    std::to_string(s12) + "," + std::to_string(s8));
    out << "|X(Z/4,<-1>)| = " << x4.size() << ", X(Z/8,1) = {1,16}, Sha_omega(2,12,8) = " << s2 << "," << s12 << ","
        << s8;
}

// 6 --------------------------------------------------------------------------
void norm_statuses(Suite, Outcome& out) {
    const NormOptions opts{.witness_height = 30, .attach_witness = false};
    i64 z8 = 0, z8_bad = 0;
    for_each_character(grp({8}), 1, 10'000, true, [&](const GChar& chi) {
        ++z8;
        z8_bad += global_norm_status(chi, q(16), opts).tag != NormTag::GlobalNorm;
    });
    i64 bq = 0, bq_bad = 0;
    for_each_character(grp({2, 2}), 1, 10'000, true, [&](const GChar& chi) {
        ++bq;
        bq_bad += !is_everywhere_local_norm(chi, q(25));
    });
    const auto st = global_norm_status(biquadratic_character(13, 17), q(25));
    out.require(z8 > 0 && z8_bad == 0, std::to_string(z8_bad) + " Z/8 characters without 16 as a global norm");
    out.require(bq > 0 && bq_bad == 0, std::to_string(bq_bad) + " biquadratic characters where 25 is not local");
    out.require(st.tag == NormTag::NotGlobalNorm, "Q(sqrt13, sqrt17): " + to_string(st.tag));
    out << z8 << " Z/8 characters GlobalNorm, " << bq << " biquadratic characters everywhere local, (13,17) "
        << to_string(st.tag);
}

// 7 --------------------------------------------------------------------------
void hnp_ratios(Suite suite, Outcome& out) {
    std::vector<i64> ladder{1000, 10'000, 100'000};
    if (suite == Suite::Full) ladder.push_back(1'000'000);
    const auto r = hnp_failure_ratio(grp({2, 2}), sub("1"), ladder);
    out.require(r.front().numerator() > 0, "ratio at 10^3 is zero");
    for (std::size_t i = 1; i < r.size(); ++i)
        out.require(r[i] < r[i - 1], "ratio does not drop at B = " + std::to_string(ladder[i]));
    const Rational half = r.front() / Rational(2);
    out.require(r.back() < half, "last ratio " + fixed(boost::rational_cast<double>(r.back())) +
                                     " not below half of " + fixed(boost::rational_cast<double>(r.front())));
    out << "ratios";
    for (const auto& x : r) out << " " << fixed(boost::rational_cast<double>(x));
}

// 8 --------------------------------------------------------------------------
void exponent_fits(Suite suite, Outcome& out) {
    const std::vector<i64> ladder = suite == Suite::Full ? std::vector<i64>{10'000, 100'000, 1'000'000, 10'000'000}
                                                         : std::vector<i64>{1000, 10'000, 100'000, 1'000'000};
    const auto rep = count_with_conditions(LocalConditions(grp({2}), sub("5")), ladder);
    for (const auto& p : rep.points) {
        const i64 want = oracle::count_five_everywhere_local(p.bound);
        out.require(p.n_loc == want, "N_loc(" + std::to_string(p.bound) + ") = " + std::to_string(p.n_loc) +
                                         ", sieve " + std::to_string(want));
    }
    const auto& loc = rep.fits.at("N_loc");
    const auto& all = rep.fits.at("N");
    out.require(std::abs(loc.exponent + 0.5) <= 0.15, "N_loc exponent " + fixed(loc.exponent));
    out.require(std::abs(all.exponent) <= 0.1, "N exponent " + fixed(all.exponent));
    out << "N_loc exponent " << fixed(loc.exponent) << " +- " << fixed(loc.band) << ", N exponent "
        << fixed(all.exponent) << " +- " << fixed(all.band) << ", sieve equal at " << rep.points.size()
        << " points";
}

// 9 --------------------------------------------------------------------------
void constant_vs_count(Suite suite, Outcome& out) {
    const i64 bound = suite == Suite::Full ? 10'000'000 : 1'000'000;
    LocalConditions c(grp({2}), sub("1"));
    const auto k = leading_constant(c, 100'000);
    const auto n = count_with_conditions(c, {bound}).points.front().n;
    const double density = static_cast<double>(n) / static_cast<double>(bound);
    const double rel = std::abs(k.value - density) / density;
    out.require(rel <= 0.10, "relative gap " + fixed(rel));
    out << "constant " << fixed(k.value, 6) << ", N(B)/B " << fixed(density, 6) << " at B = " << bound
        << ", relative gap " << fixed(rel, 6);
}

// 10 -------------------------------------------------------------------------
void kummer_oracle(Suite, Outcome& out) {
    const std::vector<std::pair<i64, i64>> betas{{2, 1},  {3, 1},   {-1, 1}, {-3, 1}, {-4, 1}, {4, 1},  {16, 1},
                                                 {-16, 1}, {5, 1},  {8, 1},  {9, 1},  {-27, 1}, {1, 4}, {12, 1},
                                                 {-64, 1}, {81, 1}, {-2, 1}, {6, 1},  {7, 1},   {-7, 1}, {256, 1},
                                                 {-3, 4},  {25, 9}, {-1024, 1}};
    int compared = 0, disagree = 0;
    for (auto [n, dd] : betas)
        for (i64 f : {1, 3, 4, 5, 7, 8, 12, 15, 16, 20, 24})
            for (i64 d : {2, 3, 4, 8}) {
                if (d == 8 && std::llabs(n) > 256) continue;
                const auto want = oracle::is_power_in_cyclotomic(n, dd, f, d);
                if (!want) {
                    ++disagree;
                    continue;
                }
                ++compared;
                disagree += cyclotomic_power_membership(q(n, dd), f, d) != *want;
            }
    out.require(compared >= 40 && disagree == 0, std::to_string(disagree) + " membership disagreements");

    // Chebotarev: density of primes splitting completely in Q(μ_f, A^{1/f})
    struct Case {
        std::vector<i64> gens;
        i64 f;
    };
    const std::vector<Case> multi{{{2, 3}, 4}, {{2, -1}, 8}, {{3, 5}, 2}, {{-1, 2}, 4}, {{2, 3, 5}, 2}, {{-3, 2}, 6}};
    const auto primes = primes_up_to(1'000'000);
    int outside = 0;
    double worst = 0;
    for (const auto& c : multi) {
        std::vector<FactoredRational> gens;
        for (i64 x : c.gens) gens.push_back(q(x));
        const i64 deg = kummer_degree(NormSubgroup(gens), c.f).over_q;
        i64 total = 0, hits = 0;
        for (i64 p : primes) {
            bool bad = c.f % p == 0;
            for (i64 x : c.gens) bad = bad || x % p == 0;
            if (bad) continue;
            ++total;
            if ((p - 1) % c.f != 0) continue;
            bool all = true;
            for (i64 x : c.gens) {
                const i64 r = ((x % p) + p) % p;
                all = all && powmod(static_cast<u64>(r), static_cast<u64>((p - 1) / c.f), static_cast<u64>(p)) == 1;
            }
            hits += all;
        }
        const double pr = 1.0 / static_cast<double>(deg);
        const double sigma = std::sqrt(static_cast<double>(total) * pr * (1 - pr));
        const double z = std::abs(static_cast<double>(hits) - static_cast<double>(total) * pr) / sigma;
        worst = std::max(worst, z);
        outside += z > 3;
    }
    out.require(outside == 0, std::to_string(outside) + " multi-generator degrees outside 3 sigma");
    out << compared << " membership cases agree, " << multi.size() << " multi-generator degrees within "
        << fixed(worst, 2) << " sigma";
}

// 11 -------------------------------------------------------------------------
FactoredRational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<i64> num(-3000, 3000), den(1, 60);
    i64 n = 0;
    while (n == 0) n = num(rng);
    return q(n, den(rng));
}

void cyclic_invariants(Suite, Outcome& out) {
    std::mt19937_64 rng(13);
    std::vector<std::vector<GChar>> cyclic;
    for (const auto& g : {grp({2}), grp({4}), grp({3}), grp({8}), grp({5})})
        cyclic.push_back(enumerate_by_conductor(g, 3000, true));
    int single = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto& pool = cyclic[i % cyclic.size()];
        const auto& chi = pool[rng() % pool.size()];
        const auto alpha = random_rational(rng);
        int failures = 0;
        for (const auto& v : relevant_places(chi, alpha)) failures += !is_local_norm(chi, alpha, v);
        single += failures == 1;
    }
    std::vector<std::vector<GChar>> any;
    for (const auto& g : {grp({2}), grp({4}), grp({3}), grp({2, 2}), grp({6}), grp({8})})
        any.push_back(enumerate_by_conductor(g, 2000, false));
    int powers = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto& pool = any[i % any.size()];
        const auto& chi = pool[rng() % pool.size()];
        const auto beta = random_rational(rng).pow(chi.group->exponent());
        for (const auto& v : relevant_places(chi, beta)) powers += !is_local_norm(chi, beta, v);
    }
    out.require(single == 0, std::to_string(single) + " cyclic samples fail at exactly one place");
    out.require(powers == 0, std::to_string(powers) + " e-th powers not local norms");
    out << "10^3 last-place samples, 10^3 e-th power samples";
}

// 12 -------------------------------------------------------------------------
void shards(Suite, Outcome& out) {
    for (const auto& [g, a] : std::vector<std::pair<AbelianGroup, const char*>>{{grp({2, 2}), "5"}, {grp({4}), "-1"}}) {
        LocalConditions c(g, sub(a));
        const std::vector<i64> ladder{1000, 10'000, 100'000};
        const auto base = count_with_conditions(c, ladder, {.shards = 1});
        for (int s : {4, 16}) {
            const auto r = count_with_conditions(c, ladder, {.shards = s});
            out.require(r.points == base.points, g.to_string() + " differs with " + std::to_string(s) + " shards");
        }
        out << g.to_string() << " <" << a << "> N_loc(10^5) = " << base.points.back().n_loc << "; ";
    }
    out << "identical for 1, 4, 16 shards";
}

struct Criterion {
    int id;
    const char* title;
    void (*run)(Suite, Outcome&);
};

const Criterion kCriteria[] = {
    {1, "Grunwald-Wang obstruction", grunwald_wang},
    {2, "Poisson identity", poisson},
    {3, "product formula", product_formula},
    {4, "varpi table", varpi_table},
    {5, "X and Sha_omega", x_and_sha},
    {6, "norm statuses", norm_statuses},
    {7, "HNP failure ratios", hnp_ratios},
    {8, "exponent fits and sieve", exponent_fits},
    {9, "constant vs count", constant_vs_count},
    {10, "Kummer oracle agreement", kummer_oracle},
    {11, "cyclic norm invariants", cyclic_invariants},
    {12, "shard independence", shards},
};

}  // namespace

std::vector<CriterionResult> run_battery(Suite suite, const std::function<void(const CriterionResult&)>& done,
                                         int only) {
    std::vector<CriterionResult> results;
    for (const auto& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            c.run(suite, out);
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        CriterionResult r{c.id, c.title, out.pass, out.detail(),
                          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
        if (done) done(r);
        results.push_back(std::move(r));
    }
    return results;
}

std::string format_line(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "[%s] %2d %-26s %8.1fs  ", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
                  r.seconds);
    return head + r.detail;
}

}  // namespace abelcount::cli
