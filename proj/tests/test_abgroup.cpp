#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "abelcount/abgroup.hpp"
#include "abelcount/errors.hpp"
#include "oracles/brute_groups.hpp"

using namespace abelcount;

namespace {

AbelianGroup G(std::initializer_list<i64> orders) {
    std::vector<i64> v(orders);
    return AbelianGroup::from_cyclic_orders(v);
}

std::vector<AbelianGroup> groups_up_to(i64 bound) {
    std::vector<AbelianGroup> out;
    std::set<std::vector<i64>> seen;
    // products of at most three cyclic factors cover every group of order <= 64
    for (i64 a = 1; a <= bound; ++a)
        for (i64 b = 1; a * b <= bound; ++b)
            for (i64 c = 1; a * b * c <= bound; ++c) {
                auto g = G({a, b, c});
                if (seen.insert(g.invariant_factors()).second) out.push_back(g);
            }
    // (Z/2)^4, (Z/2)^5, (Z/2)^6, (Z/2)^3 x Z/4, ... need more factors
    for (auto extra : std::vector<std::vector<i64>>{{2, 2, 2, 2}, {2, 2, 2, 2, 2}, {2, 2, 2, 2, 2, 2},
                                                    {2, 2, 2, 4}, {2, 2, 2, 6}, {2, 2, 2, 8},
                                                    {2, 2, 4, 4}, {2, 2, 2, 2, 4}}) {
        auto g = AbelianGroup::from_cyclic_orders(extra);
        if (g.order() <= bound && seen.insert(g.invariant_factors()).second) out.push_back(g);
    }
    return out;
}

}  // namespace

TEST_CASE("canonical invariant factors") {
    CHECK(G({6, 4}).invariant_factors() == std::vector<i64>{2, 12});
    CHECK(G({4, 2}).invariant_factors() == std::vector<i64>{2, 4});
    CHECK(G({1}).is_trivial());
    CHECK(G({3, 5}) == G({15}));
    CHECK(parse_group("Z/2 x Z/4") == G({2, 4}));
    CHECK(parse_group("Z/2xZ/2") == G({2, 2}));
    CHECK(parse_group(" Z/6Z x Z/4Z ") == G({2, 12}));
    CHECK_THROWS_AS(parse_group("Z/2 x Q/4"), ConfigError);
    CHECK_THROWS_AS(parse_group("Z/"), ConfigError);
}

TEST_CASE("moebius examples") {
    CHECK(moebius(G({2})) == -1);
    CHECK(moebius(G({3})) == -1);
    CHECK(moebius(G({2, 2})) == 2);
    CHECK(moebius(G({4})) == 0);
    CHECK(moebius(G({2, 2, 2})) == -8);
    CHECK(moebius(G({6})) == 1);
    CHECK(moebius(G({})) == 1);
}

TEST_CASE("subgroup examples") {
    CHECK(subgroups(G({})).size() == 1);
    auto z4 = subgroups(G({4}));
    REQUIRE(z4.size() == 3);
    CHECK(z4[0].subgroup.order() == 1);
    CHECK(z4[1].subgroup.order() == 2);
    CHECK(z4[2].subgroup.order() == 4);
    CHECK(subgroups(G({2, 2})).size() == 5);
    CHECK_THROWS_AS(subgroups(G({2, 2}), 3), PreconditionError);
}

TEST_CASE("torsion, hom counts, order classes") {
    CHECK(G({8}).torsion(2) == G({2}));
    CHECK(G({8}).torsion_order(2) == 2);
    CHECK(G({8}).torsion(8) == G({8}));
    CHECK(G({2, 4}).torsion(2) == G({2, 2}));
    CHECK(G({2, 4}).torsion_order(2) == 4);
    CHECK(hom_count(G({4}), G({8})) == 4);
    CHECK(order_class_count(G({8}), 8) == 4);
    CHECK(order_class_count(G({2, 2}), 2) == 3);
}

TEST_CASE("exterior square examples") {
    CHECK(exterior_square(G({7})).group.is_trivial());
    CHECK(exterior_square(G({2, 2})).group == G({2}));
    CHECK(exterior_square(G({2, 4})).group == G({2}));
    auto g = G({2, 2});
    auto ext = exterior_square(g);
    CHECK(exterior_image(ext, Subgroup::whole(g)).is_whole());
    std::vector<GroupElement> diag{g.reduce(std::vector<i64>{1, 1})};
    CHECK(exterior_image(ext, Subgroup::generated(g, diag)).is_trivial());
    std::vector<GroupElement> cyc{g.basis(0)};
    CHECK(exterior_image(ext, Subgroup::generated(g, cyc)).is_trivial());
}

TEST_CASE("subgroup lattice agrees with brute force for |G| <= 64") {
    for (const auto& g : groups_up_to(64)) {
        CAPTURE(g.to_string());
        auto subs = subgroups(g);
        auto brute = oracle::brute_subgroups(g);
        CHECK(subs.size() == brute.size());
        std::set<std::vector<std::vector<i64>>> forms;
        for (const auto& s : subs) forms.insert(s.subgroup.hnf());
        CHECK(forms.size() == subs.size());
        std::multiset<i64> orders_a, orders_b;
        for (const auto& s : subs) {
            orders_a.insert(s.subgroup.order());
            CHECK(s.subgroup.order() * s.quotient.order() == g.order());
            CHECK(s.subgroup.iso_class().order() == s.subgroup.order());
        }
        for (const auto& s : brute) orders_b.insert(static_cast<i64>(s.size()));
        CHECK(orders_a == orders_b);
    }
}

TEST_CASE("membership and iso classes agree with element sets") {
    std::mt19937_64 rng(7);
    for (const auto& g : groups_up_to(48)) {
        auto elems = g.elements();
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<GroupElement> gens;
            for (int k = 0; k < 2; ++k) gens.push_back(elems[rng() % elems.size()]);
            auto h = Subgroup::generated(g, gens);
            auto closure = oracle::closure(g, gens);
            CHECK(static_cast<i64>(closure.size()) == h.order());
            for (const auto& x : elems) CHECK(h.contains(x) == (closure.count(x) == 1));
            CHECK(h.iso_class() == oracle::iso_class_of(g, closure));
        }
    }
}

TEST_CASE("order class identities") {
    for (const auto& g : groups_up_to(64)) {
        i64 total = 0;
        for (i64 f : divisors(g.exponent())) {
            i64 direct = 0;
            for (const auto& x : g.elements())
                if (g.element_order(x) == f) ++direct;
            CHECK(order_class_count(g, f) == direct);
            total += order_class_count(g, f);
        }
        CHECK(total == g.order());
    }
}

TEST_CASE("exterior square order and bilinearity") {
    for (const auto& g : groups_up_to(64)) {
        auto ext = exterior_square(g);
        i64 expect = 1;
        const auto& d = g.invariant_factors();
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = i + 1; j < d.size(); ++j) expect *= std::gcd(d[i], d[j]);
        CHECK(ext.group.order() == expect);
        CHECK(oracle::exterior_square_order(g) == expect);
        auto elems = g.elements();
        std::mt19937_64 rng(11);
        for (int t = 0; t < 20; ++t) {
            auto x = elems[rng() % elems.size()], y = elems[rng() % elems.size()],
                 z = elems[rng() % elems.size()];
            CHECK(ext.wedge(x, x).is_zero());
            CHECK(ext.wedge(g.add(x, z), y) == ext.group.add(ext.wedge(x, y), ext.wedge(z, y)));
            CHECK(ext.wedge(x, y) == ext.group.neg(ext.wedge(y, x)));
        }
    }
}

TEST_CASE("Moebius inversion: surjections from hom counts") {
    auto sources = groups_up_to(64);
    for (const auto& target : groups_up_to(16)) {
        auto subs = subgroups(target);
        for (const auto& gamma : sources) {
            if (gamma.order() > 32 && target.order() > 8) continue;
            i64 rhs = 0;
            for (const auto& s : subs) rhs += moebius(s.quotient) * hom_count(gamma, s.subgroup.iso_class());
            CAPTURE(gamma.to_string());
            CAPTURE(target.to_string());
            CHECK(oracle::count_surjections(gamma, target) == rhs);
        }
    }
}
