#include <doctest.h>

#include <random>

#include "abelcount/errors.hpp"
#include "abelcount/norms.hpp"

using namespace abelcount;

namespace {

AbelianGroup grp(std::initializer_list<i64> d) { return AbelianGroup::from_cyclic_orders(std::vector<i64>(d)); }
FactoredRational q(i64 n, i64 d = 1) { return FactoredRational::from_fraction(n, d); }

// χ composed with the endomorphism sending basis vector i to imgs[i]
GChar compose(const GChar& chi, const std::vector<GroupElement>& imgs) {
    const auto& g = *chi.group;
    auto apply = [&](const GroupElement& x) {
        GroupElement r = g.zero();
        for (int i = 0; i < g.rank(); ++i) r = g.add(r, g.mul(x.c[i], imgs[i]));
        return r;
    };
    GChar out{chi.group, {}};
    for (const auto& b : chi.blocks) {
        CharBlock nb = b;
        nb.h = apply(b.h);
        nb.h5 = apply(b.h5);
        out.blocks.push_back(nb);
    }
    return out;
}

std::vector<GroupElement> random_automorphism(const AbelianGroup& g, std::mt19937_64& rng) {
    const auto elems = g.elements();
    while (true) {
        std::vector<GroupElement> imgs;
        for (int i = 0; i < g.rank(); ++i) {
            GroupElement x;
            do x = elems[rng() % elems.size()];
            while (!g.mul(g.invariant_factors()[i], x).is_zero());
            imgs.push_back(x);
        }
        if (Subgroup::generated(g, imgs).is_whole()) return imgs;
    }
}

FactoredRational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<i64> num(-3000, 3000), den(1, 60);
    i64 n = 0;
    while (n == 0) n = num(rng);
    return q(n, den(rng));
}

}  // namespace

TEST_CASE("is_local_norm examples") {
    auto chi5 = quadratic_character(5);
    CHECK_FALSE(is_local_norm(chi5, q(2), Place::prime(2)));
    CHECK(is_local_norm(chi5, q(4), Place::prime(2)));
    CHECK(is_local_norm(chi5, q(3), Place::prime(2)));  // unit at an unramified place

    for (const auto& chi : enumerate_by_conductor(grp({8}), 3000, true))
        for (i64 p : {3, 5, 7, 11, 13, 17, 41, 73}) CHECK(is_local_norm(chi, q(16), Place::prime(p)));
}

TEST_CASE("e-th powers are local norms") {
    std::mt19937_64 rng(11);
    std::vector<std::vector<GChar>> pools;
    for (const auto& g : {grp({2}), grp({4}), grp({3}), grp({2, 2}), grp({6}), grp({8})})
        pools.push_back(enumerate_by_conductor(g, 2000, false));
    for (int i = 0; i < 1000; ++i) {
        const auto& pool = pools[i % pools.size()];
        const auto& chi = pool[rng() % pool.size()];
        const auto beta = random_rational(rng).pow(chi.group->exponent());
        auto places = relevant_places(chi, beta);
        const auto& v = places[rng() % places.size()];
        CHECK(is_local_norm(chi, beta, v));
    }
}

TEST_CASE("local d-th powers upgrade to e-th powers when d = gcd(e, p - 1)") {
    std::mt19937_64 rng(12);
    auto primes = primes_up_to(20000);
    int checked = 0, nontrivial = 0;
    while (checked < 1000) {
        const i64 e = std::vector<i64>{2, 3, 4, 6, 8, 12, 16}[rng() % 7];
        const i64 p = primes[rng() % primes.size()];
        const auto alpha = q(std::uniform_int_distribution<i64>(2, 5000)(rng));
        if (e % p == 0 || alpha.valuation(p) != 0) continue;
        const i64 d = std::gcd(e, p - 1);
        const bool low = local_power_test(alpha, Place::prime(p), d);
        if (low) ++nontrivial;
        CHECK(low == local_power_test(alpha, Place::prime(p), e));
        ++checked;
    }
    CHECK(nontrivial > 50);
}

TEST_CASE("cyclic extensions never fail the norm test at exactly one place") {
    std::mt19937_64 rng(13);
    std::vector<std::vector<GChar>> pools;
    for (const auto& g : {grp({2}), grp({4}), grp({3}), grp({8}), grp({5})})
        pools.push_back(enumerate_by_conductor(g, 3000, true));
    int some_failure = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto& pool = pools[i % pools.size()];
        const auto& chi = pool[rng() % pool.size()];
        const auto alpha = random_rational(rng);
        int failures = 0;
        for (const auto& v : relevant_places(chi, alpha)) failures += !is_local_norm(chi, alpha, v);
        CHECK(failures != 1);
        some_failure += failures > 0;
    }
    CHECK(some_failure > 100);
}

TEST_CASE("Hilbert symbols agree with quadratic local norms") {
    std::mt19937_64 rng(14);
    for (i64 a : {5, -1, 2, -2, 3, -3, 6, 13, 17, -15, 10, 21}) {
        auto chi = quadratic_character(a);
        for (int i = 0; i < 200; ++i) {
            const auto x = random_rational(rng);
            int product = 1;
            for (const auto& v : relevant_places(chi, x)) {
                const int h = hilbert_symbol(x, q(a), v);
                product *= h;
                CHECK_MESSAGE((h == 1) == is_local_norm(chi, x, v), "a=", a, " x=", x.to_string(), " v=", v.to_string());
            }
            CHECK(product == 1);
        }
    }
}

TEST_CASE("everywhere-local norms") {
    for (const auto& chi : enumerate_by_conductor(grp({2, 2}), 3000, true)) CHECK(is_everywhere_local_norm(chi, q(25)));
    for (const auto& chi : enumerate_by_conductor(grp({8}), 10'000, true)) CHECK(is_everywhere_local_norm(chi, q(16)));
    auto bad = first_nonlocal_place(quadratic_character(5), q(2));
    REQUIRE(bad.has_value());
    CHECK(*bad == Place::prime(2));
}

TEST_CASE("Hasse norm principle and knot groups") {
    auto k1317 = biquadratic_character(13, 17);
    CHECK_FALSE(hnp_holds(k1317));
    CHECK(knot_group(k1317) == grp({2}));
    auto k8 = biquadratic_character(-1, 2);
    CHECK(hnp_holds(k8));
    CHECK(knot_group(k8).is_trivial());
    for (const auto& chi : enumerate_by_conductor(grp({4}), 500, true)) {
        CHECK(hnp_holds(chi));
        CHECK(knot_group(chi).is_trivial());
    }
    auto z22 = std::make_shared<const AbelianGroup>(grp({2, 2}));
    GChar partial{z22, {make_block(*z22, 5, z22->reduce(std::vector<i64>{1, 0}), z22->zero())}};
    CHECK_THROWS_AS(hnp_holds(partial), PreconditionError);
    CHECK_THROWS_AS(knot_group(partial), PreconditionError);
}

TEST_CASE("hnp_holds iff the knot group is trivial") {
    for (const auto& g : {grp({2, 2}), grp({2, 4})}) {
        int failing = 0;
        for (const auto& chi : enumerate_by_conductor(g, 10'000, true)) {
            const bool h = hnp_holds(chi);
            CHECK(h == knot_group(chi).is_trivial());
            failing += !h;
        }
        CHECK(failing > 0);
    }
}

TEST_CASE("radicands of quadratic subfields") {
    for (i64 a : {5, -1, 2, -2, 3, -3, 6, -6, 13, -15, 10, 7, -7, 30})
        CHECK(quadratic_radicand(quadratic_character(a)) == a);
    auto chi = biquadratic_character(13, 17);
    CHECK(quadratic_radicand(chi, 0) == 13);
    CHECK(quadratic_radicand(chi, 1) == 17);
}

TEST_CASE("witness search") {
    auto w = witness_search(quadratic_character(-1), q(5), 5);
    REQUIRE(w.has_value());
    CHECK(w->to_string() == "2 + sqrt(-1)");
    CHECK(w->norm() == Rational(5));
    auto w5 = witness_search(quadratic_character(5), q(25), 6);
    REQUIRE(w5.has_value());
    CHECK(w5->to_string() == "5");
    CHECK_FALSE(witness_search(biquadratic_character(13, 17), q(25), 50).has_value());
    CHECK_THROWS_AS(witness_search(quadratic_character(5), q(25), kWitnessHeightCap + 1), PreconditionError);
    CHECK_THROWS_AS(witness_search(enumerate_by_conductor(grp({4}), 20, true).front(), q(25), 5), PreconditionError);
}

TEST_CASE("witnesses re-verify") {
    std::mt19937_64 rng(15);
    auto quads = enumerate_by_conductor(grp({2}), 200, true);
    auto biquads = enumerate_by_conductor(grp({2, 2}), 200, true);
    int found = 0;
    for (int i = 0; i < 300; ++i) {
        const auto& chi = (i % 3 == 0) ? biquads[rng() % biquads.size()] : quads[rng() % quads.size()];
        const auto alpha = q(std::uniform_int_distribution<i64>(-60, 60)(rng) | 1);
        auto w = witness_search(chi, alpha, chi.group->rank() == 2 ? 4 : 12);
        if (!w) continue;
        ++found;
        CHECK(w->norm() == Rational(alpha.value()->first, alpha.value()->second));
    }
    CHECK(found > 30);
}

TEST_CASE("biquadratic obstruction anchors") {
    CHECK(biquadratic_obstruction(13, 17, q(25)) == std::optional<int>(1));
    CHECK(biquadratic_obstruction(17, 13, q(25)) == std::optional<int>(1));
    CHECK(biquadratic_obstruction(13, 17, q(1)) == std::optional<int>(0));
    CHECK_THROWS_AS(biquadratic_obstruction(-1, 2, q(25)), PreconditionError);   // full decomposition at 2
    CHECK_THROWS_AS(biquadratic_obstruction(13, 17, q(5)), PreconditionError);   // 5 not a local norm
    CHECK_THROWS_AS(biquadratic_obstruction(13, 13, q(25)), PreconditionError);
}

TEST_CASE("biquadratic obstruction: symmetry, additivity, vanishing on norms") {
    std::mt19937_64 rng(16);
    std::vector<std::pair<i64, i64>> fields;
    for (const auto& chi : enumerate_by_conductor(grp({2, 2}), 3000, true)) {
        if (hnp_holds(chi)) continue;
        fields.push_back({quadratic_radicand(chi, 0), quadratic_radicand(chi, 1)});
        if (fields.size() >= 12) break;
    }
    REQUIRE(fields.size() >= 5);
    int nontrivial = 0;
    for (auto [a, b] : fields) {
        auto chi = biquadratic_character(a, b);
        // everywhere-local integers
        std::vector<FactoredRational> local;
        for (i64 n = -400; n <= 400 && local.size() < 14; ++n) {
            if (n == 0) continue;
            if (is_everywhere_local_norm(chi, q(n))) local.push_back(q(n));
        }
        std::vector<int> ob;
        for (const auto& x : local) {
            auto o = biquadratic_obstruction(a, b, x);
            REQUIRE(o.has_value());
            CHECK(biquadratic_obstruction(b, a, x) == o);
            CHECK(biquadratic_obstruction(a, a * b, x) == o);
            ob.push_back(*o);
            nontrivial += *o;
        }
        for (std::size_t i = 0; i < local.size(); ++i)
            for (std::size_t j = i; j < local.size(); ++j) {
                auto o = biquadratic_obstruction(a, b, local[i] * local[j]);
                if (o) CHECK(*o == (ob[i] + ob[j]) % 2);
            }
        // norms of random elements
        for (int t = 0; t < 10; ++t) {
            std::uniform_int_distribution<i64> c(-3, 3);
            NormWitness x{1, {c(rng), c(rng), c(rng), c(rng)}, {1, a, b, a * b}};
            const Rational n = x.norm();
            if (n.numerator() == 0) continue;
            const auto alpha = q(n.numerator(), n.denominator());
            auto o = biquadratic_obstruction(a, b, alpha, 400);
            if (o) CHECK_MESSAGE(*o == 0, "a=", a, " b=", b, " alpha=", alpha.to_string());
        }
    }
    CHECK(nontrivial > 0);
}

TEST_CASE("global_norm_status") {
    auto st = global_norm_status(biquadratic_character(13, 17), q(25));
    CHECK(st.tag == NormTag::NotGlobalNorm);
    CHECK(st.certificate == Certificate::Obstruction);

    for (const auto& chi : enumerate_by_conductor(grp({8}), 2000, true))
        CHECK(global_norm_status(chi, q(16)).tag == NormTag::GlobalNorm);

    auto gi = global_norm_status(quadratic_character(-1), q(5));
    CHECK(gi.tag == NormTag::GlobalNorm);
    CHECK(gi.certificate == Certificate::Witness);
    REQUIRE(gi.witness.has_value());
    CHECK(gi.witness->to_string() == "2 + sqrt(-1)");

    auto nl = global_norm_status(quadratic_character(5), q(2));
    CHECK(nl.tag == NormTag::NotLocal);
    CHECK(nl.place == Place::prime(2));

    CHECK(global_norm_status(biquadratic_character(13, 17), q(1)).tag == NormTag::GlobalNorm);
}

TEST_CASE("norm predicates depend only on the kernel") {
    std::mt19937_64 rng(17);
    for (const auto& g : {grp({2, 2}), grp({4}), grp({2, 4}), grp({3, 3})}) {
        auto pool = enumerate_by_conductor(g, 1500, false);
        for (int i = 0; i < 150; ++i) {
            const auto& chi = pool[rng() % pool.size()];
            const auto twisted = compose(chi, random_automorphism(g, rng));
            const auto alpha = random_rational(rng);
            for (const auto& v : relevant_places(chi, alpha))
                CHECK(is_local_norm(chi, alpha, v) == is_local_norm(twisted, alpha, v));
            if (chi.is_surjective()) CHECK(hnp_holds(chi) == hnp_holds(twisted));
        }
    }
}
