#include "abelcount/norms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "abelcount/errors.hpp"

namespace abelcount {

std::string to_string(NormTag t) {
    switch (t) {
        case NormTag::NotLocal: return "NotLocal";
        case NormTag::GlobalNorm: return "GlobalNorm";
        case NormTag::NotGlobalNorm: return "NotGlobalNorm";
        case NormTag::Undetermined: return "Undetermined";
    }
    return "?";
}

std::string to_string(Certificate c) {
    switch (c) {
        case Certificate::None: return "none";
        case Certificate::HNPHolds: return "HNPHolds";
        case Certificate::Witness: return "Witness";
        case Certificate::Obstruction: return "Obstruction";
    }
    return "?";
}

Rational NormWitness::norm() const {
    using i128 = __int128;
    const i128 a = radicands.at(1);
    i128 num = 0;
    if (coords.size() == 2) {
        num = static_cast<i128>(coords[0]) * coords[0] - a * coords[1] * coords[1];
        return Rational(static_cast<i64>(num), denominator * denominator);
    }
    const i128 b = radicands.at(2);
    const i128 c0 = coords[0], c1 = coords[1], c2 = coords[2], c3 = coords[3];
    const i128 p = c0 * c0 + a * c1 * c1 - b * c2 * c2 - a * b * c3 * c3;
    const i128 q = 2 * c0 * c1 - 2 * b * c2 * c3;
    num = p * p - a * q * q;
    const i64 d2 = denominator * denominator;
    return Rational(static_cast<i64>(num), d2 * d2);
}

std::string NormWitness::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] == 0) continue;
        if (!s.empty()) s += coords[i] < 0 ? " - " : " + ";
        else if (coords[i] < 0) s += "-";
        const i64 c = std::llabs(coords[i]);
        if (radicands[i] == 1) {
            s += std::to_string(c);
        } else {
            if (c != 1) s += std::to_string(c) + "*";
            s += "sqrt(" + std::to_string(radicands[i]) + ")";
        }
    }
    if (s.empty()) s = "0";
    if (denominator != 1) s = "(" + s + ")/" + std::to_string(denominator);
    return s;
}

// ---------------------------------------------------------------------------
// Local tests

bool is_local_norm(const GChar& chi, const FactoredRational& alpha, Place v) {
    return evaluate_local(local_component(chi, v), alpha).is_zero();
}

std::vector<Place> relevant_places(const GChar& chi, const FactoredRational& alpha) {
    std::set<Place> s{Place::infinity()};
    for (const auto& b : chi.blocks) s.insert(Place::prime(b.p));
    for (i64 p : alpha.support()) s.insert(Place::prime(p));
    return {s.begin(), s.end()};
}

std::optional<Place> first_nonlocal_place(const GChar& chi, const FactoredRational& alpha) {
    for (const auto& v : relevant_places(chi, alpha))
        if (!is_local_norm(chi, alpha, v)) return v;
    return std::nullopt;
}

bool is_everywhere_local_norm(const GChar& chi, const FactoredRational& alpha) {
    return !first_nonlocal_place(chi, alpha).has_value();
}

// ---------------------------------------------------------------------------
// Hasse norm principle

namespace {

void require_surjective(const GChar& chi, const char* what) {
    if (!chi.is_surjective()) throw PreconditionError(std::string(what) + ": character is not surjective");
}

Subgroup decomposition_join(const GChar& chi, const ExteriorSquare& ext) {
    Subgroup acc = Subgroup::trivial(ext.group);
    for (const auto& b : chi.blocks) {
        auto loc = local_component(chi, Place::prime(b.p));
        auto gens = loc.image_generators();
        acc = acc.join(exterior_image(ext, Subgroup::generated(*chi.group, gens)));
    }
    return acc;
}

}  // namespace

bool hnp_holds(const GChar& chi) {
    require_surjective(chi, "hnp_holds");
    if (chi.group->is_cyclic()) return true;
    const auto ext = exterior_square(*chi.group);
    return decomposition_join(chi, ext).is_whole();
}

AbelianGroup knot_group(const GChar& chi) {
    require_surjective(chi, "knot_group");
    if (chi.group->is_cyclic()) return AbelianGroup{};
    const auto ext = exterior_square(*chi.group);
    return decomposition_join(chi, ext).quotient();
}

// ---------------------------------------------------------------------------
// Quadratic subfields and Hilbert symbols

namespace {

bool elementary_two(const AbelianGroup& g) {
    return std::all_of(g.invariant_factors().begin(), g.invariant_factors().end(), [](i64 d) { return d == 2; });
}

i64 squarefree_part(i64 a) {
    if (a == 0) throw PreconditionError("zero radicand");
    i64 s = a < 0 ? -1 : 1;
    for (auto [p, k] : factorize(a))
        if (k % 2) s *= p;
    return s;
}

int legendre(i64 u, i64 p) {
    u %= p;
    if (u < 0) u += p;
    return powmod(static_cast<u64>(u), static_cast<u64>((p - 1) / 2), static_cast<u64>(p)) == 1 ? 1 : -1;
}

// (p^t1 u1, p^t2 u2)_p with u1, u2 units given modulo p (odd p) or 8 (p = 2)
int hilbert_local(i64 t1, i64 u1, i64 t2, i64 u2, i64 p) {
    if (p == 2) {
        auto eps = [](i64 u) { return ((u - 1) / 2) & 1; };
        auto omega = [](i64 u) { return ((u * u - 1) / 8) & 1; };
        u1 = ((u1 % 8) + 8) % 8;
        u2 = ((u2 % 8) + 8) % 8;
        const i64 e = eps(u1) * eps(u2) + (t1 & 1) * omega(u2) + (t2 & 1) * omega(u1);
        return (e & 1) ? -1 : 1;
    }
    int s = ((t1 & 1) && (t2 & 1) && ((p - 1) / 2 % 2 == 1)) ? -1 : 1;
    if (t2 & 1) s *= legendre(u1, p);
    if (t1 & 1) s *= legendre(u2, p);
    return s;
}

}  // namespace

i64 quadratic_radicand(const GChar& chi, int coord) {
    if (!elementary_two(*chi.group) || coord < 0 || coord >= chi.group->rank())
        throw PreconditionError("quadratic_radicand: character must map to an elementary abelian 2-group");
    i64 r = 1;
    for (const auto& b : chi.blocks) {
        const i64 h = b.h.c[coord];
        if (b.p == 2) {
            const i64 h5 = b.h5.c[coord];
            if (h5) r *= h ? -2 : 2;
            else if (h) r *= -1;
        } else if (h) {
            r *= b.p % 4 == 1 ? b.p : -b.p;
        }
    }
    return r;
}

int hilbert_symbol(const FactoredRational& x, const FactoredRational& y, Place v) {
    if (v.is_infinite()) return (x.sign() < 0 && y.sign() < 0) ? -1 : 1;
    const i64 p = v.p;
    const i64 mod = p == 2 ? 8 : p;
    return hilbert_local(x.valuation(p), x.residue(mod, p), y.valuation(p), y.residue(mod, p), p);
}

// ---------------------------------------------------------------------------
// Biquadratic obstruction

namespace {

using i128 = __int128;

std::optional<i64> checked_pow(i64 p, i64 n) {
    i128 r = 1;
    for (i64 i = 0; i < n; ++i) {
        r *= p;
        if (r > (static_cast<i128>(1) << 62)) return std::nullopt;
    }
    return static_cast<i64>(r);
}

// square root of a modulo p^n (a a nonzero square in Q_p, p ∤ a)
i64 sqrt_mod_prime_power(i64 a, i64 p, i64 n, i64 mod) {
    const i64 am = ((a % mod) + mod) % mod;
    if (p == 2) {
        i64 r = 1;
        for (i64 k = 3; k < n; ++k) {
            const i64 m = i64{1} << (k + 1);
            if ((static_cast<i128>(r) * r - am) % m != 0) r += i64{1} << (k - 1);
        }
        return r % mod;
    }
    // Tonelli–Shanks modulo p, then Newton lifting
    const i64 ap = am % p;
    i64 r = 0;
    if (p % 4 == 3) {
        r = static_cast<i64>(powmod(static_cast<u64>(ap), static_cast<u64>((p + 1) / 4), static_cast<u64>(p)));
    } else {
        i64 q = p - 1;
        int s = 0;
        while (q % 2 == 0) q /= 2, ++s;
        i64 z = 2;
        while (legendre(z, p) == 1) ++z;
        u64 m = s, c = powmod(z, q, p), t = powmod(ap, q, p), x = powmod(ap, (q + 1) / 2, p);
        while (t != 1) {
            u64 i = 0, tt = t;
            while (tt != 1) tt = mulmod(tt, tt, p), ++i;
            u64 bb = c;
            for (u64 j = 0; j + i + 1 < m; ++j) bb = mulmod(bb, bb, p);
            m = i;
            c = mulmod(bb, bb, p);
            t = mulmod(t, c, p);
            x = mulmod(x, bb, p);
        }
        r = static_cast<i64>(x);
    }
    // Newton iteration doubles the p-adic precision each step
    for (i64 prec = 1; prec < n; prec *= 2) {
        const i128 f = (static_cast<i128>(r) * r - am) % mod;
        const i64 inv = inverse_mod(static_cast<i64>((2 * static_cast<i128>(r)) % mod), mod);
        r = static_cast<i64>(((static_cast<i128>(r) - f * inv) % mod + mod) % mod);
    }
    return r;
}

struct QuadSolution {
    i64 x, z, d;  // y = (x + z sqrt a) / d
};

std::optional<QuadSolution> find_quadratic_norm(i64 a, const FactoredRational& alpha, i64 height) {
    auto v = alpha.value();
    if (!v) return std::nullopt;
    const auto [n, den] = *v;
    for (i64 d = 1; d <= height; ++d) {
        const i128 rhs_num = static_cast<i128>(n) * d * d;
        if (rhs_num % den) continue;
        const i128 rhs = rhs_num / den;
        for (i64 z = 0; z <= height; ++z) {
            const i128 xx = rhs + static_cast<i128>(a) * z * z;
            if (xx < 0) continue;
            i128 x = static_cast<i128>(std::sqrt(static_cast<long double>(xx)));
            while (x * x > xx) --x;
            while ((x + 1) * (x + 1) <= xx) ++x;
            if (x * x == xx && x <= (static_cast<i128>(1) << 62)) return QuadSolution{static_cast<i64>(x), z, d};
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<int> biquadratic_obstruction(i64 a_in, i64 b_in, const FactoredRational& alpha, i64 height) {
    const i64 a = squarefree_part(a_in), b = squarefree_part(b_in);
    if (a == 1 || b == 1 || a == b) throw PreconditionError("biquadratic_obstruction: Q(sqrt a, sqrt b) is not biquadratic");
    const FactoredRational fa = FactoredRational::from_integer(a), fb = FactoredRational::from_integer(b);
    const FactoredRational fab = fa * fb;

    std::set<Place> places{Place::infinity(), Place::prime(2)};
    for (i64 p : fa.support()) places.insert(Place::prime(p));
    for (i64 p : fb.support()) places.insert(Place::prime(p));
    for (i64 p : alpha.support()) places.insert(Place::prime(p));
    for (const auto& v : places) {
        const bool cyclic = local_power_test(fa, v, 2) || local_power_test(fb, v, 2) || local_power_test(fab, v, 2);
        if (!cyclic) throw PreconditionError("biquadratic_obstruction: non-cyclic decomposition group at " + v.to_string());
        if (hilbert_symbol(alpha, fa, v) != 1 || hilbert_symbol(alpha, fb, v) != 1)
            throw PreconditionError("biquadratic_obstruction: alpha is not a local norm at " + v.to_string());
    }

    auto sol = find_quadratic_norm(a, alpha, height);
    if (!sol) return std::nullopt;
    const auto [x, z, d] = *sol;

    // y_w at places v split in Q(sqrt a); only ∞, 2, primes of b and primes
    // of alpha·d can give a nontrivial symbol (y, b)_v.
    std::set<Place> check = places;
    for (auto [p, k] : factorize(d)) check.insert(Place::prime(p));
    int parity = 0;
    for (const auto& v : check) {
        if (!local_power_test(fa, v, 2)) continue;
        // the search returns x, z >= 0, so y > 0 at a split real place
        if (v.is_infinite()) continue;
        const i64 p = v.p;
        const i128 norm_val = static_cast<i128>(x) * x - static_cast<i128>(a) * z * z;
        if (norm_val == 0) return std::nullopt;
        i64 big_v = 0;
        for (i128 t = norm_val < 0 ? -norm_val : norm_val; t % p == 0; t /= p) ++big_v;
        const i64 extra = p == 2 ? 3 : 1;
        auto mod_opt = checked_pow(p, big_v + extra + 1);
        if (!mod_opt) return std::nullopt;
        const i64 mod = *mod_opt;
        const i64 r = sqrt_mod_prime_power(a, p, big_v + extra + 1, mod);
        i128 w = (static_cast<i128>(x) + static_cast<i128>(z) * r) % mod;
        if (w < 0) w += mod;
        if (w == 0) return std::nullopt;
        i64 t = 0;
        while (w % p == 0) w /= p, ++t;
        const i64 unit_mod = p == 2 ? 8 : p;
        i64 u = static_cast<i64>(w % unit_mod);
        i64 dd = d;
        i64 td = 0;
        while (dd % p == 0) dd /= p, ++td;
        u = static_cast<i64>(mulmod(static_cast<u64>(u), static_cast<u64>(inverse_mod(dd % unit_mod, unit_mod)), unit_mod));
        const int sym = hilbert_local(t - td, u, fb.valuation(p), fb.residue(unit_mod, p), p);
        if (sym == -1) parity ^= 1;
    }
    return parity;
}

// ---------------------------------------------------------------------------
// Witnesses

namespace {

std::vector<i64> signed_order(i64 h) {
    std::vector<i64> out{0};
    for (i64 k = 1; k <= h; ++k) out.push_back(k), out.push_back(-k);
    return out;
}

}  // namespace

std::optional<NormWitness> witness_search(const GChar& chi, const FactoredRational& alpha, i64 height) {
    if (height > kWitnessHeightCap) throw PreconditionError("witness_search: height above the configured cap");
    const auto& g = *chi.group;
    if (!elementary_two(g) || g.rank() < 1 || g.rank() > 2)
        throw PreconditionError("witness_search: only quadratic and biquadratic fields are supported");
    auto v = alpha.value();
    if (!v) return std::nullopt;
    const i128 n = v->first, den = v->second;

    // values with |c| <= h in the order 0, 1, -1, 2, -2, ...; the shell
    // max |c_i| = h is visited by letting c0 range freely only when another
    // coordinate already reaches h
    const auto order = signed_order(height);
    auto upto = [&](i64 h) { return static_cast<std::size_t>(2 * h + 1); };
    auto rim = [](i64 h) { return h == 0 ? std::vector<i64>{0} : std::vector<i64>{h, -h}; };

    if (g.rank() == 1) {
        const i128 a = quadratic_radicand(chi, 0);
        for (i64 h = 0; h <= height; ++h)
            for (i64 q : {1, 2}) {
                for (std::size_t i1 = 0; i1 < upto(h); ++i1) {
                    const i64 c1 = order[i1];
                    const auto c0s = std::llabs(c1) == h ? std::vector<i64>(order.begin(), order.begin() + upto(h)) : rim(h);
                    for (i64 c0 : c0s) {
                        const i128 num = static_cast<i128>(c0) * c0 - a * c1 * c1;
                        if (num * den == n * q * q)
                            return NormWitness{q, {c0, c1}, {1, static_cast<i64>(a)}};
                    }
                }
            }
        return std::nullopt;
    }

    const i64 a = quadratic_radicand(chi, 0), b = quadratic_radicand(chi, 1);
    // basis {1, sqrt a, sqrt b, sqrt a sqrt b}; N = P^2 - a Q^2 where
    // P + Q sqrt a is the relative norm down to Q(sqrt a)
    const i128 A = a, B = b;
    for (i64 h = 0; h <= height; ++h) {
        const std::vector<i64> full(order.begin(), order.begin() + upto(h));
        const std::vector<i64> edge = rim(h);
        for (i64 q : {1, 2, 4}) {
            const i128 q4 = static_cast<i128>(q) * q * q * q;
            for (i64 c3 : full)
                for (i64 c2 : full)
                    for (i64 c1 : full) {
                        const bool reached = std::llabs(c1) == h || std::llabs(c2) == h || std::llabs(c3) == h;
                        const i128 base = A * c1 * c1 - B * c2 * c2 - A * B * c3 * c3;
                        const i128 cross = 2 * B * c2 * c3;
                        for (i64 c0 : reached ? full : edge) {
                            const i128 p = static_cast<i128>(c0) * c0 + base;
                            const i128 qq = 2 * static_cast<i128>(c0) * c1 - cross;
                            const i128 num = p * p - A * qq * qq;
                            if (num * den == n * q4) return NormWitness{q, {c0, c1, c2, c3}, {1, a, b, a * b}};
                        }
                    }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

NormStatus global_norm_status(const GChar& chi, const FactoredRational& alpha, const NormOptions& opts) {
    require_surjective(chi, "global_norm_status");
    NormStatus st;
    if (auto bad = first_nonlocal_place(chi, alpha)) {
        st.tag = NormTag::NotLocal;
        st.place = bad;
        return st;
    }
    const auto& g = *chi.group;
    const bool small_field = elementary_two(g) && g.rank() <= 2;
    if (hnp_holds(chi)) {
        st.tag = NormTag::GlobalNorm;
        st.certificate = Certificate::HNPHolds;
        if (opts.attach_witness && small_field) {
            if (auto w = witness_search(chi, alpha, std::min(opts.witness_height, kWitnessHeightCap))) {
                st.certificate = Certificate::Witness;
                st.witness = w;
            }
        }
        return st;
    }
    if (small_field && g.rank() == 2) {
        const i64 a = quadratic_radicand(chi, 0), b = quadratic_radicand(chi, 1);
        if (auto ob = biquadratic_obstruction(a, b, alpha)) {
            st.obstruction = *ob;
            st.certificate = Certificate::Obstruction;
            st.tag = *ob == 0 ? NormTag::GlobalNorm : NormTag::NotGlobalNorm;
            return st;
        }
    }
    if (small_field) {
        if (auto w = witness_search(chi, alpha, std::min(opts.witness_height, kWitnessHeightCap))) {
            st.tag = NormTag::GlobalNorm;
            st.certificate = Certificate::Witness;
            st.witness = w;
            return st;
        }
    }
    st.tag = NormTag::Undetermined;
    return st;
}

}  // namespace abelcount
