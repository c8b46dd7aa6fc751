#include "abelcount/characters.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>

#include "abelcount/errors.hpp"

namespace abelcount {

namespace {

// discrete log of x in the cyclic group generated by y (of order o) modulo mod
i64 small_log(u64 x, u64 y, i64 o, u64 mod) {
    u64 cur = 1;
    for (i64 i = 0; i < o; ++i) {
        if (cur == x) return i;
        cur = mulmod(cur, y, mod);
    }
    throw std::logic_error("small_log: element outside the subgroup");
}

}  // namespace

CharBlock make_block(const AbelianGroup& g, i64 p, const GroupElement& h, const GroupElement& h5) {
    if (!is_prime(static_cast<u64>(p))) throw PreconditionError("make_block: p must be prime");
    CharBlock b{p, 0, 0, h, h5.c.empty() ? g.zero() : h5};
    if (p == 2) {
        b.g = 5;
        if (!g.mul(2, b.h).is_zero()) throw PreconditionError("make_block: image of -1 must have order <= 2");
        const i64 o5 = g.element_order(b.h5);
        if ((o5 & (o5 - 1)) != 0) throw PreconditionError("make_block: image of 5 must have 2-power order");
        if (o5 > 1)
            b.k = valuation(o5, 2) + 2;
        else
            b.k = b.h.is_zero() ? 0 : 2;
        return b;
    }
    if (!b.h5.is_zero()) throw PreconditionError("make_block: odd blocks have a single generator");
    const i64 o = g.element_order(b.h);
    const int t = valuation(o, p);
    if ((p - 1) % (o / ipow(p, t)) != 0) throw PreconditionError("make_block: image order does not divide |Z_p^*|");
    b.k = o == 1 ? 0 : t + 1;
    b.g = b.k > 0 ? primitive_root(p) : 0;
    return b;
}

GroupElement block_value(const AbelianGroup& g, const CharBlock& b, i64 u) {
    if (b.k == 0) return g.zero();
    const i64 mod = b.modulus();
    u %= mod;
    if (u < 0) u += mod;
    if (b.p == 2) {
        const bool minus = u % 4 == 3;
        GroupElement r = minus ? b.h : g.zero();
        if (b.k == 2) return r;
        const i64 up = minus ? mod - u : u;
        const i64 o = g.element_order(b.h5);
        if (o == 1) return r;
        const u64 n = static_cast<u64>(mod / 4);
        const u64 x = powmod(static_cast<u64>(up), n / o, mod);
        const u64 y = powmod(5, n / o, mod);
        return g.add(r, g.mul(small_log(x, y, o, mod), b.h5));
    }
    const i64 o = g.element_order(b.h);
    const u64 n = static_cast<u64>((b.p - 1) * (mod / b.p));
    const u64 x = powmod(static_cast<u64>(u), n / o, mod);
    if (o == 2) return x == 1 ? g.zero() : b.h;
    const i64 gen = b.g ? b.g : primitive_root(b.p);
    const u64 y = powmod(static_cast<u64>(gen), n / o, mod);
    return g.mul(small_log(x, y, o, mod), b.h);
}

// ---------------------------------------------------------------------------

i64 GChar::modulus() const {
    i64 m = 1;
    for (const auto& b : blocks) m *= b.modulus();
    return m;
}

GroupElement GChar::evaluate(i64 n) const {
    GroupElement r = group->zero();
    for (const auto& b : blocks) r = group->add(r, block_value(*group, b, n));
    return r;
}

GroupElement GChar::sign_image() const { return evaluate(-1); }

const CharBlock* GChar::block_at(i64 p) const {
    for (const auto& b : blocks)
        if (b.p == p) return &b;
    return nullptr;
}

std::vector<GroupElement> GChar::image_generators() const {
    std::vector<GroupElement> gens;
    for (const auto& b : blocks) {
        gens.push_back(b.h);
        if (b.p == 2) gens.push_back(b.h5);
    }
    return gens;
}

Subgroup GChar::image() const {
    auto gens = image_generators();
    return Subgroup::generated(*group, gens);
}

bool GChar::is_surjective() const { return image().is_whole(); }

std::string GChar::serialize() const {
    std::string s = std::to_string(modulus());
    for (const auto& b : blocks) {
        s += "; " + std::to_string(b.p) + "^" + std::to_string(b.k) + ":[" + to_string(b.h);
        if (b.p == 2) s += "," + to_string(b.h5);
        s += "]";
    }
    return s;
}

GChar trivial_character(std::shared_ptr<const AbelianGroup> g) { return GChar{std::move(g), {}}; }

namespace {

struct QuadraticData {
    std::vector<i64> odd_primes;
    int two_level = 0;  // 0, 2 or 3
    bool negative = false;
};

QuadraticData quadratic_data(i64 a) {
    if (a == 0) throw PreconditionError("quadratic_character: zero radicand");
    QuadraticData q;
    q.negative = a < 0;
    i64 core = q.negative ? -1 : 1;
    for (auto [p, k] : factorize(a))
        if (k % 2) core *= p;
    if (core == 1) throw PreconditionError("quadratic_character: radicand is a square");
    for (auto [p, k] : factorize(core))
        if (p != 2) q.odd_primes.push_back(p);
    const i64 r = ((core % 4) + 4) % 4;
    q.two_level = r == 1 ? 0 : (r == 3 ? 2 : 3);
    return q;
}

// blocks of the quadratic character as 0/1 data: (p, level, image of g or -1, image of 5)
std::map<i64, std::array<i64, 3>> quadratic_blocks(i64 a) {
    auto q = quadratic_data(a);
    std::map<i64, std::array<i64, 3>> out;
    i64 parity = 0;
    for (i64 p : q.odd_primes) {
        out[p] = {1, 1, 0};
        if (p % 4 == 3) parity ^= 1;  // log_g(-1) = (p-1)/2
    }
    const i64 need = q.negative ? 1 : 0;
    const i64 h_minus = need ^ parity;
    if (q.two_level == 0) {
        if (h_minus != 0) throw std::logic_error("quadratic_character: parity mismatch");
    } else if (q.two_level == 2) {
        if (h_minus != 1) throw std::logic_error("quadratic_character: parity mismatch");
        out[2] = {2, 1, 0};
    } else {
        out[2] = {3, h_minus, 1};
    }
    return out;
}

}  // namespace

GChar quadratic_character(i64 a) {
    auto g = std::make_shared<const AbelianGroup>(AbelianGroup::from_cyclic_orders(std::vector<i64>{2}));
    GChar chi{g, {}};
    for (auto [p, data] : quadratic_blocks(a)) {
        GroupElement h = g->reduce(std::vector<i64>{data[1]});
        GroupElement h5 = g->reduce(std::vector<i64>{data[2]});
        chi.blocks.push_back(make_block(*g, p, h, h5));
    }
    return chi;
}

GChar biquadratic_character(i64 a, i64 b) {
    auto g = std::make_shared<const AbelianGroup>(AbelianGroup::from_cyclic_orders(std::vector<i64>{2, 2}));
    auto qa = quadratic_blocks(a);
    auto qb = quadratic_blocks(b);
    std::set<i64> primes;
    for (auto& [p, d] : qa) primes.insert(p);
    for (auto& [p, d] : qb) primes.insert(p);
    GChar chi{g, {}};
    for (i64 p : primes) {
        std::array<i64, 3> da{0, 0, 0}, db{0, 0, 0};
        if (qa.count(p)) da = qa[p];
        if (qb.count(p)) db = qb[p];
        GroupElement h = g->reduce(std::vector<i64>{da[1], db[1]});
        GroupElement h5 = g->reduce(std::vector<i64>{da[2], db[2]});
        chi.blocks.push_back(make_block(*g, p, h, h5));
    }
    return chi;
}

// ---------------------------------------------------------------------------

std::vector<GroupElement> LocalGChar::image_generators() const {
    if (v.is_infinite()) return {sign};
    std::vector<GroupElement> gens{frob};
    if (unit) {
        gens.push_back(unit->h);
        if (unit->p == 2) gens.push_back(unit->h5);
    }
    return gens;
}

LocalGChar local_component(const GChar& chi, Place v) {
    const auto& g = *chi.group;
    LocalGChar loc{v, chi.group, std::nullopt, g.zero(), g.zero()};
    if (v.is_infinite()) {
        loc.sign = chi.sign_image();
        return loc;
    }
    for (const auto& b : chi.blocks) {
        if (b.p == v.p)
            loc.unit = b;
        else
            loc.frob = g.add(loc.frob, block_value(g, b, v.p));
    }
    return loc;
}

GroupElement evaluate_local(const LocalGChar& chi_v, const FactoredRational& alpha) {
    const auto& g = *chi_v.group;
    if (chi_v.v.is_infinite()) return alpha.sign() < 0 ? chi_v.sign : g.zero();
    const i64 p = chi_v.v.p;
    GroupElement r = g.mul(alpha.valuation(p), chi_v.frob);
    if (chi_v.unit) {
        const i64 u = alpha.residue(chi_v.unit->modulus(), p);
        r = g.sub(r, block_value(g, *chi_v.unit, u));
    }
    return r;
}

i64 pairing(const LocalGChar& chi_v, const std::vector<FactoredRational>& x) {
    const auto& g = *chi_v.group;
    const auto& d = g.invariant_factors();
    if (x.size() != d.size()) throw PreconditionError("pairing: one class per cyclic factor expected");
    const i64 e = g.exponent();
    i64 total = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (x[i].is_one()) continue;
        total += (e / d[i]) * evaluate_local(chi_v, x[i]).c[i];
    }
    return total % e;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

class Enumerator {
public:
    Enumerator(const AbelianGroup& g, i64 b1, i64 b2, bool surjective_only,
               const std::function<void(const GChar&)>& visit)
        : g_(g), b1_(b1), b2_(b2), surj_(surjective_only), visit_(visit), e_(g.exponent()) {
        chi_.group = std::make_shared<const AbelianGroup>(g);
        primes_ = primes_up_to(b2);
        gen_cache_.assign(primes_.size(), 0);
        order_ = g.order();
        in_span_.push_back(std::vector<char>(static_cast<std::size_t>(order_), 0));
        in_span_.back()[0] = 1;
        span_size_.push_back(1);
        for (i64 p : primes_) {
            if (e_ % p) continue;
            wild_[p] = wild_blocks(p);
        }
    }

    void run() { dfs(0, 1); }

private:
    i64 index_of(const GroupElement& x) const {
        i64 idx = 0;
        const auto& d = g_.invariant_factors();
        for (std::size_t i = 0; i < d.size(); ++i) idx = idx * d[i] + x.c[i];
        return idx;
    }

    const std::vector<GroupElement>& tame_images(i64 t) {
        auto it = tame_.find(t);
        if (it != tame_.end()) return it->second;
        auto elems = g_.torsion_elements(t);
        elems.erase(std::remove_if(elems.begin(), elems.end(), [](const GroupElement& x) { return x.is_zero(); }),
                    elems.end());
        return tame_[t] = std::move(elems);
    }

    // blocks at p | e, ascending level
    std::vector<CharBlock> wild_blocks(i64 p) {
        std::vector<CharBlock> out;
        const auto elems = g_.elements();
        if (p == 2) {
            for (const auto& h : elems)
                for (const auto& h5 : elems) {
                    if (!g_.mul(2, h).is_zero()) continue;
                    const i64 o5 = g_.element_order(h5);
                    if ((o5 & (o5 - 1)) != 0) continue;
                    if (h.is_zero() && h5.is_zero()) continue;
                    out.push_back(make_block(g_, 2, h, h5));
                }
        } else {
            for (const auto& h : elems) {
                if (h.is_zero()) continue;
                const i64 o = g_.element_order(h);
                if ((p - 1) % (o / ipow(p, valuation(o, p))) != 0) continue;
                out.push_back(make_block(g_, p, h, g_.zero()));
            }
        }
        std::stable_sort(out.begin(), out.end(), [](const CharBlock& a, const CharBlock& b) { return a.k < b.k; });
        return out;
    }

    void push_span(const GroupElement& h, const GroupElement& h5) {
        if (!surj_) return;
        std::vector<char> cur = in_span_.back();
        std::vector<GroupElement> members;
        for (const auto& x : g_.elements())
            if (cur[static_cast<std::size_t>(index_of(x))]) members.push_back(x);
        for (const GroupElement* gen : {&h, &h5}) {
            if (gen->c.empty() || gen->is_zero()) continue;
            std::vector<GroupElement> next = members;
            for (const auto& x : members) {
                GroupElement y = g_.add(x, *gen);
                while (!cur[static_cast<std::size_t>(index_of(y))]) {
                    cur[static_cast<std::size_t>(index_of(y))] = 1;
                    next.push_back(y);
                    y = g_.add(y, *gen);
                }
            }
            members = std::move(next);
        }
        span_size_.push_back(static_cast<i64>(members.size()));
        in_span_.push_back(std::move(cur));
    }

    void pop_span() {
        if (!surj_) return;
        in_span_.pop_back();
        span_size_.pop_back();
    }

    void descend(std::size_t i, i64 m, CharBlock b) {
        push_span(b.h, b.h5);
        chi_.blocks.push_back(std::move(b));
        dfs(i + 1, m);
        chi_.blocks.pop_back();
        pop_span();
    }

    void dfs(std::size_t start, i64 m) {
        if (m >= b1_ && (!surj_ || span_size_.back() == order_)) visit_(chi_);
        for (std::size_t i = start; i < primes_.size() && m <= b2_ / primes_[i]; ++i) {
            const i64 p = primes_[i];
            if (e_ % p == 0) {
                for (const auto& b : wild_.at(p)) {
                    const i64 pk = b.modulus();
                    if (m > b2_ / pk) break;
                    descend(i, m * pk, b);
                }
                continue;
            }
            const i64 t = std::gcd(e_, p - 1);
            if (t == 1) continue;
            const auto& imgs = tame_images(t);
            i64 gen = 0;
            if (e_ > 2) {
                if (!gen_cache_[i]) gen_cache_[i] = primitive_root(p);
                gen = gen_cache_[i];
            }
            for (const auto& h : imgs) descend(i, m * p, CharBlock{p, 1, gen, h, g_.zero()});
        }
    }

    const AbelianGroup& g_;
    i64 b1_, b2_;
    bool surj_;
    const std::function<void(const GChar&)>& visit_;
    i64 e_;
    i64 order_;
    GChar chi_;
    std::vector<i64> primes_;
    std::vector<i64> gen_cache_;
    std::map<i64, std::vector<GroupElement>> tame_;
    std::map<i64, std::vector<CharBlock>> wild_;
    std::vector<std::vector<char>> in_span_;
    std::vector<i64> span_size_;
};

}  // namespace

void for_each_character(const AbelianGroup& g, i64 b1, i64 b2, bool surjective_only,
                        const std::function<void(const GChar&)>& visit) {
    if (b2 < 1) return;
    Enumerator(g, std::max<i64>(b1, 1), b2, surjective_only, visit).run();
}

std::vector<GChar> enumerate_by_conductor(const AbelianGroup& g, i64 bound, bool surjective_only,
                                          const std::function<bool(const GChar&)>& filter) {
    if (bound < 1) throw PreconditionError("enumerate_by_conductor: bound must be positive");
    std::vector<std::pair<std::pair<i64, std::string>, GChar>> items;
    for_each_character(g, 1, bound, surjective_only, [&](const GChar& chi) {
        if (!filter || filter(chi)) items.push_back({{chi.conductor(), chi.serialize()}, chi});
    });
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<GChar> out;
    out.reserve(items.size());
    for (auto& it : items) out.push_back(std::move(it.second));
    return out;
}

}  // namespace abelcount
