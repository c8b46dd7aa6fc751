#include "abelcount/kummer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>

#include "abelcount/errors.hpp"

namespace abelcount {

// ---------------------------------------------------------------------------
// FactoredRational

FactoredRational FactoredRational::from_integer(i64 n) {
    if (n == 0) throw ConfigError("zero is not a valid element of Q^*");
    FactoredRational r;
    r.sign_ = n < 0 ? -1 : 1;
    for (auto [p, k] : factorize(n)) r.exps_[p] = k;
    return r;
}

FactoredRational FactoredRational::from_fraction(i64 num, i64 den) {
    if (den == 0) throw ConfigError("zero denominator");
    return from_integer(num) * from_integer(den).inverse();
}

FactoredRational FactoredRational::prime_power(i64 p, int k) {
    FactoredRational r;
    if (k != 0) r.exps_[p] = k;
    return r;
}

FactoredRational FactoredRational::minus_one() {
    FactoredRational r;
    r.sign_ = -1;
    return r;
}

int FactoredRational::valuation(i64 p) const {
    auto it = exps_.find(p);
    return it == exps_.end() ? 0 : it->second;
}

std::vector<i64> FactoredRational::support() const {
    std::vector<i64> out;
    for (auto [p, k] : exps_) out.push_back(p);
    return out;
}

FactoredRational FactoredRational::operator*(const FactoredRational& o) const {
    FactoredRational r = *this;
    r.sign_ *= o.sign_;
    for (auto [p, k] : o.exps_) {
        int& e = r.exps_[p];
        e += k;
        if (e == 0) r.exps_.erase(p);
    }
    return r;
}

FactoredRational FactoredRational::inverse() const {
    FactoredRational r = *this;
    for (auto& [p, k] : r.exps_) k = -k;
    return r;
}

FactoredRational FactoredRational::pow(i64 k) const {
    FactoredRational r;
    if (k == 0) return r;
    r.sign_ = (sign_ < 0 && (k % 2 != 0)) ? -1 : 1;
    for (auto [p, e] : exps_) r.exps_[p] = static_cast<int>(e * k);
    return r;
}

FactoredRational FactoredRational::abs() const {
    FactoredRational r = *this;
    r.sign_ = 1;
    return r;
}

bool FactoredRational::is_rational_power(i64 n) const {
    if (n == 1) return true;
    if (sign_ < 0 && n % 2 == 0) return false;
    return std::all_of(exps_.begin(), exps_.end(), [n](const auto& pe) { return pe.second % n == 0; });
}

i64 FactoredRational::residue(i64 m, i64 skip) const {
    if (m == 1) return 0;
    u64 num = 1, den = 1;
    for (auto [p, k] : exps_) {
        if (p == skip) continue;
        u64 pk = powmod(static_cast<u64>(p % m), static_cast<u64>(std::abs(k)), static_cast<u64>(m));
        if (k > 0)
            num = mulmod(num, pk, m);
        else
            den = mulmod(den, pk, m);
    }
    i64 r = static_cast<i64>(mulmod(num, static_cast<u64>(inverse_mod(static_cast<i64>(den), m)), m));
    if (sign_ < 0) r = (m - r) % m;
    return r;
}

std::optional<std::pair<i64, i64>> FactoredRational::value() const {
    __int128 num = 1, den = 1;
    constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
    for (auto [p, k] : exps_) {
        for (int i = 0; i < std::abs(k); ++i) {
            if (k > 0)
                num *= p;
            else
                den *= p;
            if (num > lim || den > lim) return std::nullopt;
        }
    }
    return std::make_pair(static_cast<i64>(num) * sign_, static_cast<i64>(den));
}

double FactoredRational::log_abs() const {
    double s = 0;
    for (auto [p, k] : exps_) s += k * std::log(static_cast<double>(p));
    return s;
}

std::string FactoredRational::to_string() const {
    if (auto v = value()) {
        std::string s = std::to_string(v->first);
        if (v->second != 1) s += "/" + std::to_string(v->second);
        return s;
    }
    std::string s = sign_ < 0 ? "-" : "";
    bool first = true;
    for (auto [p, k] : exps_) {
        if (!first) s += "*";
        first = false;
        s += std::to_string(p) + "^" + std::to_string(k);
    }
    return s;
}

FactoredRational parse_rational(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    auto bad = [&] { return ConfigError("bad rational literal '" + std::string(text) + "'"); };
    if (s.empty()) throw bad();
    std::size_t pos = 0;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        pos = 1;
    }
    auto slash = s.find('/', pos);
    std::string num = s.substr(pos, slash == std::string::npos ? std::string::npos : slash - pos);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    auto digits = [](const std::string& t) {
        return !t.empty() && t.size() <= 18 &&
               std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    };
    if (!digits(num) || !digits(den)) throw bad();
    i64 n = std::stoll(num), d = std::stoll(den);
    if (n == 0 || d == 0) throw bad();
    return FactoredRational::from_fraction(neg ? -n : n, d);
}

std::vector<FactoredRational> parse_rational_list(std::string_view text) {
    std::vector<FactoredRational> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto next = text.find(',', pos);
        auto tok = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        out.push_back(parse_rational(tok));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// NormSubgroup

NormSubgroup::NormSubgroup(std::vector<FactoredRational> gens) : gens_(std::move(gens)) {
    std::set<i64> primes;
    for (const auto& g : gens_)
        for (auto [p, k] : g.exponents()) primes.insert(p);
    std::vector<i64> cols(primes.begin(), primes.end());
    struct Row {
        int sign;  // 0 or 1
        std::vector<i64> v;
    };
    std::vector<Row> rows;
    for (const auto& g : gens_) {
        Row r{g.sign() < 0 ? 1 : 0, {}};
        for (i64 p : cols) r.v.push_back(g.valuation(p));
        rows.push_back(std::move(r));
    }
    // integer echelon form; the sign bit follows the row operations
    std::size_t top = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        while (true) {
            std::size_t best = rows.size();
            for (std::size_t i = top; i < rows.size(); ++i)
                if (rows[i].v[c] != 0 && (best == rows.size() || std::llabs(rows[i].v[c]) < std::llabs(rows[best].v[c])))
                    best = i;
            if (best == rows.size()) break;
            std::swap(rows[top], rows[best]);
            bool done = true;
            for (std::size_t i = top + 1; i < rows.size(); ++i) {
                if (rows[i].v[c] == 0) continue;
                i64 q = rows[i].v[c] / rows[top].v[c];
                for (std::size_t j = 0; j < cols.size(); ++j) rows[i].v[j] -= q * rows[top].v[j];
                rows[i].sign = static_cast<int>((rows[i].sign + std::llabs(q) * rows[top].sign) % 2);
                if (rows[i].v[c] != 0) done = false;
            }
            if (done) {
                ++top;
                break;
            }
        }
    }
    for (std::size_t i = top; i < rows.size(); ++i)
        if (rows[i].sign) minus_one_ = true;
    for (std::size_t i = 0; i < top; ++i) {
        FactoredRational b;
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (rows[i].v[j]) b = b * FactoredRational::prime_power(cols[j], static_cast<int>(rows[i].v[j]));
        if (rows[i].sign && !minus_one_) b = b * FactoredRational::minus_one();
        basis_.push_back(std::move(b));
    }
}

std::vector<i64> NormSubgroup::support() const {
    std::set<i64> s;
    for (const auto& g : gens_)
        for (i64 p : g.support()) s.insert(p);
    return {s.begin(), s.end()};
}

i64 NormSubgroup::index_of_powers(i64 n) const {
    i64 size = (minus_one_ && n % 2 == 0) ? 2 : 1;
    for (std::size_t i = 0; i < basis_.size(); ++i) size *= n;
    return size;
}

std::vector<FactoredRational> NormSubgroup::representatives_mod_powers(i64 n) const {
    if (index_of_powers(n) > 4'000'000) throw PreconditionError("A/A^n too large to enumerate");
    std::vector<FactoredRational> out{FactoredRational{}};
    if (minus_one_ && n % 2 == 0) out.push_back(FactoredRational::minus_one());
    for (const auto& b : basis_) {
        std::vector<FactoredRational> next;
        for (const auto& r : out) {
            FactoredRational cur = r;
            for (i64 k = 0; k < n; ++k) {
                next.push_back(cur);
                cur = cur * b;
            }
        }
        out = std::move(next);
    }
    return out;
}

std::string NormSubgroup::to_string() const {
    if (gens_.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        if (i) s += ",";
        s += gens_[i].to_string();
    }
    return s;
}

// ---------------------------------------------------------------------------
// Places

PlaceSet parse_places(std::string_view text) {
    PlaceSet out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto next = text.find(',', pos);
        std::string tok;
        for (char c : text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos))
            if (!std::isspace(static_cast<unsigned char>(c))) tok += c;
        if (tok == "inf" || tok == "oo" || tok == "infinity") {
            out.insert(Place::infinity());
        } else {
            if (tok.empty() || tok.size() > 18 ||
                !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
                throw ConfigError("bad place '" + tok + "'");
            i64 p = std::stoll(tok);
            if (!is_prime(static_cast<u64>(p))) throw ConfigError("place '" + tok + "' is not a prime");
            out.insert(Place::prime(p));
        }
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string to_string(const PlaceSet& s) {
    std::string out;
    for (const auto& v : s) {
        if (!out.empty()) out += ",";
        out += v.to_string();
    }
    return out;
}

PlaceSet minimal_admissible(const AbelianGroup& g, const NormSubgroup& a) {
    PlaceSet s{Place::infinity()};
    for (i64 p : primes_up_to(g.order())) s.insert(Place::prime(p));
    for (i64 p : a.support()) s.insert(Place::prime(p));
    return s;
}

bool is_admissible(const PlaceSet& s, const AbelianGroup& g, const NormSubgroup& a) {
    for (const auto& v : minimal_admissible(g, a))
        if (!s.count(v)) return false;
    return true;
}

void require_admissible(const PlaceSet& s, const AbelianGroup& g, const NormSubgroup& a) {
    for (const auto& v : minimal_admissible(g, a))
        if (!s.count(v))
            throw PreconditionError("inadmissible S: missing place " + v.to_string() + " (S = {" +
                                    to_string(s) + "})");
}

// ---------------------------------------------------------------------------
// Power tests

bool local_power_test(const FactoredRational& beta, Place v, i64 d) {
    if (d < 1) throw PreconditionError("local_power_test: d must be positive");
    if (v.is_infinite()) return beta.is_positive() || d % 2 == 1;
    const i64 p = v.p;
    if (beta.valuation(p) % d != 0) return false;
    const int a = valuation(d, p);
    if (p == 2) {
        if (a == 0) return true;
        const i64 mod = i64{1} << (a + 3);
        const i64 u = beta.residue(mod, 2);
        return u % (i64{1} << (a + 2)) == 1;
    }
    const i64 g = std::gcd(d, p - 1);
    const i64 u1 = beta.residue(p, p);
    if (powmod(static_cast<u64>(u1), static_cast<u64>((p - 1) / g), static_cast<u64>(p)) != 1) return false;
    if (a == 0) return true;
    const i64 mod = ipow(p, a + 1);
    const i64 u = beta.residue(mod, p);
    return powmod(static_cast<u64>(u), static_cast<u64>(p - 1), static_cast<u64>(mod)) == 1;
}

namespace {

i64 quadratic_conductor(i64 s) {
    // s positive squarefree; conductor of Q(sqrt s)
    return s % 4 == 1 ? s : 4 * s;
}

// beta ∈ Q(μ_f)^{*2^k}.  By Schinzel's theorem beta = ε c^{n/2} with c > 0
// rational, and every 2^k-th root of beta is η·sqrt(c) with η^n = ε.  The
// root η sqrt(s) (s the squarefree part of c) lies in K = Q(μ_f) iff either
// both factors lie in K, or η ∉ K, η² ∈ K, sqrt(s) ∉ K and K(η) = K(sqrt(s)).
bool two_power_membership(const FactoredRational& beta, i64 f, int k) {
    const i64 n = i64{1} << k;
    const i64 h = n / 2;
    for (auto [p, e] : beta.exponents())
        if (e % h != 0) return false;
    i64 s = 1;
    for (auto [p, e] : beta.exponents())
        if ((e / h) % 2 != 0) s *= p;
    const i64 disc = quadratic_conductor(s);
    const i64 w = f % 2 == 0 ? f : 2 * f;
    auto sqrt_in = [&](i64 m) { return m % disc == 0; };
    const bool sqrt_in_k = sqrt_in(w);
    const i64 two_n = 2 * n;
    for (i64 j = 0; j < two_n; ++j) {
        const bool eta_n_is_minus = (j % 2) == 1;
        if (eta_n_is_minus != (beta.sign() < 0)) continue;
        const i64 o = two_n / std::gcd(j, two_n);
        const bool eta_in_k = w % o == 0;
        const bool eta_sq_in_k = w % (o % 2 == 0 ? o / 2 : o) == 0;
        if (eta_in_k && sqrt_in_k) return true;
        if (!eta_in_k && eta_sq_in_k && !sqrt_in_k && sqrt_in(std::lcm(w, o))) return true;
    }
    return false;
}

}  // namespace

bool cyclotomic_power_membership(const FactoredRational& beta, i64 f, i64 d) {
    if (f < 1 || d < 1) throw PreconditionError("cyclotomic_power_membership: f, d must be positive");
    if (d == 1) return true;
    for (auto [l, k] : factorize(d)) {
        if (l == 2) {
            if (!two_power_membership(beta, f, k)) return false;
        } else if (!beta.is_rational_power(ipow(l, k))) {
            return false;
        }
    }
    return true;
}

KummerDegree kummer_degree(const NormSubgroup& a, i64 f) {
    if (f < 1) throw PreconditionError("kummer_degree: f must be positive");
    i64 image = 1;
    for (auto [l, k] : factorize(f)) {
        const i64 q = ipow(l, k);
        i64 kernel = 0;
        auto reps = a.representatives_mod_powers(q);
        for (const auto& r : reps)
            if (cyclotomic_power_membership(r, f, q)) ++kernel;
        image *= static_cast<i64>(reps.size()) / kernel;
    }
    return {euler_phi(f) * image, image};
}

Rational varpi(const AbelianGroup& g, const NormSubgroup& a) {
    Rational total = 0;
    for (i64 f : divisors(g.exponent())) {
        if (f == 1) continue;
        total += Rational(order_class_count(g, f), kummer_degree(a, f).over_q);
    }
    return total;
}

i64 d_frobenian(const NormSubgroup& a, i64 e, i64 p) {
    if (!is_prime(static_cast<u64>(p)) || e % p == 0)
        throw PreconditionError("d_frobenian: p must be a prime not dividing e");
    for (const auto& gen : a.generators())
        if (gen.valuation(p) != 0)
            throw PreconditionError("d_frobenian: p lies in the support of A");
    std::vector<i64> res;
    for (const auto& gen : a.generators()) res.push_back(gen.residue(p));
    auto ds = divisors(std::gcd(e, p - 1));
    for (auto it = ds.rbegin(); it != ds.rend(); ++it) {
        const i64 d = *it;
        bool ok = std::all_of(res.begin(), res.end(), [&](i64 r) {
            return powmod(static_cast<u64>(r), static_cast<u64>((p - 1) / d), static_cast<u64>(p)) == 1;
        });
        if (ok) return d;
    }
    return 1;
}

SampledMean frobenian_mean_sampled(const NormSubgroup& a, const AbelianGroup& g, i64 bound, u64 seed,
                                   i64 sample_size) {
    const i64 e = g.exponent();
    const PlaceSet s = minimal_admissible(g, a);
    std::vector<i64> primes;
    for (i64 p : primes_up_to(bound)) {
        if (s.count(Place::prime(p)) || e % p == 0) continue;
        primes.push_back(p);
    }
    if (sample_size > 0 && sample_size < static_cast<i64>(primes.size())) {
        std::mt19937_64 rng(seed);
        std::vector<i64> pick;
        std::sample(primes.begin(), primes.end(), std::back_inserter(pick), sample_size, rng);
        primes = std::move(pick);
    }
    double sum = 0, sum2 = 0;
    for (i64 p : primes) {
        const double x = static_cast<double>(g.torsion_order(d_frobenian(a, e, p)) - 1);
        sum += x;
        sum2 += x * x;
    }
    SampledMean m;
    m.samples = static_cast<i64>(primes.size());
    if (m.samples == 0) return m;
    m.mean = sum / m.samples;
    const double var = std::max(0.0, sum2 / m.samples - m.mean * m.mean);
    m.std_error = std::sqrt(var / m.samples);
    return m;
}

ShaOmega sha_omega(i64 e) {
    if (e < 1) throw PreconditionError("sha_omega: e must be positive");
    if (valuation(e, 2) < 3) return {1, std::nullopt};
    std::vector<FactoredRational> candidates;
    const std::vector<i64> odd_squarefull{1, 9, 25, 27, 49, 81, 121, 125, 169, 225};
    for (i64 m : odd_squarefull)
        for (i64 a = 0; a <= e; ++a)
            for (int sgn : {1, -1}) {
                FactoredRational c = FactoredRational::from_integer(sgn * m) * FactoredRational::prime_power(2, static_cast<int>(a));
                candidates.push_back(c);
            }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const FactoredRational& x, const FactoredRational& y) { return x.log_abs() < y.log_abs(); });
    std::vector<i64> test_primes;
    for (i64 p : primes_up_to(3000))
        if (e % p != 0) test_primes.push_back(p);
    for (const auto& c : candidates) {
        if (c.is_rational_power(e)) continue;
        bool local = true;
        for (i64 p : test_primes) {
            if (c.valuation(p) != 0) continue;
            if (!local_power_test(c, Place::prime(p), e)) {
                local = false;
                break;
            }
        }
        if (!local) continue;
        bool certified = true;
        for (auto [l, k] : factorize(e)) {
            const i64 q = ipow(l, k);
            if (!cyclotomic_power_membership(c, q, q)) certified = false;
        }
        if (certified) return {2, c};
    }
    throw std::logic_error("sha_omega: no generator found in the candidate range");
}

bool in_local_norm_tensor(const FactoredRational& x, i64 d, const NormSubgroup& a, Place v) {
    for (const auto& r : a.representatives_mod_powers(d))
        if (local_power_test(x * r, v, d)) return true;
    return false;
}

bool in_global_norm_tensor(const FactoredRational& x, i64 d, const NormSubgroup& a) {
    for (auto [l, k] : factorize(d)) {
        const i64 q = ipow(l, k);
        bool hit = false;
        for (const auto& r : a.representatives_mod_powers(q))
            if (cyclotomic_power_membership(x * r, q, q)) {
                hit = true;
                break;
            }
        if (!hit) return false;
    }
    return true;
}

std::vector<FactoredRational> s_unit_classes(i64 d, const PlaceSet& s) {
    std::vector<FactoredRational> out{FactoredRational{}};
    if (d == 1) return out;
    if (d % 2 == 0) out.push_back(FactoredRational::minus_one());
    for (const auto& v : s) {
        if (v.is_infinite()) continue;
        std::vector<FactoredRational> next;
        for (const auto& r : out)
            for (i64 k = 0; k < d; ++k) next.push_back(r * FactoredRational::prime_power(v.p, static_cast<int>(k)));
        out = std::move(next);
    }
    return out;
}

std::vector<std::vector<FactoredRational>> s_unit_tensor(const AbelianGroup& g, const PlaceSet& s) {
    std::vector<std::vector<FactoredRational>> out{{}};
    for (i64 d : g.invariant_factors()) {
        auto classes = s_unit_classes(d, s);
        std::vector<std::vector<FactoredRational>> next;
        for (const auto& t : out)
            for (const auto& c : classes) {
                auto u = t;
                u.push_back(c);
                next.push_back(std::move(u));
            }
        out = std::move(next);
    }
    return out;
}

BigXGroup big_X(const AbelianGroup& g, const NormSubgroup& a, const PlaceSet& s) {
    require_admissible(s, g, a);
    BigXGroup x;
    x.group = g;
    x.s = s;
    // The Kummer image condition is necessary; when 4 | d the restriction
    // kernel is nontrivial, so survivors are also held to the defining local
    // condition at every unramified prime of a fixed probe range.
    std::vector<i64> probe;
    for (i64 p : primes_up_to(kLocalProbeBound))
        if (!s.count(Place::prime(p)) && g.exponent() % p != 0) probe.push_back(p);
    for (i64 d : g.invariant_factors()) {
        std::vector<FactoredRational> keep;
        for (const auto& c : s_unit_classes(d, s)) {
            if (!in_global_norm_tensor(c, d, a)) continue;
            if (d % 4 == 0 && !std::all_of(probe.begin(), probe.end(), [&](i64 p) {
                    return in_local_norm_tensor(c, d, a, Place::prime(p));
                }))
                continue;
            keep.push_back(c);
        }
        x.components.push_back(std::move(keep));
    }
    x.elements = {{}};
    for (const auto& comp : x.components) {
        std::vector<std::vector<FactoredRational>> next;
        for (const auto& t : x.elements)
            for (const auto& c : comp) {
                auto u = t;
                u.push_back(c);
                next.push_back(std::move(u));
            }
        x.elements = std::move(next);
    }
    return x;
}

bool norm_density_positive(const AbelianGroup& g, const NormSubgroup& a) {
    for (i64 d : divisors(g.exponent()))
        for (const auto& gen : a.generators())
            if (!cyclotomic_power_membership(gen, d, d)) return false;
    return true;
}

}  // namespace abelcount
