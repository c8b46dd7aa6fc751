#include "abelcount/counting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "abelcount/errors.hpp"

namespace abelcount {

// ---------------------------------------------------------------------------
// Predicates

bool LocalPredicate::accepts(const LocalGChar& chi_v, const NormSubgroup& a) const {
    const auto& g = *chi_v.group;
    const bool inf = chi_v.v.is_infinite();
    switch (kind) {
        case PredicateKind::Any:
            return true;
        case PredicateKind::Unramified:
            return inf ? chi_v.sign.is_zero() : chi_v.is_unramified();
        case PredicateKind::Split:
            return inf ? chi_v.sign.is_zero() : chi_v.is_unramified() && chi_v.frob.is_zero();
        case PredicateKind::UnramifiedOrder:
            return !inf && chi_v.is_unramified() && g.element_order(chi_v.frob) == order;
        case PredicateKind::Frobenius:
            return !inf && chi_v.is_unramified() && chi_v.frob == frob;
        case PredicateKind::Norm:
            for (const auto& gen : a.generators())
                if (!evaluate_local(chi_v, gen).is_zero()) return false;
            return true;
    }
    return false;
}

std::string LocalPredicate::to_string() const {
    switch (kind) {
        case PredicateKind::Any: return "any";
        case PredicateKind::Unramified: return "unramified";
        case PredicateKind::Split: return "split";
        case PredicateKind::UnramifiedOrder: return "unramified-order-" + std::to_string(order);
        case PredicateKind::Frobenius: return "frob=" + abelcount::to_string(frob);
        case PredicateKind::Norm: return "norm";
    }
    return "?";
}

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

i64 parse_positive(const std::string& s, std::string_view token) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || v <= 0) throw ConfigError("bad predicate '" + std::string(token) + "'");
    return v;
}

}  // namespace

LocalPredicate parse_predicate(std::string_view text, const AbelianGroup& g) {
    const std::string t = trim(text);
    LocalPredicate p;
    if (t == "any") return p;
    if (t == "unramified") return p.kind = PredicateKind::Unramified, p;
    if (t == "split") return p.kind = PredicateKind::Split, p;
    if (t == "norm") return p.kind = PredicateKind::Norm, p;
    const std::string order_prefix = "unramified-order-";
    if (t.rfind(order_prefix, 0) == 0) {
        p.kind = PredicateKind::UnramifiedOrder;
        p.order = parse_positive(t.substr(order_prefix.size()), text);
        return p;
    }
    if (t.rfind("frob=", 0) == 0) {
        std::string body = t.substr(5);
        if (body.size() < 2 || body.front() != '(' || body.back() != ')')
            throw ConfigError("bad predicate '" + std::string(text) + "'");
        body = body.substr(1, body.size() - 2);
        std::vector<i64> coords;
        std::size_t start = 0;
        while (start <= body.size()) {
            const std::size_t comma = body.find(',', start);
            const std::string piece = trim(std::string_view(body).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            std::size_t used = 0;
            long long v = 0;
            try {
                v = std::stoll(piece, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (piece.empty() || used != piece.size()) throw ConfigError("bad predicate '" + std::string(text) + "'");
            coords.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (static_cast<int>(coords.size()) != g.rank())
            throw ConfigError("predicate '" + std::string(text) + "' needs " + std::to_string(g.rank()) + " coordinates");
        p.kind = PredicateKind::Frobenius;
        p.frob = g.reduce(coords);
        return p;
    }
    throw ConfigError("unknown predicate '" + std::string(text) + "'");
}

std::vector<LocalGChar> local_homs(const std::shared_ptr<const AbelianGroup>& gp, Place v) {
    const auto& g = *gp;
    std::vector<LocalGChar> out;
    const auto elems = g.elements();
    if (v.is_infinite()) {
        for (const auto& t : g.torsion_elements(2)) out.push_back({v, gp, std::nullopt, g.zero(), t});
        return out;
    }
    const i64 p = v.p;
    std::vector<std::optional<CharBlock>> units;
    if (p == 2) {
        for (const auto& h : g.torsion_elements(2))
            for (const auto& h5 : elems) {
                const i64 o = g.element_order(h5);
                if (o & (o - 1)) continue;
                auto b = make_block(g, 2, h, h5);
                units.push_back(b.k ? std::optional<CharBlock>(b) : std::nullopt);
            }
    } else {
        for (const auto& h : elems) {
            const i64 o = g.element_order(h);
            if ((p - 1) % (o / ipow(p, valuation(o, p)))) continue;
            auto b = make_block(g, p, h, g.zero());
            units.push_back(b.k ? std::optional<CharBlock>(b) : std::nullopt);
        }
    }
    for (const auto& f : elems)
        for (const auto& u : units) out.push_back({v, gp, u, f, g.zero()});
    return out;
}

// ---------------------------------------------------------------------------
// Conditions

LocalConditions::LocalConditions(AbelianGroup g, NormSubgroup a, std::optional<PlaceSet> s,
                                 std::map<Place, LocalPredicate> lambda)
    : g_(std::make_shared<const AbelianGroup>(std::move(g))), a_(std::move(a)), lambda_(std::move(lambda)) {
    s_ = s ? *s : minimal_admissible(*g_, a_);
    if (s && !is_admissible(s_, *g_, a_)) {
        try {
            require_admissible(s_, *g_, a_);
        } catch (const PreconditionError& e) {
            throw ConfigError(e.what());
        }
    }
    for (const auto& [v, pred] : lambda_) {
        s_.insert(v);
        if (v.is_infinite() && (pred.kind == PredicateKind::UnramifiedOrder || pred.kind == PredicateKind::Frobenius))
            throw ConfigError("predicate " + pred.to_string() + " needs a finite place");
        const auto homs = local_homs(g_, v);
        if (std::none_of(homs.begin(), homs.end(), [&](const LocalGChar& c) { return pred.accepts(c, a_); }))
            throw ConfigError("empty local condition " + pred.to_string() + " at " + v.to_string());
    }
}

const LocalPredicate& LocalConditions::at(Place v) const {
    static const LocalPredicate any{};
    auto it = lambda_.find(v);
    return it == lambda_.end() ? any : it->second;
}

int LocalConditions::finite_places() const {
    return static_cast<int>(std::count_if(s_.begin(), s_.end(), [](const Place& v) { return !v.is_infinite(); }));
}

bool LocalConditions::meets_lambda(const GChar& chi) const {
    for (const auto& [v, pred] : lambda_) {
        if (pred.kind == PredicateKind::Any) continue;
        if (!pred.accepts(local_component(chi, v), a_)) return false;
    }
    return true;
}

bool LocalConditions::norms_outside_s(const GChar& chi) const {
    // A consists of S-units, so only ramified places outside S can fail
    for (const auto& b : chi.blocks) {
        if (s_.count(Place::prime(b.p))) continue;
        const auto loc = local_component(chi, Place::prime(b.p));
        for (const auto& gen : a_.generators())
            if (!evaluate_local(loc, gen).is_zero()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Cyclotomic integers

namespace {

struct CycloTable {
    i64 phi = 1;
    std::vector<std::vector<i64>> powers;  // ζ^j in the power basis, 0 <= j < 2e
};

std::vector<i64> poly_mul(const std::vector<i64>& a, const std::vector<i64>& b) {
    std::vector<i64> r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// exact division by a monic polynomial
std::vector<i64> poly_div(std::vector<i64> num, const std::vector<i64>& den) {
    const std::size_t dn = den.size() - 1;
    std::vector<i64> q(num.size() - dn, 0);
    for (std::size_t i = q.size(); i-- > 0;) {
        q[i] = num[i + dn];
        for (std::size_t j = 0; j <= dn; ++j) num[i + j] -= q[i] * den[j];
    }
    return q;
}

std::vector<i64> cyclotomic_poly(i64 n) {
    std::vector<i64> r(static_cast<std::size_t>(n) + 1, 0);
    r[0] = -1;
    r[n] = 1;
    for (i64 d : divisors(n))
        if (d < n) r = poly_div(r, cyclotomic_poly(d));
    return r;
}

const CycloTable& cyclo_table(i64 e) {
    thread_local std::map<i64, CycloTable> cache;
    auto it = cache.find(e);
    if (it != cache.end()) return it->second;
    CycloTable t;
    const auto phi_poly = cyclotomic_poly(e);
    t.phi = static_cast<i64>(phi_poly.size()) - 1;
    std::vector<i64> cur(static_cast<std::size_t>(t.phi), 0);
    cur[0] = 1;
    for (i64 j = 0; j < 2 * e; ++j) {
        t.powers.push_back(cur);
        // multiply by ζ and reduce with Φ_e monic
        const i64 top = cur.back();
        for (i64 k = t.phi - 1; k > 0; --k) cur[k] = cur[k - 1];
        cur[0] = 0;
        for (i64 k = 0; k < t.phi; ++k) cur[k] -= top * phi_poly[k];
    }
    return cache.emplace(e, std::move(t)).first->second;
}

}  // namespace

CyclotomicInteger::CyclotomicInteger(i64 e) : e_(e) {
    if (e < 1) throw PreconditionError("CyclotomicInteger: level must be positive");
    c_.assign(static_cast<std::size_t>(cyclo_table(e).phi), 0);
}

CyclotomicInteger CyclotomicInteger::root(i64 e, i64 k, i64 coefficient) {
    CyclotomicInteger z(e);
    z.add_root(k, coefficient);
    return z;
}

void CyclotomicInteger::add_root(i64 k, i64 coefficient) {
    k %= e_;
    if (k < 0) k += e_;
    const auto& row = cyclo_table(e_).powers[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += coefficient * row[i];
}

CyclotomicInteger& CyclotomicInteger::operator+=(const CyclotomicInteger& o) {
    if (o.e_ != e_) throw PreconditionError("CyclotomicInteger: level mismatch");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

CyclotomicInteger& CyclotomicInteger::operator*=(i64 k) {
    for (auto& x : c_) x *= k;
    return *this;
}

CyclotomicInteger CyclotomicInteger::operator+(const CyclotomicInteger& o) const {
    CyclotomicInteger r = *this;
    return r += o;
}

CyclotomicInteger CyclotomicInteger::operator*(const CyclotomicInteger& o) const {
    if (o.e_ != e_) throw PreconditionError("CyclotomicInteger: level mismatch");
    const auto& tab = cyclo_table(e_);
    const auto prod = poly_mul(c_, o.c_);
    CyclotomicInteger r(e_);
    for (std::size_t j = 0; j < prod.size(); ++j) {
        if (!prod[j]) continue;
        const auto& row = tab.powers[j];
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += prod[j] * row[i];
    }
    return r;
}

bool CyclotomicInteger::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](i64 x) { return x == 0; });
}

bool CyclotomicInteger::is_rational() const {
    return std::all_of(c_.begin() + 1, c_.end(), [](i64 x) { return x == 0; });
}

double CyclotomicInteger::real_value() const {
    double s = 0;
    for (std::size_t i = 0; i < c_.size(); ++i)
        s += static_cast<double>(c_[i]) * std::cos(2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(e_));
    return s;
}

double DirichletPolynomial::value(double s) const {
    double total = 0;
    for (const auto& [n, c] : terms) total += c.real_value() * std::pow(static_cast<double>(n), -s);
    return total / static_cast<double>(denominator);
}

double EulerFactor::value(double s) const {
    return 1.0 + static_cast<double>(coefficient) * std::pow(static_cast<double>(p), -s);
}

// ---------------------------------------------------------------------------
// Local factors

EulerFactor euler_factor(i64 p, const AbelianGroup& g, const NormSubgroup& a, const std::vector<FactoredRational>& x) {
    if (!is_prime(static_cast<u64>(p))) throw PreconditionError("euler_factor: p must be prime");
    if (g.order() % p == 0) throw PreconditionError("euler_factor: p divides |G|");
    for (const auto& c : x)
        if (c.valuation(p) != 0) throw PreconditionError("euler_factor: x is not a unit at p");
    const auto& d = g.invariant_factors();
    if (x.size() != d.size()) throw PreconditionError("euler_factor: one class per cyclic factor expected");
    EulerFactor f{p, -1, true};
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!in_local_norm_tensor(x[i], d[i], a, Place::prime(p))) f.in_norm_tensor = false;
    if (f.in_norm_tensor) f.coefficient = g.torsion_order(d_frobenian(a, g.exponent(), p)) - 1;
    return f;
}

DirichletPolynomial local_fourier(Place v, const LocalConditions& conds, const std::vector<FactoredRational>& x) {
    if (!conds.s().count(v)) throw PreconditionError("local_fourier: v must lie in S");
    const auto& g = conds.group();
    const i64 e = g.exponent();
    DirichletPolynomial poly;
    poly.denominator = v.is_infinite() ? 1 : g.order();
    const auto& pred = conds.at(v);
    for (const auto& chi_v : local_homs(conds.group_ptr(), v)) {
        if (!pred.accepts(chi_v, conds.a())) continue;
        auto [it, fresh] = poly.terms.try_emplace(chi_v.conductor(), e);
        it->second.add_root(pairing(chi_v, x));
    }
    return poly;
}

DirichletCoefficients dirichlet_coefficients(const LocalConditions& conds, const std::vector<FactoredRational>& x,
                                             i64 bound) {
    const auto& g = conds.group();
    const i64 e = g.exponent();
    DirichletCoefficients out;
    out.bound = bound;
    out.a.assign(static_cast<std::size_t>(bound) + 1, CyclotomicInteger(e));

    // product of the local polynomials at S, truncated at the bound
    std::map<i64, CyclotomicInteger> s_part;
    s_part.emplace(1, CyclotomicInteger::root(e, 0));
    for (const auto& v : conds.s()) {
        const auto poly = local_fourier(v, conds, x);
        out.denominator *= poly.denominator;
        std::map<i64, CyclotomicInteger> next;
        for (const auto& [m, c] : s_part)
            for (const auto& [n, d] : poly.terms) {
                if (m > bound / n) continue;
                auto [it, fresh] = next.try_emplace(m * n, e);
                it->second += c * d;
            }
        s_part = std::move(next);
    }

    // multiplicative part away from S: squarefree, one linear factor per prime
    std::vector<i64> coeff(static_cast<std::size_t>(bound) + 1, 1);
    std::vector<i64> s_piece(static_cast<std::size_t>(bound) + 1, 1);
    for (i64 p : primes_up_to(bound)) {
        const bool in_s = conds.s().count(Place::prime(p)) > 0;
        const i64 c = in_s ? 0 : euler_factor(p, g, conds.a(), x).coefficient;
        for (i64 n = p; n <= bound; n += p) {
            if (in_s) {
                for (i64 m = n; m % p == 0; m /= p) s_piece[n] *= p;
            } else {
                coeff[n] = (n / p) % p == 0 ? 0 : coeff[n] * c;
            }
        }
    }
    for (i64 n = 1; n <= bound; ++n) {
        if (coeff[n] == 0) continue;
        auto it = s_part.find(s_piece[n]);
        if (it == s_part.end()) continue;
        out.a[n] = it->second;
        out.a[n] *= coeff[n];
    }
    return out;
}

PoissonReport poisson_identity_check(const LocalConditions& conds, i64 bound) {
    const auto& g = conds.group();
    PoissonReport r;
    r.direct.assign(static_cast<std::size_t>(bound) + 1, 0);
    r.poisson.assign(static_cast<std::size_t>(bound) + 1, 0);
    for_each_character(g, 1, bound, false, [&](const GChar& chi) {
        if (conds.meets_lambda(chi) && conds.norms_outside_s(chi)) ++r.direct[chi.conductor()];
    });

    std::vector<CyclotomicInteger> total(static_cast<std::size_t>(bound) + 1, CyclotomicInteger(g.exponent()));
    i64 denominator = 1;
    for (const auto& x : s_unit_tensor(g, conds.s())) {
        const auto coeffs = dirichlet_coefficients(conds, x, bound);
        denominator = coeffs.denominator;
        for (i64 n = 1; n <= bound; ++n) total[n] += coeffs.a[n];
    }
    denominator *= g.torsion_order(2);  // |{±1} ⊗ Ĝ|

    r.equal = true;
    for (i64 n = 1; n <= bound; ++n) {
        const auto& t = total[n];
        const bool integral = t.is_rational() && t.rational_part() % denominator == 0;
        r.poisson[n] = integral ? t.rational_part() / denominator : std::llround(t.real_value() / static_cast<double>(denominator));
        const i64 dev = std::llabs(r.poisson[n] - r.direct[n]);
        r.max_deviation = std::max(r.max_deviation, dev);
        if ((!integral || dev) && r.equal) {
            r.equal = false;
            r.first_mismatch = n;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Leading constant

double ConstantReport::s_part() const {
    return boost::rational_cast<double>(s_sum) * s_zeta;
}

namespace {

double truncated_euler(const AbelianGroup& g, const NormSubgroup& a, const PlaceSet& s, double w, i64 bound) {
    double log_sum = 0;
    for (i64 p : primes_up_to(bound)) {
        if (s.count(Place::prime(p))) continue;
        const double hom = static_cast<double>(g.torsion_order(d_frobenian(a, g.exponent(), p)));
        const double inv = 1.0 / static_cast<double>(p);
        log_sum += std::log1p((hom - 1) * inv) + w * std::log1p(-inv);
    }
    return std::exp(log_sum);
}

}  // namespace

ConstantReport leading_constant(const LocalConditions& conds, i64 prime_bound) {
    if (prime_bound < 1000) throw PreconditionError("leading_constant: prime bound must be at least 1000");
    const auto& g = conds.group();
    const auto& a = conds.a();
    const i64 e = g.exponent();
    ConstantReport c;
    c.varpi = varpi(g, a);
    const double w = boost::rational_cast<double>(c.varpi);
    c.gamma = std::tgamma(w);
    c.unit_factor = g.torsion_order(2);
    c.local_factor = 1;
    for (int i = 0; i < conds.finite_places(); ++i) c.local_factor *= g.order();
    c.prime_bound = prime_bound;

    const auto xg = big_X(g, a, conds.s());
    c.x_order = xg.order();

    // Σ over Λ-tuples of 1/ΠΦ_v, grouped by the character the tuple induces on X
    using Key = std::vector<i64>;
    std::map<Key, Rational> acc{{Key(xg.elements.size(), 0), Rational(1)}};
    c.s_zeta = 1;
    for (const auto& v : conds.s()) {
        std::map<Key, Rational> local;
        const auto& pred = conds.at(v);
        for (const auto& chi_v : local_homs(conds.group_ptr(), v)) {
            if (!pred.accepts(chi_v, a)) continue;
            Key k;
            for (const auto& x : xg.elements) k.push_back(pairing(chi_v, x));
            local[k] += Rational(1, chi_v.conductor());
        }
        std::map<Key, Rational> next;
        for (const auto& [k1, w1] : acc)
            for (const auto& [k2, w2] : local) {
                Key k(k1.size());
                for (std::size_t i = 0; i < k.size(); ++i) k[i] = (k1[i] + k2[i]) % e;
                next[k] += w1 * w2;
            }
        acc = std::move(next);
        if (!v.is_infinite()) c.s_zeta *= std::pow(1.0 - 1.0 / static_cast<double>(v.p), w);
    }
    auto it = acc.find(Key(xg.elements.size(), 0));
    c.s_sum = it == acc.end() ? Rational(0) : it->second * Rational(c.x_order);

    c.euler = truncated_euler(g, a, conds.s(), w, prime_bound);
    c.euler_half = truncated_euler(g, a, conds.s(), w, prime_bound / 2);
    const double scale = c.s_part() / (c.gamma * static_cast<double>(c.unit_factor) * static_cast<double>(c.local_factor));
    c.value = scale * c.euler;
    c.value_half = scale * c.euler_half;
    return c;
}

// ---------------------------------------------------------------------------
// ϖ(G, A, x)

namespace {

PlaceSet places_for(const AbelianGroup& g, const NormSubgroup& a, const std::vector<FactoredRational>& x) {
    if (static_cast<int>(x.size()) != g.rank()) throw PreconditionError("x needs one class per cyclic factor");
    PlaceSet s = minimal_admissible(g, a);
    for (const auto& c : x)
        for (i64 p : c.support()) s.insert(Place::prime(p));
    return s;
}

FactoredRational canonical_class(const FactoredRational& c, i64 d) {
    FactoredRational r;
    if (d % 2 == 0 && c.sign() < 0) r = FactoredRational::minus_one();
    for (const auto& [p, k] : c.exponents()) {
        const i64 m = ((k % d) + d) % d;
        if (m) r = r * FactoredRational::prime_power(p, static_cast<int>(m));
    }
    return r;
}

}  // namespace

SampledMean varpi_x(const AbelianGroup& g, const NormSubgroup& a, const std::vector<FactoredRational>& x,
                    i64 prime_bound, u64 seed, i64 sample_size) {
    const PlaceSet s = places_for(g, a, x);
    std::vector<i64> primes;
    for (i64 p : primes_up_to(prime_bound))
        if (!s.count(Place::prime(p))) primes.push_back(p);
    if (sample_size > 0 && sample_size < static_cast<i64>(primes.size())) {
        std::mt19937_64 rng(seed);
        std::vector<i64> pick;
        std::sample(primes.begin(), primes.end(), std::back_inserter(pick), sample_size, rng);
        primes = std::move(pick);
    }
    double sum = 0, sum2 = 0;
    for (i64 p : primes) {
        const double y = static_cast<double>(euler_factor(p, g, a, x).coefficient);
        sum += y;
        sum2 += y * y;
    }
    SampledMean m;
    m.samples = static_cast<i64>(primes.size());
    if (!m.samples) return m;
    m.mean = sum / static_cast<double>(m.samples);
    m.std_error = std::sqrt(std::max(0.0, sum2 / static_cast<double>(m.samples) - m.mean * m.mean) / static_cast<double>(m.samples));
    return m;
}

bool is_max_mean(const AbelianGroup& g, const NormSubgroup& a, const std::vector<FactoredRational>& x) {
    const PlaceSet s = places_for(g, a, x);
    const auto xg = big_X(g, a, s);
    std::vector<FactoredRational> canon;
    for (std::size_t i = 0; i < x.size(); ++i) canon.push_back(canonical_class(x[i], g.invariant_factors()[i]));
    return std::find(xg.elements.begin(), xg.elements.end(), canon) != xg.elements.end();
}

// ---------------------------------------------------------------------------
// Exponent fit

ExponentFit fit_exponent(const std::vector<std::pair<i64, i64>>& ladder) {
    if (ladder.size() < 4) throw PreconditionError("fit_exponent: at least 4 ladder points are needed");
    i64 lo = ladder.front().first, hi = lo;
    for (auto [b, n] : ladder) {
        if (b < 3 || n <= 0) throw PreconditionError("fit_exponent: bounds must exceed e and counts must be positive");
        lo = std::min(lo, b);
        hi = std::max(hi, b);
    }
    if (std::log10(static_cast<double>(hi) / static_cast<double>(lo)) < 3 - 1e-9)
        throw PreconditionError("fit_exponent: the ladder must span at least 3 decades");
    const double n = static_cast<double>(ladder.size());
    double mx = 0, my = 0;
    std::vector<double> xs, ys;
    for (auto [b, c] : ladder) {
        const double lb = std::log(static_cast<double>(b));
        xs.push_back(std::log(lb));
        ys.push_back(std::log(static_cast<double>(c)) - lb);
        mx += xs.back();
        my += ys.back();
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    ExponentFit f;
    f.points = static_cast<int>(ladder.size());
    f.exponent = sxy / sxx;
    const double icpt = my - f.exponent * mx;
    double rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - icpt - f.exponent * xs[i];
        rss += r * r;
    }
    const double df = n - 2;
    f.std_error = std::sqrt(rss / df / sxx);
    f.band = boost::math::quantile(boost::math::students_t(df), 0.975) * f.std_error;
    return f;
}

// ---------------------------------------------------------------------------
// Counting

namespace {

struct Tally {
    std::vector<LadderPoint> buckets;

    void merge(const Tally& o) {
        for (std::size_t i = 0; i < buckets.size(); ++i) {
            auto& b = buckets[i];
            const auto& c = o.buckets[i];
            b.n += c.n;
            b.n_lambda += c.n_lambda;
            b.n_loc += c.n_loc;
            b.n_glob_lower += c.n_glob_lower;
            b.n_glob_upper += c.n_glob_upper;
            b.hnp_fail += c.hnp_fail;
        }
    }
};

void classify(const LocalConditions& conds, const GChar& chi, const CountOptions& opts, LadderPoint& b) {
    if (!conds.meets_lambda(chi)) return;
    ++b.n;
    if (!conds.norms_outside_s(chi)) return;
    ++b.n_lambda;
    const auto& gens = conds.a().generators();
    for (const auto& v : conds.s()) {
        const auto loc = local_component(chi, v);
        for (const auto& gen : gens)
            if (!evaluate_local(loc, gen).is_zero()) return;
    }
    ++b.n_loc;
    if (hnp_holds(chi)) {
        ++b.n_glob_lower;
        ++b.n_glob_upper;
        return;
    }
    ++b.hnp_fail;
    bool all_global = true;
    for (const auto& gen : gens) {
        if (gen.is_one()) continue;
        const auto st = global_norm_status(chi, gen, opts.norm);
        if (st.tag == NormTag::NotGlobalNorm) return;
        if (st.tag != NormTag::GlobalNorm) all_global = false;
    }
    ++b.n_glob_upper;
    if (all_global) ++b.n_glob_lower;
}

}  // namespace

CountReport count_with_conditions(const LocalConditions& conds, std::vector<i64> ladder, const CountOptions& opts) {
    std::sort(ladder.begin(), ladder.end());
    ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
    if (ladder.empty() || ladder.front() < 1) throw ConfigError("the ladder needs positive bounds");
    if (opts.shards < 1) throw ConfigError("shard count must be positive");
    const i64 top = ladder.back();
    const auto& g = conds.group();

    const i64 shards = std::min<i64>(opts.shards, top);
    std::vector<std::pair<i64, i64>> intervals;
    for (i64 i = 0; i < shards; ++i) intervals.push_back({top * i / shards + 1, top * (i + 1) / shards});

    std::vector<Tally> results(intervals.size());
    for (auto& t : results) t.buckets.assign(ladder.size(), {});
    auto run_shard = [&](std::size_t idx) {
        auto [lo, hi] = intervals[idx];
        auto& tally = results[idx];
        for_each_character(g, lo, hi, true, [&](const GChar& chi) {
            const i64 m = chi.conductor();
            if (m < lo || m > hi) return;
            const auto pos = std::lower_bound(ladder.begin(), ladder.end(), m) - ladder.begin();
            classify(conds, chi, opts, tally.buckets[pos]);
        });
    };

    int threads = opts.threads > 0 ? opts.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = static_cast<int>(std::min<i64>(threads, static_cast<i64>(intervals.size())));
    if (threads <= 1) {
        for (std::size_t i = 0; i < intervals.size(); ++i) run_shard(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next++) < intervals.size();) {
                    try {
                        run_shard(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    Tally total;
    total.buckets.assign(ladder.size(), {});
    for (const auto& t : results) total.merge(t);

    CountReport r;
    r.group = g.to_string();
    r.a = conds.a().to_string();
    r.s = to_string(conds.s());
    for (const auto& [v, pred] : conds.lambda()) r.lambda.push_back(v.to_string() + ":" + pred.to_string());
    LadderPoint run;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const auto& b = total.buckets[i];
        run.bound = ladder[i];
        run.n += b.n;
        run.n_lambda += b.n_lambda;
        run.n_loc += b.n_loc;
        run.n_glob_lower += b.n_glob_lower;
        run.n_glob_upper += b.n_glob_upper;
        run.hnp_fail += b.hnp_fail;
        r.points.push_back(run);
    }

    const bool fittable = ladder.size() >= 4 && std::log10(static_cast<double>(top) / static_cast<double>(ladder.front())) >= 3 - 1e-9;
    if (fittable) {
        auto series = [&](auto field) {
            std::vector<std::pair<i64, i64>> pts;
            for (const auto& p : r.points) pts.push_back({p.bound, p.*field});
            return pts;
        };
        for (auto [name, field] : {std::pair{"N", &LadderPoint::n}, std::pair{"N_lambda", &LadderPoint::n_lambda},
                                   std::pair{"N_loc", &LadderPoint::n_loc}}) {
            auto pts = series(field);
            if (std::all_of(pts.begin(), pts.end(), [](auto& p) { return p.second > 0; }) && pts.front().first >= 3)
                r.fits[name] = fit_exponent(pts);
        }
    }
    return r;
}

std::vector<Rational> hnp_failure_ratio(const AbelianGroup& g, const NormSubgroup& a, const std::vector<i64>& ladder,
                                        const CountOptions& opts) {
    const auto rep = count_with_conditions(LocalConditions(g, a), ladder, opts);
    std::vector<Rational> out;
    for (const auto& p : rep.points) out.push_back(p.n_loc ? Rational(p.hnp_fail, p.n_loc) : Rational(0));
    return out;
}

std::vector<i64> default_ladder(bool include_top) {
    std::vector<i64> l{10'000, 100'000, 1'000'000};
    if (include_top) l.push_back(10'000'000);
    return l;
}

}  // namespace abelcount
