#include "abelcount/abgroup.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "abelcount/errors.hpp"

namespace abelcount {

namespace {

i64 floor_div(i64 a, i64 b) {
    i64 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

i64 mod_pos(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

using Matrix = std::vector<std::vector<i64>>;

// Hermite normal form of the lattice spanned by `rows` together with d_i e_i.
Matrix lattice_hnf(const std::vector<i64>& d, Matrix rows) {
    const int r = static_cast<int>(d.size());
    for (auto& row : rows)
        for (int j = 0; j < r; ++j) row[j] = mod_pos(row[j], d[j]);
    for (int i = 0; i < r; ++i) {
        std::vector<i64> v(r, 0);
        v[i] = d[i];
        rows.push_back(std::move(v));
    }

    for (int c = 0; c < r; ++c) {
        // Euclid on column c among rows c.. until a single nonzero entry remains.
        while (true) {
            int best = -1;
            for (int i = c; i < static_cast<int>(rows.size()); ++i) {
                if (rows[i][c] == 0) continue;
                if (best < 0 || std::llabs(rows[i][c]) < std::llabs(rows[best][c])) best = i;
            }
            if (best < 0) throw std::logic_error("lattice_hnf: rank deficiency");
            std::swap(rows[c], rows[best]);
            bool done = true;
            for (int i = c + 1; i < static_cast<int>(rows.size()); ++i) {
                if (rows[i][c] == 0) continue;
                i64 q = floor_div(rows[i][c], rows[c][c]);
                for (int j = c; j < r; ++j) rows[i][j] -= q * rows[c][j];
                for (int j = c + 1; j < r; ++j) rows[i][j] = mod_pos(rows[i][j], d[j]);
                if (rows[i][c] != 0) done = false;
            }
            if (done) break;
        }
        if (rows[c][c] < 0)
            for (int j = c; j < r; ++j) rows[c][j] = -rows[c][j];
        for (int j = c + 1; j < r; ++j) rows[c][j] = mod_pos(rows[c][j], d[j]);
    }
    rows.resize(r);
    for (int j = 1; j < r; ++j) {
        for (int i = 0; i < j; ++i) {
            i64 q = floor_div(rows[i][j], rows[j][j]);
            if (q == 0) continue;
            for (int k = j; k < r; ++k) rows[i][k] -= q * rows[j][k];
        }
    }
    return rows;
}

}  // namespace

bool GroupElement::is_zero() const {
    return std::all_of(c.begin(), c.end(), [](i64 x) { return x == 0; });
}

std::string to_string(const GroupElement& g) {
    std::string s = "(";
    for (std::size_t i = 0; i < g.c.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(g.c[i]);
    }
    return s + ")";
}

AbelianGroup AbelianGroup::from_cyclic_orders(std::span<const i64> orders) {
    std::map<i64, std::vector<i64>> by_prime;
    for (i64 n : orders) {
        if (n < 1) throw ConfigError("cyclic order must be positive: " + std::to_string(n));
        for (auto [p, k] : factorize(n)) by_prime[p].push_back(ipow(p, k));
    }
    std::size_t len = 0;
    for (auto& [p, pks] : by_prime) {
        std::sort(pks.rbegin(), pks.rend());
        len = std::max(len, pks.size());
    }
    std::vector<i64> d(len, 1);
    for (auto& [p, pks] : by_prime)
        for (std::size_t i = 0; i < pks.size(); ++i) d[len - 1 - i] *= pks[i];
    AbelianGroup g;
    g.d_ = std::move(d);
    return g;
}

i64 AbelianGroup::order() const {
    i64 n = 1;
    for (i64 x : d_) n *= x;
    return n;
}

GroupElement AbelianGroup::zero() const {
    GroupElement g;
    g.c.assign(d_.size(), 0);
    return g;
}

GroupElement AbelianGroup::basis(int i) const {
    GroupElement g = zero();
    g.c[i] = 1;
    return g;
}

GroupElement AbelianGroup::reduce(std::span<const i64> coords) const {
    GroupElement g = zero();
    for (std::size_t i = 0; i < d_.size(); ++i) g.c[i] = mod_pos(coords[i], d_[i]);
    return g;
}

GroupElement AbelianGroup::add(const GroupElement& a, const GroupElement& b) const {
    GroupElement g = a;
    for (std::size_t i = 0; i < d_.size(); ++i) {
        g.c[i] += b.c[i];
        if (g.c[i] >= d_[i]) g.c[i] -= d_[i];
    }
    return g;
}

GroupElement AbelianGroup::sub(const GroupElement& a, const GroupElement& b) const {
    GroupElement g = a;
    for (std::size_t i = 0; i < d_.size(); ++i) {
        g.c[i] -= b.c[i];
        if (g.c[i] < 0) g.c[i] += d_[i];
    }
    return g;
}

GroupElement AbelianGroup::neg(const GroupElement& a) const {
    GroupElement g = a;
    for (std::size_t i = 0; i < d_.size(); ++i) g.c[i] = g.c[i] ? d_[i] - g.c[i] : 0;
    return g;
}

GroupElement AbelianGroup::mul(i64 k, const GroupElement& a) const {
    GroupElement g = a;
    for (std::size_t i = 0; i < d_.size(); ++i)
        g.c[i] = static_cast<i64>(mod_pos(static_cast<i64>((static_cast<__int128>(k) * a.c[i]) % d_[i]), d_[i]));
    return g;
}

i64 AbelianGroup::element_order(const GroupElement& g) const {
    i64 o = 1;
    for (std::size_t i = 0; i < d_.size(); ++i) o = std::lcm(o, d_[i] / std::gcd(d_[i], g.c[i]));
    return o;
}

std::vector<GroupElement> AbelianGroup::elements() const {
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(order()));
    GroupElement g = zero();
    while (true) {
        out.push_back(g);
        int i = rank() - 1;
        while (i >= 0 && ++g.c[i] == d_[i]) {
            g.c[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

AbelianGroup AbelianGroup::torsion(i64 d) const {
    std::vector<i64> f;
    for (i64 x : d_) f.push_back(std::gcd(x, d));
    return from_cyclic_orders(f);
}

i64 AbelianGroup::torsion_order(i64 d) const {
    i64 n = 1;
    for (i64 x : d_) n *= std::gcd(x, d);
    return n;
}

std::vector<GroupElement> AbelianGroup::torsion_elements(i64 d) const {
    std::vector<i64> step(d_.size()), count(d_.size());
    for (std::size_t i = 0; i < d_.size(); ++i) {
        count[i] = std::gcd(d_[i], d);
        step[i] = d_[i] / count[i];
    }
    std::vector<GroupElement> out;
    GroupElement g = zero();
    std::vector<i64> k(d_.size(), 0);
    while (true) {
        for (std::size_t i = 0; i < d_.size(); ++i) g.c[i] = k[i] * step[i];
        out.push_back(g);
        int i = rank() - 1;
        while (i >= 0 && ++k[i] == count[i]) {
            k[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

std::string AbelianGroup::to_string() const {
    if (d_.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < d_.size(); ++i) {
        if (i) s += " x ";
        s += "Z/" + std::to_string(d_[i]);
    }
    return s;
}

AbelianGroup parse_group(std::string_view spec) {
    std::string s;
    for (char ch : spec)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw ConfigError("empty group spec");
    if (s == "1") return {};
    std::vector<i64> orders;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find_first_of("x*", pos);
        std::string atom = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        std::string body = atom;
        if (body.size() < 3 || (body[0] != 'Z' && body[0] != 'z') || body[1] != '/')
            throw ConfigError("bad group factor '" + atom + "'");
        body = body.substr(2);
        if (!body.empty() && (body.back() == 'Z' || body.back() == 'z')) body.pop_back();
        if (body.empty() || !std::all_of(body.begin(), body.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw ConfigError("bad group factor '" + atom + "'");
        i64 n = std::stoll(body);
        if (n < 1) throw ConfigError("bad group factor '" + atom + "'");
        orders.push_back(n);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return AbelianGroup::from_cyclic_orders(orders);
}

i64 moebius(const AbelianGroup& g) {
    std::map<i64, int> rank_at;
    for (i64 d : g.invariant_factors()) {
        for (auto [p, k] : factorize(d)) {
            if (k >= 2) return 0;
            ++rank_at[p];
        }
    }
    i64 mu = 1;
    for (auto [p, n] : rank_at) {
        if (n % 2) mu = -mu;
        mu *= ipow(p, n * (n - 1) / 2);
    }
    return mu;
}

i64 hom_count(const AbelianGroup& a, const AbelianGroup& b) {
    i64 n = 1;
    for (i64 x : a.invariant_factors())
        for (i64 y : b.invariant_factors()) n *= std::gcd(x, y);
    return n;
}

i64 element_order(const AbelianGroup& g, const GroupElement& x) { return g.element_order(x); }

i64 order_class_count(const AbelianGroup& g, i64 f) {
    i64 total = 0;
    for (i64 d : divisors(f)) total += moebius_int(f / d) * g.torsion_order(d);
    return total;
}

// ---------------------------------------------------------------------------

Subgroup Subgroup::generated(const AbelianGroup& parent, std::span<const GroupElement> gens) {
    Matrix rows;
    for (const auto& g : gens) rows.emplace_back(g.c.begin(), g.c.end());
    return Subgroup(parent, lattice_hnf(parent.invariant_factors(), std::move(rows)));
}

Subgroup Subgroup::trivial(const AbelianGroup& parent) { return generated(parent, {}); }

Subgroup Subgroup::whole(const AbelianGroup& parent) {
    std::vector<GroupElement> gens;
    for (int i = 0; i < parent.rank(); ++i) gens.push_back(parent.basis(i));
    return generated(parent, gens);
}

bool Subgroup::contains(const GroupElement& g) const {
    std::vector<i64> v(g.c.begin(), g.c.end());
    const int r = parent_.rank();
    for (int c = 0; c < r; ++c) {
        if (v[c] % hnf_[c][c] != 0) return false;
        i64 q = v[c] / hnf_[c][c];
        if (q)
            for (int j = c; j < r; ++j) v[j] -= q * hnf_[c][j];
    }
    return true;
}

i64 Subgroup::index() const {
    i64 n = 1;
    for (std::size_t i = 0; i < hnf_.size(); ++i) n *= hnf_[i][i];
    return n;
}

i64 Subgroup::order() const { return parent_.order() / index(); }

AbelianGroup Subgroup::iso_class() const {
    const auto& d = parent_.invariant_factors();
    const int r = parent_.rank();
    Matrix m(r, std::vector<i64>(r, 0));
    for (int i = 0; i < r; ++i) {
        std::vector<i64> t(r, 0);
        t[i] = d[i];
        for (int c = 0; c < r; ++c) {
            i64 acc = t[c];
            for (int k = 0; k < c; ++k) acc -= m[i][k] * hnf_[k][c];
            m[i][c] = acc / hnf_[c][c];
        }
    }
    auto inv = smith_invariants(std::move(m));
    return AbelianGroup::from_cyclic_orders(inv);
}

AbelianGroup Subgroup::quotient() const {
    auto inv = smith_invariants(hnf_);
    return AbelianGroup::from_cyclic_orders(inv);
}

std::vector<GroupElement> Subgroup::generators() const {
    std::vector<GroupElement> out;
    for (const auto& row : hnf_) {
        GroupElement g = parent_.reduce(row);
        if (!g.is_zero()) out.push_back(std::move(g));
    }
    return out;
}

std::vector<GroupElement> Subgroup::elements() const {
    std::vector<GroupElement> out;
    for (auto& g : parent_.elements())
        if (contains(g)) out.push_back(std::move(g));
    return out;
}

Subgroup Subgroup::join(const Subgroup& other) const {
    auto gens = generators();
    for (auto& g : other.generators()) gens.push_back(std::move(g));
    return generated(parent_, gens);
}

std::vector<SubgroupInfo> subgroups(const AbelianGroup& g, i64 bound) {
    if (g.order() > bound)
        throw PreconditionError("subgroups: |G| = " + std::to_string(g.order()) +
                                " exceeds bound " + std::to_string(bound));
    const auto elems = g.elements();
    std::set<Subgroup> seen;
    std::deque<Subgroup> queue;
    Subgroup triv = Subgroup::trivial(g);
    seen.insert(triv);
    queue.push_back(triv);
    while (!queue.empty()) {
        Subgroup h = queue.front();
        queue.pop_front();
        auto gens = h.generators();
        for (const auto& x : elems) {
            if (h.contains(x)) continue;
            gens.push_back(x);
            Subgroup k = Subgroup::generated(g, gens);
            gens.pop_back();
            if (seen.insert(k).second) queue.push_back(k);
        }
    }
    std::vector<SubgroupInfo> out;
    for (const auto& h : seen) out.push_back({h, h.quotient()});
    std::sort(out.begin(), out.end(), [](const SubgroupInfo& a, const SubgroupInfo& b) {
        if (a.subgroup.order() != b.subgroup.order()) return a.subgroup.order() < b.subgroup.order();
        return a.subgroup < b.subgroup;
    });
    return out;
}

std::vector<i64> smith_invariants(std::vector<std::vector<i64>> a) {
    const int rows = static_cast<int>(a.size());
    const int cols = rows ? static_cast<int>(a[0].size()) : 0;
    std::vector<i64> diag;
    for (int t = 0; t < std::min(rows, cols); ++t) {
        int pi = -1, pj = -1;
        for (int i = t; i < rows; ++i)
            for (int j = t; j < cols; ++j)
                if (a[i][j] != 0 && (pi < 0 || std::llabs(a[i][j]) < std::llabs(a[pi][pj]))) {
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break;
        std::swap(a[t], a[pi]);
        for (auto& row : a) std::swap(row[t], row[pj]);
        while (true) {
            bool changed = false;
            for (int i = t + 1; i < rows; ++i) {
                if (a[i][t] == 0) continue;
                i64 q = floor_div(a[i][t], a[t][t]);
                for (int j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
                if (a[i][t] != 0) {
                    std::swap(a[t], a[i]);
                    changed = true;
                }
            }
            for (int j = t + 1; j < cols; ++j) {
                if (a[t][j] == 0) continue;
                i64 q = floor_div(a[t][j], a[t][t]);
                for (int i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
                if (a[t][j] != 0) {
                    for (auto& row : a) std::swap(row[t], row[j]);
                    changed = true;
                }
            }
            if (changed) continue;
            int bad = -1;
            for (int i = t + 1; i < rows && bad < 0; ++i)
                for (int j = t + 1; j < cols; ++j)
                    if (a[i][j] % a[t][t] != 0) {
                        bad = i;
                        break;
                    }
            if (bad < 0) break;
            for (int j = t; j < cols; ++j) a[t][j] += a[bad][j];
        }
        diag.push_back(std::llabs(a[t][t]));
    }
    std::vector<i64> out;
    for (i64 x : diag)
        if (x > 1) out.push_back(x);
    std::sort(out.begin(), out.end());
    return out;
}

ExteriorSquare exterior_square(const AbelianGroup& g) {
    ExteriorSquare ext;
    ext.base = g;
    std::vector<i64> orders;
    const auto& d = g.invariant_factors();
    for (int i = 0; i < g.rank(); ++i)
        for (int j = i + 1; j < g.rank(); ++j) {
            ext.pairs.emplace_back(i, j);
            orders.push_back(std::gcd(d[i], d[j]));
        }
    ext.group = AbelianGroup::from_cyclic_orders(orders);
    if (ext.group.invariant_factors() != orders)
        throw std::logic_error("exterior_square: pair orders are not a divisibility chain");
    return ext;
}

GroupElement ExteriorSquare::wedge(const GroupElement& x, const GroupElement& y) const {
    GroupElement w = group.zero();
    const auto& f = group.invariant_factors();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        auto [i, j] = pairs[k];
        w.c[k] = mod_pos(x.c[i] * y.c[j] - x.c[j] * y.c[i], f[k]);
    }
    return w;
}

Subgroup exterior_image(const ExteriorSquare& ext, const Subgroup& s) {
    auto gens = s.generators();
    std::vector<GroupElement> images;
    for (std::size_t a = 0; a < gens.size(); ++a)
        for (std::size_t b = a + 1; b < gens.size(); ++b) images.push_back(ext.wedge(gens[a], gens[b]));
    return Subgroup::generated(ext.group, images);
}

}  // namespace abelcount
