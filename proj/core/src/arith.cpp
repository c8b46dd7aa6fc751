#include "abelcount/arith.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "abelcount/errors.hpp"

namespace abelcount {

std::string to_string(const Rational& q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

i64 inverse_mod(i64 a, i64 m) {
    i64 g = m, x = 0, x1 = 1, a1 = ((a % m) + m) % m;
    while (a1) {
        i64 q = g / a1;
        std::tie(g, a1) = std::make_pair(a1, g - q * a1);
        std::tie(x, x1) = std::make_pair(x1, x - q * x1);
    }
    if (g != 1) throw PreconditionError("inverse_mod: not invertible");
    return ((x % m) + m) % m;
}

i64 ipow(i64 base, int exp) {
    __int128 r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= base;
        if (r > INT64_MAX || r < INT64_MIN) throw std::overflow_error("ipow overflow");
    }
    return static_cast<i64>(r);
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

namespace {

u64 pollard_rho(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        u64 x = 2, y = 2, d = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            d = std::gcd(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
    }
}

void factor_rec(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace

std::vector<std::pair<i64, int>> factorize(i64 n) {
    if (n == 0) throw PreconditionError("factorize(0)");
    u64 m = n < 0 ? static_cast<u64>(-n) : static_cast<u64>(n);
    std::vector<u64> ps;
    for (u64 p = 2; p < 1000 && p * p <= m; ++p) {
        while (m % p == 0) {
            ps.push_back(p);
            m /= p;
        }
    }
    factor_rec(m, ps);
    std::sort(ps.begin(), ps.end());
    std::vector<std::pair<i64, int>> out;
    for (u64 p : ps) {
        if (!out.empty() && out.back().first == static_cast<i64>(p))
            ++out.back().second;
        else
            out.emplace_back(static_cast<i64>(p), 1);
    }
    return out;
}

std::vector<i64> divisors(i64 n) {
    std::vector<i64> ds{1};
    for (auto [p, k] : factorize(n)) {
        std::size_t sz = ds.size();
        i64 pk = 1;
        for (int j = 1; j <= k; ++j) {
            pk *= p;
            for (std::size_t i = 0; i < sz; ++i) ds.push_back(ds[i] * pk);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

i64 euler_phi(i64 n) {
    i64 r = n;
    for (auto [p, k] : factorize(n)) r = r / p * (p - 1);
    return r;
}

int moebius_int(i64 n) {
    int mu = 1;
    for (auto [p, k] : factorize(n)) {
        if (k > 1) return 0;
        mu = -mu;
    }
    return mu;
}

int valuation(i64 n, i64 p) {
    if (n == 0) throw PreconditionError("valuation(0)");
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

std::vector<i64> primes_up_to(i64 n) {
    std::vector<i64> out;
    if (n < 2) return out;
    std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
    for (i64 i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (i64 j = i * i; j <= n; j += i) composite[j] = true;
    }
    return out;
}

i64 primitive_root(i64 p) {
    if (p == 2) return 1;
    auto fs = factorize(p - 1);
    for (i64 g = 2;; ++g) {
        bool ok = true;
        for (auto [q, k] : fs) {
            if (powmod(g, (p - 1) / q, p) == 1) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        u64 p2 = static_cast<u64>(p) * p;
        if (powmod(g, p - 1, p2) == 1) return g + p;
        return g;
    }
}

}  // namespace abelcount
