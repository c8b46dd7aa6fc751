#pragma once

// Biquadratic fields Q(sqrt d1, sqrt d2) listed through their three quadratic
// subfields.  Conductor is the lcm of the subfield discriminants; the Hasse
// norm principle fails iff every local degree is at most 2.

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <vector>

namespace oracle {

struct Biquadratic {
    std::int64_t d1, d2, d3;  // squarefree radicands
    std::int64_t conductor;
    bool hnp_fails;
};

inline std::int64_t squarefree_kernel(std::int64_t n) {
    std::int64_t s = n < 0 ? -1 : 1;
    n = std::llabs(n);
    for (std::int64_t p = 2; p * p <= n; ++p) {
        int k = 0;
        while (n % p == 0) n /= p, ++k;
        if (k % 2) s *= p;
    }
    return s * n;
}

inline std::int64_t quadratic_discriminant(std::int64_t d) {
    const std::int64_t r = ((d % 4) + 4) % 4;
    return std::llabs(r == 1 ? d : 4 * d);
}

// squarefree d != 0 is a square in Q_p
inline bool square_in_qp(std::int64_t d, std::int64_t p) {
    if (p == 2) return ((d % 8) + 8) % 8 == 1;
    if (d % p == 0) return false;
    std::int64_t u = ((d % p) + p) % p, r = 1, e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = static_cast<std::int64_t>(static_cast<__int128>(r) * u % p);
        u = static_cast<std::int64_t>(static_cast<__int128>(u) * u % p);
        e >>= 1;
    }
    return r == 1;
}

inline std::vector<Biquadratic> biquadratic_fields(std::int64_t bound) {
    std::vector<std::int64_t> rad;
    for (std::int64_t d = -bound; d <= bound; ++d) {
        if (d == 0 || d == 1) continue;
        if (squarefree_kernel(d) != d) continue;
        if (quadratic_discriminant(d) <= bound) rad.push_back(d);
    }
    std::vector<Biquadratic> out;
    for (std::size_t i = 0; i < rad.size(); ++i)
        for (std::size_t j = i + 1; j < rad.size(); ++j) {
            const std::int64_t a = rad[i], b = rad[j];
            if (std::lcm(quadratic_discriminant(a), quadratic_discriminant(b)) > bound) continue;
            const std::int64_t c = squarefree_kernel(a / std::gcd(a, b) * (b / std::gcd(a, b)));
            // visit each field once, from its two smallest radicands
            if (c <= b) continue;
            const std::int64_t da = quadratic_discriminant(a), db = quadratic_discriminant(b),
                               dc = quadratic_discriminant(c);
            const std::int64_t m = std::lcm(std::lcm(da, db), dc);
            if (m > bound) continue;
            bool fails = true;
            std::int64_t rest = m;
            for (std::int64_t p = 2; rest > 1; ++p) {
                if (p * p > rest) p = rest;
                if (rest % p) continue;
                while (rest % p == 0) rest /= p;
                if (!square_in_qp(a, p) && !square_in_qp(b, p) && !square_in_qp(c, p)) fails = false;
            }
            out.push_back({a, b, c, m, fails});
        }
    return out;
}

}  // namespace oracle
