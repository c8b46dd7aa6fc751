#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace abelcount {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using Rational = boost::rational<i64>;

std::string to_string(const Rational& q);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);
i64 inverse_mod(i64 a, i64 m);
i64 ipow(i64 base, int exp);

// Deterministic for all 64-bit inputs.
bool is_prime(u64 n);

// Prime factorisation of |n|, primes ascending.
std::vector<std::pair<i64, int>> factorize(i64 n);

std::vector<i64> divisors(i64 n);
i64 euler_phi(i64 n);
int moebius_int(i64 n);
int valuation(i64 n, i64 p);

std::vector<i64> primes_up_to(i64 n);

// Least g that generates (Z/p^k)^* for every k >= 1 (odd p).
i64 primitive_root(i64 p);

}  // namespace abelcount
