#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "abelcount/abgroup.hpp"
#include "abelcount/arith.hpp"

namespace abelcount {

/// Nonzero rational as sign times a product of prime powers.
class FactoredRational {
public:
    FactoredRational() = default;

    static FactoredRational from_integer(i64 n);
    static FactoredRational from_fraction(i64 num, i64 den);
    static FactoredRational prime_power(i64 p, int k);
    static FactoredRational minus_one();

    int sign() const { return sign_; }
    const std::map<i64, int>& exponents() const { return exps_; }
    int valuation(i64 p) const;
    std::vector<i64> support() const;
    bool is_one() const { return sign_ == 1 && exps_.empty(); }
    bool is_positive() const { return sign_ == 1; }

    FactoredRational operator*(const FactoredRational& o) const;
    FactoredRational inverse() const;
    FactoredRational pow(i64 k) const;
    FactoredRational abs() const;

    /// True iff this is an n-th power in Q.
    bool is_rational_power(i64 n) const;

    /// Residue modulo m of the part coprime to `skip` (the p-adic unit part
    /// when skip = p); every other prime must be invertible mod m.
    i64 residue(i64 m, i64 skip = 0) const;

    /// Exact value when numerator and denominator fit in 64 bits.
    std::optional<std::pair<i64, i64>> value() const;
    double log_abs() const;

    /// "-12/5"; falls back to a factored form "2^70*3" when too large.
    std::string to_string() const;

    friend bool operator==(const FactoredRational&, const FactoredRational&) = default;
    friend auto operator<=>(const FactoredRational&, const FactoredRational&) = default;

private:
    int sign_ = 1;
    std::map<i64, int> exps_;
};

FactoredRational parse_rational(std::string_view text);
std::vector<FactoredRational> parse_rational_list(std::string_view text);

/// Finitely generated subgroup of Q^*.
class NormSubgroup {
public:
    NormSubgroup() = default;
    explicit NormSubgroup(std::vector<FactoredRational> gens);

    const std::vector<FactoredRational>& generators() const { return gens_; }
    /// Free basis of A / (A ∩ {±1}); positive when -1 lies in A.
    const std::vector<FactoredRational>& free_basis() const { return basis_; }
    bool contains_minus_one() const { return minus_one_; }
    std::vector<i64> support() const;
    bool is_trivial() const { return basis_.empty() && !minus_one_; }

    /// One representative per class of A / A^n.
    std::vector<FactoredRational> representatives_mod_powers(i64 n) const;
    i64 index_of_powers(i64 n) const;

    std::string to_string() const;

private:
    std::vector<FactoredRational> gens_;
    std::vector<FactoredRational> basis_;
    bool minus_one_ = false;
};

/// A place of Q: a prime p, or the real place (p == 0).
struct Place {
    i64 p = 0;

    static Place infinity() { return {0}; }
    static Place prime(i64 q) { return {q}; }
    bool is_infinite() const { return p == 0; }
    std::string to_string() const { return p == 0 ? "inf" : std::to_string(p); }

    friend bool operator==(const Place&, const Place&) = default;
    friend auto operator<=>(const Place&, const Place&) = default;
};

using PlaceSet = std::set<Place>;

PlaceSet parse_places(std::string_view text);
std::string to_string(const PlaceSet& s);

/// {inf} ∪ {p <= |G|} ∪ supp(A).
PlaceSet minimal_admissible(const AbelianGroup& g, const NormSubgroup& a);
bool is_admissible(const PlaceSet& s, const AbelianGroup& g, const NormSubgroup& a);
void require_admissible(const PlaceSet& s, const AbelianGroup& g, const NormSubgroup& a);

bool local_power_test(const FactoredRational& beta, Place v, i64 d);

/// beta ∈ Q(μ_f)^{*d}.
bool cyclotomic_power_membership(const FactoredRational& beta, i64 f, i64 d);

struct KummerDegree {
    i64 over_q;          ///< [Q(μ_f, A^{1/f}) : Q]
    i64 over_cyclotomic; ///< [Q(μ_f, A^{1/f}) : Q(μ_f)]
};
KummerDegree kummer_degree(const NormSubgroup& a, i64 f);

Rational varpi(const AbelianGroup& g, const NormSubgroup& a);

i64 d_frobenian(const NormSubgroup& a, i64 e, i64 p);

struct SampledMean {
    double mean = 0;
    double std_error = 0;
    i64 samples = 0;
};

/// Mean of |G[d_frobenian(p)]| - 1 over primes p <= bound outside the
/// exceptional set.  With sample_size > 0 a seeded uniform subset of that
/// many primes is used instead of all of them.
SampledMean frobenian_mean_sampled(const NormSubgroup& a, const AbelianGroup& g, i64 bound,
                                   u64 seed, i64 sample_size = 0);

struct ShaOmega {
    int order = 1;
    std::optional<FactoredRational> generator;
};
ShaOmega sha_omega(i64 e);

/// x ∈ A·Q_p^{*d}: the polynomial prod_{a ∈ A/A^d} (t^d - x a) has a root in Q_p.
bool in_local_norm_tensor(const FactoredRational& x, i64 d, const NormSubgroup& a, Place v);

/// x ∈ A·Q(μ_q)^{*q} for every prime power q exactly dividing d.
bool in_global_norm_tensor(const FactoredRational& x, i64 d, const NormSubgroup& a);

/// The group X(Q, G, A) inside O_S^* ⊗ Ĝ, Ĝ identified with G through the
/// dual invariant-factor basis.  Component i lives in Q^* / Q^{*d_i}.
struct BigXGroup {
    AbelianGroup group;
    PlaceSet s;
    std::vector<std::vector<FactoredRational>> components;
    std::vector<std::vector<FactoredRational>> elements;

    i64 order() const { return static_cast<i64>(elements.size()); }
};

/// Every element of O_S^* ⊗ Ĝ as a tuple of canonical representatives.
std::vector<std::vector<FactoredRational>> s_unit_tensor(const AbelianGroup& g, const PlaceSet& s);
std::vector<FactoredRational> s_unit_classes(i64 d, const PlaceSet& s);

/// Primes up to this bound certify the local condition in big_X.
inline constexpr i64 kLocalProbeBound = 20000;

BigXGroup big_X(const AbelianGroup& g, const NormSubgroup& a, const PlaceSet& s);

bool norm_density_positive(const AbelianGroup& g, const NormSubgroup& a);

}  // namespace abelcount
