#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "abelcount/arith.hpp"

namespace abelcount {

/// Coordinates (c_1, ..., c_r) with respect to the invariant-factor basis
/// of the parent group, reduced so that 0 <= c_i < d_i.
struct GroupElement {
    boost::container::small_vector<i64, 4> c;

    bool is_zero() const;
    friend bool operator==(const GroupElement&, const GroupElement&) = default;
    friend auto operator<=>(const GroupElement& a, const GroupElement& b) {
        return std::lexicographical_compare_three_way(a.c.begin(), a.c.end(), b.c.begin(),
                                                      b.c.end());
    }
};

std::string to_string(const GroupElement& g);

/// Finite abelian group Z/d_1 x ... x Z/d_r with d_1 | d_2 | ... | d_r, d_i >= 2.
class AbelianGroup {
public:
    AbelianGroup() = default;

    /// Canonicalises any product of cyclic groups; orders equal to 1 are dropped.
    static AbelianGroup from_cyclic_orders(std::span<const i64> orders);

    const std::vector<i64>& invariant_factors() const { return d_; }
    int rank() const { return static_cast<int>(d_.size()); }
    i64 order() const;
    i64 exponent() const { return d_.empty() ? 1 : d_.back(); }
    bool is_trivial() const { return d_.empty(); }
    bool is_cyclic() const { return d_.size() <= 1; }

    GroupElement zero() const;
    GroupElement basis(int i) const;
    GroupElement reduce(std::span<const i64> coords) const;
    GroupElement add(const GroupElement& a, const GroupElement& b) const;
    GroupElement sub(const GroupElement& a, const GroupElement& b) const;
    GroupElement neg(const GroupElement& a) const;
    GroupElement mul(i64 k, const GroupElement& a) const;
    i64 element_order(const GroupElement& g) const;

    /// All elements in lexicographic coordinate order.
    std::vector<GroupElement> elements() const;

    /// G[d] = {g : d g = 0}.
    AbelianGroup torsion(i64 d) const;
    i64 torsion_order(i64 d) const;
    std::vector<GroupElement> torsion_elements(i64 d) const;

    /// "Z/2 x Z/4"; the trivial group prints as "1".
    std::string to_string() const;

    friend bool operator==(const AbelianGroup&, const AbelianGroup&) = default;

private:
    std::vector<i64> d_;
};

/// Parses "Z/2 x Z/4", "Z/2Z x Z/6", "1" (whitespace-insensitive).
AbelianGroup parse_group(std::string_view spec);

i64 moebius(const AbelianGroup& g);
i64 hom_count(const AbelianGroup& a, const AbelianGroup& b);
i64 element_order(const AbelianGroup& g, const GroupElement& x);
/// Number of elements of exact order f.
i64 order_class_count(const AbelianGroup& g, i64 f);

/// Subgroup H of G, stored as the Hermite normal form of the lattice
/// L in Z^r with L / diag(d) Z^r = H.  Rows are upper triangular with
/// positive pivots and off-diagonal entries reduced modulo the pivot.
class Subgroup {
public:
    static Subgroup generated(const AbelianGroup& parent, std::span<const GroupElement> gens);
    static Subgroup trivial(const AbelianGroup& parent);
    static Subgroup whole(const AbelianGroup& parent);

    const AbelianGroup& parent() const { return parent_; }
    const std::vector<std::vector<i64>>& hnf() const { return hnf_; }

    bool contains(const GroupElement& g) const;
    i64 order() const;
    i64 index() const;
    bool is_whole() const { return index() == 1; }
    bool is_trivial() const { return order() == 1; }

    /// Isomorphism class of H itself.
    AbelianGroup iso_class() const;
    /// Isomorphism class of G/H.
    AbelianGroup quotient() const;

    std::vector<GroupElement> generators() const;
    std::vector<GroupElement> elements() const;
    Subgroup join(const Subgroup& other) const;

    friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.hnf_ == b.hnf_; }
    friend bool operator<(const Subgroup& a, const Subgroup& b) { return a.hnf_ < b.hnf_; }

private:
    Subgroup(AbelianGroup parent, std::vector<std::vector<i64>> hnf)
        : parent_(std::move(parent)), hnf_(std::move(hnf)) {}

    AbelianGroup parent_;
    std::vector<std::vector<i64>> hnf_;
};

struct SubgroupInfo {
    Subgroup subgroup;
    AbelianGroup quotient;
};

/// Every subgroup exactly once.  Throws PreconditionError if |G| > bound.
std::vector<SubgroupInfo> subgroups(const AbelianGroup& g, i64 bound = 10000);

/// Invariant factors of Z^n / (row space of m).
std::vector<i64> smith_invariants(std::vector<std::vector<i64>> m);

/// Exterior square realised on e_i ^ e_j (i < j), each of order gcd(d_i, d_j) = d_i.
/// Coordinates of `group` are a permutation of the pairs, recorded in `pairs`.
struct ExteriorSquare {
    AbelianGroup base;
    AbelianGroup group;
    std::vector<std::pair<int, int>> pairs;

    GroupElement wedge(const GroupElement& x, const GroupElement& y) const;
};

ExteriorSquare exterior_square(const AbelianGroup& g);

/// Subgroup of the exterior square generated by s ^ t for generators s, t of the subgroup.
Subgroup exterior_image(const ExteriorSquare& ext, const Subgroup& s);

}  // namespace abelcount
