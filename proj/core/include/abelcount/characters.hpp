#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "abelcount/abgroup.hpp"
#include "abelcount/kummer.hpp"

namespace abelcount {

/// Dirichlet component at p^k, k the conductor exponent.  For odd p, `h` is
/// the image of the generator `g` (a primitive root modulo every p^j).  For
/// p = 2, `h` is the image of -1 and `h5` the image of 5.
struct CharBlock {
    i64 p = 0;
    int k = 0;
    i64 g = 0;
    GroupElement h;
    GroupElement h5;

    i64 modulus() const { return ipow(p, k); }
};

/// Builds the block with the given generator images and computes its level;
/// k == 0 means the images are trivial.  Throws PreconditionError if the
/// images do not define a homomorphism on Z_p^*.
CharBlock make_block(const AbelianGroup& g, i64 p, const GroupElement& h, const GroupElement& h5);

/// Dirichlet-side value of a block at an integer unit u (gcd(u, p) = 1).
GroupElement block_value(const AbelianGroup& g, const CharBlock& b, i64 u);

/// Continuous homomorphism from the idele class group of Q to G, as a
/// primitive Dirichlet character split into prime-power blocks.
struct GChar {
    std::shared_ptr<const AbelianGroup> group;
    std::vector<CharBlock> blocks;  // ascending p, every block nontrivial

    i64 modulus() const;
    /// Finite conductor; equal to the modulus because blocks are primitive.
    i64 conductor() const { return modulus(); }

    GroupElement evaluate(i64 n) const;  ///< ψ(n) for gcd(n, m) = 1
    GroupElement sign_image() const;     ///< ψ(-1)
    const CharBlock* block_at(i64 p) const;

    std::vector<GroupElement> image_generators() const;
    Subgroup image() const;
    bool is_surjective() const;

    /// "m; p1^k1:[images]; ..." with images as coordinate vectors.
    std::string serialize() const;
};

GChar trivial_character(std::shared_ptr<const AbelianGroup> g);

/// Character of Q(sqrt a) into Z/2, a a non-square nonzero integer.
GChar quadratic_character(i64 a);
/// Character of Q(sqrt a, sqrt b) into Z/2 x Z/2.
GChar biquadratic_character(i64 a, i64 b);

/// χ_v.  Finite v: unit part is the negative of the Dirichlet block at p (if
/// any) and `frob` = χ_p(p).  v = ∞: only `sign` = χ_∞(-1) is meaningful.
struct LocalGChar {
    Place v;
    std::shared_ptr<const AbelianGroup> group;
    std::optional<CharBlock> unit;
    GroupElement frob;
    GroupElement sign;

    bool is_unramified() const { return !unit.has_value(); }
    /// Φ_v: p^k for a ramified block of level k, 1 otherwise.
    i64 conductor() const { return unit ? unit->modulus() : 1; }
    std::vector<GroupElement> image_generators() const;
};

LocalGChar local_component(const GChar& chi, Place v);

GroupElement evaluate_local(const LocalGChar& chi_v, const FactoredRational& alpha);

/// ⟨χ_v, x⟩ as an exponent mod e, x = Σ x_i ⊗ e_i^* over the dual
/// invariant-factor basis (one class per cyclic factor).
i64 pairing(const LocalGChar& chi_v, const std::vector<FactoredRational>& x);

/// Calls `visit` once for every character with conductor in [b1, b2]
/// (surjective ones only when requested).  The reference is only valid during
/// the call.  Order is depth-first over ascending primes.
void for_each_character(const AbelianGroup& g, i64 b1, i64 b2, bool surjective_only,
                        const std::function<void(const GChar&)>& visit);

/// Conductor-ascending list, ties broken by serialization.
std::vector<GChar> enumerate_by_conductor(const AbelianGroup& g, i64 bound, bool surjective_only,
                                          const std::function<bool(const GChar&)>& filter = {});

}  // namespace abelcount
