#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abelcount/characters.hpp"
#include "abelcount/kummer.hpp"

namespace abelcount {

enum class NormTag { NotLocal, GlobalNorm, NotGlobalNorm, Undetermined };
enum class Certificate { None, HNPHolds, Witness, Obstruction };

std::string to_string(NormTag t);
std::string to_string(Certificate c);

/// x = (Σ coords[i]·sqrt(radicands[i])) / denominator with radicands
/// {1, a} or {1, a, b, ab}.
struct NormWitness {
    i64 denominator = 1;
    std::vector<i64> coords;
    std::vector<i64> radicands;

    Rational norm() const;
    std::string to_string() const;
};

struct NormStatus {
    NormTag tag = NormTag::Undetermined;
    Certificate certificate = Certificate::None;
    std::optional<Place> place;
    std::optional<NormWitness> witness;
    std::optional<int> obstruction;
};

bool is_local_norm(const GChar& chi, const FactoredRational& alpha, Place v);

/// Places where a local norm test can fail: ∞, primes of the conductor, primes of alpha.
std::vector<Place> relevant_places(const GChar& chi, const FactoredRational& alpha);

/// First failing place, or nullopt when alpha is a local norm everywhere.
std::optional<Place> first_nonlocal_place(const GChar& chi, const FactoredRational& alpha);
bool is_everywhere_local_norm(const GChar& chi, const FactoredRational& alpha);

bool hnp_holds(const GChar& chi);
AbelianGroup knot_group(const GChar& chi);

/// Squarefree radicand of the quadratic field cut out by coordinate `coord`
/// of a character into an elementary abelian 2-group.
i64 quadratic_radicand(const GChar& chi, int coord = 0);

/// (x, y)_v for nonzero rationals.
int hilbert_symbol(const FactoredRational& x, const FactoredRational& y, Place v);

/// 0 iff alpha ∈ N(Q(sqrt a, sqrt b)^*), for biquadratic fields whose
/// decomposition groups are all cyclic and alpha a local norm everywhere.
/// nullopt when no norm from Q(sqrt a) was found within `height`.
std::optional<int> biquadratic_obstruction(i64 a, i64 b, const FactoredRational& alpha, i64 height = 200);

inline constexpr i64 kWitnessHeightCap = 200;

/// Bounded search over (Σ c_i sqrt(r_i)) / q for quadratic or biquadratic
/// fields: heights ascending, then denominators, then |c| ascending.
std::optional<NormWitness> witness_search(const GChar& chi, const FactoredRational& alpha, i64 height);

struct NormOptions {
    i64 witness_height = 30;
    bool attach_witness = true;
};

NormStatus global_norm_status(const GChar& chi, const FactoredRational& alpha, const NormOptions& opts = {});

}  // namespace abelcount
