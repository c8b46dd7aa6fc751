#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abelcount/characters.hpp"
#include "abelcount/kummer.hpp"
#include "abelcount/norms.hpp"

namespace abelcount {

// ---------------------------------------------------------------------------
// Local conditions

enum class PredicateKind { Any, Unramified, Split, UnramifiedOrder, Frobenius, Norm };

/// A subset Λ_v of Hom(Q_v^*, G).
struct LocalPredicate {
    PredicateKind kind = PredicateKind::Any;
    i64 order = 0;       ///< UnramifiedOrder: exact order of the Frobenius image
    GroupElement frob;   ///< Frobenius: the required image of p

    bool accepts(const LocalGChar& chi_v, const NormSubgroup& a) const;
    std::string to_string() const;
};

/// "any", "unramified", "split", "unramified-order-N", "frob=(c1,c2,..)", "norm".
LocalPredicate parse_predicate(std::string_view text, const AbelianGroup& g);

/// Every element of Hom(Q_v^*, G): Frobenius image times unit character at a
/// finite place, the sign image at ∞.
std::vector<LocalGChar> local_homs(const std::shared_ptr<const AbelianGroup>& g, Place v);

/// Λ = (Λ_v)_{v ∈ S} together with "every generator of A is a local norm" at v ∉ S.
class LocalConditions {
public:
    /// Places carrying a predicate are added to S.  Without `s`, S is the
    /// minimal admissible set.  Throws ConfigError when S is inadmissible or
    /// some Λ_v is empty.
    LocalConditions(AbelianGroup g, NormSubgroup a, std::optional<PlaceSet> s = std::nullopt,
                    std::map<Place, LocalPredicate> lambda = {});

    const AbelianGroup& group() const { return *g_; }
    const std::shared_ptr<const AbelianGroup>& group_ptr() const { return g_; }
    const NormSubgroup& a() const { return a_; }
    const PlaceSet& s() const { return s_; }
    const std::map<Place, LocalPredicate>& lambda() const { return lambda_; }
    const LocalPredicate& at(Place v) const;
    int finite_places() const;

    /// χ_v ∈ Λ_v for all v ∈ S.
    bool meets_lambda(const GChar& chi) const;
    /// Every generator of A is a local norm at every v ∉ S.
    bool norms_outside_s(const GChar& chi) const;

private:
    std::shared_ptr<const AbelianGroup> g_;
    NormSubgroup a_;
    PlaceSet s_;
    std::map<Place, LocalPredicate> lambda_;
};

// ---------------------------------------------------------------------------
// Exact cyclotomic integers and Dirichlet polynomials

/// Element of Z[ζ_e] in the power basis 1, ζ, ..., ζ^{φ(e)-1}.
class CyclotomicInteger {
public:
    explicit CyclotomicInteger(i64 e = 1);
    static CyclotomicInteger root(i64 e, i64 k, i64 coefficient = 1);

    i64 level() const { return e_; }
    const std::vector<i64>& coefficients() const { return c_; }

    CyclotomicInteger& operator+=(const CyclotomicInteger& o);
    CyclotomicInteger& operator*=(i64 k);
    CyclotomicInteger operator+(const CyclotomicInteger& o) const;
    CyclotomicInteger operator*(const CyclotomicInteger& o) const;
    void add_root(i64 k, i64 coefficient = 1);

    bool is_zero() const;
    bool is_rational() const;
    /// Constant coordinate; meaningful when is_rational().
    i64 rational_part() const { return c_[0]; }
    double real_value() const;

    friend bool operator==(const CyclotomicInteger&, const CyclotomicInteger&) = default;

private:
    i64 e_;
    std::vector<i64> c_;
};

/// (1/denominator) Σ_n coeff[n] n^{-s}.
struct DirichletPolynomial {
    i64 denominator = 1;
    std::map<i64, CyclotomicInteger> terms;

    double value(double s) const;  ///< real part at real s
};

/// Euler factor 1 + coefficient p^{-s} at p ∉ S.
struct EulerFactor {
    i64 p = 0;
    i64 coefficient = 0;
    bool in_norm_tensor = true;

    double value(double s) const;
};

/// x is given over the dual invariant-factor basis, one class per cyclic factor.
EulerFactor euler_factor(i64 p, const AbelianGroup& g, const NormSubgroup& a, const std::vector<FactoredRational>& x);

DirichletPolynomial local_fourier(Place v, const LocalConditions& conds, const std::vector<FactoredRational>& x);

struct DirichletCoefficients {
    i64 bound = 0;
    i64 denominator = 1;
    std::vector<CyclotomicInteger> a;  ///< a[n] for 0 <= n <= bound, a[0] unused
};

DirichletCoefficients dirichlet_coefficients(const LocalConditions& conds, const std::vector<FactoredRational>& x,
                                             i64 bound);

struct PoissonReport {
    bool equal = false;
    std::optional<i64> first_mismatch;
    i64 max_deviation = 0;
    std::vector<i64> direct;   ///< by enumeration, index n
    std::vector<i64> poisson;  ///< from the x-sum, index n
};

/// Compares, for every n <= bound, the number of sub-G-characters of
/// conductor n meeting the conditions with the Poisson side.
PoissonReport poisson_identity_check(const LocalConditions& conds, i64 bound);

// ---------------------------------------------------------------------------
// Leading constant

struct ConstantReport {
    Rational varpi;
    double gamma = 0;               ///< Γ(ϖ)
    i64 unit_factor = 0;            ///< |{±1} ⊗ G|
    i64 local_factor = 0;           ///< |G|^{|S_f|}
    i64 x_order = 0;                ///< |X(Q, G, A)|
    Rational s_sum;                 ///< Σ over Λ-tuples trivial on X of |X| / Π Φ_v
    double s_zeta = 0;              ///< Π_{p ∈ S_f} (1 - 1/p)^ϖ
    i64 prime_bound = 0;
    double euler = 0;               ///< truncated Euler product at P
    double euler_half = 0;          ///< same at P/2
    double value = 0;
    double value_half = 0;

    double s_part() const;
};

ConstantReport leading_constant(const LocalConditions& conds, i64 prime_bound);

// ---------------------------------------------------------------------------
// Means attached to x

SampledMean varpi_x(const AbelianGroup& g, const NormSubgroup& a, const std::vector<FactoredRational>& x,
                    i64 prime_bound, u64 seed, i64 sample_size = 0);
/// Exact: x ∈ X(Q, G, A).
bool is_max_mean(const AbelianGroup& g, const NormSubgroup& a, const std::vector<FactoredRational>& x);

// ---------------------------------------------------------------------------
// Counting

struct LadderPoint {
    i64 bound = 0;
    i64 n = 0;             ///< Λ at S
    i64 n_lambda = 0;      ///< Λ at S and A-norms outside S
    i64 n_loc = 0;         ///< Λ at S and A-norms everywhere
    i64 n_glob_lower = 0;
    i64 n_glob_upper = 0;
    i64 hnp_fail = 0;      ///< among the n_loc characters

    friend bool operator==(const LadderPoint&, const LadderPoint&) = default;
};

struct ExponentFit {
    double exponent = 0;
    double band = 0;
    double std_error = 0;
    int points = 0;
};

/// Least-squares slope of log(count / B) against log log B.  Needs >= 4
/// points spanning >= 3 decades and positive counts.
ExponentFit fit_exponent(const std::vector<std::pair<i64, i64>>& ladder);

struct CountOptions {
    int shards = 1;
    int threads = 0;  ///< 0: one per shard, capped by the hardware
    NormOptions norm{.witness_height = 12, .attach_witness = false};
};

struct CountReport {
    std::string group;
    std::string a;
    std::string s;
    std::vector<std::string> lambda;
    std::vector<LadderPoint> points;
    std::map<std::string, ExponentFit> fits;
    std::optional<ConstantReport> constant;
};

CountReport count_with_conditions(const LocalConditions& conds, std::vector<i64> ladder,
                                  const CountOptions& opts = {});

/// hnp_fail / n_loc per ladder point (0 when n_loc = 0).
std::vector<Rational> hnp_failure_ratio(const AbelianGroup& g, const NormSubgroup& a, const std::vector<i64>& ladder,
                                        const CountOptions& opts = {});

std::vector<i64> default_ladder(bool include_top);

}  // namespace abelcount
