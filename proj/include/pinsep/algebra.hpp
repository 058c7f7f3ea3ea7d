#ifndef PINSEP_ALGEBRA_HPP
#define PINSEP_ALGEBRA_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pinsep/fpmat.hpp"

namespace pinsep {

// One monomial of a relation right-hand side: coeff * prod_j x_j^{exps[j]}.
struct Monomial {
    uint8_t coeff = 0;
    std::vector<uint32_t> exps;
};

using Polynomial = std::vector<Monomial>;

// Triangular presentation: relation i reads x_i^{p^{e_i}} = P_i, where P_i
// mentions only x_1..x_{i-1} and has per-variable degree < p^{e_j}.
struct Presentation {
    uint16_t p = 0;
    std::vector<std::string> gen_names;
    std::vector<uint32_t> exponents;   // e_i >= 1
    std::vector<Polynomial> relations; // P_i over generators < i

    void validate() const; // triangularity, degree bounds, primality
    bool is_split() const; // all P_i = 0
};

// Finite-dimensional commutative F_p-algebra with designated generators.
// Presentation-built algebras use the reduced-monomial basis and rewrite via
// per-generator multiplication matrices; structure-constant algebras store the
// full basis-pair product table.
class FiniteAlgebra {
public:
    static FiniteAlgebra from_presentation(const Presentation& pr, size_t dim_cap = 100000);
    static FiniteAlgebra from_structure_constants(uint16_t p, std::vector<std::string> basis_names,
                                                  std::vector<std::vector<Vec>> table, Vec one,
                                                  std::vector<std::string> gen_names, std::vector<Vec> gens);

    uint16_t p() const { return fp_.p; }
    const Fp& fp() const { return fp_; }
    int dim() const { return dim_; }
    const Vec& one() const { return one_; }
    const std::vector<std::string>& basis_names() const { return basis_names_; }
    const std::vector<std::string>& gen_names() const { return gen_names_; }
    const std::vector<Vec>& generators() const { return gens_; }
    bool from_presentation_input() const { return presentation_.has_value(); }
    const Presentation& presentation() const;

    Vec zero() const { return Vec(dim_, 0); }
    Vec basis_vec(int i) const;
    Vec scalar(uint8_t c) const { return vec_scale(one_, c, p()); }

    Vec mul(const Vec& u, const Vec& v) const;
    Vec mul_basis(int i, const Vec& v) const; // basis_i * v
    Vec pow(const Vec& v, uint64_t n) const;
    Vec frobenius_power(const Vec& v, uint32_t e) const; // v^(p^e)
    FpMat mult_matrix(const Vec& v) const;               // L_v, columns = v * basis_j
    const FpMat& frobenius_matrix() const;               // matrix of x -> x^p

    // radical (= nilpotent elements) via kernel iteration of the F_p-linear
    // p-th power map; local over F_p iff dim(rad) == dim-1.
    const EchelonSpan& radical() const;
    bool is_local() const;
    // residue of x modulo the radical as an F_p scalar (requires local)
    uint8_t residue(const Vec& v) const;
    // a nontrivial idempotent when the algebra is not local and one exists
    std::optional<Vec> witness_idempotent() const;

    // span of m^2 where m = radical (cached; rows in ambient coordinates)
    const EchelonSpan& maximal_ideal_square() const;

    // Exhaustive commutativity/associativity check on basis pairs/triples
    // (sampled above `exhaustive_limit`); throws on violation.
    void check_axioms(int exhaustive_limit = 64) const;

    // monomial-basis bookkeeping (presentation algebras only)
    const std::vector<uint32_t>& monomial_bounds() const { return bounds_; }
    std::vector<uint32_t> monomial_exps(size_t idx) const { return index_to_exps(idx); }
    size_t monomial_index(const std::vector<uint32_t>& exps) const { return exps_to_index(exps); }

private:
    Fp fp_;
    int dim_ = 0;
    std::vector<std::string> basis_names_;
    Vec one_;
    std::vector<std::string> gen_names_;
    std::vector<Vec> gens_;

    std::optional<Presentation> presentation_;
    std::vector<uint32_t> bounds_;  // p^{e_i} per generator (presentation case)
    std::vector<size_t> strides_;   // mixed-radix strides for monomial indexing
    std::vector<FpMat> genmul_;     // multiplication matrix of each generator

    std::vector<std::vector<Vec>> table_; // structure-constant case: table_[i][j] = b_i*b_j

    mutable std::optional<EchelonSpan> radical_;
    mutable std::optional<EchelonSpan> msquare_;
    mutable std::optional<FpMat> frobenius_;

    std::vector<uint32_t> index_to_exps(size_t idx) const;
    size_t exps_to_index(const std::vector<uint32_t>& a) const;
};

// F_p-subspace of a FiniteAlgebra closed under multiplication and containing 1.
struct Subalgebra {
    const FiniteAlgebra* owner = nullptr;
    EchelonSpan span;             // canonical rref basis
    std::vector<Vec> gens;        // generator list (seeds plus included subring's generators)
    std::vector<std::string> gen_names;

    int dim() const { return span.rank(); }
    bool contains(const Vec& v) const { return span.contains(v); }
    bool same(const Subalgebra& o) const { return span.same_span(o.span); }
    bool contains_subalgebra(const Subalgebra& o) const;
};

// span{1} (the prime field when the base is F_p itself)
Subalgebra prime_subalgebra(const FiniteAlgebra& C);
// the whole algebra as a Subalgebra (generators = designated generators)
Subalgebra full_subalgebra(const FiniteAlgebra& C);

// Smallest unital subalgebra containing `seed` and `include_sub`.
Subalgebra subalgebra_generated(const FiniteAlgebra& C, const std::vector<Vec>& seed,
                                const std::vector<std::string>& seed_names = {},
                                const Subalgebra* include_sub = nullptr);

struct FrobeniusChain {
    bool finite = false;
    int exponent = -1;              // valid when finite
    std::vector<Subalgebra> levels; // C = levels[0] >= ... >= levels.back()
    std::vector<int> dims;
};

// C^[e] = A[C^{p^e}] for e = 0,1,... until the chain reaches A or stabilizes
// strictly above it ("not finite exponent").
FrobeniusChain frobenius_chain(const FiniteAlgebra& C, const Subalgebra& A);

// Rebuild a Subalgebra as a standalone FiniteAlgebra (structure constants on
// its canonical basis), together with coordinate maps.
struct ExtractedAlgebra {
    std::shared_ptr<FiniteAlgebra> alg;
    std::vector<Vec> basis_in_owner; // basis rows in the owner's coordinates
    Vec to_sub(const Vec& ambient) const;
    Vec to_owner(const Vec& sub) const;

    const EchelonSpan* span_ = nullptr; // owned by keeper below
    std::shared_ptr<EchelonSpan> keeper_;
};

ExtractedAlgebra extract_algebra(const Subalgebra& B);

// Coordinates of an ambient subring inside an extracted algebra.
Subalgebra restrict_subalgebra(const ExtractedAlgebra& E, const Subalgebra& inner);

} // namespace pinsep

#endif
