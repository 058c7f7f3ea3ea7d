#ifndef PINSEP_DIFFCALC_HPP
#define PINSEP_DIFFCALC_HPP

#include <optional>
#include <string>
#include <vector>

#include "pinsep/cmodule.hpp"

namespace pinsep {

// binomial coefficient mod p via Pascal's triangle (memoized per modulus)
uint8_t binom_mod(uint32_t n, uint32_t k, uint16_t p);

// Target of operators C -> M: a module with an action of C's basis elements.
struct TargetModule {
    int dim = 0;
    std::vector<FpMat> cact; // one dim x dim matrix per C-basis element
    FpMat act_of(const Vec& c, uint16_t p) const;
};

TargetModule target_self(const FiniteAlgebra& C);

// C (x)_B C with the left C-action, the multiplication ideal J and the
// z_i = 1(x)x_i - x_i(x)1 multipliers. Uses the free-basis model {c_i (x) t_j}
// when C is free over B, and the quotient of C (x)_k C otherwise.
struct TensorSquare {
    const FiniteAlgebra* C = nullptr;
    uint16_t p = 0;
    int dC = 0;
    int dim = 0;
    bool free_route = false;
    int rank = 0; // rank_B C when free
    FpMat mu;     // T -> C
    FpMat delta;  // C -> T, c -> 1(x)c
    FpMat iota;   // C -> T, c -> c(x)1
    Vec unit;     // 1(x)1
    std::vector<FpMat> lact; // left action of C-basis elements
    std::vector<FpMat> zmul; // multiplication by z_k per designated generator
    std::vector<Vec> jbasis; // basis of J = ker(mu)
    std::vector<Vec> tbasis; // module basis t_j of C over B (free route)
    FpMat pair_lift;         // quotient route: T coords -> C(x)_k C pair coords
};

TensorSquare tensor_square(const FiniteAlgebra& C, const Subalgebra& B, long dim_cap = 1 << 20);

// C-module generators of J^m: normal forms of degree-m z-monomials.
std::vector<Vec> jpower_generators(const TensorSquare& T, int m);
// k-span of J^m
EchelonSpan jpower_span(const TensorSquare& T, int m);

struct PrincipalParts {
    int order = 0;
    int dim = 0;       // dim_k P^k
    CModule mod;       // P^k as module over C
    FpMat proj, lift;  // T <-> P^k coordinates
    FpMat delta_k;     // C -> P^k, the universal operator
    std::optional<int> free_rank; // is_free verdict over C
};

PrincipalParts principal_parts(const TensorSquare& T, int k);

enum class KaehlerRoute { Quotient, Presentation };

struct KaehlerModule {
    KaehlerRoute route;
    int dim = 0;  // dim_k Omega
    CModule mod;  // Omega as module over C
    FpMat d;      // C -> Omega, universal derivation
    std::optional<int> free_rank;
};

// route Quotient: J/J^2 from the tensor square. route Presentation: free
// module on dx_i modulo the differentials of the relations (base = prime field).
KaehlerModule kaehler(const FiniteAlgebra& C, const Subalgebra& B, KaehlerRoute route, long dim_cap = 1 << 20);

// Basis of a subspace of Hom_k(C, M) (matrices dM x dC, flattened row-major in
// the canonical span).
struct OperatorSpace {
    int dM = 0, dC = 0;
    EchelonSpan flat;
    std::vector<FpMat> basis;
    int dim() const { return flat.rank(); }
};

OperatorSpace derivations(const FiniteAlgebra& C, const Subalgebra& A, const TargetModule& M);

// all A-linear maps C -> M
OperatorSpace hom_space(const FiniteAlgebra& C, const Subalgebra& A, const TargetModule& M);

enum class DiffRoute { Bracket, Dual };

OperatorSpace diff_operators(const FiniteAlgebra& C, const Subalgebra& A, const TargetModule& M, int k,
                             DiffRoute route, long dim_cap = 1 << 20);

// dual-route core reusing an already-built tensor square
OperatorSpace diff_operators_dual(const TensorSquare& T, const Subalgebra& A, const TargetModule& M, int k);

// operators from a chain level into C: Diff_A^k(level, C). The returned
// matrices are dim_C x dim(level); `lvl_out` receives the extracted level.
struct LevelOperators {
    std::shared_ptr<FiniteAlgebra> level;
    Subalgebra base_in_level;
    TargetModule target; // C as a module over the level
    OperatorSpace ops;
};
LevelOperators diff_operators_on_level(const FiniteAlgebra& C, const Subalgebra& A, const Subalgebra& level, int k,
                                       DiffRoute route);

// [x, D](c) = x D(c) - D(xc)
FpMat bracket_with(const FiniteAlgebra& C, const TargetModule& M, const Vec& x, const FpMat& D);

// least n such that all (n+1)-fold generator brackets vanish, searched up to
// `bound`; nullopt if none found within the bound.
std::optional<int> order_of(const FiniteAlgebra& C, const TargetModule& M, const FpMat& D, int bound);

// partial derivatives attached to a verified p-basis xs of C over B;
// monomial_coords maps C onto the (B-basis x reduced-monomial) coordinates.
struct PBasisCalculus {
    std::vector<Vec> xs;
    int n = 0;
    std::vector<uint32_t> alpha_bound; // = p per slot
    FpMat phi, phi_inv;                // C <-> (m, alpha) coordinates
    std::vector<FpMat> partial;        // d_i matrices on C

    FpMat partial_beta(const FiniteAlgebra& C, const std::vector<uint32_t>& beta) const;
};

PBasisCalculus partials_from_pbasis(const FiniteAlgebra& C, const Subalgebra& B, const std::vector<Vec>& xs);

// Delta_alpha on a split modular presentation algebra: Delta(x^b) = C(b,a) x^{b-a}.
FpMat delta_alpha(const FiniteAlgebra& C, const std::vector<uint32_t>& alpha);

// restriction of D: C -> M to a subalgebra level (columns over level's basis rows)
struct RestrictedOp {
    FpMat mat; // dM x dim(level)
    int order_bound = -1;
};
RestrictedOp restrict_to(const FiniteAlgebra& C, const TargetModule& M, const FpMat& D, const Subalgebra& level,
                         int order_bound_of_D);

// extension of del: C^[1] -> M along a p-basis of C over C^[1]:
// D(sum lambda_a x^a) = sum x^a del(lambda_a)
FpMat extend_along_pbasis(const FiniteAlgebra& C, const TargetModule& M, const Subalgebra& C1,
                          const std::vector<Vec>& xs, const FpMat& del_on_level);

// closed-form bracket development: sum over subsets S of [n]
Vec bracket_development(const FiniteAlgebra& C, const TargetModule& M, const FpMat& D, const std::vector<Vec>& xs,
                        const Vec& c);
// the same value by literally iterating brackets
Vec iterated_bracket_eval(const FiniteAlgebra& C, const TargetModule& M, const FpMat& D, const std::vector<Vec>& xs,
                          const Vec& c);

} // namespace pinsep

#endif
