#ifndef PINSEP_CMODULE_HPP
#define PINSEP_CMODULE_HPP

#include <optional>
#include <vector>

#include "pinsep/algebra.hpp"

namespace pinsep {

// Finite module over a local acting ring B, everything flattened over F_p.
// action[i] is the matrix of the i-th B-basis element on the module.
struct CModule {
    uint16_t p = 0;
    int dim = 0;  // dim_k M
    int bdim = 0; // dim_k B
    std::vector<FpMat> action;
    Vec b_one;                      // coordinates of 1_B over the acting basis
    std::vector<Vec> b_maximal;     // basis of the maximal ideal of B (B-coords)
    std::vector<Vec> b_idealgens;   // ideal generators of m_B (B-coords); may equal b_maximal
    std::vector<std::string> b_gen_names;

    Vec act(const Vec& b_coords, const Vec& m) const; // (sum b_i * basis_i) . m
    FpMat act_matrix(const Vec& b_coords) const;
};

// C as a module over a subalgebra B of C. Throws unless C's ambient algebra is
// local over F_p (or B is the full algebra of a local C).
CModule module_over(const FiniteAlgebra& C, const Subalgebra& B);

// A standalone algebra as a module over itself.
CModule module_over_self(const FiniteAlgebra& B);

// Hom_k(C,C) as a module over C via postcomposition, flattened row-major.
// Local-ring data is filled only when C is local over F_p.
CModule hom_module(const FiniteAlgebra& C);

// Submodule given by basis rows in the parent's coordinates.
struct Submodule {
    EchelonSpan span;
    bool action_stable(const CModule& parent) const;
};

Submodule submodule(const CModule& parent, const std::vector<Vec>& rows);

// span of m_B * M
EchelonSpan radical_span(const CModule& M);
// span of m_B * S for a subspace S (rows in M-coordinates)
EchelonSpan radical_span_of(const CModule& M, const std::vector<Vec>& rows);

// Nakayama: greedy basis-order selection of elements spanning M / m M.
// `candidates` defaults to the coordinate basis of M.
std::vector<Vec> minimal_generators(const CModule& M, const std::vector<Vec>* candidates = nullptr);

// rank r when B^r (on the minimal generators) is an isomorphism onto M.
std::optional<int> is_free(const CModule& M);

struct Retraction {
    FpMat matrix; // parent coords -> parent coords, image inside S, identity on S
};

// B-linear retraction N -> S when S is a direct summand. Uses the local
// criterion (minimal generators of S stay independent in N/mN) when N is
// free over B; falls back to the explicit F_p linear system otherwise.
std::optional<Retraction> is_direct_summand(const Submodule& S, const CModule& N);

// the generic linear-system route on its own (no locality data required)
std::optional<Retraction> summand_via_linear_system(const Submodule& S, const CModule& N);

// Induced module on a complement coordinate system; dim = dim N - dim S.
struct QuotientModule {
    CModule mod;
    FpMat proj; // N -> quotient coords
    FpMat lift; // quotient coords -> N (complement embedding)
};
QuotientModule quotient_module(const CModule& N, const Submodule& S);

// Module structure on a submodule, in its own coordinates.
struct RestrictedModule {
    CModule mod;
    std::vector<Vec> basis_in_parent;
};
RestrictedModule restrict_module(const CModule& N, const Submodule& S);

} // namespace pinsep

#endif
