#ifndef PINSEP_ENDALG_HPP
#define PINSEP_ENDALG_HPP

#include <optional>
#include <string>
#include <vector>

#include "pinsep/classify.hpp"

namespace pinsep {

// End_A(C) under composition, flattened to d x d matrices over F_p. All
// subspaces live in the ambient Hom_k(C,C) coordinates (d^2 vectors).
struct EndAlgebra {
    const FiniteAlgebra* C = nullptr;
    Subalgebra baseA;
    int d = 0;             // dim_k C
    EchelonSpan space;     // basis of End_A(C) inside Hom_k
    int dim() const { return space.rank(); }

    Vec compose(const Vec& f, const Vec& g) const; // f o g, flattened
    Vec cact(const Vec& c, const Vec& f) const;    // postcompose with mult-by-c
    Vec identity_op() const;
    Vec mult_op(const Vec& c) const; // the multiplication operator of c
};

EndAlgebra end_algebra(const FiniteAlgebra& C, const Subalgebra& A);

struct EndSubalgebra {
    EchelonSpan span;
    bool contains_unit = false;
    bool composition_closed = false;
    bool c_stable = false; // stable under the left C-action
    bool summand = false;
    std::optional<FpMat> retraction; // on Hom_k coordinates when summand
};

// verify all flags for a given subspace of End_A(C)
EndSubalgebra make_end_subalgebra(const EndAlgebra& E, const std::vector<Vec>& rows);

// B-linear endomorphisms inside End_A(C)
EndSubalgebra end_over(const EndAlgebra& E, const Subalgebra& B);

// B_H = { x in C : [phi, L_x] = 0 for all phi in H }
Subalgebra constants_of(const EndAlgebra& E, const EndSubalgebra& H);

// smallest subspace containing seeds and id, closed under composition and the
// left C-action
EndSubalgebra close_subalgebra(const EndAlgebra& E, const std::vector<Vec>& seeds);

struct SpecialBasis {
    std::vector<Vec> t;        // elements of C, t_1..t_n an A-basis
    std::vector<Vec> phi;      // operators (flattened), a C-basis of H
    int l = 0;                 // rank of H over C
};

// dual-basis construction for a C-summand H of End_A(C), local case
SpecialBasis special_basis(const EndAlgebra& E, const EndSubalgebra& H);

struct RoundtripReport {
    struct LeftEntry {
        std::string name;
        bool eligible = false; // C free over B
        bool roundtrip = false;
        std::string note;
    };
    struct RightEntry {
        std::string name;
        bool summand = false;
        bool roundtrip = false;
        std::string note;
    };
    std::string hypothesis; // "finite_exponent" or "demonstration_mode"
    std::vector<LeftEntry> left;
    std::vector<RightEntry> right;
    bool all_hold = true;
};

RoundtripReport verify_correspondence(const FiniteAlgebra& C, const Subalgebra& A,
                                      const std::vector<std::pair<std::string, Subalgebra>>& candidates_B,
                                      const std::vector<std::pair<std::string, std::vector<Vec>>>& candidates_H);

// total number of subspaces of F_p^d, capped (Gaussian binomial sum)
long subspace_lattice_size(int d, uint16_t p, long cap);

// all unital multiplication-closed subspaces (exhaustive; guarded by count)
std::vector<Subalgebra> enumerate_subalgebras(const FiniteAlgebra& C, long max_subspaces = 2000000);

} // namespace pinsep

#endif
