#ifndef PINSEP_CLASSIFY_HPP
#define PINSEP_CLASSIFY_HPP

#include <optional>
#include <string>
#include <vector>

#include "pinsep/diffcalc.hpp"

namespace pinsep {

// exponent of upper over lower measured on designated generators; -1 = not finite
int pair_exponent(const FiniteAlgebra& C, const Subalgebra& B);

bool is_pbasis(const std::vector<Vec>& xs, const FiniteAlgebra& C, const Subalgebra& B);

struct PBasisSearch {
    bool found = false;
    std::vector<Vec> elements;
    std::vector<std::string> names;
    std::string reason; // failure note
};

// Minimal algebra generators of C over B (greedy over the designated
// generators against m_C/(m_B C + m_C^2)), then the p-basis test.
PBasisSearch find_pbasis(const FiniteAlgebra& C, const Subalgebra& B);

// minimal algebra generator selection (the elements, unshifted)
std::vector<Vec> minimal_algebra_generators(const FiniteAlgebra& C, const Subalgebra& B,
                                            std::vector<std::string>* names_out = nullptr);

struct GaloisResult {
    bool applicable = false; // exponent <= 1
    bool verdict = false;
    int exponent = -1;
    std::vector<std::string> pbasis;
    int rank = 0; // rank of C over B when free
    std::string note;
};

GaloisResult is_galois(const FiniteAlgebra& C, const Subalgebra& B);
// extension lower < upper inside an ambient algebra (extracts `upper` unless full)
GaloisResult is_galois_pair(const FiniteAlgebra& ambient, const Subalgebra& upper, const Subalgebra& lower);

struct FExtResult {
    bool applicable = false; // finite exponent
    bool verdict = false;
    int first_failing_level = -1;
    std::vector<int> chain_dims;
    std::vector<std::optional<int>> level_ranks; // rank of C over C^[e]
};

FExtResult is_f_extension(const FiniteAlgebra& C, const Subalgebra& A);

struct PIResult {
    bool applicable = false; // finite exponent
    bool verdict = false;
    int exponent = -1;
    std::vector<int> chain_dims;
    struct Level {
        int index = 0;
        bool galois = false;
        std::vector<std::string> pbasis;
        std::string note;
    };
    std::vector<Level> levels; // one per consecutive chain pair
};

PIResult is_purely_inseparable(const FiniteAlgebra& C, const Subalgebra& A);

struct GNGSData {
    std::vector<Vec> elements;
    std::vector<std::string> names;
    std::vector<int> n_seq; // n(0), n(1), ..., n(exp) = 0
    std::vector<int> e_seq; // e(1) >= ... >= e(n)
    long sum_n = 0, sum_e = 0;
};

GNGSData gngs(const FiniteAlgebra& C, const Subalgebra& A);

struct NGSResult {
    bool presentable = false;   // every P_i exists in the bounded-degree space
    bool isomorphism = false;   // canonical surjection is bijective
    std::optional<Presentation> presentation; // when the base is the prime field
    std::string witness;        // first failing relation when not presentable
};

NGSResult ngs_presentation(const FiniteAlgebra& C, const Subalgebra& A, const GNGSData& G);

struct CharacterizationReport {
    int exponent = 0;
    int bound = 0; // r p^e - 1
    std::optional<bool> cond_chain_galois;
    std::optional<bool> cond_pk_all;        // P^k projective for all k <= bound
    std::optional<bool> cond_pk_frobenius;  // P^{p^e} projective for e < exp
    std::optional<bool> cond_diff_all;      // F-ext and Diff^k summand for all k <= bound
    std::optional<bool> cond_diff_frobenius;
    bool agree = false;
    std::string note;
};

CharacterizationReport characterization_report(const FiniteAlgebra& C, const Subalgebra& A, int diff_dim_threshold = 30);

struct FiberResult {
    bool applicable = false;
    int fiber_dim = 0;
    bool fiber_pi = false;
    bool f_ext = false;
    bool pi = false;
    bool biconditional_holds = false;
};

FiberResult fiber_check(const FiniteAlgebra& C, const Subalgebra& A);

bool der_generates_end(const FiniteAlgebra& C, const Subalgebra& A);

// the fiber C/m_A C as a standalone algebra, with the projection map
struct FiberAlgebra {
    std::shared_ptr<FiniteAlgebra> alg;
    FpMat proj;
};
FiberAlgebra fiber_algebra(const FiniteAlgebra& C, const Subalgebra& A);

} // namespace pinsep

#endif
