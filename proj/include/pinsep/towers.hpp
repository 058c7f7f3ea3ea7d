#ifndef PINSEP_TOWERS_HPP
#define PINSEP_TOWERS_HPP

#include "pinsep/classify.hpp"

namespace pinsep {

struct TowerSpec {
    const FiniteAlgebra* C = nullptr;
    Subalgebra A;
    Subalgebra B;
};

struct LegReport {
    std::string name; // "A:B", "B:C", "A:C"
    int exponent = -1;
    PIResult pi;
    FExtResult fext;
    std::optional<GaloisResult> galois; // when exponent <= 1
};

struct TheoremInstance {
    std::string name;
    bool hypotheses_hold = false;
    bool conclusion_checked = false;
    bool conclusion_holds = false;
    std::string detail;
};

struct TowerReport {
    LegReport ab, bc, ac;
    std::vector<std::pair<int, bool>> aux_fext; // e -> A c B[C^{p^e}] is an F-extension
    int aux_fext_true = 0;                      // frequency for the open-question tally
    std::vector<TheoremInstance> theorems;
    bool tower_pi = false;
};

TowerReport tower_report(const TowerSpec& T);

// Sufficient tower conditions: hypotheses (1) B c C F-ext, (2) A c B F-ext,
// (3) A c B[C^p] F-ext; conclusion: tower p.i. and A c B[C^p] p.i.,
// recomputed directly.
TheoremInstance tower_sufficiency_check(const TowerSpec& T);

// exponent-two characterization: tower p.i. <=> A c B and B c C are F-extensions
TheoremInstance exponent2_characterization(const TowerSpec& T);

// composition: A c B, B c C p.i. and A c B[C^{p^k}] F-ext for 1 <= k < exp(C/B)
// imply A c C p.i.
TheoremInstance composition_check(const TowerSpec& T);

// legs as standalone pairs, extracting the upper ring when it is not all of C
PIResult leg_pi(const FiniteAlgebra& C, const Subalgebra& upper, const Subalgebra& lower);
FExtResult leg_fext(const FiniteAlgebra& C, const Subalgebra& upper, const Subalgebra& lower);
int leg_exponent(const FiniteAlgebra& C, const Subalgebra& upper, const Subalgebra& lower);
GaloisResult leg_galois(const FiniteAlgebra& C, const Subalgebra& upper, const Subalgebra& lower);

// B[C^{p^e}] inside C
Subalgebra adjoin_powers(const FiniteAlgebra& C, const Subalgebra& B, int e);

} // namespace pinsep

#endif
