#ifndef PINSEP_TESTS_SUPPORT_HPP
#define PINSEP_TESTS_SUPPORT_HPP

#include <string>
#include <vector>

#include "pinsep/algebra.hpp"

namespace testsup {

using namespace pinsep;

// C = F_p[x1..xn] with relations x_i^{p^{e_i}} = rhs_i given as strings like
// "x^2" / "0"; generators named by `names`.
inline FiniteAlgebra presented(uint16_t p, const std::vector<std::string>& names, const std::vector<uint32_t>& exps,
                               const std::vector<std::vector<std::pair<int, std::vector<uint32_t>>>>& rels) {
    Presentation pr;
    pr.p = p;
    pr.gen_names = names;
    pr.exponents = exps;
    for (const auto& poly : rels) {
        Polynomial q;
        for (const auto& [coeff, e] : poly) {
            Monomial m;
            m.coeff = static_cast<uint8_t>(coeff);
            m.exps = e;
            q.push_back(m);
        }
        pr.relations.push_back(q);
    }
    return FiniteAlgebra::from_presentation(pr);
}

// F_p[x]/(x^{p^e})
inline FiniteAlgebra truncated(uint16_t p, uint32_t e) { return presented(p, {"x"}, {e}, {{}}); }

// F_2[x,y]/(x^2,y^2)
inline FiniteAlgebra f2xy() { return presented(2, {"x", "y"}, {1, 1}, {{}, {}}); }

// F_3[x,y]/(x^3,y^3)
inline FiniteAlgebra f3xy() { return presented(3, {"x", "y"}, {1, 1}, {{}, {}}); }

// p = 3 tower whose top leg is purely inseparable while the lower one is
// not: B = k[x,y,z1,z2]/(x^3,y^3,z1^3-x^2,z2^3-y^2), C = B[t1,t2]/(t1^3-x,t2^3-y)
inline FiniteAlgebra failed_tower_example() {
    return presented(3, {"x", "y", "z1", "z2", "t1", "t2"}, {1, 1, 1, 1, 1, 1},
                     {{},
                      {},
                      {{1, {2, 0, 0, 0, 0, 0}}},
                      {{1, {0, 2, 0, 0, 0, 0}}},
                      {{1, {1, 0, 0, 0, 0, 0}}},
                      {{1, {0, 1, 0, 0, 0, 0}}}});
}

// composition counterexample: p=3, B = k[x,y]/(x^3,y^3),
// C = B[z1,z2,z3]/(z1^3-x^2, z2^3-xy, z3^3-y^2)
inline FiniteAlgebra composition_example() {
    return presented(3, {"x", "y", "z1", "z2", "z3"}, {1, 1, 1, 1, 1},
                     {{},
                      {},
                      {{1, {2, 0, 0, 0, 0}}},
                      {{1, {1, 1, 0, 0, 0}}},
                      {{1, {0, 2, 0, 0, 0}}}});
}

// K x K over F_p via structure constants, unit = u + v
inline FiniteAlgebra kxk(uint16_t p) {
    std::vector<std::vector<Vec>> table(2, std::vector<Vec>(2));
    table[0][0] = Vec{1, 0};
    table[0][1] = Vec{0, 0};
    table[1][0] = Vec{0, 0};
    table[1][1] = Vec{0, 1};
    return FiniteAlgebra::from_structure_constants(p, {"u", "v"}, table, Vec{1, 1}, {}, {});
}

inline Vec gen(const FiniteAlgebra& A, const std::string& name) {
    for (size_t i = 0; i < A.gen_names().size(); ++i)
        if (A.gen_names()[i] == name) return A.generators()[i];
    throw std::runtime_error("no generator " + name);
}

} // namespace testsup

#endif
