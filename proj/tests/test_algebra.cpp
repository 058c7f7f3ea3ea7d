#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

using namespace pinsep;
using namespace testsup;

TEST_CASE("smallest presentation: F_2[x]/(x^2)") {
    FiniteAlgebra C = truncated(2, 1);
    CHECK(C.dim() == 2);
    Vec x = gen(C, "x");
    CHECK(vec_is_zero(C.mul(x, x)));
}

TEST_CASE("triangularity violation is rejected") {
    Presentation pr;
    pr.p = 3;
    pr.gen_names = {"t", "u"};
    pr.exponents = {1, 1};
    pr.relations.resize(2);
    Monomial m;
    m.coeff = 1;
    m.exps = {0, 1}; // t^3 = u with u a *later* generator
    pr.relations[0].push_back(m);
    CHECK_THROWS_AS(FiniteAlgebra::from_presentation(pr), Error);
}

TEST_CASE("non-prime modulus is rejected") {
    Presentation pr;
    pr.p = 6;
    pr.gen_names = {"x"};
    pr.exponents = {1};
    pr.relations.resize(1);
    CHECK_THROWS_AS(FiniteAlgebra::from_presentation(pr), Error);
}

TEST_CASE("the failed-tower algebra has dimension 729 = 3^6") {
    FiniteAlgebra C = failed_tower_example();
    CHECK(C.dim() == 729);
    // t1^3 = x
    CHECK(C.pow(gen(C, "t1"), 3) == gen(C, "x"));
}

TEST_CASE("F_3[x]/(x^9) x F_3[y]/(y^3): reduced-monomial arithmetic") {
    FiniteAlgebra C = presented(3, {"x", "y"}, {2, 1}, {{}, {}});
    CHECK(C.dim() == 27);
    Vec x = gen(C, "x");
    CHECK(vec_is_zero(C.mul(C.pow(x, 3), C.pow(x, 6)))); // x^3 * x^6 = x^9 = 0
    CHECK(!vec_is_zero(C.pow(x, 8)));
}

TEST_CASE("associativity and commutativity hold on the monomial basis") {
    failed_tower_example().check_axioms();
    composition_example().check_axioms();
}

TEST_CASE("frobenius_power: (1+x)^2 = 1 in F_2[x]/(x^2)") {
    FiniteAlgebra C = truncated(2, 1);
    Vec v = vec_add(C.one(), gen(C, "x"), 2);
    CHECK(C.frobenius_power(v, 1) == C.one());
    CHECK(C.frobenius_power(v, 0) == v);
}

TEST_CASE("frobenius_power on a monomial: x -> x^3 in F_3[x]/(x^9)") {
    FiniteAlgebra C = truncated(3, 2);
    CHECK(C.frobenius_power(gen(C, "x"), 1) == C.pow(gen(C, "x"), 3));
}

TEST_CASE("frobenius is additive and compatible with iteration") {
    FiniteAlgebra C = failed_tower_example();
    uint64_t s = 7;
    auto rnd = [&] {
        Vec v(C.dim());
        for (auto& e : v) {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            e = static_cast<uint8_t>(s % 3);
        }
        return v;
    };
    for (int t = 0; t < 10; ++t) {
        Vec a = rnd(), b = rnd();
        CHECK(C.frobenius_power(vec_add(a, b, 3), 1) ==
              vec_add(C.frobenius_power(a, 1), C.frobenius_power(b, 1), 3));
        CHECK(C.frobenius_power(a, 2) == C.frobenius_power(C.frobenius_power(a, 1), 1));
    }
}

TEST_CASE("subalgebra_generated: empty seed gives span{1}") {
    FiniteAlgebra C = f2xy();
    Subalgebra s = subalgebra_generated(C, {});
    CHECK(s.dim() == 1);
    CHECK(s.contains(C.one()));
}

TEST_CASE("subalgebra_generated: k[xy] inside F_2[x,y]/(x^2,y^2)") {
    FiniteAlgebra C = f2xy();
    Vec xy = C.mul(gen(C, "x"), gen(C, "y"));
    Subalgebra s = subalgebra_generated(C, {xy}, {"x*y"});
    CHECK(s.dim() == 2);
}

TEST_CASE("subalgebra_generated: cubes of the composition example span rank 5") {
    FiniteAlgebra C = composition_example();
    std::vector<Vec> cubes;
    for (const Vec& g : C.generators()) cubes.push_back(C.frobenius_power(g, 1));
    Subalgebra s = subalgebra_generated(C, cubes);
    CHECK(s.dim() == 5); // 1, x^2, xy, y^2, x^2 y^2
}

TEST_CASE("frobenius chain of a trivial extension") {
    FiniteAlgebra C = truncated(2, 1);
    FrobeniusChain chain = frobenius_chain(C, full_subalgebra(C));
    CHECK(chain.finite);
    CHECK(chain.exponent == 0);
}

TEST_CASE("frobenius chain dims [27, 3, 1] for F_3[x1]/(x1^9) x F_3[x2]/(x2^3)") {
    FiniteAlgebra C = presented(3, {"x1", "x2"}, {2, 1}, {{}, {}});
    FrobeniusChain chain = frobenius_chain(C, prime_subalgebra(C));
    CHECK(chain.finite);
    CHECK(chain.exponent == 2);
    CHECK(chain.dims == std::vector<int>{27, 3, 1});
    // C^[1] = k[x1^3]
    Vec x1_3 = C.pow(gen(C, "x1"), 3);
    CHECK(chain.levels[1].contains(x1_3));
    CHECK(chain.levels[1].dim() == 3);
}

TEST_CASE("frobenius chain detects infinite exponent on K x K") {
    FiniteAlgebra C = kxk(2);
    FrobeniusChain chain = frobenius_chain(C, prime_subalgebra(C));
    CHECK(!chain.finite);
}

TEST_CASE("chain levels are nested and stabilize at the base") {
    FiniteAlgebra C = failed_tower_example();
    FrobeniusChain chain = frobenius_chain(C, prime_subalgebra(C));
    REQUIRE(chain.finite);
    CHECK(chain.exponent == 2);
    CHECK(chain.dims == std::vector<int>{729, 9, 1});
    for (size_t e = 1; e < chain.levels.size(); ++e)
        CHECK(chain.levels[e - 1].contains_subalgebra(chain.levels[e]));
}

TEST_CASE("radical and locality") {
    FiniteAlgebra C = f2xy();
    CHECK(C.is_local());
    CHECK(C.radical().rank() == 3);
    CHECK(C.residue(C.one()) == 1);
    Vec v = vec_add(C.one(), gen(C, "x"), 2);
    CHECK(C.residue(v) == 1);

    FiniteAlgebra K = kxk(3);
    CHECK(!K.is_local());
    auto idem = K.witness_idempotent();
    REQUIRE(idem.has_value());
    CHECK(K.mul(*idem, *idem) == *idem);
}

TEST_CASE("extract_algebra preserves products") {
    FiniteAlgebra C = failed_tower_example();
    FrobeniusChain chain = frobenius_chain(C, prime_subalgebra(C));
    ExtractedAlgebra E = extract_algebra(chain.levels[1]); // k[x,y], dim 9
    CHECK(E.alg->dim() == 9);
    Vec x_in = E.to_sub(gen(C, "x"));
    Vec y_in = E.to_sub(gen(C, "y"));
    Vec prod_owner = C.mul(gen(C, "x"), gen(C, "y"));
    CHECK(E.to_owner(E.alg->mul(x_in, y_in)) == prod_owner);
}

TEST_CASE("mult_matrix columns agree with mul") {
    FiniteAlgebra C = composition_example();
    Vec v = vec_add(gen(C, "x"), C.mul(gen(C, "y"), gen(C, "z1")), 3);
    FpMat L = C.mult_matrix(v);
    for (int j = 0; j < C.dim(); j += 17) {
        Vec col(C.dim());
        for (int i = 0; i < C.dim(); ++i) col[i] = L.at(i, j);
        CHECK(col == C.mul(v, C.basis_vec(j)));
    }
}
