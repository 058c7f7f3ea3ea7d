#include "pinsep/selftest.hpp"

#include <ostream>

#include "pinsep/endalg.hpp"
#include "pinsep/input.hpp"
#include "pinsep/towers.hpp"

namespace pinsep {

namespace {

struct Rng {
    uint64_t s;
    explicit Rng(uint64_t seed) : s(seed ? seed : 1) {}
    uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    int below(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }
    Vec vec(int d, uint16_t p) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = static_cast<uint8_t>(next() % p);
        return v;
    }
};

struct Ctx {
    const InputDocument& doc;
    Rng rng;
    std::string fail; // first failure message, empty when ok
    void expect(bool ok, const std::string& msg) {
        if (!ok && fail.empty()) fail = msg;
    }
};

using Property = std::pair<const char*, std::function<void(Ctx&)>>;

void prop_axioms(Ctx& c) {
    c.doc.algebra->check_axioms();
}

void prop_frobenius_additive(Ctx& c) {
    const FiniteAlgebra& C = *c.doc.algebra;
    for (int t = 0; t < 20; ++t) {
        Vec x = c.rng.vec(C.dim(), C.p()), y = c.rng.vec(C.dim(), C.p());
        Vec lhs = C.frobenius_power(vec_add(x, y, C.p()), 1);
        Vec rhs = vec_add(C.frobenius_power(x, 1), C.frobenius_power(y, 1), C.p());
        c.expect(lhs == rhs, "(x+y)^p != x^p + y^p");
    }
}

void prop_frobenius_tower(Ctx& c) {
    const FiniteAlgebra& C = *c.doc.algebra;
    Subalgebra A = prime_subalgebra(C);
    FrobeniusChain chain = frobenius_chain(C, A);
    for (size_t e = 1; e < chain.levels.size(); ++e)
        c.expect(chain.levels[e - 1].contains_subalgebra(chain.levels[e]), "chain is not descending");
    if (chain.finite) {
        c.expect(chain.levels.back().same(A), "finite chain does not end at the base");
        // iterated p-th powers of random elements land where the exponent says
        for (int t = 0; t < 10; ++t) {
            Vec x = c.rng.vec(C.dim(), C.p());
            c.expect(A.contains(C.frobenius_power(x, static_cast<uint32_t>(chain.exponent))),
                     "x^(p^exp) escapes the base");
        }
        c.expect(pair_exponent(C, A) == chain.exponent, "pair_exponent disagrees with the chain");
        if (chain.exponent >= 1) {
            ExtractedAlgebra E = extract_algebra(chain.levels[1]);
            Subalgebra A1 = restrict_subalgebra(E, A);
            FrobeniusChain sub = frobenius_chain(*E.alg, A1);
            c.expect(sub.finite && sub.exponent == chain.exponent - 1, "exp(C^[1]/A) != exp(C/A) - 1");
        }
    }
}

void prop_pi_implies_fext(Ctx& c) {
    const FiniteAlgebra& C = *c.doc.algebra;
    Subalgebra A = prime_subalgebra(C);
    PIResult pi = is_purely_inseparable(C, A);
    if (!pi.applicable) return;
    FExtResult fe = is_f_extension(C, A);
    if (pi.verdict) c.expect(fe.verdict, "purely inseparable but not an F-extension");
}

void prop_galois_battery(Ctx& c) {
    const FiniteAlgebra& C = *c.doc.algebra;
    if (C.dim() > 16 || !C.is_local()) return;
    std::vector<Subalgebra> bases{prime_subalgebra(C)};
    for (const auto& [name, s] : c.doc.subrings) bases.push_back(s);
    for (const Subalgebra& B : bases) {
        int e = pair_exponent(C, B);
        if (e != 1) continue;
        PBasisSearch pb = find_pbasis(C, B);
        KaehlerModule om = kaehler(C, B, KaehlerRoute::Quotient);
        bool omega_free = om.free_rank.has_value();
        bool free_over = is_free(module_over(C, B)).has_value();
        bool gen = der_generates_end(C, B);
        TargetModule M = target_self(C);
        OperatorSpace der = derivations(C, B, M);
        OperatorSpace endB = hom_space(C, B, M);
        CModule hom = hom_module(C);
        Submodule endsub = submodule(hom, endB.flat.rows());
        RestrictedModule endmod = restrict_module(hom, endsub);
        std::vector<Vec> der_inside;
        for (const Vec& f : der.flat.rows()) der_inside.push_back(endsub.span.coordinates(f));
        Submodule S = submodule(endmod.mod, der_inside);
        bool summand = free_over && is_direct_summand(S, endmod.mod).has_value();
        c.expect(pb.found == omega_free, "p-basis existence disagrees with Omega freeness");
        c.expect(pb.found == gen, "p-basis existence disagrees with End = C[Der]");
        c.expect(pb.found == summand, "p-basis existence disagrees with Der being a summand");
        GaloisResult g = is_galois(C, B);
        c.expect(g.applicable && g.verdict == pb.found, "is_galois disagrees with find_pbasis");
    }
}

void prop_gngs(Ctx& c) {
    const FiniteAlgebra& C = *c.doc.algebra;
    if (!C.is_local()) return;
    Subalgebra A = prime_subalgebra(C);
    FrobeniusChain chain = frobenius_chain(C, A);
    if (!chain.finite) return;
    GNGSData G = gngs(C, A);
    c.expect(G.sum_n == G.sum_e, "sum identity fails");
    for (size_t e = 0; e + 1 < G.n_seq.size(); ++e)
        c.expect(G.n_seq[e] >= G.n_seq[e + 1], "n(e) is not non-increasing");
    // n(e) = max{i : e(i) > e}
    for (size_t e = 0; e < G.n_seq.size(); ++e) {
        int m = 0;
        for (size_t i = 0; i < G.e_seq.size(); ++i)
            if (G.e_seq[i] > static_cast<int>(e)) m = static_cast<int>(i) + 1;
        c.expect(m == G.n_seq[e], "n(e) recovery from e(i) fails");
    }
    NGSResult N = ngs_presentation(C, A, G);
    PIResult pi = is_purely_inseparable(C, A);
    c.expect(N.isomorphism == pi.verdict, "NGS isomorphism verdict differs from the p.i. verdict");
    if (N.presentation) {
        FiniteAlgebra rebuilt = FiniteAlgebra::from_presentation(*N.presentation);
        c.expect(rebuilt.dim() == C.dim() || !N.isomorphism, "NGS presentation dimension mismatch");
    }
}

void prop_diff_routes(Ctx& c) {
    const FiniteAlgebra& C = *c.doc.algebra;
    if (C.dim() > 16 || !C.is_local()) return;
    Subalgebra A = prime_subalgebra(C);
    FrobeniusChain chain = frobenius_chain(C, A);
    if (!chain.finite) return;
    TargetModule M = target_self(C);
    TensorSquare T = tensor_square(C, A);
    long bound = 1;
    for (int t = 0; t < chain.exponent; ++t) bound *= C.p();
    bound = static_cast<long>(C.generators().size()) * bound - 1;
    int kmax = static_cast<int>(std::min<long>(bound, 6));
    int prev = -1;
    for (int k = 0; k <= kmax; ++k) {
        OperatorSpace dual = diff_operators_dual(T, A, M, k);
        OperatorSpace bracket = diff_operators(C, A, M, k, DiffRoute::Bracket);
        c.expect(dual.flat.same_span(bracket.flat), "bracket and dual routes disagree at k=" + std::to_string(k));
        c.expect(dual.dim() >= prev, "Diff filtration is not increasing");
        prev = dual.dim();
        if (k == 0) c.expect(dual.dim() == C.dim(), "Diff^0 has wrong dimension");
        if (k == 1) {
            OperatorSpace der = derivations(C, A, M);
            c.expect(dual.dim() == C.dim() + der.dim(), "Diff^1 != Diff^0 + Der");
        }
    }
    if (bound <= 6) {
        OperatorSpace top = diff_operators_dual(T, A, M, static_cast<int>(bound));
        c.expect(top.dim() == C.dim() * C.dim(), "Diff^{rp^e-1} != Hom");
    }
}

void prop_brackets(Ctx& c) {
    const FiniteAlgebra& C = *c.doc.algebra;
    if (C.dim() > 16) return;
    TargetModule M = target_self(C);
    for (int t = 0; t < 10; ++t) {
        FpMat D(C.dim(), C.dim(), C.p());
        D.a = c.rng.vec(C.dim() * C.dim(), C.p());
        Vec x = c.rng.vec(C.dim(), C.p());
        // p-fold bracket equals [x^p, D]
        FpMat cur = D;
        for (int q = 0; q < C.p(); ++q) cur = bracket_with(C, M, x, cur);
        FpMat direct = bracket_with(C, M, C.pow(x, C.p()), D);
        c.expect(cur.a == direct.a, "p-fold bracket != [x^p, D]");
        // closed-form development vs iterated brackets
        int n = 1 + c.rng.below(3);
        std::vector<Vec> xs;
        for (int i = 0; i < n; ++i) xs.push_back(c.rng.vec(C.dim(), C.p()));
        Vec e = c.rng.vec(C.dim(), C.p());
        c.expect(bracket_development(C, M, D, xs, e) == iterated_bracket_eval(C, M, D, xs, e),
                 "bracket development != iterated bracket");
    }
}

void prop_jb_roundtrip(Ctx& c) {
    const FiniteAlgebra& C = *c.doc.algebra;
    if (C.dim() > 16 || !C.is_local()) return;
    Subalgebra A = prime_subalgebra(C);
    FrobeniusChain chain = frobenius_chain(C, A);
    if (!chain.finite) return;
    EndAlgebra E = end_algebra(C, A);
    std::vector<std::pair<std::string, Subalgebra>> cands;
    for (size_t e = 1; e + 1 < chain.levels.size(); ++e)
        cands.push_back({"C^[" + std::to_string(e) + "]", chain.levels[e]});
    for (const auto& [name, s] : c.doc.subrings) cands.push_back({name, s});
    for (const auto& [name, B] : cands) {
        CModule m = module_over(C, B);
        if (!is_free(m)) continue;
        EndSubalgebra H = end_over(E, B);
        c.expect(H.summand, "End_B(C) is not a summand for free B: " + name);
        Subalgebra back = constants_of(E, H);
        c.expect(back.span.same_span(B.span), "constants_of(end_over(B)) != B for " + name);
        EndSubalgebra H2 = end_over(E, back);
        c.expect(H2.span.same_span(H.span), "end_over(constants_of(H)) != H for " + name);
    }
}

void prop_fiber(Ctx& c) {
    const FiniteAlgebra& C = *c.doc.algebra;
    if (!C.is_local()) return;
    for (const auto& [name, s] : c.doc.subrings) {
        if (s.dim() <= 1) continue;
        FrobeniusChain chain = frobenius_chain(C, s);
        if (!chain.finite) continue;
        FiberResult f = fiber_check(C, s);
        c.expect(!f.applicable || f.biconditional_holds, "fiber biconditional fails over " + name);
    }
}

void prop_tower_theorems(Ctx& c) {
    // every theorem instance whose hypotheses hold must have its directly
    // recomputed conclusion hold as well
    const FiniteAlgebra& C = *c.doc.algebra;
    if (!C.is_local() || C.dim() > 256) return;
    const Subalgebra* A = c.doc.find_subring("A");
    const Subalgebra* B = c.doc.find_subring("B");
    if (!A || !B) return;
    FrobeniusChain chain = frobenius_chain(C, *A);
    if (!chain.finite) return;
    TowerSpec T{&C, *A, *B};
    TowerReport R = tower_report(T);
    for (const auto& th : R.theorems)
        if (th.hypotheses_hold && th.conclusion_checked)
            c.expect(th.conclusion_holds, th.name + ": hypotheses hold but the conclusion fails");
}

void prop_pinned_verdicts(Ctx& c) {
    const FiniteAlgebra& C = *c.doc.algebra;
    auto resolve = [&](const std::string& name) -> std::optional<Subalgebra> {
        if (name == "C") return full_subalgebra(C);
        if (name == "A" && !c.doc.find_subring("A")) return prime_subalgebra(C);
        if (const Subalgebra* s = c.doc.find_subring(name)) return *s;
        return std::nullopt;
    };
    auto split_leg = [&](const std::string& leg) -> std::optional<std::pair<Subalgebra, Subalgebra>> {
        for (size_t cut = 1; cut < leg.size(); ++cut) {
            auto lo = resolve(leg.substr(0, cut));
            auto hi = resolve(leg.substr(cut));
            if (lo && hi) return std::make_pair(*lo, *hi);
        }
        return std::nullopt;
    };
    for (const auto& [key, value] : c.doc.task) {
        if (key.rfind("expect_", 0) != 0) continue;
        std::string what = key.substr(7);
        if (what == "finite_exponent") {
            FrobeniusChain chain = frobenius_chain(C, prime_subalgebra(C));
            c.expect(chain.finite == (value == "true"), key + " pin violated");
        } else if (what == "chain_dims") {
            FrobeniusChain chain = frobenius_chain(C, c.doc.find_subring("A") ? *c.doc.find_subring("A")
                                                                              : prime_subalgebra(C));
            std::vector<int> want;
            std::string cur;
            for (char ch : value + ",")
                if (ch == ',') {
                    want.push_back(std::stoi(cur));
                    cur.clear();
                } else {
                    cur += ch;
                }
            c.expect(chain.dims == want, key + " pin violated");
        } else {
            size_t us = what.find('_');
            if (us == std::string::npos) continue;
            std::string kind = what.substr(0, us);
            auto legs = split_leg(what.substr(us + 1));
            if (!legs) {
                c.expect(false, key + ": unresolvable leg");
                continue;
            }
            bool want = value == "true";
            if (kind == "pi") {
                PIResult r = leg_pi(C, legs->second, legs->first);
                c.expect(r.applicable && r.verdict == want, key + " pin violated");
            } else if (kind == "fext") {
                FExtResult r = leg_fext(C, legs->second, legs->first);
                c.expect(r.applicable && r.verdict == want, key + " pin violated");
            } else if (kind == "galois") {
                GaloisResult r = leg_galois(C, legs->second, legs->first);
                c.expect(r.applicable && r.verdict == want, key + " pin violated");
            } else if (kind == "fiber") {
                FiberResult r = fiber_check(C, legs->first);
                c.expect(r.applicable && r.fiber_dim == std::stoi(value), key + " pin violated");
            }
        }
    }
}

const std::vector<Property>& properties() {
    static std::vector<Property> props = {
        {"algebra.axioms", prop_axioms},
        {"frobenius.additive", prop_frobenius_additive},
        {"frobenius.chain", prop_frobenius_tower},
        {"classify.pi_implies_fext", prop_pi_implies_fext},
        {"classify.galois_battery", prop_galois_battery},
        {"gngs.identities", prop_gngs},
        {"diff.route_equivalence", prop_diff_routes},
        {"diff.brackets", prop_brackets},
        {"jb.roundtrip", prop_jb_roundtrip},
        {"fiber.biconditional", prop_fiber},
        {"classify.pinned_verdicts", prop_pinned_verdicts},
        {"towers.theorem_instances", prop_tower_theorems},
    };
    return props;
}

} // namespace

SelftestResult run_selftest(const std::vector<std::string>& corpus_files, const std::string& filter,
                            std::ostream& out) {
    SelftestResult R;
    for (const std::string& path : corpus_files) {
        InputDocument doc;
        try {
            doc = load_document(path);
        } catch (const Error& e) {
            out << "FAIL " << path << " :: load :: " << e.what() << "\n";
            R.failed++;
            R.failures.push_back(path + " :: load");
            continue;
        }
        for (const auto& [name, fn] : properties()) {
            if (!filter.empty() && std::string(name).find(filter) == std::string::npos) continue;
            Ctx ctx{doc, Rng(std::hash<std::string>{}(doc.digest + name)), ""};
            std::string verdict;
            try {
                fn(ctx);
                verdict = ctx.fail;
            } catch (const Error& e) {
                verdict = std::string("error: ") + e.what();
            }
            if (verdict.empty()) {
                out << "ok   " << name << " @ " << path << "\n";
                R.passed++;
            } else {
                out << "FAIL " << name << " @ " << path << " :: " << verdict << "\n";
                R.failed++;
                R.failures.push_back(std::string(name) + " @ " + path);
            }
        }
    }
    return R;
}

} // namespace pinsep
