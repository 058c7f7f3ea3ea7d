#include "pinsep/endalg.hpp"

#include <deque>

namespace pinsep {

Vec EndAlgebra::compose(const Vec& f, const Vec& g) const {
    FpMat F(d, d, C->p()), G(d, d, C->p());
    F.a = f;
    G.a = g;
    return matmul(F, G).a;
}

Vec EndAlgebra::cact(const Vec& c, const Vec& f) const {
    FpMat F(d, d, C->p());
    F.a = f;
    return matmul(C->mult_matrix(c), F).a;
}

Vec EndAlgebra::identity_op() const { return FpMat::identity(d, C->p()).a; }

Vec EndAlgebra::mult_op(const Vec& c) const { return C->mult_matrix(c).a; }

EndAlgebra end_algebra(const FiniteAlgebra& C, const Subalgebra& A) {
    EndAlgebra E;
    E.C = &C;
    E.baseA = A;
    E.d = C.dim();
    const int d = E.d;
    if (static_cast<long>(d) * d > 10000) fail_resource("end_algebra: dimension exceeds threshold");
    TargetModule M = target_self(C);
    OperatorSpace H = hom_space(C, A, M);
    E.space = H.flat;
    return E;
}

EndSubalgebra make_end_subalgebra(const EndAlgebra& E, const std::vector<Vec>& rows) {
    EndSubalgebra H;
    H.span = span_of(rows, E.d * E.d, E.C->p());
    for (const Vec& r : H.span.rows())
        if (!E.space.contains(r)) fail_pre("end subalgebra: element is not A-linear");
    H.contains_unit = H.span.contains(E.identity_op());
    H.composition_closed = true;
    for (const Vec& f : H.span.rows()) {
        for (const Vec& g : H.span.rows())
            if (!H.span.contains(E.compose(f, g))) {
                H.composition_closed = false;
                break;
            }
        if (!H.composition_closed) break;
    }
    H.c_stable = true;
    for (int a = 0; a < E.d && H.c_stable; ++a)
        for (const Vec& f : H.span.rows())
            if (!H.span.contains(E.cact(E.C->basis_vec(a), f))) {
                H.c_stable = false;
                break;
            }
    if (H.c_stable) {
        CModule hom = hom_module(*E.C);
        Submodule S = submodule(hom, H.span.rows());
        auto r = E.C->is_local() ? is_direct_summand(S, hom) : summand_via_linear_system(S, hom);
        if (r) {
            H.summand = true;
            H.retraction = std::move(r->matrix);
        }
    }
    return H;
}

EndSubalgebra end_over(const EndAlgebra& E, const Subalgebra& B) {
    const int d = E.d;
    const uint16_t p = E.C->p();
    // commute with multiplication by every generator of B (and of A, already in E.space)
    std::vector<Vec> rows;
    std::vector<Vec> constraints = B.gens;
    for (const Vec& g : constraints) {
        FpMat Lg = E.C->mult_matrix(g);
        for (int u = 0; u < d; ++u)
            for (int b = 0; b < d; ++b) {
                Vec row(static_cast<size_t>(d) * d, 0);
                for (int k = 0; k < d; ++k) {
                    if (Lg.at(k, b)) row[u * d + k] = static_cast<uint8_t>((row[u * d + k] + Lg.at(k, b)) % p);
                    if (Lg.at(u, k)) row[k * d + b] = static_cast<uint8_t>((row[k * d + b] + p - Lg.at(u, k)) % p);
                }
                rows.push_back(std::move(row));
            }
    }
    std::vector<Vec> basis;
    if (rows.empty()) {
        basis = E.space.rows();
    } else {
        FpMat A = FpMat::from_rows(rows, d * d, p);
        std::vector<Vec> img;
        for (const Vec& f : E.space.rows()) img.push_back(matvec(A, f));
        for (const Vec& c : combination_kernel(img, p)) {
            Vec f(static_cast<size_t>(d) * d, 0);
            for (size_t t = 0; t < E.space.rows().size(); ++t)
                if (c[t]) vec_axpy(f, c[t], E.space.rows()[t], p);
            basis.push_back(std::move(f));
        }
    }
    return make_end_subalgebra(E, basis);
}

Subalgebra constants_of(const EndAlgebra& E, const EndSubalgebra& H) {
    const int d = E.d;
    const uint16_t p = E.C->p();
    std::vector<FpMat> L(d, FpMat(0, 0, p));
    for (int a = 0; a < d; ++a) L[a] = E.C->mult_matrix(E.C->basis_vec(a));
    // unknown x in C: for each phi in H-basis, phi . L_x - L_x . phi = 0
    std::vector<Vec> rows;
    for (const Vec& f : H.span.rows()) {
        FpMat F(d, d, p);
        F.a = f;
        std::vector<FpMat> G;
        for (int a = 0; a < d; ++a) {
            FpMat fa = matmul(F, L[a]), af = matmul(L[a], F);
            FpMat g(d, d, p);
            for (size_t t = 0; t < g.a.size(); ++t) g.a[t] = static_cast<uint8_t>((fa.a[t] + p - af.a[t]) % p);
            G.push_back(std::move(g));
        }
        for (int u = 0; u < d; ++u)
            for (int b = 0; b < d; ++b) {
                Vec row(d, 0);
                bool nz = false;
                for (int a = 0; a < d; ++a) {
                    row[a] = G[a].at(u, b);
                    nz = nz || row[a];
                }
                if (nz) rows.push_back(std::move(row));
            }
    }
    std::vector<Vec> xs = rows.empty() ? std::vector<Vec>{} : kernel_basis(FpMat::from_rows(rows, d, p));
    if (rows.empty()) {
        xs.clear();
        for (int a = 0; a < d; ++a) xs.push_back(E.C->basis_vec(a));
    }
    Subalgebra B;
    B.owner = E.C;
    B.span = EchelonSpan(d, p);
    B.span.insert(E.C->one());
    std::vector<Vec> gens;
    for (const Vec& x : xs)
        if (B.span.insert(x)) gens.push_back(x);
    // verify closure under multiplication (constants form a ring)
    Subalgebra closed = subalgebra_generated(*E.C, gens);
    if (!closed.span.same_span(B.span)) fail_pre("internal: constants set is not multiplicatively closed");
    return closed;
}

EndSubalgebra close_subalgebra(const EndAlgebra& E, const std::vector<Vec>& seeds) {
    EchelonSpan sp(E.d * E.d, E.C->p());
    std::deque<Vec> work;
    auto push = [&](const Vec& f) {
        if (auto row = sp.insert(f)) work.push_back(*row);
    };
    push(E.identity_op());
    for (const Vec& s : seeds) push(s);
    while (!work.empty()) {
        Vec f = std::move(work.front());
        work.pop_front();
        for (int a = 0; a < E.d; ++a) push(E.cact(E.C->basis_vec(a), f));
        std::vector<Vec> snapshot = sp.rows();
        for (const Vec& g : snapshot) {
            push(E.compose(f, g));
            push(E.compose(g, f));
        }
    }
    return make_end_subalgebra(E, sp.rows());
}

SpecialBasis special_basis(const EndAlgebra& E, const EndSubalgebra& H) {
    const FiniteAlgebra& C = *E.C;
    const int d = E.d;
    const uint16_t p = C.p();
    if (!H.summand) fail_pre("special_basis: H is not a C-module direct summand");
    if (!H.contains_unit || !H.composition_closed) fail_pre("special_basis: H is not a unital subalgebra");
    if (!C.is_local()) fail_pre("special_basis: C is not local");
    CModule CA = module_over(C, E.baseA);
    auto afree = is_free(CA);
    if (!afree) fail_pre("special_basis: C is not free over A");
    std::vector<Vec> tbasis = minimal_generators(CA);

    // K = common kernel of phi_D for D in H; P = (C (x)_A C)/K, free over local C
    TensorSquare T = tensor_square(C, E.baseA);
    std::vector<Vec> rows;
    for (const Vec& f : H.span.rows()) {
        FpMat D(d, d, p);
        D.a = f;
        // phi_D on T: free route basis (i,j) -> c_i D(t_j)
        if (!T.free_route) fail_pre("special_basis: C is not free over A");
        FpMat phi(d, T.dim, p);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < T.rank; ++j) {
                Vec val = C.mul(C.basis_vec(i), matvec(D, T.tbasis[j]));
                for (int u = 0; u < d; ++u) phi.at(u, i * T.rank + j) = val[u];
            }
        for (int u = 0; u < d; ++u) rows.push_back(Vec(phi.row(u), phi.row(u) + T.dim));
    }
    FpMat constraint = FpMat::from_rows(rows, T.dim, p);
    std::vector<Vec> K = kernel_basis(constraint);
    CModule tmod;
    {
        // T as module over C with the left action
        tmod.p = p;
        tmod.dim = T.dim;
        tmod.bdim = d;
        tmod.action = T.lact;
        tmod.b_one = C.one();
        Subalgebra full = full_subalgebra(C);
        auto shift = [&](const Vec& v) {
            uint8_t lam = C.residue(v);
            return lam ? vec_sub(v, vec_scale(C.one(), lam, p), p) : v;
        };
        for (const Vec& r : full.span.rows()) {
            Vec s = shift(r);
            if (!vec_is_zero(s)) tmod.b_maximal.push_back(s);
        }
        for (const Vec& g : full.gens) {
            Vec s = shift(g);
            if (!vec_is_zero(s)) tmod.b_idealgens.push_back(s);
        }
        if (tmod.b_idealgens.empty()) tmod.b_idealgens = tmod.b_maximal;
    }
    Submodule Ksub = submodule(tmod, K);
    QuotientModule P = quotient_module(tmod, Ksub);
    auto prank = is_free(P.mod);
    if (!prank) fail_pre("special_basis: the dual quotient P is not free over C");
    const int l = *prank;

    // choose l of the delta(t_j) classes that minimally generate P
    std::vector<Vec> cand;
    for (const Vec& t : tbasis) cand.push_back(matvec(P.proj, matvec(T.delta, t)));
    EchelonSpan probe = radical_span(P.mod);
    std::vector<int> chosen;
    for (size_t j = 0; j < cand.size(); ++j)
        if (probe.insert(cand[j])) chosen.push_back(static_cast<int>(j));
    if (static_cast<int>(chosen.size()) != l) fail_pre("special_basis: delta(t) classes do not generate P");

    // dual basis of the free C-basis {cand[chosen]}: invert B^l -> P
    FpMat Psi(P.mod.dim, l * d, p);
    for (int jj = 0; jj < l; ++jj)
        for (int a = 0; a < d; ++a) {
            Vec col = matvec(P.mod.action[a], cand[chosen[jj]]);
            for (int u = 0; u < P.mod.dim; ++u) Psi.at(u, jj * d + a) = col[u];
        }
    if (l * d != P.mod.dim) fail_pre("special_basis: P rank mismatch");
    FpMat aug(P.mod.dim, 2 * P.mod.dim, p);
    for (int i = 0; i < P.mod.dim; ++i) {
        for (int j = 0; j < P.mod.dim; ++j) aug.at(i, j) = Psi.at(i, j);
        aug.at(i, P.mod.dim + i) = 1;
    }
    RrefResult inv = rref(aug);
    if (inv.rank != P.mod.dim) fail_pre("special_basis: coordinate map singular");

    SpecialBasis S;
    S.l = l;
    // t-list: chosen ones first, then the rest (an A-basis of C)
    for (int j : chosen) S.t.push_back(tbasis[j]);
    for (size_t j = 0; j < tbasis.size(); ++j)
        if (std::find(chosen.begin(), chosen.end(), static_cast<int>(j)) == chosen.end()) S.t.push_back(tbasis[j]);
    // phi_i(x) = C-coordinate i of class(delta(x)) in the chosen basis, i.e. the
    // c-component: extract block i of Psi^{-1} applied to proj(delta(x))
    for (int i = 0; i < l; ++i) {
        FpMat D(d, d, p);
        for (int b = 0; b < d; ++b) {
            Vec px = matvec(P.proj, matvec(T.delta, C.basis_vec(b)));
            // y = Psi^{-1} px, block i gives the C-coordinate of phi over cand[i]
            Vec y(P.mod.dim, 0);
            for (int row = 0; row < P.mod.dim; ++row) {
                uint32_t s = 0;
                for (int t2 = 0; t2 < P.mod.dim; ++t2) s += inv.R.at(row, P.mod.dim + t2) * px[t2];
                y[row] = static_cast<uint8_t>(s % p);
            }
            for (int u = 0; u < d; ++u) D.at(u, b) = y[i * d + u];
        }
        // verify phi_i lies in H
        if (!H.span.contains(D.a)) fail_pre("special_basis: dual operator escapes H");
        S.phi.push_back(D.a);
    }
    // checks: phi_i(t_j) = delta_ij and the phi form a C-basis of H
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) {
            FpMat D(d, d, p);
            D.a = S.phi[i];
            Vec v = matvec(D, S.t[j]);
            Vec expect = i == j ? C.one() : C.zero();
            if (v != expect) fail_pre("special_basis: phi_i(t_j) != delta_ij");
        }
    CModule hom = hom_module(C);
    EchelonSpan hspan(d * d, p);
    for (const Vec& f : S.phi)
        for (int a = 0; a < d; ++a) hspan.insert(matvec(hom.action[a], f));
    if (hspan.rank() != static_cast<int>(H.span.rows().size()))
        fail_pre("special_basis: phi do not form a C-basis of H");
    return S;
}

RoundtripReport verify_correspondence(const FiniteAlgebra& C, const Subalgebra& A,
                                      const std::vector<std::pair<std::string, Subalgebra>>& candidates_B,
                                      const std::vector<std::pair<std::string, std::vector<Vec>>>& candidates_H) {
    RoundtripReport R;
    FrobeniusChain chain = frobenius_chain(C, A);
    R.hypothesis = chain.finite ? "finite_exponent" : "demonstration_mode";
    EndAlgebra E = end_algebra(C, A);
    for (const auto& [name, B] : candidates_B) {
        RoundtripReport::LeftEntry entry;
        entry.name = name;
        bool free_over = false;
        if (C.is_local()) {
            CModule m = module_over(C, B);
            free_over = is_free(m).has_value();
        } else {
            // non-local demonstration inputs: accept, the report is raw
            free_over = true;
        }
        if (!free_over) {
            entry.eligible = false;
            entry.note = "C not projective over B";
        } else {
            entry.eligible = true;
            EndSubalgebra H = end_over(E, B);
            Subalgebra back = constants_of(E, H);
            entry.roundtrip = back.span.same_span(B.span);
            if (!entry.roundtrip) {
                entry.note = "constants_of(end_over(B)) has dim " + std::to_string(back.dim());
                R.all_hold = false;
            }
        }
        R.left.push_back(std::move(entry));
    }
    for (const auto& [name, rows] : candidates_H) {
        RoundtripReport::RightEntry entry;
        entry.name = name;
        EndSubalgebra H = make_end_subalgebra(E, rows);
        entry.summand = H.summand;
        if (!H.contains_unit || !H.composition_closed) {
            entry.note = "not a unital composition-closed subalgebra";
            R.right.push_back(std::move(entry));
            continue;
        }
        Subalgebra B = constants_of(E, H);
        EndSubalgebra back = end_over(E, B);
        entry.roundtrip = back.span.same_span(H.span);
        if (!entry.roundtrip) {
            entry.note = "end_over(constants_of(H)) has dim " + std::to_string(back.span.rank());
            if (R.hypothesis == "finite_exponent" && H.summand) R.all_hold = false;
        }
        R.right.push_back(std::move(entry));
    }
    return R;
}

long subspace_lattice_size(int d, uint16_t p, long cap) {
    long total = 0;
    for (long mask = 0; mask < (1l << d); ++mask) {
        std::vector<int> piv;
        for (int i = 0; i < d; ++i)
            if (mask & (1l << i)) piv.push_back(i);
        long combos = 1;
        const int k = static_cast<int>(piv.size());
        for (int r = 0; r < k; ++r)
            for (int c = piv[r] + 1; c < d; ++c)
                if (!std::count(piv.begin(), piv.end(), c)) {
                    combos *= p;
                    if (combos > cap) return cap + 1;
                }
        total += combos;
        if (total > cap) return cap + 1;
    }
    return total;
}

std::vector<Subalgebra> enumerate_subalgebras(const FiniteAlgebra& C, long max_subspaces) {
    const int d = C.dim();
    const uint16_t p = C.p();
    // iterate over rref shapes: pivot column subsets and free entries
    std::vector<Subalgebra> out;
    long visited = 0;
    std::vector<int> cols(d);
    for (int i = 0; i < d; ++i) cols[i] = i;
    for (long mask = 1; mask < (1l << d); ++mask) {
        std::vector<int> piv;
        for (int i = 0; i < d; ++i)
            if (mask & (1l << i)) piv.push_back(i);
        const int k = static_cast<int>(piv.size());
        // free positions: entries (row r, col c) with c not a pivot, c > piv[r]
        std::vector<std::pair<int, int>> freepos;
        for (int r = 0; r < k; ++r)
            for (int c = piv[r] + 1; c < d; ++c)
                if (!std::count(piv.begin(), piv.end(), c)) freepos.push_back({r, c});
        long combos = 1;
        bool overflow = false;
        for (size_t t = 0; t < freepos.size(); ++t) {
            combos *= p;
            if (combos > max_subspaces) { overflow = true; break; }
        }
        if (overflow || (visited += combos) > max_subspaces)
            fail_resource("enumerate_subalgebras: subspace lattice too large");
        for (long code = 0; code < combos; ++code) {
            std::vector<Vec> rows(k, Vec(d, 0));
            for (int r = 0; r < k; ++r) rows[r][piv[r]] = 1;
            long rest = code;
            for (const auto& [r, c] : freepos) {
                rows[r][c] = static_cast<uint8_t>(rest % p);
                rest /= p;
            }
            EchelonSpan sp(d, p);
            bool canonical = true;
            for (const Vec& row : rows) sp.insert(row);
            if (sp.rows() != rows) canonical = false; // skip non-canonical duplicates
            if (!canonical) continue;
            if (!sp.contains(C.one())) continue;
            bool closed = true;
            for (int i = 0; i < k && closed; ++i)
                for (int j = i; j < k && closed; ++j)
                    if (!sp.contains(C.mul(rows[i], rows[j]))) closed = false;
            if (!closed) continue;
            Subalgebra B;
            B.owner = &C;
            B.span = sp;
            for (const Vec& row : rows)
                if (row != C.one()) {
                    B.gens.push_back(row);
                    B.gen_names.push_back("b");
                }
            out.push_back(std::move(B));
        }
    }
    return out;
}

} // namespace pinsep
