#include "pinsep/cmodule.hpp"

namespace pinsep {

Vec CModule::act(const Vec& b_coords, const Vec& m) const {
    Vec out(dim, 0);
    for (int i = 0; i < bdim; ++i) {
        if (!b_coords[i]) continue;
        Vec w = matvec(action[i], m);
        vec_axpy(out, b_coords[i], w, p);
    }
    return out;
}

FpMat CModule::act_matrix(const Vec& b_coords) const {
    FpMat M(dim, dim, p);
    for (int i = 0; i < bdim; ++i) {
        if (!b_coords[i]) continue;
        for (size_t t = 0; t < M.a.size(); ++t) M.a[t] = static_cast<uint8_t>((M.a[t] + b_coords[i] * action[i].a[t]) % p);
    }
    return M;
}

namespace {

void fill_local_ring_data(CModule& M, const FiniteAlgebra& C, const Subalgebra& B) {
    if (!C.is_local()) {
        if (auto e = C.witness_idempotent())
            fail_pre("acting ring is not local: witness idempotent found");
        fail_pre("acting ring is not local: residue ring is a proper field extension of F_p");
    }
    M.b_one = B.span.coordinates(C.one());
    // m_B = kernel of the residue functional restricted to B
    for (const Vec& r : B.span.rows()) {
        uint8_t lam = C.residue(r);
        Vec shifted = lam ? vec_sub(r, vec_scale(C.one(), lam, C.p()), C.p()) : r;
        if (!vec_is_zero(shifted)) M.b_maximal.push_back(B.span.coordinates(shifted));
    }
    // shifted algebra generators of B generate m_B as an ideal
    for (size_t i = 0; i < B.gens.size(); ++i) {
        const Vec& g = B.gens[i];
        uint8_t lam = C.residue(g);
        Vec shifted = lam ? vec_sub(g, vec_scale(C.one(), lam, C.p()), C.p()) : g;
        if (vec_is_zero(shifted)) continue;
        M.b_idealgens.push_back(B.span.coordinates(shifted));
        M.b_gen_names.push_back(i < B.gen_names.size() ? B.gen_names[i] : "g" + std::to_string(i));
    }
    if (M.b_idealgens.empty() && !M.b_maximal.empty()) M.b_idealgens = M.b_maximal;
}

} // namespace

CModule module_over(const FiniteAlgebra& C, const Subalgebra& B) {
    CModule M;
    M.p = C.p();
    M.dim = C.dim();
    M.bdim = B.dim();
    if (static_cast<long long>(M.dim) * M.dim * M.bdim > (1ll << 28))
        fail_resource("module action tables exceed the memory cap");
    for (const Vec& r : B.span.rows()) M.action.push_back(C.mult_matrix(r));
    fill_local_ring_data(M, C, B);
    return M;
}

CModule module_over_self(const FiniteAlgebra& B) { return module_over(B, full_subalgebra(B)); }

CModule hom_module(const FiniteAlgebra& C) {
    const int d = C.dim();
    CModule M;
    M.p = C.p();
    M.dim = d * d;
    M.bdim = d;
    if (static_cast<long long>(M.dim) * M.dim * M.bdim > (1ll << 31))
        fail_resource("hom_module: action tables exceed the memory cap");
    for (int a = 0; a < d; ++a) {
        FpMat La = C.mult_matrix(C.basis_vec(a));
        FpMat blk(d * d, d * d, C.p());
        for (int u = 0; u < d; ++u)
            for (int w = 0; w < d; ++w)
                if (La.at(u, w))
                    for (int v = 0; v < d; ++v) blk.at(u * d + v, w * d + v) = La.at(u, w);
        M.action.push_back(std::move(blk));
    }
    M.b_one = C.one();
    if (C.is_local()) {
        Subalgebra full = full_subalgebra(C);
        auto shift = [&](const Vec& v) {
            uint8_t lam = C.residue(v);
            return lam ? vec_sub(v, vec_scale(C.one(), lam, C.p()), C.p()) : v;
        };
        for (const Vec& r : full.span.rows()) {
            Vec s = shift(r);
            if (!vec_is_zero(s)) M.b_maximal.push_back(s);
        }
        for (const Vec& g : full.gens) {
            Vec s = shift(g);
            if (!vec_is_zero(s)) M.b_idealgens.push_back(s);
        }
        if (M.b_idealgens.empty()) M.b_idealgens = M.b_maximal;
    }
    return M;
}

bool Submodule::action_stable(const CModule& parent) const {
    for (const FpMat& A : parent.action)
        for (const Vec& r : span.rows())
            if (!span.contains(matvec(A, r))) return false;
    return true;
}

Submodule submodule(const CModule& parent, const std::vector<Vec>& rows) {
    Submodule S;
    S.span = span_of(rows, parent.dim, parent.p);
    return S;
}

EchelonSpan radical_span_of(const CModule& M, const std::vector<Vec>& rows) {
    EchelonSpan out(M.dim, M.p);
    for (const Vec& g : M.b_idealgens) {
        FpMat A = M.act_matrix(g);
        for (const Vec& r : rows) out.insert(matvec(A, r));
    }
    return out;
}

EchelonSpan radical_span(const CModule& M) {
    std::vector<Vec> basis;
    for (int i = 0; i < M.dim; ++i) {
        Vec e(M.dim, 0);
        e[i] = 1;
        basis.push_back(std::move(e));
    }
    return radical_span_of(M, basis);
}

std::vector<Vec> minimal_generators(const CModule& M, const std::vector<Vec>* candidates) {
    EchelonSpan mod_out = radical_span(M);
    std::vector<Vec> gens;
    auto try_candidate = [&](const Vec& v) {
        if (mod_out.insert(v)) gens.push_back(v);
    };
    if (candidates) {
        for (const Vec& v : *candidates) try_candidate(v);
        if (mod_out.rank() != M.dim) fail_pre("minimal_generators: candidates do not generate the module");
    } else {
        for (int i = 0; i < M.dim && mod_out.rank() < M.dim; ++i) {
            Vec e(M.dim, 0);
            e[i] = 1;
            try_candidate(e);
        }
    }
    return gens;
}

std::optional<int> is_free(const CModule& M) {
    std::vector<Vec> gens = minimal_generators(M);
    const int r = static_cast<int>(gens.size());
    if (static_cast<long>(r) * M.bdim != M.dim) return std::nullopt;
    // evaluation B^r -> M on the minimal generators must be injective
    EchelonSpan ev(M.dim, M.p);
    for (const Vec& g : gens)
        for (int i = 0; i < M.bdim; ++i)
            if (!ev.insert(matvec(M.action[i], g))) return std::nullopt;
    return r;
}

namespace {

// Retraction via basis completion: minimal generators of S extend to a free
// basis of N; project onto the S-coordinates of that basis.
std::optional<Retraction> summand_free_case(const Submodule& S, const CModule& N) {
    std::vector<Vec> s_rows = S.span.rows();
    EchelonSpan s_rad = radical_span_of(N, s_rows);
    std::vector<Vec> s_gens;
    {
        EchelonSpan acc = s_rad;
        for (const Vec& r : s_rows)
            if (acc.insert(r)) s_gens.push_back(r);
    }
    EchelonSpan probe = radical_span(N);
    for (const Vec& g : s_gens)
        if (!probe.insert(g)) return std::nullopt; // generators collapse in N/mN: not a summand
    // complete with coordinate vectors to a lift of a basis of N/mN
    std::vector<Vec> basis = s_gens;
    for (int i = 0; i < N.dim && probe.rank() < N.dim; ++i) {
        Vec e(N.dim, 0);
        e[i] = 1;
        if (probe.insert(e)) basis.push_back(e);
    }
    const int t = static_cast<int>(basis.size());
    if (t * N.bdim != N.dim) return std::nullopt; // N not free after all
    // coordinate isomorphism B^t -> N over the completed basis
    FpMat Phi(N.dim, t * N.bdim, N.p);
    for (int j = 0; j < t; ++j)
        for (int i = 0; i < N.bdim; ++i) {
            Vec col = matvec(N.action[i], basis[j]);
            for (int r = 0; r < N.dim; ++r) Phi.at(r, j * N.bdim + i) = col[r];
        }
    RrefResult rr = rref(Phi);
    if (rr.rank != N.dim) return std::nullopt;
    // invert Phi: solve Phi * y = e_r for each r
    FpMat aug(N.dim, N.dim + N.dim, N.p);
    for (int i = 0; i < N.dim; ++i) {
        for (int j = 0; j < N.dim; ++j) aug.at(i, j) = Phi.at(i, j);
        aug.at(i, N.dim + i) = 1;
    }
    RrefResult inv = rref(aug);
    FpMat PhiInv(N.dim, N.dim, N.p);
    for (int i = 0; i < N.dim; ++i)
        for (int j = 0; j < N.dim; ++j) PhiInv.at(i, j) = inv.R.at(i, N.dim + j);
    // retraction: keep the B-coordinates of the first |s_gens| basis members
    const int a = static_cast<int>(s_gens.size());
    FpMat R(N.dim, N.dim, N.p);
    for (int c = 0; c < N.dim; ++c) {
        Vec y(N.dim);
        for (int r = 0; r < N.dim; ++r) y[r] = PhiInv.at(r, c);
        Vec img(N.dim, 0);
        for (int j = 0; j < a; ++j) {
            Vec bc(N.bdim);
            for (int i = 0; i < N.bdim; ++i) bc[i] = y[j * N.bdim + i];
            Vec w = N.act(bc, basis[j]);
            for (int r = 0; r < N.dim; ++r) img[r] = static_cast<uint8_t>((img[r] + w[r]) % N.p);
        }
        for (int r = 0; r < N.dim; ++r) R.at(r, c) = img[r];
    }
    return Retraction{std::move(R)};
}

// Generic fallback: solve for the matrix of r directly over F_p.
std::optional<Retraction> summand_linear_system(const Submodule& S, const CModule& N) {
    const int d = N.dim;
    if (static_cast<long>(d) * d > 40000)
        fail_resource("direct-summand linear system too large; ambient module is not free over the local ring");
    const int unknowns = d * d; // entries of r, row-major
    std::vector<Vec> rows;
    Vec rhs_all;
    auto add_row = [&](const Vec& coeff, uint8_t rhs) {
        rows.push_back(coeff);
        rhs_all.push_back(rhs);
    };
    // B-linearity: r * A_i - A_i * r = 0
    for (int i = 0; i < N.bdim; ++i) {
        const FpMat& A = N.action[i];
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                Vec coeff(unknowns, 0);
                for (int k = 0; k < d; ++k) {
                    coeff[a * d + k] = static_cast<uint8_t>((coeff[a * d + k] + A.at(k, b)) % N.p);
                    coeff[k * d + b] = static_cast<uint8_t>((coeff[k * d + b] + N.p - A.at(a, k) % N.p) % N.p);
                }
                add_row(coeff, 0);
            }
    }
    // identity on S
    for (const Vec& s : S.span.rows())
        for (int a = 0; a < d; ++a) {
            Vec coeff(unknowns, 0);
            for (int b = 0; b < d; ++b) coeff[a * d + b] = s[b];
            add_row(coeff, s[a]);
        }
    // image inside S: for every functional vanishing on S, f(r(e_b)) = 0
    std::vector<int> free_cols = S.span.free_columns();
    for (int fc : free_cols) {
        // residual coordinate at free column fc: residual[fc] = v[fc] - sum_i v[pivot_i]*row_i[fc]
        Vec functional(d, 0);
        functional[fc] = 1;
        for (size_t i = 0; i < S.span.rows().size(); ++i) {
            int pc = S.span.pivots()[i];
            functional[pc] = static_cast<uint8_t>((N.p - S.span.rows()[i][fc] % N.p) % N.p);
        }
        for (int b = 0; b < d; ++b) {
            Vec coeff(unknowns, 0);
            for (int a = 0; a < d; ++a) coeff[a * d + b] = functional[a];
            add_row(coeff, 0);
        }
    }
    FpMat A = FpMat::from_rows(rows, unknowns, N.p);
    Vec rhs = rhs_all;
    auto x = solve(A, rhs);
    if (!x) return std::nullopt;
    FpMat R(d, d, N.p);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) R.at(a, b) = (*x)[a * d + b];
    return Retraction{std::move(R)};
}

} // namespace

std::optional<Retraction> summand_via_linear_system(const Submodule& S, const CModule& N) {
    if (!S.action_stable(N)) fail_pre("is_direct_summand: submodule is not stable under the action");
    return summand_linear_system(S, N);
}

std::optional<Retraction> is_direct_summand(const Submodule& S, const CModule& N) {
    if (!S.action_stable(N)) fail_pre("is_direct_summand: submodule is not stable under the action");
    std::optional<Retraction> ret;
    if (is_free(N))
        ret = summand_free_case(S, N);
    else
        ret = summand_linear_system(S, N);
    if (!ret) return std::nullopt;
    // certify: B-linear, identity on S, image inside S
    for (const Vec& s : S.span.rows()) {
        if (matvec(ret->matrix, s) != s) fail_pre("internal: retraction is not the identity on S");
    }
    for (int b = 0; b < N.dim; ++b) {
        Vec e(N.dim, 0);
        e[b] = 1;
        if (!S.span.contains(matvec(ret->matrix, e))) fail_pre("internal: retraction image leaves S");
    }
    return ret;
}

QuotientModule quotient_module(const CModule& N, const Submodule& S) {
    if (!S.action_stable(N)) fail_pre("quotient_module: submodule is not stable under the action");
    QuotientModule Q;
    std::vector<int> comp = S.span.free_columns();
    const int q = static_cast<int>(comp.size());
    Q.proj = FpMat(q, N.dim, N.p);
    Q.lift = FpMat(N.dim, q, N.p);
    // projection of v = complement coordinates of v reduced against S
    for (int b = 0; b < N.dim; ++b) {
        Vec e(N.dim, 0);
        e[b] = 1;
        Vec r = S.span.reduce(e);
        for (int i = 0; i < q; ++i) Q.proj.at(i, b) = r[comp[i]];
    }
    for (int i = 0; i < q; ++i) Q.lift.at(comp[i], i) = 1;
    Q.mod.p = N.p;
    Q.mod.dim = q;
    Q.mod.bdim = N.bdim;
    Q.mod.b_one = N.b_one;
    Q.mod.b_maximal = N.b_maximal;
    Q.mod.b_idealgens = N.b_idealgens;
    Q.mod.b_gen_names = N.b_gen_names;
    for (const FpMat& A : N.action) Q.mod.action.push_back(matmul(Q.proj, matmul(A, Q.lift)));
    return Q;
}

RestrictedModule restrict_module(const CModule& N, const Submodule& S) {
    if (!S.action_stable(N)) fail_pre("restrict_module: submodule is not stable under the action");
    RestrictedModule R;
    R.basis_in_parent = S.span.rows();
    const int s = static_cast<int>(R.basis_in_parent.size());
    R.mod.p = N.p;
    R.mod.dim = s;
    R.mod.bdim = N.bdim;
    R.mod.b_one = N.b_one;
    R.mod.b_maximal = N.b_maximal;
    R.mod.b_idealgens = N.b_idealgens;
    R.mod.b_gen_names = N.b_gen_names;
    for (const FpMat& A : N.action) {
        FpMat M(s, s, N.p);
        for (int j = 0; j < s; ++j) {
            Vec img = matvec(A, R.basis_in_parent[j]);
            Vec coords = S.span.coordinates(img);
            for (int i = 0; i < s; ++i) M.at(i, j) = coords[i];
        }
        R.mod.action.push_back(std::move(M));
    }
    return R;
}

} // namespace pinsep
