#include "pinsep/diffcalc.hpp"

#include <algorithm>
#include <map>

namespace pinsep {

uint8_t binom_mod(uint32_t n, uint32_t k, uint16_t p) {
    static std::map<uint16_t, std::vector<std::vector<uint8_t>>> cache;
    if (k > n) return 0;
    auto& tri = cache[p];
    while (tri.size() <= n) {
        size_t r = tri.size();
        std::vector<uint8_t> row(r + 1, 1);
        for (size_t j = 1; j < r; ++j) row[j] = static_cast<uint8_t>((tri[r - 1][j - 1] + tri[r - 1][j]) % p);
        tri.push_back(std::move(row));
    }
    return tri[n][k];
}

FpMat TargetModule::act_of(const Vec& c, uint16_t p) const {
    FpMat M(dim, dim, p);
    for (size_t i = 0; i < cact.size(); ++i) {
        if (!c[i]) continue;
        for (size_t t = 0; t < M.a.size(); ++t) M.a[t] = static_cast<uint8_t>((M.a[t] + c[i] * cact[i].a[t]) % p);
    }
    return M;
}

TargetModule target_self(const FiniteAlgebra& C) {
    TargetModule M;
    M.dim = C.dim();
    for (int i = 0; i < C.dim(); ++i) M.cact.push_back(C.mult_matrix(C.basis_vec(i)));
    return M;
}

namespace {

// free model: basis index (i, j) -> i*rank + j for c_i (x) t_j
TensorSquare tensor_square_free(const FiniteAlgebra& C, const Subalgebra& B, const std::vector<Vec>& tbasis) {
    TensorSquare T;
    T.C = &C;
    T.p = C.p();
    T.dC = C.dim();
    T.rank = static_cast<int>(tbasis.size());
    T.dim = T.dC * T.rank;
    T.free_route = true;
    const int r = T.rank, d = T.dC;

    // B-coordinate iso: columns (j, m) = b_m * t_j; inverting gives the unique
    // B-coordinates of any element of C over the t-basis.
    const auto& brows = B.span.rows();
    const int bd = static_cast<int>(brows.size());
    if (r * bd != d) fail_pre("tensor_square: basis size mismatch (C not free over B?)");
    FpMat Phi(d, d, T.p);
    for (int j = 0; j < r; ++j)
        for (int m = 0; m < bd; ++m) {
            Vec col = C.mul(brows[m], tbasis[j]);
            for (int i = 0; i < d; ++i) Phi.at(i, j * bd + m) = col[i];
        }
    FpMat aug(d, 2 * d, T.p);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) aug.at(i, j) = Phi.at(i, j);
        aug.at(i, d + i) = 1;
    }
    RrefResult inv = rref(aug);
    if (inv.rank != d) fail_pre("tensor_square: coordinate map is singular (C not free over B)");
    auto bcoords = [&](const Vec& c) {
        // returns r vectors in C-coordinates: the B-coefficients of c over t
        std::vector<Vec> beta(r, Vec(d, 0));
        for (int row = 0; row < d; ++row) {
            uint8_t y = 0;
            for (int i = 0; i < d; ++i) y = static_cast<uint8_t>((y + inv.R.at(row, d + i) * c[i]) % T.p);
            if (!y) continue;
            int j = row / bd, m = row % bd;
            vec_axpy(beta[j], y, brows[m], T.p);
        }
        return beta;
    };

    // mu, unit, delta, iota, lact
    T.mu = FpMat(d, T.dim, T.p);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < r; ++j) {
            Vec prod = C.mul(C.basis_vec(i), tbasis[j]);
            for (int u = 0; u < d; ++u) T.mu.at(u, i * r + j) = prod[u];
        }
    std::vector<Vec> one_b = bcoords(C.one());
    T.unit = Vec(T.dim, 0);
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < d; ++i)
            if (one_b[j][i]) T.unit[i * r + j] = one_b[j][i];
    T.delta = FpMat(T.dim, d, T.p);
    for (int a = 0; a < d; ++a) {
        std::vector<Vec> beta = bcoords(C.basis_vec(a));
        for (int j = 0; j < r; ++j)
            for (int i = 0; i < d; ++i)
                if (beta[j][i]) T.delta.at(i * r + j, a) = beta[j][i];
    }
    std::vector<std::vector<Vec>> prod_table(d, std::vector<Vec>(d)); // c_a * c_i
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i) prod_table[a][i] = C.mul(C.basis_vec(a), C.basis_vec(i));
    T.lact.reserve(d);
    for (int a = 0; a < d; ++a) {
        FpMat L(T.dim, T.dim, T.p);
        for (int i = 0; i < d; ++i) {
            const Vec& q = prod_table[a][i];
            for (int j = 0; j < r; ++j)
                for (int u = 0; u < d; ++u)
                    if (q[u]) L.at(u * r + j, i * r + j) = q[u];
        }
        T.lact.push_back(std::move(L));
    }
    T.iota = FpMat(T.dim, d, T.p);
    for (int a = 0; a < d; ++a) {
        Vec col = matvec(T.lact[a], T.unit);
        for (int u = 0; u < T.dim; ++u) T.iota.at(u, a) = col[u];
    }
    // right multiplication by 1 (x) x_k, then z_k = that minus left mult by x_k
    for (const Vec& g : C.generators()) {
        // B-coordinates of t_j * g for all j
        FpMat R(T.dim, T.dim, T.p);
        for (int j = 0; j < r; ++j) {
            std::vector<Vec> beta = bcoords(C.mul(tbasis[j], g));
            for (int m = 0; m < r; ++m) {
                if (vec_is_zero(beta[m])) continue;
                // (c_i (x) t_j) * (1 (x) g) = sum_m (c_i * beta_m) (x) t_m
                for (int i = 0; i < d; ++i) {
                    Vec q = C.mul(C.basis_vec(i), beta[m]);
                    for (int u = 0; u < d; ++u)
                        if (q[u]) R.at(u * r + m, i * r + j) = static_cast<uint8_t>((R.at(u * r + m, i * r + j) + q[u]) % T.p);
                }
            }
        }
        FpMat Lg(T.dim, T.dim, T.p);
        for (int a = 0; a < d; ++a)
            if (g[a])
                for (size_t t = 0; t < Lg.a.size(); ++t)
                    Lg.a[t] = static_cast<uint8_t>((Lg.a[t] + g[a] * T.lact[a].a[t]) % T.p);
        FpMat Z(T.dim, T.dim, T.p);
        for (size_t t = 0; t < Z.a.size(); ++t) Z.a[t] = static_cast<uint8_t>((R.a[t] + T.p - Lg.a[t]) % T.p);
        T.zmul.push_back(std::move(Z));
    }
    T.tbasis = tbasis;
    T.jbasis = kernel_basis(T.mu);
    return T;
}

// general model: quotient of C (x)_k C by span{(c_i b)(x)c_j - c_i(x)(b c_j)}
TensorSquare tensor_square_quotient(const FiniteAlgebra& C, const Subalgebra& B, long dim_cap) {
    const int d = C.dim();
    if (static_cast<long>(d) * d > dim_cap)
        fail_resource("tensor square over k exceeds the dimension cap");
    TensorSquare T;
    T.C = &C;
    T.p = C.p();
    T.dC = d;
    T.free_route = false;
    const int d2 = d * d;
    auto idx = [d](int i, int j) { return i * d + j; };

    EchelonSpan L(d2, T.p);
    std::vector<std::vector<Vec>> prod(d, std::vector<Vec>(d));
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i) prod[a][i] = C.mul(C.basis_vec(a), C.basis_vec(i));
    for (const Vec& b : B.span.rows()) {
        for (int i = 0; i < d; ++i) {
            Vec bi = C.mul(b, C.basis_vec(i));
            for (int j = 0; j < d; ++j) {
                Vec bj = C.mul(b, C.basis_vec(j));
                Vec row(d2, 0);
                for (int u = 0; u < d; ++u) {
                    if (bi[u]) row[idx(u, j)] = static_cast<uint8_t>((row[idx(u, j)] + bi[u]) % T.p);
                    if (bj[u]) row[idx(i, u)] = static_cast<uint8_t>((row[idx(i, u)] + T.p - bj[u]) % T.p);
                }
                L.insert(row);
            }
        }
    }
    std::vector<int> comp = L.free_columns();
    T.dim = static_cast<int>(comp.size());
    FpMat proj(T.dim, d2, T.p), lift(d2, T.dim, T.p);
    for (int b = 0; b < d2; ++b) {
        Vec e(d2, 0);
        e[b] = 1;
        Vec r = L.reduce(e);
        for (int q = 0; q < T.dim; ++q) proj.at(q, b) = r[comp[q]];
    }
    for (int q = 0; q < T.dim; ++q) lift.at(comp[q], q) = 1;

    FpMat mu0(d, d2, T.p);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const Vec& q = prod[i][j];
            for (int u = 0; u < d; ++u) mu0.at(u, idx(i, j)) = q[u];
        }
    T.mu = matmul(mu0, lift);
    T.delta = FpMat(T.dim, d, T.p);
    T.iota = FpMat(T.dim, d, T.p);
    const Vec& one = C.one();
    for (int a = 0; a < d; ++a) {
        Vec da(d2, 0), ia(d2, 0);
        for (int i = 0; i < d; ++i) {
            if (one[i]) da[idx(i, a)] = one[i];
            if (one[i]) ia[idx(a, i)] = one[i];
        }
        Vec dq = matvec(proj, da), iq = matvec(proj, ia);
        for (int u = 0; u < T.dim; ++u) {
            T.delta.at(u, a) = dq[u];
            T.iota.at(u, a) = iq[u];
        }
    }
    Vec unit0(d2, 0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            int v = one[i] * one[j] % T.p;
            if (v) unit0[idx(i, j)] = static_cast<uint8_t>(v);
        }
    T.unit = matvec(proj, unit0);
    for (int a = 0; a < d; ++a) {
        FpMat L0(d2, d2, T.p);
        for (int i = 0; i < d; ++i) {
            const Vec& q = prod[a][i];
            for (int j = 0; j < d; ++j)
                for (int u = 0; u < d; ++u)
                    if (q[u]) L0.at(idx(u, j), idx(i, j)) = q[u];
        }
        T.lact.push_back(matmul(proj, matmul(L0, lift)));
    }
    for (const Vec& g : C.generators()) {
        FpMat R0(d2, d2, T.p);
        for (int j = 0; j < d; ++j) {
            Vec gj = C.mul(C.basis_vec(j), g);
            for (int i = 0; i < d; ++i)
                for (int u = 0; u < d; ++u)
                    if (gj[u]) R0.at(idx(i, u), idx(i, j)) = gj[u];
        }
        FpMat R = matmul(proj, matmul(R0, lift));
        FpMat Lg(T.dim, T.dim, T.p);
        for (int a = 0; a < d; ++a)
            if (g[a])
                for (size_t t = 0; t < Lg.a.size(); ++t)
                    Lg.a[t] = static_cast<uint8_t>((Lg.a[t] + g[a] * T.lact[a].a[t]) % T.p);
        FpMat Z(T.dim, T.dim, T.p);
        for (size_t t = 0; t < Z.a.size(); ++t) Z.a[t] = static_cast<uint8_t>((R.a[t] + T.p - Lg.a[t]) % T.p);
        T.zmul.push_back(std::move(Z));
    }
    T.pair_lift = lift;
    T.jbasis = kernel_basis(T.mu);
    return T;
}

CModule tensor_as_module(const TensorSquare& T) {
    const FiniteAlgebra& C = *T.C;
    CModule M;
    M.p = T.p;
    M.dim = T.dim;
    M.bdim = T.dC;
    M.action = T.lact;
    M.b_one = C.one();
    // maximal ideal / ideal generators of C in its own coordinates
    Subalgebra full = full_subalgebra(C);
    for (const Vec& r : full.span.rows()) {
        uint8_t lam = C.residue(r);
        Vec shifted = lam ? vec_sub(r, vec_scale(C.one(), lam, C.p()), C.p()) : r;
        if (!vec_is_zero(shifted)) M.b_maximal.push_back(shifted);
    }
    for (size_t i = 0; i < full.gens.size(); ++i) {
        uint8_t lam = C.residue(full.gens[i]);
        Vec shifted = lam ? vec_sub(full.gens[i], vec_scale(C.one(), lam, C.p()), C.p()) : full.gens[i];
        if (!vec_is_zero(shifted)) {
            M.b_idealgens.push_back(shifted);
            M.b_gen_names.push_back(i < full.gen_names.size() ? full.gen_names[i] : "g");
        }
    }
    if (M.b_idealgens.empty()) M.b_idealgens = M.b_maximal;
    return M;
}

} // namespace

TensorSquare tensor_square(const FiniteAlgebra& C, const Subalgebra& B, long dim_cap) {
    CModule m = module_over(C, B);
    if (auto r = is_free(m)) {
        std::vector<Vec> tbasis = minimal_generators(m);
        if (static_cast<long>(C.dim()) * *r > dim_cap) fail_resource("tensor square exceeds the dimension cap");
        return tensor_square_free(C, B, tbasis);
    }
    return tensor_square_quotient(C, B, dim_cap);
}

std::vector<Vec> jpower_generators(const TensorSquare& T, int m) {
    // J^m is spanned as a C-module by the z-monomials of every degree >= m
    // (T-multiples of degree-m monomials re-expand into higher z-monomials
    // with C-coefficients). The z_i are nilpotent, so the enumeration stops
    // at the first degree whose monomials all vanish.
    if (m == 0) return {T.unit};
    const int n = static_cast<int>(T.zmul.size());
    std::vector<Vec> out;
    std::vector<Vec> cur;
    std::vector<int> lo; // smallest generator index used, for multiset order
    cur.push_back(T.unit);
    lo.push_back(n - 1);
    for (int deg = 1; !cur.empty(); ++deg) {
        std::vector<Vec> next;
        std::vector<int> nlo;
        for (size_t t = 0; t < cur.size(); ++t)
            for (int k = 0; k <= lo[t]; ++k) {
                Vec w = matvec(T.zmul[k], cur[t]);
                if (vec_is_zero(w)) continue;
                next.push_back(std::move(w));
                nlo.push_back(k);
            }
        cur = std::move(next);
        lo = std::move(nlo);
        if (deg >= m)
            for (const Vec& w : cur) out.push_back(w);
    }
    return out;
}

EchelonSpan jpower_span(const TensorSquare& T, int m) {
    EchelonSpan sp(T.dim, T.p);
    if (m == 0) {
        for (int i = 0; i < T.dim; ++i) {
            Vec e(T.dim, 0);
            e[i] = 1;
            sp.insert(e);
        }
        return sp;
    }
    for (const Vec& g : jpower_generators(T, m))
        for (int a = 0; a < T.dC; ++a) sp.insert(matvec(T.lact[a], g));
    return sp;
}

PrincipalParts principal_parts(const TensorSquare& T, int k) {
    if (k < 0) fail_pre("principal_parts: order must be >= 0");
    PrincipalParts P;
    P.order = k;
    CModule tmod = tensor_as_module(T);
    EchelonSpan jk = jpower_span(T, k + 1);
    Submodule S;
    S.span = std::move(jk);
    QuotientModule Q = quotient_module(tmod, S);
    P.dim = Q.mod.dim;
    P.mod = std::move(Q.mod);
    P.proj = std::move(Q.proj);
    P.lift = std::move(Q.lift);
    P.delta_k = matmul(P.proj, T.delta);
    P.free_rank = is_free(P.mod);
    return P;
}

KaehlerModule kaehler(const FiniteAlgebra& C, const Subalgebra& B, KaehlerRoute route, long dim_cap) {
    KaehlerModule K;
    K.route = route;
    if (route == KaehlerRoute::Quotient) {
        TensorSquare T = tensor_square(C, B, dim_cap);
        CModule tmod = tensor_as_module(T);
        Submodule J;
        J.span = span_of(T.jbasis, T.dim, T.p);
        RestrictedModule Jmod = restrict_module(tmod, J);
        // J^2 inside J-coordinates
        std::vector<Vec> j2;
        for (const Vec& g : jpower_generators(T, 2))
            for (int a = 0; a < T.dC; ++a) j2.push_back(J.span.coordinates(matvec(T.lact[a], g)));
        Submodule J2 = submodule(Jmod.mod, j2);
        QuotientModule Q = quotient_module(Jmod.mod, J2);
        K.dim = Q.mod.dim;
        K.mod = std::move(Q.mod);
        // d(c) = class of delta(c) - iota(c)
        K.d = FpMat(K.dim, C.dim(), C.p());
        for (int a = 0; a < C.dim(); ++a) {
            Vec t(T.dim);
            for (int u = 0; u < T.dim; ++u) t[u] = static_cast<uint8_t>((T.delta.at(u, a) + T.p - T.iota.at(u, a)) % T.p);
            Vec jq = J.span.coordinates(t); // delta - iota lands in J
            Vec q = matvec(Q.proj, jq);
            for (int u = 0; u < K.dim; ++u) K.d.at(u, a) = q[u];
        }
    } else {
        if (!C.from_presentation_input()) fail_pre("presentation route requires a presentation-built algebra");
        if (B.dim() != 1) fail_pre("presentation route computes Omega over the prime field");
        const Presentation& pr = C.presentation();
        const int n = static_cast<int>(pr.gen_names.size());
        const int d = C.dim();
        // relation differentials: -dP_i in the free module C^n
        std::vector<Vec> rel_rows;
        for (int i = 0; i < n; ++i) {
            Vec row(static_cast<size_t>(n) * d, 0);
            bool nonzero = false;
            for (const Monomial& mo : pr.relations[i]) {
                for (int j = 0; j < n; ++j) {
                    if (!mo.exps[j]) continue;
                    uint8_t coef = static_cast<uint8_t>(mo.coeff * (mo.exps[j] % C.p()) % C.p());
                    if (!coef) continue;
                    auto e = mo.exps;
                    e[j] -= 1;
                    size_t idx = 0; // exponents are reduced, so this is a basis index
                    {
                        size_t stride = 1;
                        for (int t = 0; t < n; ++t) {
                            uint64_t bound = 1;
                            for (uint32_t q = 0; q < pr.exponents[t]; ++q) bound *= C.p();
                            idx += e[t] * stride;
                            stride *= bound;
                        }
                    }
                    row[static_cast<size_t>(j) * d + idx] =
                        static_cast<uint8_t>((row[static_cast<size_t>(j) * d + idx] + C.p() - coef) % C.p());
                    nonzero = true;
                }
            }
            if (nonzero) rel_rows.push_back(std::move(row));
        }
        // C-module generated by the relation rows
        CModule freemod;
        freemod.p = C.p();
        freemod.dim = n * d;
        freemod.bdim = d;
        for (int a = 0; a < d; ++a) {
            FpMat La = C.mult_matrix(C.basis_vec(a));
            FpMat blk(n * d, n * d, C.p());
            for (int s = 0; s < n; ++s)
                for (int u = 0; u < d; ++u)
                    for (int v = 0; v < d; ++v)
                        if (La.at(u, v)) blk.at(s * d + u, s * d + v) = La.at(u, v);
            freemod.action.push_back(std::move(blk));
        }
        freemod.b_one = C.one();
        Subalgebra full = full_subalgebra(C);
        for (const Vec& r : full.span.rows()) {
            uint8_t lam = C.residue(r);
            Vec shifted = lam ? vec_sub(r, vec_scale(C.one(), lam, C.p()), C.p()) : r;
            if (!vec_is_zero(shifted)) freemod.b_maximal.push_back(shifted);
        }
        for (const Vec& g : full.gens) {
            if (!vec_is_zero(g)) freemod.b_idealgens.push_back(g);
            freemod.b_gen_names.push_back("g");
        }
        std::vector<Vec> span_rows;
        for (const Vec& row : rel_rows)
            for (int a = 0; a < d; ++a) span_rows.push_back(matvec(freemod.action[a], row));
        Submodule S = submodule(freemod, span_rows);
        QuotientModule Q = quotient_module(freemod, S);
        K.dim = Q.mod.dim;
        K.mod = std::move(Q.mod);
        // d(x^alpha) = sum_j alpha_j x^{alpha - e_j} dx_j
        FpMat d0(n * d, d, C.p());
        for (int b = 0; b < d; ++b) {
            // decode basis index b into exponents
            std::vector<uint32_t> e(n);
            size_t rest = b;
            for (int t = 0; t < n; ++t) {
                uint64_t bound = 1;
                for (uint32_t q = 0; q < pr.exponents[t]; ++q) bound *= C.p();
                e[t] = static_cast<uint32_t>(rest % bound);
                rest /= bound;
            }
            for (int j = 0; j < n; ++j) {
                if (!e[j]) continue;
                uint8_t coef = static_cast<uint8_t>(e[j] % C.p());
                if (!coef) continue;
                auto e2 = e;
                e2[j] -= 1;
                size_t idx = 0, stride = 1;
                for (int t = 0; t < n; ++t) {
                    uint64_t bound = 1;
                    for (uint32_t q = 0; q < pr.exponents[t]; ++q) bound *= C.p();
                    idx += e2[t] * stride;
                    stride *= bound;
                }
                d0.at(static_cast<int>(j * d + idx), b) = coef;
            }
        }
        K.d = matmul(Q.proj, d0);
    }
    K.free_rank = is_free(K.mod);
    return K;
}

namespace {

// expansion matrix: from generator images Y (n blocks of dM) to the full
// operator matrix, D(x^alpha) = sum_j alpha_j x^{alpha-e_j} . Y_j
FpMat derivation_expansion(const FiniteAlgebra& C, const TargetModule& M, int n) {
    const Presentation& pr = C.presentation();
    const int d = C.dim(), dM = M.dim;
    FpMat E(dM * d, n * dM, C.p()); // row block per C-basis column, mapping Y -> D-column
    for (int b = 0; b < d; ++b) {
        std::vector<uint32_t> e(n);
        size_t rest = b;
        for (int t = 0; t < n; ++t) {
            uint64_t bound = 1;
            for (uint32_t q = 0; q < pr.exponents[t]; ++q) bound *= C.p();
            e[t] = static_cast<uint32_t>(rest % bound);
            rest /= bound;
        }
        for (int j = 0; j < n; ++j) {
            if (!e[j]) continue;
            uint8_t coef = static_cast<uint8_t>(e[j] % C.p());
            if (!coef) continue;
            auto e2 = e;
            e2[j] -= 1;
            size_t idx = 0, stride = 1;
            for (int t = 0; t < n; ++t) {
                uint64_t bound = 1;
                for (uint32_t q = 0; q < pr.exponents[t]; ++q) bound *= C.p();
                idx += e2[t] * stride;
                stride *= bound;
            }
            FpMat act = M.act_of(C.basis_vec(static_cast<int>(idx)), C.p());
            for (int u = 0; u < dM; ++u)
                for (int v = 0; v < dM; ++v)
                    if (act.at(u, v))
                        E.at(b * dM + u, j * dM + v) =
                            static_cast<uint8_t>((E.at(b * dM + u, j * dM + v) + coef * act.at(u, v)) % C.p());
        }
    }
    return E;
}

OperatorSpace space_from_flat(std::vector<Vec> flats, int dM, int dC, uint16_t p) {
    OperatorSpace S;
    S.dM = dM;
    S.dC = dC;
    S.flat = EchelonSpan(dM * dC, p);
    for (const Vec& f : flats) S.flat.insert(f);
    for (const Vec& row : S.flat.rows()) {
        FpMat D(dM, dC, p);
        for (int u = 0; u < dM; ++u)
            for (int v = 0; v < dC; ++v) D.at(u, v) = row[static_cast<size_t>(u) * dC + v];
        S.basis.push_back(std::move(D));
    }
    return S;
}

Vec flatten(const FpMat& D) { return D.a; }

} // namespace

OperatorSpace derivations(const FiniteAlgebra& C, const Subalgebra& A, const TargetModule& M) {
    const int d = C.dim(), dM = M.dim;
    std::vector<Vec> flats;
    if (C.from_presentation_input()) {
        const Presentation& pr = C.presentation();
        const int n = static_cast<int>(pr.gen_names.size());
        FpMat E = derivation_expansion(C, M, n);
        // constraints: relations map to zero, and D kills A
        std::vector<Vec> rows;
        auto add_kill = [&](const Vec& target_c) {
            // D(target) = 0, expressed through E
            for (int u = 0; u < dM; ++u) {
                Vec row(static_cast<size_t>(n) * dM, 0);
                for (int b = 0; b < d; ++b) {
                    if (!target_c[b]) continue;
                    for (int y = 0; y < n * dM; ++y)
                        row[y] = static_cast<uint8_t>((row[y] + target_c[b] * E.at(b * dM + u, y)) % C.p());
                }
                rows.push_back(std::move(row));
            }
        };
        for (int i = 0; i < n; ++i) {
            // relation i: D(x_i^{p^{e_i}}) = 0 forces D(P_i) = 0
            Vec pnf(d, 0);
            for (const Monomial& mo : pr.relations[i]) {
                size_t idx = 0, stride = 1;
                for (int t = 0; t < n; ++t) {
                    uint64_t bound = 1;
                    for (uint32_t q = 0; q < pr.exponents[t]; ++q) bound *= C.p();
                    idx += mo.exps[t] * stride;
                    stride *= bound;
                }
                pnf[idx] = static_cast<uint8_t>((pnf[idx] + mo.coeff) % C.p());
            }
            add_kill(pnf);
        }
        for (const Vec& a : A.span.rows()) add_kill(a);
        std::vector<Vec> ker;
        if (rows.empty()) {
            for (int y = 0; y < n * dM; ++y) {
                Vec e(static_cast<size_t>(n) * dM, 0);
                e[y] = 1;
                ker.push_back(std::move(e));
            }
        } else {
            ker = kernel_basis(FpMat::from_rows(rows, n * dM, C.p()));
        }
        for (const Vec& y : ker) {
            FpMat D(dM, d, C.p());
            for (int b = 0; b < d; ++b)
                for (int u = 0; u < dM; ++u) {
                    uint32_t s = 0;
                    for (size_t t = 0; t < y.size(); ++t) s += E.at(b * dM + u, static_cast<int>(t)) * y[t];
                    D.at(u, b) = static_cast<uint8_t>(s % C.p());
                }
            flats.push_back(flatten(D));
        }
    } else {
        // structure-constant algebra: full Leibniz system on basis pairs
        const int unknowns = dM * d;
        std::vector<Vec> rows;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                Vec prod = C.mul(C.basis_vec(i), C.basis_vec(j));
                FpMat acti = M.act_of(C.basis_vec(i), C.p());
                FpMat actj = M.act_of(C.basis_vec(j), C.p());
                for (int u = 0; u < dM; ++u) {
                    Vec row(unknowns, 0);
                    for (int b = 0; b < d; ++b)
                        if (prod[b]) row[u * d + b] = static_cast<uint8_t>((row[u * d + b] + prod[b]) % C.p());
                    for (int v = 0; v < dM; ++v) {
                        if (acti.at(u, v)) row[v * d + j] = static_cast<uint8_t>((row[v * d + j] + C.p() - acti.at(u, v)) % C.p());
                        if (actj.at(u, v)) row[v * d + i] = static_cast<uint8_t>((row[v * d + i] + C.p() - actj.at(u, v)) % C.p());
                    }
                    rows.push_back(std::move(row));
                }
            }
        for (const Vec& a : A.span.rows())
            for (int u = 0; u < dM; ++u) {
                Vec row(unknowns, 0);
                for (int b = 0; b < d; ++b) row[u * d + b] = a[b];
                rows.push_back(std::move(row));
            }
        for (const Vec& x : kernel_basis(FpMat::from_rows(rows, dM * d, C.p()))) {
            FpMat D(dM, d, C.p());
            D.a = x;
            flats.push_back(x);
        }
    }
    return space_from_flat(std::move(flats), dM, C.dim(), C.p());
}

FpMat bracket_with(const FiniteAlgebra& C, const TargetModule& M, const Vec& x, const FpMat& D) {
    FpMat lx = M.act_of(x, C.p());
    FpMat rx = C.mult_matrix(x);
    FpMat a = matmul(lx, D), b = matmul(D, rx);
    FpMat out(D.rows, D.cols, D.p);
    for (size_t t = 0; t < out.a.size(); ++t) out.a[t] = static_cast<uint8_t>((a.a[t] + C.p() - b.a[t]) % C.p());
    return out;
}

namespace {

// multisets of size m over {0..n-1}, nonincreasing index lists
void multisets(int n, int m, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (m == 0) {
        out.push_back(cur);
        return;
    }
    int hi = cur.empty() ? n - 1 : cur.back();
    for (int k = hi; k >= 0; --k) {
        cur.push_back(k);
        multisets(n, m - 1, cur, out);
        cur.pop_back();
    }
}

// grouped development: T(D) = sum_{0<=s<=r} prod_i (-1)^{r_i-s_i} C(r_i,s_i) x^s D x^{r-s}
FpMat grouped_bracket_matrix(const FiniteAlgebra& C, const TargetModule& M, const std::vector<Vec>& gens,
                             const std::vector<int>& counts, const FpMat& D) {
    const uint16_t p = C.p();
    std::vector<int> used;
    for (size_t i = 0; i < counts.size(); ++i)
        if (counts[i]) used.push_back(static_cast<int>(i));
    FpMat out(M.dim, C.dim(), p);
    std::vector<int> s(used.size(), 0);
    while (true) {
        uint8_t coef = 1;
        for (size_t t = 0; t < used.size(); ++t) {
            int r = counts[used[t]];
            coef = static_cast<uint8_t>(coef * binom_mod(r, s[t], p) % p);
            if ((r - s[t]) % 2) coef = static_cast<uint8_t>((p - coef) % p);
        }
        if (coef) {
            Vec xs = C.one(), xr = C.one();
            for (size_t t = 0; t < used.size(); ++t) {
                const Vec& g = gens[used[t]];
                for (int q = 0; q < s[t]; ++q) xs = C.mul(xs, g);
                for (int q = 0; q < counts[used[t]] - s[t]; ++q) xr = C.mul(xr, g);
            }
            FpMat lxs = M.act_of(xs, p);
            FpMat rxr = C.mult_matrix(xr);
            FpMat term = matmul(lxs, matmul(D, rxr));
            for (size_t t2 = 0; t2 < out.a.size(); ++t2)
                out.a[t2] = static_cast<uint8_t>((out.a[t2] + coef * term.a[t2]) % p);
        }
        // next s
        size_t t = 0;
        while (t < used.size()) {
            if (s[t] < counts[used[t]]) {
                ++s[t];
                break;
            }
            s[t] = 0;
            ++t;
        }
        if (t == used.size()) break;
    }
    return out;
}

std::vector<Vec> alinear_space(const FiniteAlgebra& C, const Subalgebra& A, const TargetModule& M) {
    const int d = C.dim(), dM = M.dim;
    const int unknowns = dM * d;
    // F_p-linearity is free; constraints only for A-basis rows beyond 1
    std::vector<Vec> rows;
    for (const Vec& a : A.span.rows()) {
        if (a == C.one()) continue;
        FpMat la = C.mult_matrix(a);
        FpMat ma = M.act_of(a, C.p());
        // D(a c) = a D(c): D*la - ma*D = 0
        for (int u = 0; u < dM; ++u)
            for (int b = 0; b < d; ++b) {
                Vec row(unknowns, 0);
                for (int k = 0; k < d; ++k)
                    if (la.at(k, b)) row[u * d + k] = static_cast<uint8_t>((row[u * d + k] + la.at(k, b)) % C.p());
                for (int v = 0; v < dM; ++v)
                    if (ma.at(u, v)) row[v * d + b] = static_cast<uint8_t>((row[v * d + b] + C.p() - ma.at(u, v)) % C.p());
                rows.push_back(std::move(row));
            }
    }
    if (rows.empty()) {
        std::vector<Vec> all;
        for (int t = 0; t < unknowns; ++t) {
            Vec e(unknowns, 0);
            e[t] = 1;
            all.push_back(std::move(e));
        }
        return all;
    }
    return kernel_basis(FpMat::from_rows(rows, unknowns, C.p()));
}

} // namespace

OperatorSpace hom_space(const FiniteAlgebra& C, const Subalgebra& A, const TargetModule& M) {
    return space_from_flat(alinear_space(C, A, M), M.dim, C.dim(), C.p());
}

OperatorSpace diff_operators_dual(const TensorSquare& T, const Subalgebra& A, const TargetModule& M, int k) {
    const FiniteAlgebra& C = *T.C;
    const int d = C.dim(), dM = M.dim;
    const uint16_t p = C.p();
    std::vector<Vec> sol = alinear_space(C, A, M);
    std::vector<Vec> gens = jpower_generators(T, k + 1);
    std::vector<Vec> rows;
    for (const Vec& w : gens) {
        // phi_D is left-C-linear, so vanishing on the module generators of
        // J^{k+1} is the whole constraint. Write w = sum_j u_j (x) s_j over the
        // second-factor basis; the constraint is  sum_j act(u_j) . D . s_j = 0.
        std::vector<Vec> u;
        std::vector<Vec> scols;
        if (T.free_route) {
            const int r = T.rank;
            u.assign(r, Vec(d, 0));
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < r; ++j)
                    if (w[i * r + j]) u[j][i] = w[i * r + j];
            scols = T.tbasis;
        } else {
            Vec pairs = matvec(T.pair_lift, w); // representative in C (x)_k C
            u.assign(d, Vec(d, 0));
            scols.resize(d);
            for (int j = 0; j < d; ++j) scols[j] = C.basis_vec(j);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    if (pairs[static_cast<size_t>(i) * d + j]) u[j][i] = pairs[static_cast<size_t>(i) * d + j];
        }
        const int unknowns = dM * d;
        for (int nu = 0; nu < dM; ++nu) {
            Vec row(unknowns, 0);
            for (size_t j = 0; j < u.size(); ++j) {
                if (vec_is_zero(u[j])) continue;
                FpMat au = M.act_of(u[j], p);
                for (int muv = 0; muv < dM; ++muv) {
                    if (!au.at(nu, muv)) continue;
                    for (int b = 0; b < d; ++b)
                        if (scols[j][b])
                            row[muv * d + b] =
                                static_cast<uint8_t>((row[muv * d + b] + au.at(nu, muv) * scols[j][b]) % p);
                }
            }
            rows.push_back(std::move(row));
        }
    }
    std::vector<Vec> flats;
    if (rows.empty()) {
        flats = sol;
    } else {
        FpMat Amat = FpMat::from_rows(rows, dM * d, p);
        std::vector<Vec> img;
        for (const Vec& s : sol) img.push_back(matvec(Amat, s));
        for (const Vec& c : combination_kernel(img, p)) {
            Vec f(static_cast<size_t>(dM) * d, 0);
            for (size_t t = 0; t < sol.size(); ++t)
                if (c[t]) vec_axpy(f, c[t], sol[t], p);
            flats.push_back(std::move(f));
        }
    }
    return space_from_flat(std::move(flats), dM, d, p);
}

OperatorSpace diff_operators(const FiniteAlgebra& C, const Subalgebra& A, const TargetModule& M, int k,
                             DiffRoute route, long dim_cap) {
    if (k < 0) fail_pre("diff_operators: order must be >= 0");
    const int d = C.dim(), dM = M.dim;
    if (static_cast<long>(d) * dM > 10000) fail_resource("Hom space exceeds the dimension threshold");
    const uint16_t p = C.p();
    if (route == DiffRoute::Dual) {
        TensorSquare T = tensor_square(C, A, dim_cap);
        return diff_operators_dual(T, A, M, k);
    }
    // Bracket route, iterated via reduction to generators:
    //   Diff^0 = C-linear maps, Diff^j = { D A-linear : [g, D] in Diff^{j-1} }.
    // Each step solves the residuals of the generator brackets modulo the
    // previous space, inside the A-linear space.
    std::vector<Vec> sol = alinear_space(C, A, M);
    const auto& gens = C.generators();
    std::vector<FpMat> lg, rg; // act_M(g) and L_g per generator
    for (const Vec& g : gens) {
        lg.push_back(M.act_of(g, p));
        rg.push_back(C.mult_matrix(g));
    }
    auto bracket_g = [&](size_t gi, const Vec& flat) {
        FpMat D(dM, d, p);
        D.a = flat;
        FpMat a = matmul(lg[gi], D), b = matmul(D, rg[gi]);
        Vec out(a.a.size());
        for (size_t t = 0; t < out.size(); ++t) out[t] = static_cast<uint8_t>((a.a[t] + p - b.a[t]) % p);
        return out;
    };
    EchelonSpan prev_span(dM * d, p); // Diff^{j-1}; the zero space for j = 0
    for (int j = 0;; ++j) {
        std::vector<Vec> images;
        images.reserve(sol.size());
        for (const Vec& v : sol) {
            Vec stacked;
            for (size_t gi = 0; gi < gens.size(); ++gi) {
                Vec res = prev_span.reduce(bracket_g(gi, v));
                stacked.insert(stacked.end(), res.begin(), res.end());
            }
            images.push_back(std::move(stacked));
        }
        std::vector<Vec> next;
        for (const Vec& c : combination_kernel(images, p)) {
            Vec f(static_cast<size_t>(dM) * d, 0);
            for (size_t t = 0; t < sol.size(); ++t)
                if (c[t]) vec_axpy(f, c[t], sol[t], p);
            next.push_back(std::move(f));
        }
        // stop at the requested order, or once the filtration fills Hom_A
        if (j == k || next.size() == sol.size()) return space_from_flat(std::move(next), dM, d, p);
        prev_span = EchelonSpan(dM * d, p);
        for (const Vec& f : next) prev_span.insert(f);
    }
}

LevelOperators diff_operators_on_level(const FiniteAlgebra& C, const Subalgebra& A, const Subalgebra& level, int k,
                                       DiffRoute route) {
    LevelOperators L;
    ExtractedAlgebra E = extract_algebra(level);
    L.level = E.alg;
    L.base_in_level = restrict_subalgebra(E, A);
    L.target.dim = C.dim();
    for (const Vec& row : E.basis_in_owner) L.target.cact.push_back(C.mult_matrix(row));
    L.ops = diff_operators(*L.level, L.base_in_level, L.target, k, route);
    return L;
}

std::optional<int> order_of(const FiniteAlgebra& C, const TargetModule& M, const FpMat& D, int bound) {
    const auto& gens = C.generators();
    const int n = static_cast<int>(gens.size());
    for (int ord = 0; ord <= bound; ++ord) {
        std::vector<std::vector<int>> sets;
        std::vector<int> curset;
        multisets(n, ord + 1, curset, sets);
        bool all_zero = true;
        for (const auto& s : sets) {
            std::vector<int> counts(n, 0);
            for (int i : s) counts[i]++;
            FpMat t = grouped_bracket_matrix(C, M, gens, counts, D);
            if (!vec_is_zero(t.a)) {
                all_zero = false;
                break;
            }
        }
        if (all_zero) return ord;
    }
    return std::nullopt;
}

PBasisCalculus partials_from_pbasis(const FiniteAlgebra& C, const Subalgebra& B, const std::vector<Vec>& xs) {
    PBasisCalculus P;
    P.xs = xs;
    P.n = static_cast<int>(xs.size());
    const uint16_t p = C.p();
    const int d = C.dim();
    P.alpha_bound.assign(P.n, p);
    // x_i^p must lie in B
    for (const Vec& x : xs)
        if (!B.contains(C.pow(x, p))) fail_pre("partials_from_pbasis: x^p does not lie in the base");
    // coordinates: columns (m, alpha) = b_m * x^alpha, alpha mixed-radix base p
    const auto& brows = B.span.rows();
    const int bd = static_cast<int>(brows.size());
    long monos = 1;
    for (int i = 0; i < P.n; ++i) monos *= p;
    if (monos * bd != d) fail_pre("partials_from_pbasis: not a p-basis (dimension mismatch)");
    P.phi = FpMat(d, d, p);
    for (long a = 0; a < monos; ++a) {
        Vec xa = C.one();
        long rest = a;
        for (int i = 0; i < P.n; ++i) {
            int e = static_cast<int>(rest % p);
            rest /= p;
            for (int t = 0; t < e; ++t) xa = C.mul(xa, xs[i]);
        }
        for (int m = 0; m < bd; ++m) {
            Vec col = C.mul(brows[m], xa);
            for (int u = 0; u < d; ++u) P.phi.at(u, static_cast<int>(a) * bd + m) = col[u];
        }
    }
    FpMat aug(d, 2 * d, p);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) aug.at(i, j) = P.phi.at(i, j);
        aug.at(i, d + i) = 1;
    }
    RrefResult inv = rref(aug);
    if (inv.rank != d) fail_pre("partials_from_pbasis: not a p-basis (monomials dependent)");
    P.phi_inv = FpMat(d, d, p);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) P.phi_inv.at(i, j) = inv.R.at(i, d + j);
    for (int i = 0; i < P.n; ++i) {
        std::vector<uint32_t> beta(P.n, 0);
        beta[i] = 1;
        P.partial.push_back(P.partial_beta(C, beta));
    }
    return P;
}

FpMat PBasisCalculus::partial_beta(const FiniteAlgebra& C, const std::vector<uint32_t>& beta) const {
    const uint16_t p = C.p();
    const int d = phi.rows;
    long monos = 1;
    for (int i = 0; i < n; ++i) monos *= p;
    const int bdim = static_cast<int>(d / monos);
    // shift on (m, alpha) coordinates: (m, alpha) -> binom(alpha,beta) (m, alpha-beta)
    FpMat S(d, d, p);
    for (long a = 0; a < monos; ++a) {
        long rest = a;
        std::vector<uint32_t> e(n);
        for (int i = 0; i < n; ++i) {
            e[i] = static_cast<uint32_t>(rest % p);
            rest /= p;
        }
        uint8_t coef = 1;
        bool ok = true;
        long a2 = 0, stride = 1;
        for (int i = 0; i < n; ++i) {
            if (e[i] < beta[i]) { ok = false; break; }
            coef = static_cast<uint8_t>(coef * binom_mod(e[i], beta[i], p) % p);
            a2 += (e[i] - beta[i]) * stride;
            stride *= p;
        }
        if (!ok || !coef) continue;
        for (int m = 0; m < bdim; ++m)
            S.at(static_cast<int>(a2) * bdim + m, static_cast<int>(a) * bdim + m) = coef;
    }
    return matmul(phi, matmul(S, phi_inv));
}

FpMat delta_alpha(const FiniteAlgebra& C, const std::vector<uint32_t>& alpha) {
    if (!C.from_presentation_input() || !C.presentation().is_split())
        fail_pre("delta_alpha requires a split modular presentation");
    const Presentation& pr = C.presentation();
    const int n = static_cast<int>(pr.gen_names.size());
    const uint16_t p = C.p();
    const int d = C.dim();
    std::vector<uint64_t> bounds(n);
    for (int i = 0; i < n; ++i) {
        bounds[i] = 1;
        for (uint32_t q = 0; q < pr.exponents[i]; ++q) bounds[i] *= p;
        if (alpha[i] >= bounds[i]) fail_pre("delta_alpha: index exceeds the presentation bounds");
    }
    FpMat D(d, d, p);
    for (int b = 0; b < d; ++b) {
        size_t rest = b;
        std::vector<uint64_t> e(n);
        for (int i = 0; i < n; ++i) {
            e[i] = rest % bounds[i];
            rest /= bounds[i];
        }
        uint8_t coef = 1;
        bool ok = true;
        size_t idx = 0, stride = 1;
        for (int i = 0; i < n; ++i) {
            if (e[i] < alpha[i]) { ok = false; break; }
            coef = static_cast<uint8_t>(coef * binom_mod(static_cast<uint32_t>(e[i]), alpha[i], p) % p);
            idx += (e[i] - alpha[i]) * stride;
            stride *= bounds[i];
        }
        if (ok && coef) D.at(static_cast<int>(idx), b) = coef;
    }
    return D;
}

RestrictedOp restrict_to(const FiniteAlgebra& C, const TargetModule& M, const FpMat& D, const Subalgebra& level,
                         int order_bound_of_D) {
    RestrictedOp R;
    const auto& rows = level.span.rows();
    R.mat = FpMat(M.dim, static_cast<int>(rows.size()), C.p());
    for (size_t j = 0; j < rows.size(); ++j) {
        Vec img = matvec(D, rows[j]);
        for (int u = 0; u < M.dim; ++u) R.mat.at(u, static_cast<int>(j)) = img[u];
    }
    R.order_bound = order_bound_of_D >= 0 ? order_bound_of_D / C.p() : -1;
    return R;
}

FpMat extend_along_pbasis(const FiniteAlgebra& C, const TargetModule& M, const Subalgebra& C1,
                          const std::vector<Vec>& xs, const FpMat& del_on_level) {
    const uint16_t p = C.p();
    const int d = C.dim();
    const int n = static_cast<int>(xs.size());
    const auto& brows = C1.span.rows();
    const int bd = static_cast<int>(brows.size());
    long monos = 1;
    for (int i = 0; i < n; ++i) monos *= p;
    if (monos * bd != d) fail_pre("extend: not a p-basis of C over the level");
    // coordinates over (alpha, m): column = b_m * x^alpha
    FpMat Phi(d, d, p);
    std::vector<Vec> xalpha(monos);
    for (long a = 0; a < monos; ++a) {
        Vec xa = C.one();
        long rest = a;
        for (int i = 0; i < n; ++i) {
            int e = static_cast<int>(rest % p);
            rest /= p;
            for (int t = 0; t < e; ++t) xa = C.mul(xa, xs[i]);
        }
        xalpha[a] = xa;
        for (int m = 0; m < bd; ++m) {
            Vec col = C.mul(brows[m], xa);
            for (int u = 0; u < d; ++u) Phi.at(u, static_cast<int>(a) * bd + m) = col[u];
        }
    }
    FpMat aug(d, 2 * d, p);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) aug.at(i, j) = Phi.at(i, j);
        aug.at(i, d + i) = 1;
    }
    RrefResult inv = rref(aug);
    if (inv.rank != d) fail_pre("extend: monomials over the level are dependent");
    // D(c): decompose, apply del to each lambda_alpha (in level coordinates), multiply by x^alpha
    FpMat D(M.dim, d, p);
    for (int b = 0; b < d; ++b) {
        Vec y(d);
        for (int r = 0; r < d; ++r) y[r] = inv.R.at(r, d + b);
        Vec out(M.dim, 0);
        for (long a = 0; a < monos; ++a) {
            Vec lam_coords(bd, 0);
            bool nz = false;
            for (int m = 0; m < bd; ++m) {
                lam_coords[m] = y[a * bd + m];
                nz = nz || lam_coords[m];
            }
            if (!nz) continue;
            Vec del_val = matvec(del_on_level, lam_coords); // in M coordinates
            FpMat ax = M.act_of(xalpha[a], p);
            Vec term = matvec(ax, del_val);
            for (int u = 0; u < M.dim; ++u) out[u] = static_cast<uint8_t>((out[u] + term[u]) % p);
        }
        for (int u = 0; u < M.dim; ++u) D.at(u, b) = out[u];
    }
    return D;
}

Vec bracket_development(const FiniteAlgebra& C, const TargetModule& M, const FpMat& D, const std::vector<Vec>& xs,
                        const Vec& c) {
    const int n = static_cast<int>(xs.size());
    const uint16_t p = C.p();
    Vec out(M.dim, 0);
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        Vec xS = C.one(), xSc = C.one();
        int sz = 0;
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                xS = C.mul(xS, xs[i]);
                ++sz;
            } else {
                xSc = C.mul(xSc, xs[i]);
            }
        }
        Vec v = matvec(D, C.mul(xSc, c));
        FpMat ax = M.act_of(xS, p);
        Vec term = matvec(ax, v);
        uint8_t sign = static_cast<uint8_t>((n - sz) % 2 ? p - 1 : 1);
        vec_axpy(out, sign, term, p);
    }
    return out;
}

Vec iterated_bracket_eval(const FiniteAlgebra& C, const TargetModule& M, const FpMat& D, const std::vector<Vec>& xs,
                          const Vec& c) {
    FpMat cur = D;
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) cur = bracket_with(C, M, *it, cur);
    return matvec(cur, c);
}

} // namespace pinsep
