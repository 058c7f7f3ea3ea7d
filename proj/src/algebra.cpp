#include "pinsep/algebra.hpp"

#include <algorithm>
#include <deque>

namespace pinsep {

void Presentation::validate() const {
    if (!is_prime(p) || p >= 256) fail_parse("p must be a prime < 256, got " + std::to_string(p));
    const size_t n = gen_names.size();
    if (exponents.size() != n || relations.size() != n) fail_parse("presentation: one relation per generator required");
    for (size_t i = 0; i < n; ++i) {
        if (exponents[i] < 1) fail_parse("relation exponent must be >= 1 for " + gen_names[i]);
        uint64_t bound = 1;
        for (const Monomial& m : relations[i]) {
            if (m.exps.size() != n) fail_parse("malformed monomial in relation for " + gen_names[i]);
            if (m.coeff == 0 || m.coeff >= p) fail_parse("coefficient out of range in relation for " + gen_names[i]);
            for (size_t j = 0; j < n; ++j) {
                if (m.exps[j] == 0) continue;
                if (j >= i)
                    fail_parse("triangularity violation: relation for " + gen_names[i] + " mentions " + gen_names[j]);
                bound = 1;
                for (uint32_t t = 0; t < exponents[j]; ++t) bound *= p;
                if (m.exps[j] >= bound)
                    fail_parse("degree of " + gen_names[j] + " in relation for " + gen_names[i] +
                               " must be < p^" + std::to_string(exponents[j]));
            }
        }
    }
}

bool Presentation::is_split() const {
    return std::all_of(relations.begin(), relations.end(), [](const Polynomial& q) { return q.empty(); });
}

const Presentation& FiniteAlgebra::presentation() const {
    if (!presentation_) fail_pre("algebra was not built from a presentation");
    return *presentation_;
}

std::vector<uint32_t> FiniteAlgebra::index_to_exps(size_t idx) const {
    std::vector<uint32_t> a(bounds_.size());
    for (size_t k = 0; k < bounds_.size(); ++k) {
        a[k] = static_cast<uint32_t>(idx % bounds_[k]);
        idx /= bounds_[k];
    }
    return a;
}

size_t FiniteAlgebra::exps_to_index(const std::vector<uint32_t>& a) const {
    size_t idx = 0;
    for (size_t k = 0; k < a.size(); ++k) idx += a[k] * strides_[k];
    return idx;
}

FiniteAlgebra FiniteAlgebra::from_presentation(const Presentation& pr, size_t dim_cap) {
    pr.validate();
    FiniteAlgebra A;
    A.fp_ = Fp(pr.p);
    A.presentation_ = pr;
    const size_t n = pr.gen_names.size();

    A.bounds_.resize(n);
    A.strides_.resize(n);
    size_t dim = 1;
    for (size_t k = 0; k < n; ++k) {
        uint64_t b = 1;
        for (uint32_t t = 0; t < pr.exponents[k]; ++t) {
            b *= pr.p;
            if (b > dim_cap) fail_resource("algebra dimension exceeds cap " + std::to_string(dim_cap));
        }
        A.bounds_[k] = static_cast<uint32_t>(b);
        A.strides_[k] = dim;
        dim *= b;
        if (dim > dim_cap) fail_resource("algebra dimension exceeds cap " + std::to_string(dim_cap));
    }
    A.dim_ = static_cast<int>(dim);

    A.basis_names_.resize(dim);
    for (size_t idx = 0; idx < dim; ++idx) {
        auto e = A.index_to_exps(idx);
        std::string name;
        for (size_t k = 0; k < n; ++k) {
            if (!e[k]) continue;
            if (!name.empty()) name += "*";
            name += pr.gen_names[k];
            if (e[k] > 1) name += "^" + std::to_string(e[k]);
        }
        A.basis_names_[idx] = name.empty() ? "1" : name;
    }
    A.one_ = Vec(dim, 0);
    A.one_[0] = 1;

    // normal form of each relation RHS (all its monomials are reduced already)
    std::vector<Vec> rel_nf(n);
    for (size_t i = 0; i < n; ++i) {
        Vec v(dim, 0);
        for (const Monomial& m : pr.relations[i]) {
            size_t idx = 0;
            for (size_t j = 0; j < n; ++j) idx += m.exps[j] * A.strides_[j];
            v[idx] = static_cast<uint8_t>((v[idx] + m.coeff) % pr.p);
        }
        rel_nf[i] = std::move(v);
    }

    // Build generator multiplication matrices in order k = 0..n-1. An overflow
    // column x_k * x^a with a_k = bounds_k - 1 equals rel_nf[k] * x^{a'} where
    // a' zeroes the k-th exponent. rel_nf[k] only involves generators < k, whose
    // matrices are complete; multiplying it by x_j for j > k never overflows in
    // position j, so those factors are plain index shifts.
    A.genmul_.reserve(n);
    for (size_t k = 0; k < n; ++k) {
        FpMat M(static_cast<int>(dim), static_cast<int>(dim), pr.p);
        for (size_t idx = 0; idx < dim; ++idx) {
            auto e = A.index_to_exps(idx);
            if (e[k] + 1 < A.bounds_[k]) {
                M.at(static_cast<int>(idx + A.strides_[k]), static_cast<int>(idx)) = 1;
                continue;
            }
            Vec w = rel_nf[k];
            for (size_t j = 0; j < k; ++j)
                for (uint32_t t = 0; t < e[j]; ++t) w = matvec(A.genmul_[j], w);
            size_t shift = 0;
            for (size_t j = k + 1; j < n; ++j) shift += e[j] * A.strides_[j];
            for (size_t r = 0; r + shift < dim; ++r)
                if (w[r]) M.at(static_cast<int>(r + shift), static_cast<int>(idx)) = w[r];
        }
        A.genmul_.push_back(std::move(M));
    }

    A.gen_names_ = pr.gen_names;
    A.gens_.resize(n);
    for (size_t k = 0; k < n; ++k) {
        A.gens_[k] = Vec(dim, 0);
        A.gens_[k][A.strides_[k] % dim] = 1; // x_k as a basis monomial; bounds_k >= p >= 2
    }
    return A;
}

FiniteAlgebra FiniteAlgebra::from_structure_constants(uint16_t p, std::vector<std::string> basis_names,
                                                      std::vector<std::vector<Vec>> table, Vec one,
                                                      std::vector<std::string> gen_names, std::vector<Vec> gens) {
    FiniteAlgebra A;
    A.fp_ = Fp(p);
    A.dim_ = static_cast<int>(basis_names.size());
    A.basis_names_ = std::move(basis_names);
    A.table_ = std::move(table);
    A.one_ = std::move(one);
    if (gen_names.empty()) {
        // default designated generators: the whole basis
        A.gen_names_ = A.basis_names_;
        for (int i = 0; i < A.dim_; ++i) A.gens_.push_back(A.basis_vec(i));
    } else {
        A.gen_names_ = std::move(gen_names);
        A.gens_ = std::move(gens);
    }
    A.check_axioms();
    return A;
}

Vec FiniteAlgebra::basis_vec(int i) const {
    Vec v(dim_, 0);
    v[i] = 1;
    return v;
}

Vec FiniteAlgebra::mul_basis(int i, const Vec& v) const {
    if (!table_.empty()) {
        Vec out(dim_, 0);
        for (int j = 0; j < dim_; ++j)
            if (v[j]) vec_axpy(out, v[j], table_[i][j], p());
        return out;
    }
    // presentation: walk the monomial's generators over v
    auto e = index_to_exps(static_cast<size_t>(i));
    Vec w = v;
    for (size_t k = 0; k < e.size(); ++k)
        for (uint32_t t = 0; t < e[k]; ++t) w = matvec(genmul_[k], w);
    return w;
}

Vec FiniteAlgebra::mul(const Vec& u, const Vec& v) const {
    size_t nu = 0, nv = 0;
    for (uint8_t x : u) nu += x != 0;
    for (uint8_t x : v) nv += x != 0;
    const Vec& a = nu <= nv ? u : v;
    const Vec& b = nu <= nv ? v : u;
    const size_t na = std::min(nu, nv);
    // dense-by-dense products go through one multiplication matrix
    if (!table_.empty() || na <= 32 || static_cast<long>(na) * dim_ < 4 * dim_) {
        Vec out(dim_, 0);
        for (int i = 0; i < dim_; ++i) {
            if (!a[i]) continue;
            Vec w = mul_basis(i, b);
            vec_axpy(out, a[i], w, p());
        }
        return out;
    }
    return matvec(mult_matrix(b), a);
}

Vec FiniteAlgebra::pow(const Vec& v, uint64_t n) const {
    Vec r = one_, base = v;
    while (n) {
        if (n & 1) r = mul(r, base);
        n >>= 1;
        if (n) base = mul(base, base);
    }
    return r;
}

const FpMat& FiniteAlgebra::frobenius_matrix() const {
    if (frobenius_) return *frobenius_;
    // x -> x^p is F_p-linear in characteristic p; columns are basis powers
    FpMat F(dim_, dim_, p());
    for (int j = 0; j < dim_; ++j) {
        Vec c = pow(basis_vec(j), p());
        for (int i = 0; i < dim_; ++i) F.at(i, j) = c[i];
    }
    frobenius_ = std::move(F);
    return *frobenius_;
}

Vec FiniteAlgebra::frobenius_power(const Vec& v, uint32_t e) const {
    Vec w = v;
    const FpMat& F = frobenius_matrix();
    for (uint32_t t = 0; t < e; ++t) w = matvec(F, w);
    return w;
}

FpMat FiniteAlgebra::mult_matrix(const Vec& v) const {
    FpMat L(dim_, dim_, p());
    if (!table_.empty()) {
        for (int j = 0; j < dim_; ++j) {
            Vec c = mul_basis(j, v);
            for (int i = 0; i < dim_; ++i) L.at(i, j) = c[i];
        }
        return L;
    }
    // incremental: column for monomial a equals genmul_k * (column for a - e_k)
    std::vector<Vec> cols(dim_);
    cols[0] = v;
    for (size_t idx = 1; idx < static_cast<size_t>(dim_); ++idx) {
        auto e = index_to_exps(idx);
        size_t k = 0;
        while (e[k] == 0) ++k;
        cols[idx] = matvec(genmul_[k], cols[idx - strides_[k]]);
    }
    for (int j = 0; j < dim_; ++j)
        for (int i = 0; i < dim_; ++i) L.at(i, j) = cols[j][i];
    return L;
}

const EchelonSpan& FiniteAlgebra::radical() const {
    if (radical_) return *radical_;
    // rad = ker(F^m) once p^m >= dim, F the F_p-linear p-th power map
    const FpMat& F = frobenius_matrix();
    uint64_t pm = 1;
    FpMat Fm = FpMat::identity(dim_, p());
    while (pm < static_cast<uint64_t>(dim_)) {
        Fm = matmul(F, Fm);
        pm *= p();
    }
    radical_ = span_of(kernel_basis(Fm), dim_, p());
    return *radical_;
}

bool FiniteAlgebra::is_local() const { return radical().rank() == dim_ - 1; }

uint8_t FiniteAlgebra::residue(const Vec& v) const {
    if (!is_local()) fail_pre("residue: algebra is not local over F_p");
    // v - residue*1 lies in rad: compare residuals against the radical span
    Vec rv = radical().reduce(v);
    Vec r1 = radical().reduce(one_);
    for (int j = 0; j < dim_; ++j)
        if (r1[j]) return fp_.mul(rv[j], fp_.invert(r1[j]));
    fail_pre("residue: 1 lies in the radical");
}

std::optional<Vec> FiniteAlgebra::witness_idempotent() const {
    for (int j = 0; j < dim_; ++j) {
        Vec v = basis_vec(j);
        for (int it = 0; it < dim_ + 2; ++it) {
            Vec w = mul(v, v);
            if (w == v) break;
            v = std::move(w);
        }
        if (!vec_is_zero(v) && v != one_ && mul(v, v) == v) return v;
    }
    return std::nullopt;
}

const EchelonSpan& FiniteAlgebra::maximal_ideal_square() const {
    if (msquare_) return *msquare_;
    if (!is_local()) fail_pre("maximal_ideal_square: algebra is not local over F_p");
    EchelonSpan sq(dim_, p());
    if (presentation_) {
        // m is generated as an ideal by the generators, so m^2 = sum x_i x_j C
        const size_t n = gens_.size();
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i; j < n; ++j) {
                Vec gij = mul(gens_[i], gens_[j]);
                if (vec_is_zero(gij)) continue;
                FpMat L = mult_matrix(gij);
                for (int c = 0; c < dim_; ++c) {
                    Vec col(dim_);
                    for (int r = 0; r < dim_; ++r) col[r] = L.at(r, c);
                    sq.insert(col);
                }
            }
    } else {
        const auto& rad = radical().rows();
        for (size_t i = 0; i < rad.size(); ++i)
            for (size_t j = i; j < rad.size(); ++j) sq.insert(mul(rad[i], rad[j]));
    }
    msquare_ = std::move(sq);
    return *msquare_;
}

void FiniteAlgebra::check_axioms(int exhaustive_limit) const {
    for (int i = 0; i < dim_; ++i) {
        if (mul(one_, basis_vec(i)) != basis_vec(i)) fail_pre("unit axiom fails at basis " + basis_names_[i]);
    }
    auto check_pair = [&](int i, int j) {
        if (mul(basis_vec(i), basis_vec(j)) != mul(basis_vec(j), basis_vec(i)))
            fail_pre("commutativity fails at (" + basis_names_[i] + ", " + basis_names_[j] + ")");
    };
    auto check_triple = [&](int i, int j, int k) {
        Vec lhs = mul(mul(basis_vec(i), basis_vec(j)), basis_vec(k));
        Vec rhs = mul(basis_vec(i), mul(basis_vec(j), basis_vec(k)));
        if (lhs != rhs)
            fail_pre("associativity fails at (" + basis_names_[i] + ", " + basis_names_[j] + ", " + basis_names_[k] + ")");
    };
    if (dim_ <= exhaustive_limit) {
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j) check_pair(i, j);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                for (int k = 0; k < dim_; ++k) check_triple(i, j, k);
    } else {
        uint64_t s = 0x9e3779b97f4a7c15ull;
        auto next = [&]() { s ^= s << 13; s ^= s >> 7; s ^= s << 17; return s; };
        for (int t = 0; t < 200; ++t) {
            int i = static_cast<int>(next() % dim_), j = static_cast<int>(next() % dim_), k = static_cast<int>(next() % dim_);
            check_pair(i, j);
            check_triple(i, j, k);
        }
    }
}

bool Subalgebra::contains_subalgebra(const Subalgebra& o) const {
    for (const Vec& r : o.span.rows())
        if (!span.contains(r)) return false;
    return true;
}

Subalgebra prime_subalgebra(const FiniteAlgebra& C) {
    Subalgebra s;
    s.owner = &C;
    s.span = EchelonSpan(C.dim(), C.p());
    s.span.insert(C.one());
    return s;
}

Subalgebra full_subalgebra(const FiniteAlgebra& C) {
    Subalgebra s;
    s.owner = &C;
    s.span = EchelonSpan(C.dim(), C.p());
    for (int i = 0; i < C.dim(); ++i) s.span.insert(C.basis_vec(i));
    s.gens = C.generators();
    s.gen_names = C.gen_names();
    return s;
}

Subalgebra subalgebra_generated(const FiniteAlgebra& C, const std::vector<Vec>& seed,
                                const std::vector<std::string>& seed_names, const Subalgebra* include_sub) {
    Subalgebra s;
    s.owner = &C;
    s.span = EchelonSpan(C.dim(), C.p());
    s.span.insert(C.one());
    if (include_sub) {
        for (const Vec& r : include_sub->span.rows()) s.span.insert(r);
        s.gens = include_sub->gens;
        s.gen_names = include_sub->gen_names;
    }
    for (size_t i = 0; i < seed.size(); ++i) {
        s.gens.push_back(seed[i]);
        s.gen_names.push_back(i < seed_names.size() ? seed_names[i] : "s" + std::to_string(i));
    }
    std::deque<Vec> work(s.span.rows().begin(), s.span.rows().end());
    for (const Vec& g : s.gens)
        if (auto row = s.span.insert(g)) work.push_back(*row);
    // A span containing 1 and all generators, stable under multiplication by
    // each generator, is the full unital subalgebra they generate.
    while (!work.empty()) {
        Vec v = std::move(work.front());
        work.pop_front();
        for (const Vec& g : s.gens) {
            Vec prod = C.mul(g, v);
            if (auto row = s.span.insert(prod)) work.push_back(*row);
        }
    }
    return s;
}

FrobeniusChain frobenius_chain(const FiniteAlgebra& C, const Subalgebra& A) {
    FrobeniusChain chain;
    Subalgebra full = full_subalgebra(C);
    if (!full.contains_subalgebra(A)) fail_pre("frobenius_chain: base is not a subalgebra of C");
    chain.levels.push_back(full);
    chain.dims.push_back(full.dim());
    if (full.same(A)) {
        chain.finite = true;
        chain.exponent = 0;
        return chain;
    }
    std::vector<Vec> powers = C.generators();
    for (int e = 1; e <= C.dim() + 1; ++e) {
        for (auto& v : powers) v = C.frobenius_power(v, 1);
        std::vector<std::string> names;
        for (const auto& nm : C.gen_names())
            names.push_back(nm + "^(" + std::to_string(C.p()) + "^" + std::to_string(e) + ")");
        Subalgebra level = subalgebra_generated(C, powers, names, &A);
        bool stable = level.same(chain.levels.back());
        chain.levels.push_back(level);
        chain.dims.push_back(level.dim());
        if (level.same(A)) {
            chain.finite = true;
            chain.exponent = e;
            return chain;
        }
        if (stable) {
            chain.finite = false; // stabilized strictly above A
            return chain;
        }
    }
    chain.finite = false;
    return chain;
}

Vec ExtractedAlgebra::to_sub(const Vec& ambient) const {
    if (!span_->contains(ambient)) fail_pre("element does not lie in the subalgebra");
    return span_->coordinates(ambient);
}

Vec ExtractedAlgebra::to_owner(const Vec& sub) const {
    Vec out(basis_in_owner.empty() ? 0 : basis_in_owner[0].size(), 0);
    for (size_t i = 0; i < basis_in_owner.size(); ++i)
        if (sub[i]) vec_axpy(out, sub[i], basis_in_owner[i], alg->p());
    return out;
}

ExtractedAlgebra extract_algebra(const Subalgebra& B) {
    const FiniteAlgebra& C = *B.owner;
    const int d = B.dim();
    ExtractedAlgebra E;
    E.keeper_ = std::make_shared<EchelonSpan>(B.span);
    E.span_ = E.keeper_.get();
    E.basis_in_owner = B.span.rows();

    std::vector<std::vector<Vec>> table(d, std::vector<Vec>(d));
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            Vec prod = C.mul(E.basis_in_owner[i], E.basis_in_owner[j]);
            Vec coords = B.span.coordinates(prod);
            table[i][j] = coords;
            table[j][i] = std::move(coords);
        }
    std::vector<std::string> names;
    for (int i = 0; i < d; ++i) names.push_back("b" + std::to_string(i));
    Vec one = B.span.coordinates(C.one());
    std::vector<Vec> gens;
    std::vector<std::string> gen_names;
    for (size_t i = 0; i < B.gens.size(); ++i) {
        gens.push_back(B.span.coordinates(B.gens[i]));
        gen_names.push_back(i < B.gen_names.size() ? B.gen_names[i] : "g" + std::to_string(i));
    }
    if (gens.empty()) {
        for (int i = 0; i < d; ++i) {
            gens.push_back(B.span.coordinates(C.mul(E.basis_in_owner[i], C.one())));
            gen_names.push_back(names[i]);
        }
    }
    E.alg = std::make_shared<FiniteAlgebra>(FiniteAlgebra::from_structure_constants(
        C.p(), std::move(names), std::move(table), std::move(one), std::move(gen_names), std::move(gens)));
    return E;
}

Subalgebra restrict_subalgebra(const ExtractedAlgebra& E, const Subalgebra& inner) {
    Subalgebra s;
    s.owner = E.alg.get();
    s.span = EchelonSpan(E.alg->dim(), E.alg->p());
    for (const Vec& r : inner.span.rows()) s.span.insert(E.to_sub(r));
    for (size_t i = 0; i < inner.gens.size(); ++i) {
        s.gens.push_back(E.to_sub(inner.gens[i]));
        s.gen_names.push_back(i < inner.gen_names.size() ? inner.gen_names[i] : "g" + std::to_string(i));
    }
    return s;
}

} // namespace pinsep
