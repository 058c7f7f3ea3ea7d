#include "pinsep/fpmat.hpp"

#include <algorithm>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pinsep {

bool is_prime(uint32_t n) {
    if (n < 2) return false;
    for (uint32_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

Fp::Fp(uint16_t prime) : p(prime) {
    if (!is_prime(prime) || prime >= 256) fail_pre("modulus must be a prime < 256, got " + std::to_string(prime));
    inv.assign(p, 0);
    for (uint16_t a = 1; a < p; ++a)
        for (uint16_t b = 1; b < p; ++b)
            if (a * b % p == 1) { inv[a] = static_cast<uint8_t>(b); break; }
}

uint8_t Fp::invert(uint8_t a) const {
    if (a == 0) fail_pre("division by zero in F_p");
    return inv[a];
}

FpMat FpMat::identity(int n, uint16_t p) {
    FpMat m(n, n, p);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

FpMat FpMat::from_rows(const std::vector<Vec>& rows, int cols, uint16_t p) {
    FpMat m(static_cast<int>(rows.size()), cols, p);
    for (size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<int>(rows[r].size()) != cols) fail_pre("row length mismatch building matrix");
        std::memcpy(m.row(static_cast<int>(r)), rows[r].data(), cols);
    }
    return m;
}

namespace {

// Table-driven elimination step: dst[j] -= f*src[j]. A runtime modulo per byte
// dominates the kernel, so each row builds a p-entry product table and the
// caller supplies a 512-entry reduction table (entries stay below 2p <= 510).
inline void row_axpy_sub(uint8_t* dst, const uint8_t* src, uint8_t f, int n, uint16_t p, const uint8_t* red) {
    uint8_t multab[256];
    const uint16_t nf = static_cast<uint16_t>(p - f);
    for (uint16_t s = 0; s < p; ++s) multab[s] = static_cast<uint8_t>(nf * s % p);
    for (int j = 0; j < n; ++j) dst[j] = red[dst[j] + multab[src[j]]];
}

RrefResult rref_bytes(const FpMat& m, bool parallel) {
    RrefResult res;
    res.R = m;
    FpMat& R = res.R;
    Fp fp(m.p);
    uint8_t red[512];
    for (int v = 0; v < 512; ++v) red[v] = static_cast<uint8_t>(v % m.p);
    const int nr = R.rows, nc = R.cols;
    int r = 0;
    for (int c = 0; c < nc && r < nr; ++c) {
        int piv = -1;
        for (int i = r; i < nr; ++i)
            if (R.at(i, c) != 0) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != r)
            for (int j = 0; j < nc; ++j) std::swap(R.at(piv, j), R.at(r, j));
        uint8_t inv = fp.invert(R.at(r, c));
        if (inv != 1)
            for (int j = c; j < nc; ++j) R.at(r, j) = fp.mul(R.at(r, j), inv);
        const uint8_t* prow = R.row(r);
        if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (nr > 64 && static_cast<long>(nr) * nc > 65536)
#endif
            for (int i = 0; i < nr; ++i) {
                if (i == r) continue;
                uint8_t f = R.at(i, c);
                if (f) row_axpy_sub(R.row(i) + c, prow + c, f, nc - c, m.p, red);
            }
        } else {
            for (int i = 0; i < nr; ++i) {
                if (i == r) continue;
                uint8_t f = R.at(i, c);
                if (f) row_axpy_sub(R.row(i) + c, prow + c, f, nc - c, m.p, red);
            }
        }
        res.pivots.push_back(c);
        ++r;
    }
    res.rank = r;
    return res;
}

// GF(2) kernel: rows packed 64 entries per word, row operations become XOR.
RrefResult rref_gf2(const FpMat& m) {
    const int nr = m.rows, nc = m.cols;
    const int words = (nc + 63) / 64;
    std::vector<uint64_t> b(static_cast<size_t>(nr) * words, 0);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j)
            if (m.at(i, j)) b[static_cast<size_t>(i) * words + (j >> 6)] |= uint64_t(1) << (j & 63);

    RrefResult res;
    int r = 0;
    for (int c = 0; c < nc && r < nr; ++c) {
        const int w = c >> 6;
        const uint64_t bit = uint64_t(1) << (c & 63);
        int piv = -1;
        for (int i = r; i < nr; ++i)
            if (b[static_cast<size_t>(i) * words + w] & bit) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != r)
            for (int k = 0; k < words; ++k)
                std::swap(b[static_cast<size_t>(piv) * words + k], b[static_cast<size_t>(r) * words + k]);
        const uint64_t* prow = &b[static_cast<size_t>(r) * words];
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (nr > 256 && words > 4)
#endif
        for (int i = 0; i < nr; ++i) {
            if (i == r) continue;
            uint64_t* row = &b[static_cast<size_t>(i) * words];
            if (row[w] & bit)
                for (int k = w; k < words; ++k) row[k] ^= prow[k];
        }
        res.pivots.push_back(c);
        ++r;
    }
    res.rank = r;
    res.R = FpMat(nr, nc, 2);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j)
            res.R.at(i, j) = (b[static_cast<size_t>(i) * words + (j >> 6)] >> (j & 63)) & 1;
    return res;
}

} // namespace

RrefResult rref_serial(const FpMat& m) { return rref_bytes(m, false); }

RrefResult rref(const FpMat& m) {
    if (m.p == 2 && static_cast<long>(m.rows) * m.cols > 4096) return rref_gf2(m);
    return rref_bytes(m, true);
}

std::optional<Vec> solve(const FpMat& A, const Vec& b) {
    if (static_cast<int>(b.size()) != A.rows) fail_pre("solve: dimension mismatch");
    FpMat aug(A.rows, A.cols + 1, A.p);
    for (int i = 0; i < A.rows; ++i) {
        std::memcpy(aug.row(i), A.row(i), A.cols);
        aug.at(i, A.cols) = b[i];
    }
    RrefResult r = rref(aug);
    for (int i = 0; i < r.rank; ++i)
        if (r.pivots[i] == A.cols) return std::nullopt;
    Vec x(A.cols, 0);
    for (int i = 0; i < r.rank; ++i) x[r.pivots[i]] = r.R.at(i, A.cols);
    return x;
}

std::vector<Vec> kernel_basis(const FpMat& A) {
    RrefResult r = rref(A);
    Fp fp(A.p);
    std::vector<bool> is_pivot(A.cols, false);
    for (int c : r.pivots) is_pivot[c] = true;
    std::vector<Vec> basis;
    for (int f = 0; f < A.cols; ++f) {
        if (is_pivot[f]) continue;
        Vec v(A.cols, 0);
        v[f] = 1;
        for (int i = 0; i < r.rank; ++i) v[r.pivots[i]] = fp.neg(r.R.at(i, f));
        basis.push_back(std::move(v));
    }
    return basis;
}

namespace {

FpMat matmul_impl(const FpMat& A, const FpMat& B, bool parallel) {
    if (A.cols != B.rows || A.p != B.p) fail_pre("matmul: dimension or modulus mismatch");
    FpMat C(A.rows, B.cols, A.p);
    const uint16_t p = A.p;
    auto row_work = [&](int i) {
        std::vector<uint32_t> acc(B.cols, 0);
        const uint8_t* arow = A.row(i);
        for (int k = 0; k < A.cols; ++k) {
            uint32_t f = arow[k];
            if (!f) continue;
            const uint8_t* brow = B.row(k);
            for (int j = 0; j < B.cols; ++j) acc[j] += f * brow[j];
        }
        uint8_t* crow = C.row(i);
        for (int j = 0; j < B.cols; ++j) crow[j] = static_cast<uint8_t>(acc[j] % p);
    };
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (static_cast<long>(A.rows) * A.cols * B.cols > 1000000)
#endif
        for (int i = 0; i < A.rows; ++i) row_work(i);
    } else {
        for (int i = 0; i < A.rows; ++i) row_work(i);
    }
    return C;
}

} // namespace

FpMat matmul_serial(const FpMat& A, const FpMat& B) { return matmul_impl(A, B, false); }
FpMat matmul(const FpMat& A, const FpMat& B) { return matmul_impl(A, B, true); }

Vec matvec(const FpMat& A, const Vec& v) {
    if (static_cast<int>(v.size()) != A.cols) fail_pre("matvec: dimension mismatch");
    std::vector<uint32_t> acc(A.rows, 0);
    for (int j = 0; j < A.cols; ++j) {
        uint32_t f = v[j];
        if (!f) continue;
        for (int i = 0; i < A.rows; ++i) acc[i] += f * A.at(i, j);
    }
    Vec out(A.rows);
    for (int i = 0; i < A.rows; ++i) out[i] = static_cast<uint8_t>(acc[i] % A.p);
    return out;
}

std::vector<Vec> combination_kernel(const std::vector<Vec>& vectors, uint16_t p) {
    if (vectors.empty()) return {};
    const int rows = static_cast<int>(vectors[0].size());
    const int cols = static_cast<int>(vectors.size());
    FpMat M(rows, cols, p);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) M.at(i, j) = vectors[j][i];
    return kernel_basis(M);
}

Vec vec_add(const Vec& u, const Vec& v, uint16_t p) {
    Vec w(u.size());
    for (size_t i = 0; i < u.size(); ++i) w[i] = static_cast<uint8_t>((u[i] + v[i]) % p);
    return w;
}

Vec vec_sub(const Vec& u, const Vec& v, uint16_t p) {
    Vec w(u.size());
    for (size_t i = 0; i < u.size(); ++i) w[i] = static_cast<uint8_t>((u[i] + p - v[i]) % p);
    return w;
}

Vec vec_scale(const Vec& u, uint8_t c, uint16_t p) {
    Vec w(u.size());
    for (size_t i = 0; i < u.size(); ++i) w[i] = static_cast<uint8_t>(u[i] * c % p);
    return w;
}

void vec_axpy(Vec& dst, uint8_t c, const Vec& src, uint16_t p) {
    for (size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<uint8_t>((dst[i] + c * src[i]) % p);
}

bool vec_is_zero(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](uint8_t x) { return x == 0; });
}

Vec EchelonSpan::reduce(const Vec& v) const {
    if (static_cast<int>(v.size()) != cols_) fail_pre("EchelonSpan::reduce: dimension mismatch");
    Vec w = v;
    for (size_t i = 0; i < rows_.size(); ++i) {
        uint8_t f = w[pivots_[i]];
        if (f) vec_axpy(w, fp_.neg(f), rows_[i], fp_.p);
    }
    return w;
}

std::optional<Vec> EchelonSpan::insert(const Vec& v) {
    Vec w = reduce(v);
    int piv = -1;
    for (int j = 0; j < cols_; ++j)
        if (w[j]) { piv = j; break; }
    if (piv < 0) return std::nullopt;
    uint8_t inv = fp_.invert(w[piv]);
    if (inv != 1) w = vec_scale(w, inv, fp_.p);
    // keep existing rows reduced against the new pivot
    for (size_t i = 0; i < rows_.size(); ++i) {
        uint8_t f = rows_[i][piv];
        if (f) vec_axpy(rows_[i], fp_.neg(f), w, fp_.p);
    }
    auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), piv);
    size_t idx = static_cast<size_t>(pos - pivots_.begin());
    pivots_.insert(pos, piv);
    rows_.insert(rows_.begin() + idx, w);
    return rows_[idx];
}

std::vector<int> EchelonSpan::free_columns() const {
    std::vector<bool> is_pivot(cols_, false);
    for (int c : pivots_) is_pivot[c] = true;
    std::vector<int> out;
    for (int j = 0; j < cols_; ++j)
        if (!is_pivot[j]) out.push_back(j);
    return out;
}

Vec EchelonSpan::coordinates(const Vec& v) const {
    // rows are fully reduced, so the coefficient of row i is just v[pivot_i]
    Vec c(rows_.size());
    for (size_t i = 0; i < rows_.size(); ++i) c[i] = v[pivots_[i]];
    return c;
}

EchelonSpan span_of(const std::vector<Vec>& rows, int cols, uint16_t p) {
    EchelonSpan s(cols, p);
    for (const Vec& r : rows) s.insert(r);
    return s;
}

} // namespace pinsep
