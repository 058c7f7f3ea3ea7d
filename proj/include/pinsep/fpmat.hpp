#ifndef PINSEP_FPMAT_HPP
#define PINSEP_FPMAT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pinsep/common.hpp"

namespace pinsep {

using Vec = std::vector<uint8_t>; // coordinate vector over F_p, entries canonical in [0,p)

// Prime field context: p plus an inverse table. All matrix entries are bytes,
// so p < 256. Everything downstream shares one p per instance.
struct Fp {
    uint16_t p = 0;
    std::vector<uint8_t> inv; // inv[a] for a in [1,p)

    Fp() = default;
    explicit Fp(uint16_t prime);

    uint8_t add(uint8_t a, uint8_t b) const { return static_cast<uint8_t>((a + b) % p); }
    uint8_t sub(uint8_t a, uint8_t b) const { return static_cast<uint8_t>((a + p - b) % p); }
    uint8_t mul(uint8_t a, uint8_t b) const { return static_cast<uint8_t>((a * b) % p); }
    uint8_t neg(uint8_t a) const { return a == 0 ? 0 : static_cast<uint8_t>(p - a); }
    uint8_t invert(uint8_t a) const;
};

// Dense row-major matrix over F_p.
struct FpMat {
    int rows = 0;
    int cols = 0;
    uint16_t p = 0;
    std::vector<uint8_t> a;

    FpMat() = default;
    FpMat(int r, int c, uint16_t prime) : rows(r), cols(c), p(prime), a(static_cast<size_t>(r) * c, 0) {}

    uint8_t& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    uint8_t at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
    uint8_t* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
    const uint8_t* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }
    Vec row_vec(int r) const { return Vec(row(r), row(r) + cols); }

    static FpMat identity(int n, uint16_t p);
    static FpMat from_rows(const std::vector<Vec>& rows, int cols, uint16_t p);

    bool operator==(const FpMat& o) const = default;
};

struct RrefResult {
    FpMat R;
    int rank = 0;
    std::vector<int> pivots; // strictly increasing column indices
};

// Reduced row echelon form. `rref` dispatches to the OpenMP byte kernel (or a
// bit-packed kernel for p = 2); `rref_serial` is the reference implementation.
// All kernels perform the identical elimination sequence, so outputs are
// bit-identical regardless of thread count.
RrefResult rref_serial(const FpMat& m);
RrefResult rref(const FpMat& m);

// x with A x = b, free variables set to 0; nullopt when inconsistent.
std::optional<Vec> solve(const FpMat& A, const Vec& b);

// Basis of the null space, one vector per free column, ordered by free-column index.
std::vector<Vec> kernel_basis(const FpMat& A);

FpMat matmul_serial(const FpMat& A, const FpMat& B);
FpMat matmul(const FpMat& A, const FpMat& B);
Vec matvec(const FpMat& A, const Vec& v); // skips zero entries of v

// coefficient vectors c with sum_i c_i * vectors_i = 0 (kernel of the matrix
// whose columns are the given vectors)
std::vector<Vec> combination_kernel(const std::vector<Vec>& vectors, uint16_t p);

// vector helpers
Vec vec_add(const Vec& u, const Vec& v, uint16_t p);
Vec vec_sub(const Vec& u, const Vec& v, uint16_t p);
Vec vec_scale(const Vec& u, uint8_t c, uint16_t p);
void vec_axpy(Vec& dst, uint8_t c, const Vec& src, uint16_t p); // dst += c*src
bool vec_is_zero(const Vec& v);

// Incrementally maintained canonical rref basis of a row span. Insertion keeps
// the stored rows fully reduced, so two spans are equal iff their row lists are
// equal. Used for subalgebra closures, submodule spans and subspace equality.
class EchelonSpan {
public:
    EchelonSpan() = default;
    EchelonSpan(int cols, uint16_t p) : cols_(cols), fp_(p) {}

    int cols() const { return cols_; }
    int rank() const { return static_cast<int>(rows_.size()); }
    uint16_t p() const { return fp_.p; }

    // Residual of v after reduction against the current basis.
    Vec reduce(const Vec& v) const;
    bool contains(const Vec& v) const { return vec_is_zero(reduce(v)); }

    // Inserts v's residual if nonzero; returns the normalized new basis row, or
    // nullopt when v was already in the span.
    std::optional<Vec> insert(const Vec& v);

    const std::vector<Vec>& rows() const { return rows_; }
    const std::vector<int>& pivots() const { return pivots_; }
    std::vector<int> free_columns() const;

    // Coordinates of v over the stored rows (valid only when contains(v)).
    Vec coordinates(const Vec& v) const;

    bool same_span(const EchelonSpan& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
    int cols_ = 0;
    Fp fp_;
    std::vector<Vec> rows_;   // sorted by pivot column
    std::vector<int> pivots_; // parallel to rows_
};

EchelonSpan span_of(const std::vector<Vec>& rows, int cols, uint16_t p);

} // namespace pinsep

#endif
