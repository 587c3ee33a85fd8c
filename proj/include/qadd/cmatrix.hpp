#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace qadd {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. All operator dimensions in this project
/// are small (<= 128), so no sparsity or blocking anywhere.
class CMatrix {
public:
    CMatrix() : rows_(0), cols_(0) {}
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cplx(0.0, 0.0)) {}
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static CMatrix identity(std::size_t d);
    static CMatrix diag(const std::vector<double>& d);
    /// Matrix unit |i><j| in dimension d.
    static CMatrix unit(std::size_t d, std::size_t i, std::size_t j);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    CMatrix dagger() const;
    CMatrix transpose() const;
    CMatrix conj() const;
    cplx trace() const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

    /// Largest entry magnitude.
    double max_abs() const;
    double frobenius_norm() const;
    bool all_finite() const;

    double hermiticity_defect() const;  // max |A - A^dag| entry
    /// (A + A^dag)/2
    CMatrix symmetrized() const;

private:
    std::size_t rows_, cols_;
    std::vector<cplx> a_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Partial trace on H_1 (x) H_2; `which` is 1 or 2 (the subsystem traced out).
CMatrix partial_trace(const CMatrix& a, int which, std::size_t d1, std::size_t d2);

/// Partial transpose on subsystem `which` of H_1 (x) H_2. Involution: applying
/// twice is the identity, as a pure entry permutation.
CMatrix partial_transpose(const CMatrix& a, int which, std::size_t d1, std::size_t d2);

/// Trace out every factor not listed in `keep` (indices into `dims`,
/// ascending). The result lives on the kept factors in their original order.
CMatrix partial_trace_keep(const CMatrix& a, const std::vector<std::size_t>& dims,
                           const std::vector<std::size_t>& keep);

}  // namespace qadd
