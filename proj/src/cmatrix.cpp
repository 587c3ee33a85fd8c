#include "qadd/cmatrix.hpp"

#include <cmath>

namespace qadd {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != rows_ * cols_)
        throw std::invalid_argument("CMatrix: entry count does not match shape");
}

CMatrix CMatrix::identity(std::size_t d) {
    CMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diag(const std::vector<double>& d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::unit(std::size_t d, std::size_t i, std::size_t j) {
    CMatrix m(d, d);
    m(i, j) = 1.0;
    return m;
}

CMatrix CMatrix::dagger() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

CMatrix CMatrix::transpose() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

CMatrix CMatrix::conj() const {
    CMatrix m(rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) m.a_[k] = std::conj(a_[k]);
    return m;
}

cplx CMatrix::trace() const {
    if (!square()) throw std::invalid_argument("trace: non-square matrix");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("matrix add: shape mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("matrix sub: shape mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (auto& v : a_) v *= s;
    return *this;
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : a_) {
        const double x = std::abs(v);
        if (!(x <= m)) m = x;  // propagates NaN instead of masking it
    }
    return m;
}

double CMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

bool CMatrix::all_finite() const {
    for (const auto& v : a_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double CMatrix::hermiticity_defect() const {
    if (!square()) throw std::invalid_argument("hermiticity_defect: non-square");
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
}

CMatrix CMatrix::symmetrized() const {
    CMatrix m = *this;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    return m;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    CMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return c;
}

CMatrix partial_trace(const CMatrix& a, int which, std::size_t d1, std::size_t d2) {
    if (a.rows() != d1 * d2 || a.cols() != d1 * d2)
        throw std::invalid_argument("partial_trace: dims do not factor the matrix");
    if (which == 1) {
        CMatrix out(d2, d2);
        for (std::size_t k = 0; k < d1; ++k)
            for (std::size_t i = 0; i < d2; ++i)
                for (std::size_t j = 0; j < d2; ++j)
                    out(i, j) += a(k * d2 + i, k * d2 + j);
        return out;
    }
    if (which == 2) {
        CMatrix out(d1, d1);
        for (std::size_t i = 0; i < d1; ++i)
            for (std::size_t j = 0; j < d1; ++j)
                for (std::size_t k = 0; k < d2; ++k)
                    out(i, j) += a(i * d2 + k, j * d2 + k);
        return out;
    }
    throw std::invalid_argument("partial_trace: subsystem must be 1 or 2");
}

CMatrix partial_transpose(const CMatrix& a, int which, std::size_t d1, std::size_t d2) {
    if (a.rows() != d1 * d2 || a.cols() != d1 * d2)
        throw std::invalid_argument("partial_transpose: dims do not factor the matrix");
    if (which != 1 && which != 2)
        throw std::invalid_argument("partial_transpose: subsystem must be 1 or 2");
    CMatrix out(a.rows(), a.cols());
    for (std::size_t i1 = 0; i1 < d1; ++i1)
        for (std::size_t i2 = 0; i2 < d2; ++i2)
            for (std::size_t j1 = 0; j1 < d1; ++j1)
                for (std::size_t j2 = 0; j2 < d2; ++j2) {
                    if (which == 1)
                        out(i1 * d2 + i2, j1 * d2 + j2) = a(j1 * d2 + i2, i1 * d2 + j2);
                    else
                        out(i1 * d2 + i2, j1 * d2 + j2) = a(i1 * d2 + j2, j1 * d2 + i2);
                }
    return out;
}

CMatrix partial_trace_keep(const CMatrix& a, const std::vector<std::size_t>& dims,
                           const std::vector<std::size_t>& keep) {
    std::size_t total = 1;
    for (auto d : dims) total *= d;
    if (a.rows() != total || a.cols() != total)
        throw std::invalid_argument("partial_trace_keep: dims do not factor the matrix");

    std::vector<bool> kept(dims.size(), false);
    std::size_t dkeep = 1, dtrace = 1;
    for (auto k : keep) {
        kept.at(k) = true;
        dkeep *= dims[k];
    }
    for (std::size_t f = 0; f < dims.size(); ++f)
        if (!kept[f]) dtrace *= dims[f];

    // strides of each factor in the full lexicographic index
    std::vector<std::size_t> stride(dims.size(), 1);
    for (std::size_t f = dims.size(); f-- > 1;) stride[f - 1] = stride[f] * dims[f];

    // full index = kept-part index expanded + traced-part index expanded
    auto expand = [&](std::size_t packed, bool want_kept) {
        std::size_t full = 0;
        for (std::size_t f = dims.size(); f-- > 0;) {
            if (kept[f] != want_kept) continue;
            full += (packed % dims[f]) * stride[f];
            packed /= dims[f];
        }
        return full;
    };

    CMatrix out(dkeep, dkeep);
    for (std::size_t i = 0; i < dkeep; ++i) {
        const std::size_t fi = expand(i, true);
        for (std::size_t j = 0; j < dkeep; ++j) {
            const std::size_t fj = expand(j, true);
            cplx s = 0.0;
            for (std::size_t m = 0; m < dtrace; ++m) {
                const std::size_t fm = expand(m, false);
                s += a(fi + fm, fj + fm);
            }
            out(i, j) = s;
        }
    }
    return out;
}

}  // namespace qadd
