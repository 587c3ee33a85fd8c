#include "qadd/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qadd {

namespace {

// Cyclic Jacobi on a Hermitian matrix. Rotations chosen to annihilate the
// (p,q) entry; accumulates the eigenvector matrix in v.
void jacobi_eig(CMatrix& a, CMatrix& v) {
    const std::size_t n = a.rows();
    const double scale = std::max(a.max_abs(), 1.0);
    const double stop = 1e-15 * scale;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= stop) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double h = std::abs(a(p, q));
                if (h <= stop * 1e-2) continue;
                const cplx w = a(p, q) / h;  // unimodular phase
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const double th = (aqq - app) / (2.0 * h);
                double t = 1.0 / (std::abs(th) + std::sqrt(th * th + 1.0));
                if (th < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const cplx sw = s * w, swc = s * std::conj(w);
                // rows p,q of a  (J^dag A)
                for (std::size_t j = 0; j < n; ++j) {
                    const cplx apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - sw * aqj;
                    a(q, j) = swc * apj + c * aqj;
                }
                // columns p,q of a  (A J)
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - swc * aiq;
                    a(i, q) = sw * aip + c * aiq;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - swc * viq;
                    v(i, q) = sw * vip + c * viq;
                }
            }
        }
    }
}

// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
// form (d = diagonal, e = subdiagonal), accumulating the transform in q.
void householder_tridiag(CMatrix a, CMatrix& q, std::vector<double>& d,
                         std::vector<double>& e) {
    const std::size_t n = a.rows();
    q = CMatrix::identity(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        // column k below the diagonal
        double xnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(a(i, k));
        const double xnorm = std::sqrt(xnorm2);
        if (xnorm < 1e-300) continue;
        cplx x0 = a(k + 1, k);
        cplx phase = (std::abs(x0) > 0.0) ? x0 / std::abs(x0) : cplx(1.0, 0.0);
        const cplx alpha = -phase * xnorm;
        // v = x - alpha e_0, reflector P = I - 2 v v^dag / |v|^2
        std::vector<cplx> vv(n, 0.0);
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            vv[i] = a(i, k) - ((i == k + 1) ? alpha : cplx(0.0, 0.0));
            vnorm2 += std::norm(vv[i]);
        }
        if (vnorm2 < 1e-300) continue;
        const double beta = 2.0 / vnorm2;
        // a <- P a P
        std::vector<cplx> w(n, 0.0);  // w = beta * a * v
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * vv[j];
            w[i] = beta * s;
        }
        cplx vw = 0.0;  // v^dag w
        for (std::size_t i = k + 1; i < n; ++i) vw += std::conj(vv[i]) * w[i];
        // a <- a - v u^dag - u v^dag with u = w - (beta/2)(v^dag w) v
        std::vector<cplx> u(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) u[i] = w[i] - 0.5 * beta * vw * vv[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                a(i, j) -= vv[i] * std::conj(u[j]) + u[i] * std::conj(vv[j]);
        // q <- q P
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += q(i, j) * vv[j];
            s *= beta;
            for (std::size_t j = k + 1; j < n; ++j) q(i, j) -= s * std::conj(vv[j]);
        }
    }
    // phase-rotate so the subdiagonal is real nonnegative
    std::vector<cplx> dv(n, 1.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const cplx sub = a(k + 1, k);
        const double m = std::abs(sub);
        dv[k + 1] = (m > 1e-300) ? dv[k] * (sub / m) : dv[k];
    }
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = a(i, i).real();
        if (i + 1 < n) e[i + 1] = std::abs(a(i + 1, i));
        for (std::size_t r = 0; r < n; ++r) q(r, i) *= dv[i];
    }
}

// Implicit-shift QL on a real symmetric tridiagonal matrix; eigenvectors
// accumulate into the complex columns of z. Classic tql2 recurrence.
void tql2(std::vector<double>& d, std::vector<double>& e, CMatrix& z) {
    const std::size_t n = d.size();
    if (n == 0) return;
    // e[0] unused; shift so e[i] couples d[i] and d[i+1]
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (++iter > 60) throw std::runtime_error("tql2: no convergence");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i], b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t k = 0; k < n; ++k) {
                        const cplx zk1 = z(k, i + 1), zk0 = z(k, i);
                        z(k, i + 1) = s * zk0 + c * zk1;
                        z(k, i) = c * zk0 - s * zk1;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

HermEig hermitian_eig(const CMatrix& a) {
    if (!a.square()) throw std::invalid_argument("hermitian_eig: non-square input");
    const std::size_t n = a.rows();
    if (a.hermiticity_defect() > 1e-8 * (1.0 + a.max_abs()))
        throw std::invalid_argument("hermitian_eig: input is not Hermitian");
    CMatrix h = a.symmetrized();

    HermEig out;
    std::vector<double> vals(n);
    CMatrix vecs;
    if (n <= 32) {
        vecs = CMatrix::identity(n);
        jacobi_eig(h, vecs);
        for (std::size_t i = 0; i < n; ++i) vals[i] = h(i, i).real();
    } else {
        std::vector<double> d, e;
        householder_tridiag(h, vecs, d, e);
        tql2(d, e, vecs);
        vals = d;
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return vals[i] > vals[j]; });
    out.eigenvalues.resize(n);
    out.eigenvectors = CMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = vals[idx[k]];
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = vecs(r, idx[k]);
    }
    return out;
}

CMatrix matrix_fn(const CMatrix& a, MatFn fn) {
    const HermEig eg = hermitian_eig(a);
    const std::size_t n = a.rows();
    double amax = 0.0;
    for (double v : eg.eigenvalues) amax = std::max(amax, std::abs(v));
    const double cutoff = 1e-12 * std::max(amax, 1e-300);
    for (double v : eg.eigenvalues)
        if (v < -cutoff && v < -1e-12)
            throw std::invalid_argument("matrix_fn: input is not PSD");

    std::vector<double> fv(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double v = eg.eigenvalues[k];
        if (v <= cutoff) continue;  // exact zero on the numeric support
        switch (fn) {
            case MatFn::Log2: fv[k] = std::log2(v); break;
            case MatFn::Sqrt: fv[k] = std::sqrt(v); break;
            case MatFn::InvSqrt: fv[k] = 1.0 / std::sqrt(v); break;
        }
    }
    CMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += eg.eigenvectors(i, k) * fv[k] * std::conj(eg.eigenvectors(j, k));
            out(i, j) = s;
        }
    return out;
}

PsdResult psd_check(const CMatrix& a, double tol) {
    const HermEig eg = hermitian_eig(a);
    const double mn = eg.eigenvalues.empty() ? 0.0 : eg.eigenvalues.back();
    return {mn >= -tol, mn};
}

CMatrix pinv(const CMatrix& m, double rel_cutoff) {
    // m = U S V^dag from the eigensystem of m^dag m; pinv = V S^+ U^dag
    const CMatrix mtm = (m.dagger() * m).symmetrized();
    const HermEig eg = hermitian_eig(mtm);
    const std::size_t r = m.rows(), c = m.cols();
    const double smax2 = eg.eigenvalues.empty() ? 0.0 : std::max(eg.eigenvalues[0], 0.0);
    const double cut2 = rel_cutoff * rel_cutoff * std::max(smax2, 1e-300);
    CMatrix out(c, r);
    for (std::size_t k = 0; k < c; ++k) {
        const double s2 = eg.eigenvalues[k];
        if (s2 <= cut2) continue;
        // u_k = m v_k / s_k ; contribute v_k u_k^dag / s_k = v_k (m v_k)^dag / s_k^2
        std::vector<cplx> mv(r, 0.0);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) mv[i] += m(i, j) * eg.eigenvectors(j, k);
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t j = 0; j < r; ++j)
                out(i, j) += eg.eigenvectors(i, k) * std::conj(mv[j]) / s2;
    }
    return out;
}

double condition_number(const CMatrix& m) {
    const CMatrix mtm = (m.dagger() * m).symmetrized();
    const HermEig eg = hermitian_eig(mtm);
    const double top = std::max(eg.eigenvalues.front(), 0.0);
    const double bot = eg.eigenvalues.back();
    if (bot <= 1e-26 * std::max(top, 1e-300)) return std::numeric_limits<double>::infinity();
    return std::sqrt(top / bot);
}

CMatrix solve_xa_b(const CMatrix& a, const CMatrix& b, double rel_cutoff) {
    return b * pinv(a, rel_cutoff);
}

}  // namespace qadd
