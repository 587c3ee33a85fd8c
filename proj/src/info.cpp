#include "qadd/info.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qadd/eig.hpp"

namespace qadd {

bool is_state(const CMatrix& rho, double tol) {
    if (!rho.square()) return false;
    if (rho.hermiticity_defect() > tol) return false;
    if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
        return false;
    return psd_check(rho.symmetrized(), tol).psd;
}

void require_state(const CMatrix& rho, double tol) {
    if (!is_state(rho, tol)) throw std::invalid_argument("expected a density matrix");
}

void Ensemble::validate() const {
    if (ps.size() != states.size() || ps.empty())
        throw std::invalid_argument("Ensemble: length mismatch");
    double sum = 0.0;
    for (double p : ps) {
        if (p < -1e-12) throw std::invalid_argument("Ensemble: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("Ensemble: probabilities not normalized");
    for (const auto& s : states) {
        if (s.rows() != dim()) throw std::invalid_argument("Ensemble: states on different spaces");
        require_state(s, 1e-8);
    }
}

namespace {

double entropy_of_spectrum(const std::vector<double>& ev) {
    double s = 0.0;
    for (double v : ev)
        if (v > 1e-15) s -= v * std::log2(v);
    return s;
}

}  // namespace

double entropy(const CMatrix& rho) {
    require_state(rho, 1e-8);
    return entropy_of_spectrum(hermitian_eig(rho.symmetrized()).eigenvalues);
}

double binary_entropy(double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("binary_entropy: argument outside [0,1]");
    double s = 0.0;
    if (x > 0.0) s -= x * std::log2(x);
    if (x < 1.0) s -= (1.0 - x) * std::log2(1.0 - x);
    return s;
}

double entropy_of_subsystem(const CMatrix& rho, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep) {
    return entropy_of_spectrum(
        hermitian_eig(partial_trace_keep(rho, dims, keep).symmetrized()).eigenvalues);
}

std::optional<double> relative_entropy(const CMatrix& rho, const CMatrix& sigma) {
    require_state(rho, 1e-8);
    if (sigma.rows() != rho.rows()) throw std::invalid_argument("relative_entropy: dim mismatch");
    const HermEig es = hermitian_eig(sigma.symmetrized());
    const double smax = std::max(std::abs(es.eigenvalues.front()), 1e-300);
    if (es.eigenvalues.back() < -1e-10 * smax)
        throw std::invalid_argument("relative_entropy: sigma is not PSD");
    const double cutoff = 1e-12 * smax;

    // mass of rho on the kernel of sigma decides finiteness
    const std::size_t d = rho.rows();
    double off_support = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        if (es.eigenvalues[k] > cutoff) continue;
        cplx m = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                m += std::conj(es.eigenvectors(i, k)) * rho(i, j) * es.eigenvectors(j, k);
        off_support += m.real();
    }
    if (off_support > 1e-9) return std::nullopt;

    const HermEig er = hermitian_eig(rho.symmetrized());
    double val = -entropy_of_spectrum(er.eigenvalues);  // Tr rho log rho
    // -Tr rho log sigma in sigma's eigenbasis
    for (std::size_t k = 0; k < d; ++k) {
        if (es.eigenvalues[k] <= cutoff) continue;
        cplx m = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                m += std::conj(es.eigenvectors(i, k)) * rho(i, j) * es.eigenvectors(j, k);
        val -= m.real() * std::log2(es.eigenvalues[k]);
    }
    return val;
}

double mutual_information(const CMatrix& rho_vb, std::size_t dv, std::size_t db) {
    if (rho_vb.rows() != dv * db)
        throw std::invalid_argument("mutual_information: dims do not factor the state");
    const double sv = entropy_of_spectrum(
        hermitian_eig(partial_trace(rho_vb, 2, dv, db).symmetrized()).eigenvalues);
    const double sb = entropy_of_spectrum(
        hermitian_eig(partial_trace(rho_vb, 1, dv, db).symmetrized()).eigenvalues);
    const double svb = entropy(rho_vb);
    return sv + sb - svb;
}

double conditional_mutual_information(const CMatrix& rho_vwb, std::size_t dv, std::size_t dw,
                                      std::size_t db) {
    if (rho_vwb.rows() != dv * dw * db)
        throw std::invalid_argument("conditional_mutual_information: dims do not factor");
    const double i_v_wb = mutual_information(rho_vwb, dv, dw * db);
    const CMatrix rho_vw = partial_trace_keep(rho_vwb, {dv, dw, db}, {0, 1});
    const double i_v_w = mutual_information(rho_vw, dv, dw);
    return i_v_wb - i_v_w;
}

double coherent_information(const CMatrix& rho, const Channel& n) {
    require_state(rho, 1e-8);
    const double sb = entropy_of_spectrum(hermitian_eig(n.apply(rho).symmetrized()).eigenvalues);
    const double se = entropy_of_spectrum(
        hermitian_eig(n.complement().apply(rho).symmetrized()).eigenvalues);
    return sb - se;
}

double private_information(const Ensemble& ens, const Channel& n) {
    ens.validate();
    const std::size_t nx = ens.ps.size();
    const Channel nc = n.complement();
    CMatrix cq_b(nx * n.out_dim(), nx * n.out_dim());
    CMatrix cq_e(nx * nc.out_dim(), nx * nc.out_dim());
    for (std::size_t x = 0; x < nx; ++x) {
        const CMatrix ob = n.apply(ens.states[x]);
        const CMatrix oe = nc.apply(ens.states[x]);
        for (std::size_t i = 0; i < n.out_dim(); ++i)
            for (std::size_t j = 0; j < n.out_dim(); ++j)
                cq_b(x * n.out_dim() + i, x * n.out_dim() + j) = ens.ps[x] * ob(i, j);
        for (std::size_t i = 0; i < nc.out_dim(); ++i)
            for (std::size_t j = 0; j < nc.out_dim(); ++j)
                cq_e(x * nc.out_dim() + i, x * nc.out_dim() + j) = ens.ps[x] * oe(i, j);
    }
    return mutual_information(cq_b, nx, n.out_dim()) - mutual_information(cq_e, nx, nc.out_dim());
}

double telescoping_check(const CMatrix& rho, const std::vector<std::size_t>& dims_b,
                         const std::vector<std::size_t>& dims_e) {
    const std::size_t n = dims_b.size();
    if (n < 2 || dims_e.size() != n)
        throw std::invalid_argument("telescoping_check: need n >= 2 matched factors");
    std::vector<std::size_t> dims = dims_b;
    dims.insert(dims.end(), dims_e.begin(), dims_e.end());
    // factor f is B_{f+1} for f < n, E_{f-n+1} for f >= n
    std::vector<std::size_t> all_b(n), all_e(n);
    std::iota(all_b.begin(), all_b.end(), 0);
    std::iota(all_e.begin(), all_e.end(), n);

    const double lhs = entropy_of_subsystem(rho, dims, all_b) - entropy_of_subsystem(rho, dims, all_e);
    double rhs = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        std::vector<std::size_t> v;
        if (i == 1) {
            for (std::size_t k = 2; k <= n; ++k) v.push_back(k - 1);  // B_2..B_n
        } else if (i == n) {
            for (std::size_t k = 1; k <= n - 1; ++k) v.push_back(n + k - 1);  // E_1..E_{n-1}
        } else {
            for (std::size_t k = 1; k <= i - 1; ++k) v.push_back(n + k - 1);
            for (std::size_t k = i + 1; k <= n; ++k) v.push_back(k - 1);
        }
        std::vector<std::size_t> bv = v, ev = v;
        bv.push_back(i - 1);
        ev.push_back(n + i - 1);
        std::sort(bv.begin(), bv.end());
        std::sort(ev.begin(), ev.end());
        rhs += entropy_of_subsystem(rho, dims, bv) - entropy_of_subsystem(rho, dims, ev);
    }
    return std::abs(lhs - rhs);
}

double trace_distance(const CMatrix& rho, const CMatrix& sigma) {
    const HermEig eg = hermitian_eig((rho - sigma).symmetrized());
    double s = 0.0;
    for (double v : eg.eigenvalues) s += std::abs(v);
    return 0.5 * s;
}

}  // namespace qadd
