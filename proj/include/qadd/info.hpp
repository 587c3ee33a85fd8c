#pragma once

#include <optional>
#include <vector>

#include "qadd/channel.hpp"
#include "qadd/cmatrix.hpp"

namespace qadd {

/// State check with the standard tolerances (Hermitian 1e-10, PSD -1e-10,
/// trace 1e-10).
bool is_state(const CMatrix& rho, double tol = 1e-10);
void require_state(const CMatrix& rho, double tol = 1e-10);

struct Ensemble {
    std::vector<double> ps;
    std::vector<CMatrix> states;  // on a common space

    void validate() const;
    std::size_t dim() const { return states.front().rows(); }
};

/// Von Neumann entropy in bits.
double entropy(const CMatrix& rho);
double binary_entropy(double x);

/// Entropy of the reduction to the `keep` factors of a multipartite state.
double entropy_of_subsystem(const CMatrix& rho, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep);

/// Relative entropy D(rho||sigma) in bits; empty when supp(rho) is not
/// contained in supp(sigma) (the +infinity case is a decision, not a float).
std::optional<double> relative_entropy(const CMatrix& rho, const CMatrix& sigma);

/// I(V;B) of a bipartite state with the given factor dims.
double mutual_information(const CMatrix& rho_vb, std::size_t dv, std::size_t db);

/// I(V;B|W) = I(V;BW) - I(V;W) on a state over V (x) W (x) B.
double conditional_mutual_information(const CMatrix& rho_vwb, std::size_t dv, std::size_t dw,
                                      std::size_t db);

/// S(N(rho)) - S(N^c(rho)).
double coherent_information(const CMatrix& rho, const Channel& n);

/// I(X;B) - I(X;E) for the classical-quantum states induced by the ensemble.
double private_information(const Ensemble& ens, const Channel& n);

/// Residual of the entropy telescoping identity on a state over
/// B_1..B_n (x) E_1..E_n (factor dims listed in that order).
double telescoping_check(const CMatrix& rho, const std::vector<std::size_t>& dims_b,
                         const std::vector<std::size_t>& dims_e);

/// (1/2)||rho - sigma||_1.
double trace_distance(const CMatrix& rho, const CMatrix& sigma);

}  // namespace qadd
