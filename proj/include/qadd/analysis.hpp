#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "qadd/certificate.hpp"
#include "qadd/channel.hpp"
#include "qadd/info.hpp"

namespace qadd {

struct OptimizationReport {
    double value = 0.0;
    CMatrix argmax;                      // density matrix achieving value
    std::size_t restarts = 0;
    bool converged = false;
    std::vector<double> restart_values;  // best value per restart
    bool diagonal_warning = false;       // diagonal restriction without a known justification
};

enum class Q1Strategy { Auto, DiagonalGrid, Multistart };

/// Maximal one-shot coherent information max_rho I_c(rho, N).
OptimizationReport q1(const Channel& n, Q1Strategy strategy = Q1Strategy::Auto);

/// One-parameter restriction of the maximization for the qutrit family:
/// diagonal inputs diag(u, 1-u) on span{|0>,|1>} when 1-s-t <= s, else on
/// span{|0>,|2>}. Returns (u*, value); golden section to 1e-8 in u.
std::pair<double, double> q1_platypus_restricted(double s, double t);

/// Decides (anti-)degradability from the transfer-matrix factorization, with
/// a constructive fallback for flag-recorded damping mixtures.
Certificate degradability_certificate(const Channel& n);

struct SimulationCheck {
    bool simulation_ok = false;  // d o nhat o e reproduces n on matrix units
    bool domination_ok = false;  // q1(nhat) <= q1(n) + slack
    double residual = 0.0;
    double q1_n = 0.0, q1_hat = 0.0;
};

SimulationCheck simulation_additivity_check(const Channel& n, const Channel& nhat,
                                            const Channel& e, const Channel& d);

/// Joint state on A (x) C purifying the ensemble on orthogonal C sectors;
/// d_C is the sum of the state ranks. Satisfies
/// I_c(rho_AC, N (x) erasure(d_C, 1/2)) = private_information(ens, N) / 2.
std::pair<CMatrix, std::size_t> smith_yard_state(const Ensemble& ens, const Channel& n);

struct RateEstimate {
    double rate = 0.0;
    double residual = 0.0;
    std::vector<double> eps_grid;
};

/// Slope of S(sigma(eps)) - S(sigma(0)) against eps * |log2 eps| (least
/// squares with an eps correction term; the two largest eps are dropped when
/// that improves the fit).
RateEstimate log_singularity_rate(const std::function<CMatrix(double)>& family,
                                  std::vector<double> eps_grid);

std::vector<double> default_eps_grid(double lo = 1e-6, double hi = 1e-2, std::size_t n = 12);

struct AmplificationReport {
    std::vector<double> eps_grid;
    std::vector<double> gain;  // I_c(rho(eps), N (x) erasure) - q1(N) - q1(erasure)
    double u_star = 0.0;
    double q1_value = 0.0;
    double r_b = 0.0, r_e = 0.0;                    // fitted singularity rates
    double r_b_analytic = 0.0, r_e_analytic = 0.0;  // closed forms
    double lambda_bound = 0.0;                      // upper end of the workable lambda range
    bool second_branch = false;                     // s >= (1-t)/2
};

/// Entangled perturbation of the product optimizer of the qutrit family
/// tensored with a qubit erasure channel; positive gain exhibits
/// superadditivity of the one-shot rate.
AmplificationReport platypus_amplification(double s, double t, double lambda,
                                           std::vector<double> eps_grid);

struct RatioEstimate {
    double value = 0.0;
    CMatrix argmin;
    std::size_t samples_used = 0;
};

/// Upper bound on inf over rho_VA of
/// (I(V;B1)-I(V;E1)) / (I(V;B2)-I(V;E2)); near-product samples with
/// denominator below 1e-8 are excluded.
RatioEstimate mi_ratio_R3(const Channel& n1, const Channel& n2, std::size_t dim_v,
                          std::size_t samples, bool local_refine, std::uint64_t seed);

/// (sup, inf) estimates of I(V;B1)/I(V;B2) over sampled inputs.
std::pair<double, double> contraction_coefficients(const Channel& n1, const Channel& n2,
                                                   std::size_t dim_v, std::size_t samples,
                                                   std::uint64_t seed);

struct ScalingFit {
    double c2_log = 0.0;      // fitted coefficient of eps^2 * log2(eps)
    double predicted = 0.0;   // -(1-gamma)/(4 gamma)
    double residual = 0.0;
    std::vector<double> eps_grid;
};

/// Mutual information of the near-product perturbation family through the
/// damping channel; its leading singular term is quadratic-logarithmic.
ScalingFit epsilon_scaling_mi(double gamma, std::vector<double> eps_grid);

struct FeasibilityResult {
    bool feasible = false;
    double violation = 0.0;  // CP/TP violation of the best affine-consistent candidate
    std::size_t iterations = 0;
    std::optional<Channel> map;
};

/// Searches for a channel D with D o from = to by alternating projections
/// between the affine constraint on the transfer matrix and the CPTP cone in
/// Choi coordinates. Decisive either way once the boundary is not too close:
/// a feasible point converges below 1e-7, an infeasible one plateaus above it.
FeasibilityResult cptp_factor_feasibility(const Channel& from, const Channel& to,
                                          std::size_t max_iter = 5000);

struct FixedPointReport {
    bool unique = false;       // Kraus words span the full operator algebra
    std::size_t span_dim = 0;  // dimension reached at the probed word length
    std::optional<CMatrix> fixed_state;
};

/// Sufficient uniqueness criterion for the fixed state of a channel with
/// equal in/out dims: the span of all Kraus products of length <= max_len
/// reaching the full matrix algebra. A false result is inconclusive.
FixedPointReport unique_fixed_point_check(const Channel& n, std::size_t max_len);

}  // namespace qadd
