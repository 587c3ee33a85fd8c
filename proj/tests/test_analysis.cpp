#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "qadd/analysis.hpp"
#include "qadd/eig.hpp"
#include "qadd/zoo.hpp"

using namespace qadd;

namespace {

Channel identity_channel(std::size_t d) { return Channel::from_kraus({CMatrix::identity(d)}); }

double check_map(const Channel& d, const Channel& from, const Channel& to) {
    double r = 0.0;
    for (std::size_t i = 0; i < from.in_dim(); ++i)
        for (std::size_t j = 0; j < from.in_dim(); ++j) {
            const CMatrix u = CMatrix::unit(from.in_dim(), i, j);
            r = std::max(r, (d.apply(from.apply(u)) - to.apply(u)).max_abs());
        }
    return r;
}

// the near-product two-qubit family whose mutual information through a
// damping channel has a quadratic-logarithmic leading term
CMatrix scaling_state(double eps) {
    CMatrix rho(4, 4);
    rho(1, 1) = rho(2, 2) = rho(1, 2) = rho(2, 1) = eps / 2.0;
    rho(3, 3) = 1.0 - eps;
    return rho;
}

}  // namespace

TEST_CASE("q1 of the identity qubit channel is one bit at the maximally mixed state") {
    const OptimizationReport rep = q1(identity_channel(2), Q1Strategy::Multistart);
    CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(rep.restarts == 32);
    CHECK((rep.argmax - cplx(0.5) * CMatrix::identity(2)).max_abs() < 1e-3);
    CHECK_FALSE(rep.diagonal_warning);
}

TEST_CASE("q1 of dephasing matches the closed form") {
    for (double a : {0.0, 0.4, 0.9}) {
        const OptimizationReport rep = q1(dephasing(a));
        CHECK(rep.value == doctest::Approx(dephasing_q1(a)).epsilon(1e-4));
        CHECK_FALSE(rep.diagonal_warning);
    }
}

TEST_CASE("q1 of erasure is max(0, 1-2 lambda)") {
    CHECK(q1(erasure(2, 0.3)).value == doctest::Approx(0.4).epsilon(1e-4));
    CHECK(q1(erasure(2, 0.5)).value == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("restricted qutrit maximization: branches, vanishing regime, bounds") {
    // anti-degradable regime: the best restricted input is the pure |0>
    const auto [u0, v0] = q1_platypus_restricted(0.2, 0.6);
    CHECK(std::abs(v0) < 1e-6);

    // generic point: value positive, in (0, 1), u in the interior
    const auto [u1, v1] = q1_platypus_restricted(0.3, 0.2);
    CHECK(v1 > 0.01);
    CHECK(v1 < 1.0);
    CHECK(u1 > 0.0);
    CHECK(u1 < 1.0);
}

TEST_CASE("full qutrit maximization agrees with the restricted one") {
    const double s = 0.3, t = 0.2;
    const auto [u, v] = q1_platypus_restricted(s, t);

    const OptimizationReport diag = q1(platypus(s, t), Q1Strategy::DiagonalGrid);
    CHECK(diag.value == doctest::Approx(v).epsilon(1e-6));

    const OptimizationReport multi = q1(platypus(s, t), Q1Strategy::Multistart);
    CHECK(multi.value == doctest::Approx(v).epsilon(1e-4));
    CHECK(multi.value > v - 1e-4);

    const OptimizationReport autod = q1(platypus(s, t));
    CHECK(autod.value == doctest::Approx(v).epsilon(1e-9));
    CHECK(coherent_information(autod.argmax, platypus(s, t)) ==
          doctest::Approx(v).epsilon(1e-9));
}

TEST_CASE("diagonal grid on a generic channel raises the warning flag") {
    const Channel n = Channel::from_kraus(amplitude_damping(0.3).kraus());  // family erased
    CHECK(q1(n, Q1Strategy::DiagonalGrid).diagonal_warning);
    CHECK_FALSE(q1(amplitude_damping(0.3), Q1Strategy::DiagonalGrid).diagonal_warning);
}

TEST_CASE("certificate: damping channels on both sides of the symmetric point") {
    const Certificate low = degradability_certificate(amplitude_damping(0.3));
    CHECK(low.verdict == Verdict::Degradable);
    REQUIRE(low.degrading_map.has_value());
    CHECK(check_map(*low.degrading_map, amplitude_damping(0.3),
                    amplitude_damping(0.3).complement()) < 1e-8);
    CHECK(low.residual < 1e-8);

    const Certificate high = degradability_certificate(amplitude_damping(0.7));
    CHECK(high.verdict == Verdict::AntiDegradable);
    REQUIRE(high.antidegrading_map.has_value());
    CHECK(check_map(*high.antidegrading_map, amplitude_damping(0.7).complement(),
                    amplitude_damping(0.7)) < 1e-8);
}

TEST_CASE("certificate: complement consistency") {
    const Certificate c = degradability_certificate(amplitude_damping(0.3).complement());
    CHECK(c.verdict == Verdict::AntiDegradable);
}

TEST_CASE("certificate: qutrit family") {
    const Certificate anti = degradability_certificate(platypus(0.2, 0.6));
    CHECK(anti.verdict == Verdict::AntiDegradable);
    REQUIRE(anti.antidegrading_map.has_value());
    CHECK(check_map(*anti.antidegrading_map, platypus(0.2, 0.6).complement(),
                    platypus(0.2, 0.6)) < 1e-7);

    const Certificate neither = degradability_certificate(platypus(0.3, 0.3));
    CHECK(neither.verdict == Verdict::Neither);
    CHECK_FALSE(neither.degrading_map.has_value());
    CHECK(neither.witness.find("degrading") != std::string::npos);
}

TEST_CASE("certificate: flag-recorded damping mixtures use the exact classifier") {
    const Certificate deg = degradability_certificate(flagged_ad(0.8, 0.7, 0.2));
    CHECK(deg.verdict == Verdict::Degradable);
    REQUIRE(deg.degrading_map.has_value());
    CHECK(check_map(*deg.degrading_map, flagged_ad(0.8, 0.7, 0.2),
                    flagged_ad(0.8, 0.7, 0.2).complement()) < 1e-9);

    const Certificate anti = degradability_certificate(flagged_ad(0.8, 0.7, 0.6));
    CHECK(anti.verdict == Verdict::AntiDegradable);
    REQUIRE(anti.antidegrading_map.has_value());
    CHECK(check_map(*anti.antidegrading_map, flagged_ad(0.8, 0.7, 0.6).complement(),
                    flagged_ad(0.8, 0.7, 0.6)) < 1e-9);

    CHECK(degradability_certificate(flagged_ad(0.8, 0.2, 0.7)).verdict == Verdict::Neither);
    CHECK(degradability_certificate(flagged_ad(0.5, 0.4, 0.6)).verdict == Verdict::Both);
}

TEST_CASE("simulation check: merged dephasing pair reproduces the 4-to-3 channel") {
    const double a = 0.5;
    const auto [e, d] = gao_factorization();
    const Channel nhat = direct_sum({dephasing(a), dephasing(a)});
    const SimulationCheck sc = simulation_additivity_check(gao_channel(a), nhat, e, d);
    CHECK(sc.simulation_ok);
    CHECK(sc.residual < 1e-12);
    CHECK(sc.q1_n == doctest::Approx(dephasing_q1(a)).epsilon(1e-4));
    CHECK(sc.domination_ok);
}

TEST_CASE("simulation check: half-excited simulator of the qutrit damping channel") {
    const double g0 = 0.5, g1 = 0.2;  // gamma2 = 0.3 < 1/2
    const auto sim = mad_degradable_simulator(g0, g1);
    REQUIRE(sim.has_value());
    const auto [g0p, g1p] = *sim;
    const Channel nhat = mad_channel(g0p, g1p);
    const Channel rest = mad_channel(2.0 * (g0 - g0p), 2.0 * (g1 - g1p));
    const SimulationCheck sc =
        simulation_additivity_check(mad_channel(g0, g1), nhat, identity_channel(3), rest);
    CHECK(sc.simulation_ok);
    CHECK(sc.q1_hat == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(sc.q1_n >= 1.0 - 1e-4);
    CHECK(sc.domination_ok);
}

TEST_CASE("simulation check: qutrit channel factors through its qubit restriction") {
    const double s = 0.75, t = 0.25;
    // merge map |0><0| + |1><1|, |1><2| sends the qutrit onto the qubit input
    CMatrix k0(2, 3), k1(2, 3);
    k0(0, 0) = 1.0;
    k0(1, 1) = 1.0;
    k1(1, 2) = 1.0;
    const Channel merge = Channel::from_kraus({k0, k1});
    const SimulationCheck sc = simulation_additivity_check(
        platypus(s, t), platypus_subchannel(s, t), merge, identity_channel(3));
    CHECK(sc.simulation_ok);
    CHECK(sc.domination_ok);
    CHECK(sc.q1_hat == doctest::Approx(sc.q1_n).epsilon(1e-3));
}

TEST_CASE("simulation check: trivial self-simulation") {
    const Channel n = amplitude_damping(0.3);
    const SimulationCheck sc =
        simulation_additivity_check(n, n, identity_channel(2), identity_channel(2));
    CHECK(sc.simulation_ok);
    CHECK(sc.domination_ok);
    CHECK(sc.q1_n == doctest::Approx(sc.q1_hat).epsilon(1e-9));
}

TEST_CASE("reference-system state halves the private information") {
    // orthogonal pure ensemble through the identity: one private bit
    Ensemble ens;
    ens.ps = {0.5, 0.5};
    ens.states = {CMatrix::diag({1.0, 0.0}), CMatrix::diag({0.0, 1.0})};
    const Channel id2 = identity_channel(2);
    const double ip = private_information(ens, id2);
    CHECK(ip == doctest::Approx(1.0).epsilon(1e-10));

    const auto [rho_ac, dc] = smith_yard_state(ens, id2);
    CHECK(dc == 2);
    CHECK(is_state(rho_ac, 1e-9));
    const Channel joint = tensor(id2, erasure(dc, 0.5));
    CHECK(coherent_information(rho_ac, joint) == doctest::Approx(0.5 * ip).epsilon(1e-8));
}

TEST_CASE("reference-system state for a mixed qutrit ensemble") {
    const double s = 0.3, t = 0.3, u = 0.5;
    Ensemble ens;
    ens.ps = {0.5, 0.5};
    ens.states = {CMatrix::diag({1.0, 0.0, 0.0}), CMatrix::diag({0.0, u, 1.0 - u})};
    const Channel n = platypus(s, t);
    const double ip = private_information(ens, n);

    const auto [rho_ac, dc] = smith_yard_state(ens, n);
    CHECK(dc == 3);
    CHECK(is_state(rho_ac, 1e-9));
    const Channel joint = tensor(n, erasure(dc, 0.5));
    CHECK(coherent_information(rho_ac, joint) == doctest::Approx(0.5 * ip).epsilon(1e-8));
}

TEST_CASE("entropy rate fits on the displayed perturbation families") {
    const double a = 0.6, b = 0.3;
    const auto grid = default_eps_grid();

    // support-leaking diagonal perturbation: rate b
    auto diag_family = [&](double eps) {
        return CMatrix::diag({a - b * eps, 1.0 - a, b * eps});
    };
    const RateEstimate r1 = log_singularity_rate(diag_family, grid);
    CHECK(r1.rate == doctest::Approx(b).epsilon(0.02));

    // adding the matched coherence lowers the rate to b(a-b)/a
    auto coh_family = [&](double eps) {
        CMatrix m = diag_family(eps);
        const double c = b * std::sqrt(eps * (1.0 - eps));
        m(0, 2) = c;
        m(2, 0) = c;
        return m;
    };
    const RateEstimate r2 = log_singularity_rate(coh_family, grid);
    CHECK(r2.rate == doctest::Approx(b * (a - b) / a).epsilon(0.05));

    // perturbation inside the support: zero rate
    auto inside_family = [&](double eps) {
        return CMatrix::diag({0.7 + 0.1 * eps, 0.3 - 0.1 * eps});
    };
    const RateEstimate r3 = log_singularity_rate(inside_family, grid);
    CHECK(std::abs(r3.rate) < 0.01);
}

TEST_CASE("entropy rate fit rejects discontinuous families") {
    auto jump = [](double eps) {
        return eps == 0.0 ? CMatrix::diag({1.0, 0.0}) : CMatrix::diag({0.5, 0.5});
    };
    CHECK_THROWS_AS(log_singularity_rate(jump, default_eps_grid()), std::invalid_argument);
}

TEST_CASE("amplification: first branch rates and positive gain at half erasure") {
    const double s = 0.3, t = 0.2, lambda = 0.5;
    const AmplificationReport rep = platypus_amplification(s, t, lambda, {});
    CHECK_FALSE(rep.second_branch);
    CHECK(rep.q1_value > 0.01);
    CHECK(rep.lambda_bound > 0.5);

    CHECK(rep.r_b == doctest::Approx(rep.r_b_analytic).epsilon(0.05));
    CHECK(rep.r_e == doctest::Approx(rep.r_e_analytic).epsilon(0.05));
    CHECK(rep.r_b > rep.r_e);

    double max_gain = -1.0;
    for (double g : rep.gain) max_gain = std::max(max_gain, g);
    CHECK(max_gain > 1e-6);
}

TEST_CASE("amplification: second branch rates") {
    const double s = 0.5, t = 0.2, lambda = 0.5;
    const AmplificationReport rep = platypus_amplification(s, t, lambda, {});
    CHECK(rep.second_branch);
    CHECK(rep.q1_value > 0.01);
    CHECK(rep.r_b == doctest::Approx(rep.r_b_analytic).epsilon(0.05));
    CHECK(rep.r_e == doctest::Approx(rep.r_e_analytic).epsilon(0.05));
    CHECK(rep.r_b > rep.r_e);
}

TEST_CASE("amplification rejects degenerate parameters") {
    CHECK_THROWS_AS(platypus_amplification(0.0, 0.3, 0.5, {}), std::invalid_argument);
    CHECK_THROWS_AS(platypus_amplification(0.4, 0.6, 0.5, {}), std::invalid_argument);
    // vanishing one-shot rate: anti-degradable regime
    CHECK_THROWS_AS(platypus_amplification(0.2, 0.6, 0.5, {}), std::invalid_argument);
}

TEST_CASE("advantage ratio of a channel against itself is one") {
    const Channel n = amplitude_damping(0.3);
    const RatioEstimate r = mi_ratio_R3(n, n, 2, 30, false, 7);
    CHECK(r.samples_used > 0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("advantage ratio on the singular family matches the coefficient ratio") {
    // on the shared perturbation family the information advantages of two
    // damping channels scale with (1-2g)/(4g(1-g)) eps^2 log(1/eps)
    const double g1 = 0.2, g2 = 0.3, eps = 1e-5;
    auto advantage = [&](double g) {
        const Channel b = tensor(identity_channel(2), amplitude_damping(g));
        const Channel e = tensor(identity_channel(2), amplitude_damping(g).complement());
        const CMatrix rho = scaling_state(eps);
        return mutual_information(b.apply(rho), 2, 2) - mutual_information(e.apply(rho), 2, 2);
    };
    auto coeff = [](double g) { return (1.0 - 2.0 * g) / (4.0 * g * (1.0 - g)); };
    CHECK(advantage(g1) / advantage(g2) ==
          doctest::Approx(coeff(g1) / coeff(g2)).epsilon(0.10));
}

TEST_CASE("advantage ratio estimator stays finite on distinct channels") {
    const RatioEstimate r =
        mi_ratio_R3(amplitude_damping(0.2), amplitude_damping(0.3), 2, 36, true, 11);
    CHECK(r.samples_used > 0);
    CHECK(std::isfinite(r.value));
    CHECK(r.value > 0.0);
    CHECK(is_state(r.argmin, 1e-8));
}

TEST_CASE("contraction estimates bracket one for identical channels") {
    const auto [sup, inf] = contraction_coefficients(amplitude_damping(0.3),
                                                     amplitude_damping(0.3), 2, 40, 13);
    CHECK(sup == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(inf == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("contraction estimates are ordered and positive for damping pairs") {
    const auto [sup, inf] = contraction_coefficients(amplitude_damping(0.5),
                                                     amplitude_damping(0.3), 2, 60, 17);
    CHECK(sup >= inf);
    CHECK(inf > 0.0);
    CHECK(sup < 1.0 + 1e-8);  // the second channel is the less noisy one
}

TEST_CASE("quadratic-logarithmic scaling of the near-product mutual information") {
    for (double g : {0.3, 0.5}) {
        const ScalingFit fit = epsilon_scaling_mi(g, {});
        CHECK(fit.predicted == doctest::Approx(-(1.0 - g) / (4.0 * g)).epsilon(1e-12));
        CHECK(fit.c2_log == doctest::Approx(fit.predicted).epsilon(0.10));
        CHECK(fit.residual < 1e-3);
    }
    CHECK(epsilon_scaling_mi(0.5, {}).predicted == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK_THROWS_AS(epsilon_scaling_mi(0.0, {}), std::invalid_argument);
}

TEST_CASE("output spectrum of the scaling family matches its expansion") {
    const double g = 0.3, eps = 1e-3;
    const Channel ext = tensor(identity_channel(2), amplitude_damping(g));
    const HermEig eg = hermitian_eig(ext.apply(scaling_state(eps)).symmetrized());
    // descending order: (1-eps)(1-g), g + (1-2g)eps/2 + (1-g)eps^2/(4g),
    // (1-g)eps/2 - (1-g)eps^2/(4g), eps g / 2, each up to O(eps^3)
    CHECK(eg.eigenvalues[0] == doctest::Approx((1.0 - eps) * (1.0 - g)).epsilon(1e-8));
    CHECK(eg.eigenvalues[1] ==
          doctest::Approx(g + (1.0 - 2.0 * g) * eps / 2.0 +
                          (1.0 - g) * eps * eps / (4.0 * g)).epsilon(1e-8));
    CHECK(eg.eigenvalues[2] ==
          doctest::Approx((1.0 - g) * eps / 2.0 - (1.0 - g) * eps * eps / (4.0 * g))
              .epsilon(1e-6));
    CHECK(eg.eigenvalues[3] == doctest::Approx(eps * g / 2.0).epsilon(1e-6));
}

TEST_CASE("factor feasibility search agrees with the closed-form verdicts") {
    const Channel n = amplitude_damping(0.3);
    const FeasibilityResult deg = cptp_factor_feasibility(n, n.complement());
    CHECK(deg.feasible);
    REQUIRE(deg.map.has_value());
    CHECK(check_map(*deg.map, n, n.complement()) < 1e-6);

    const FeasibilityResult anti = cptp_factor_feasibility(n.complement(), n);
    CHECK_FALSE(anti.feasible);
    CHECK(anti.violation > 1e-7);
}

TEST_CASE("factor feasibility search decides flag-recorded mixtures") {
    // underdetermined direction (tall transfer): still decided numerically
    const Channel deg_pt = flagged_ad(0.8, 0.7, 0.2);
    const FeasibilityResult f1 = cptp_factor_feasibility(deg_pt, deg_pt.complement());
    CHECK(f1.feasible);
    CHECK_FALSE(cptp_factor_feasibility(deg_pt.complement(), deg_pt).feasible);

    const Channel anti_pt = flagged_ad(0.8, 0.7, 0.6);
    CHECK(cptp_factor_feasibility(anti_pt.complement(), anti_pt).feasible);
    CHECK_FALSE(cptp_factor_feasibility(anti_pt, anti_pt.complement()).feasible);

    const Channel neither = flagged_ad(0.8, 0.2, 0.7);
    CHECK_FALSE(cptp_factor_feasibility(neither, neither.complement()).feasible);
    CHECK_FALSE(cptp_factor_feasibility(neither.complement(), neither).feasible);
}

TEST_CASE("fixed point criterion: triangular Kraus words never span the algebra") {
    const FixedPointReport rep = unique_fixed_point_check(amplitude_damping(0.3), 3);
    CHECK_FALSE(rep.unique);
    CHECK(rep.span_dim == 3);
    REQUIRE(rep.fixed_state.has_value());
    CHECK((*rep.fixed_state - CMatrix::diag({1.0, 0.0})).max_abs() < 1e-8);
}

TEST_CASE("fixed point criterion: a unitary channel is inconclusive") {
    const FixedPointReport rep = unique_fixed_point_check(identity_channel(2), 2);
    CHECK_FALSE(rep.unique);
    CHECK(rep.span_dim == 1);
}

TEST_CASE("fixed point criterion: recovered damping channel passes at length two") {
    const double g = 0.3;
    const double gp = (1.0 - 2.0 * g) / (1.0 - g);
    const Channel n = amplitude_damping(gp);
    const CMatrix sigma = CMatrix::diag({0.6, 0.4});
    const Channel recovered = compose(petz_recovery(n, sigma), n);
    const FixedPointReport rep = unique_fixed_point_check(recovered, 2);
    CHECK(rep.unique);
    CHECK(rep.span_dim == 4);
    REQUIRE(rep.fixed_state.has_value());
    CHECK((recovered.apply(*rep.fixed_state) - *rep.fixed_state).max_abs() < 1e-8);
    CHECK(is_state(*rep.fixed_state, 1e-8));
}
