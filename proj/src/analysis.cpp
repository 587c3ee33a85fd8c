#include "qadd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qadd/eig.hpp"
#include "qadd/rng.hpp"
#include "qadd/sampling.hpp"
#include "qadd/zoo.hpp"

namespace qadd {

namespace {

// ---------------------------------------------------------------- utilities

Channel identity_channel(std::size_t d) { return Channel::from_kraus({CMatrix::identity(d)}); }

/// rho = L L^dag / Tr(L L^dag) with L lower triangular read off a flat real
/// vector (diagonal entries real, strictly-lower entries complex). Always a
/// valid state; d*d real parameters for dimension d.
CMatrix density_from_params(const std::vector<double>& x, std::size_t d) {
    CMatrix l(d, d);
    std::size_t k = 0;
    for (std::size_t i = 0; i < d; ++i) {
        l(i, i) = x[k++];
        for (std::size_t j = 0; j < i; ++j) {
            const double re = x[k++];
            const double im = x[k++];
            l(i, j) = cplx(re, im);
        }
    }
    CMatrix rho = l * l.dagger();
    const double tr = rho.trace().real();
    if (!(tr > 1e-12)) return cplx(1.0 / double(d)) * CMatrix::identity(d);
    rho *= cplx(1.0 / tr);
    return rho.symmetrized();
}

struct NmResult {
    std::vector<double> x;
    double fx = 0.0;
    bool converged = false;
};

/// Standard Nelder-Mead on R^n (minimization).
NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     std::vector<double> x0, double scale, double tol, std::size_t max_iter) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += scale;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    NmResult out;
    for (std::size_t it = 0; it < max_iter; ++it) {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];
        if (std::abs(fv[worst] - fv[best]) < tol) {
            out.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / double(n);
        }
        auto blend = [&](double alpha) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + alpha * (pts[worst][j] - centroid[j]);
            return p;
        };
        const std::vector<double> refl = blend(-1.0);
        const double fr = f(refl);
        if (fr < fv[idx[0]]) {
            const std::vector<double> exp_p = blend(-2.0);
            const double fe = f(exp_p);
            if (fe < fr) {
                pts[worst] = exp_p;
                fv[worst] = fe;
            } else {
                pts[worst] = refl;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            pts[worst] = refl;
            fv[worst] = fr;
        } else {
            const std::vector<double> con = blend(fr < fv[worst] ? -0.5 : 0.5);
            const double fc = f(con);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = con;
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    out.x = pts[best];
    out.fx = fv[best];
    return out;
}

double ic_of_diag(const std::vector<double>& p, const Channel& n) {
    return coherent_information(CMatrix::diag(p), n);
}

/// Recursive simplex enumeration: p_i = k_i / m over all compositions.
void best_diag_on_grid(const Channel& n, std::size_t m, std::vector<double>& best_p,
                       double& best_v) {
    const std::size_t d = n.in_dim();
    std::vector<std::size_t> ks(d, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
        if (pos == d - 1) {
            ks[pos] = left;
            std::vector<double> p(d);
            for (std::size_t i = 0; i < d; ++i) p[i] = double(ks[i]) / double(m);
            const double v = ic_of_diag(p, n);
            if (v > best_v) {
                best_v = v;
                best_p = p;
            }
            return;
        }
        for (std::size_t k = 0; k <= left; ++k) {
            ks[pos] = k;
            rec(pos + 1, left - k);
        }
    };
    rec(0, m);
}

/// Kraus operators of a CPTP map from its Choi operator.
Channel channel_from_choi(const CMatrix& j, std::size_t d_in, std::size_t d_out) {
    const HermEig eg = hermitian_eig(j.symmetrized());
    const double cutoff = 1e-11 * std::max(std::abs(eg.eigenvalues.front()), 1e-300);
    std::vector<CMatrix> ks;
    for (std::size_t k = 0; k < d_in * d_out; ++k) {
        if (eg.eigenvalues[k] <= cutoff) continue;
        CMatrix op(d_out, d_in);
        const double w = std::sqrt(eg.eigenvalues[k]);
        for (std::size_t i = 0; i < d_in; ++i)
            for (std::size_t v = 0; v < d_out; ++v) op(v, i) = w * eg.eigenvectors(i * d_out + v, k);
        ks.push_back(op);
    }
    return Channel::from_kraus_unchecked(ks);
}

double map_residual(const Channel& d, const Channel& from, const Channel& to) {
    double r = 0.0;
    const std::size_t da = from.in_dim();
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < da; ++j) {
            const CMatrix u = CMatrix::unit(da, i, j);
            r = std::max(r, (d.apply(from.apply(u)) - to.apply(u)).max_abs());
        }
    return r;
}

struct Direction {
    int status = -1;  // 1 certified, 0 refuted, -1 unknown
    std::optional<Channel> map;
    std::string note;
    double residual = 0.0;
};

/// Searches for D with D o from = to via the transfer factorization.
Direction transfer_direction(const Channel& from, const Channel& to) {
    Direction dir;
    const CMatrix& tf = from.transfer();
    const CMatrix& tt = to.transfer();
    const CMatrix x = solve_xa_b(tf, tt);
    const double lin_resid = (x * tf - tt).max_abs();
    if (lin_resid > 1e-6) {
        std::ostringstream os;
        os << "no linear factor exists: the transfer ranges are incompatible (residual "
           << lin_resid << ")";
        dir.status = 0;
        dir.note = os.str();
        dir.residual = lin_resid;
        return dir;
    }
    const std::size_t din = from.out_dim(), dout = to.out_dim();
    const CMatrix j = transfer_to_choi(x, din, dout).symmetrized();
    const auto ps = psd_check(j, 1e-8);
    // trace preservation: Tr_out of the Choi operator must be the identity
    double tp = 0.0;
    for (std::size_t i = 0; i < din; ++i)
        for (std::size_t jj = 0; jj < din; ++jj) {
            cplx m = 0.0;
            for (std::size_t v = 0; v < dout; ++v) m += j(i * dout + v, jj * dout + v);
            tp = std::max(tp, std::abs(m - (i == jj ? cplx(1.0) : cplx(0.0))));
        }
    if (ps.psd && tp < 1e-7) {
        Channel d = channel_from_choi(j, din, dout);
        dir.status = 1;
        dir.map = d;
        dir.residual = map_residual(d, from, to);
        return dir;
    }
    if (tf.rows() == tf.cols() && condition_number(tf) < 1e8) {
        std::ostringstream os;
        os << "the unique linear factor is not a channel (min Choi eigenvalue "
           << ps.min_eigenvalue << ", trace defect " << tp << ")";
        dir.status = 0;
        dir.note = os.str();
        dir.residual = ps.min_eigenvalue;
        return dir;
    }
    dir.status = -1;
    dir.note = "transfer matrix not injective; the minimum-norm factor is not a channel";
    return dir;
}

double least_squares_fit(const std::vector<double>& eps, const std::vector<double>& ds,
                         double* out_residual) {
    // ds ~ r * eps|log2 eps| + c * eps
    const std::size_t n = eps.size();
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = eps[i] * std::abs(std::log2(eps[i]));
        const double v = eps[i];
        a11 += u * u;
        a12 += u * v;
        a22 += v * v;
        b1 += u * ds[i];
        b2 += v * ds[i];
    }
    const double det = a11 * a22 - a12 * a12;
    const double r = (b1 * a22 - b2 * a12) / det;
    const double c = (a11 * b2 - a12 * b1) / det;
    double err = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = eps[i] * std::abs(std::log2(eps[i]));
        err += std::pow(ds[i] - r * u - c * eps[i], 2);
        norm += ds[i] * ds[i];
    }
    if (out_residual) *out_residual = std::sqrt(err / std::max(norm, 1e-30));
    return r;
}

double mi_advantage(const Channel& ext_b, const Channel& ext_e, const CMatrix& rho_va,
                    std::size_t dv) {
    const double ib = mutual_information(ext_b.apply(rho_va), dv, ext_b.out_dim() / dv);
    const double ie = mutual_information(ext_e.apply(rho_va), dv, ext_e.out_dim() / dv);
    return ib - ie;
}

}  // namespace

// -------------------------------------------------------------------- q1

std::pair<double, double> q1_platypus_restricted(double s, double t) {
    const Channel n = platypus(s, t);
    const bool keep_one = (1.0 - s - t) <= s;
    auto obj = [&](double u) {
        std::vector<double> p = keep_one ? std::vector<double>{u, 1.0 - u, 0.0}
                                         : std::vector<double>{u, 0.0, 1.0 - u};
        return ic_of_diag(p, n);
    };
    // coarse scan to bracket the maximum, then golden section
    double best_u = 0.0, best_v = obj(0.0);
    const std::size_t m = 64;
    for (std::size_t k = 1; k <= m; ++k) {
        const double u = double(k) / double(m);
        const double v = obj(u);
        if (v > best_v) {
            best_v = v;
            best_u = u;
        }
    }
    double lo = std::max(0.0, best_u - 1.0 / double(m));
    double hi = std::min(1.0, best_u + 1.0 / double(m));
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = obj(x1), f2 = obj(x2);
    while (hi - lo > 1e-8) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = obj(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = obj(x1);
        }
    }
    const double u = (lo + hi) / 2.0;
    return {u, obj(u)};
}

OptimizationReport q1(const Channel& n, Q1Strategy strategy) {
    const std::size_t d = n.in_dim();
    OptimizationReport rep;

    if (strategy == Q1Strategy::Auto && n.family == Family::Platypus) {
        const auto [u, v] = q1_platypus_restricted(n.family_params[0], n.family_params[1]);
        rep.value = v;
        const bool keep_one = (1.0 - n.family_params[0] - n.family_params[1]) <= n.family_params[0];
        rep.argmax = keep_one ? CMatrix::diag({u, 1.0 - u, 0.0}) : CMatrix::diag({u, 0.0, 1.0 - u});
        rep.restarts = 1;
        rep.restart_values = {v};
        rep.converged = true;
        return rep;
    }

    const bool diagonal = strategy == Q1Strategy::DiagonalGrid ||
                          (strategy == Q1Strategy::Auto && n.family != Family::Generic);
    if (diagonal) {
        rep.diagonal_warning = n.family == Family::Generic;
        std::vector<double> p(d, 1.0 / double(d));
        double v = ic_of_diag(p, n);
        best_diag_on_grid(n, d <= 3 ? 48 : 20, p, v);
        // local refinement in an unconstrained square-parametrization
        std::vector<double> x0(d);
        for (std::size_t i = 0; i < d; ++i) x0[i] = std::sqrt(std::max(p[i], 1e-4));
        auto obj = [&](const std::vector<double>& x) {
            double s = 0.0;
            for (double xi : x) s += xi * xi;
            std::vector<double> q(d);
            for (std::size_t i = 0; i < d; ++i) q[i] = x[i] * x[i] / s;
            return -ic_of_diag(q, n);
        };
        const NmResult nm = nelder_mead(obj, x0, 0.05, 1e-11, 4000);
        if (-nm.fx > v) {
            v = -nm.fx;
            double s = 0.0;
            for (double xi : nm.x) s += xi * xi;
            for (std::size_t i = 0; i < d; ++i) p[i] = nm.x[i] * nm.x[i] / s;
        }
        rep.value = v;
        rep.argmax = CMatrix::diag(p);
        rep.restarts = 1;
        rep.restart_values = {v};
        rep.converged = nm.converged;
        return rep;
    }

    // multistart over the full state space
    if (d > 16) throw std::invalid_argument("q1: multistart capped at input dim 16");
    const std::size_t restarts = 32;
    CounterRng rng(977);
    auto obj = [&](const std::vector<double>& x) {
        return -coherent_information(density_from_params(x, d), n);
    };
    double best = -1e300;
    std::vector<double> best_x;
    bool conv = false;
    for (std::size_t r = 0; r < restarts; ++r) {
        std::vector<double> x0(d * d);
        for (double& xi : x0) xi = rng.next_gaussian();
        const NmResult nm = nelder_mead(obj, x0, 0.3, 1e-9, 3000);
        rep.restart_values.push_back(-nm.fx);
        if (-nm.fx > best) {
            best = -nm.fx;
            best_x = nm.x;
            conv = nm.converged;
        }
    }
    rep.value = best;
    rep.argmax = density_from_params(best_x, d);
    rep.restarts = restarts;
    rep.converged = conv;
    return rep;
}

// ----------------------------------------------------------- certificates

Certificate degradability_certificate(const Channel& n) {
    Certificate cert;
    const Channel nc = n.complement();

    Direction deg, anti;
    if (n.family == Family::FlaggedAD && n.family_params.size() == 3) {
        // exact classification with constructive crossing maps
        const double p = n.family_params[0], g = n.family_params[1], eta = n.family_params[2];
        const RegionClass rc = flagged_ad_region(p, g, eta);
        deg.status = rc.degradable ? 1 : 0;
        anti.status = rc.anti_degradable ? 1 : 0;
        if (rc.degradable) {
            deg.map = flagged_ad_degrading_map(p, g, eta);
            deg.residual = map_residual(*deg.map, n, nc);
        } else {
            deg.note = "flag-weighted damping parameters outside the degradable region";
        }
        if (rc.anti_degradable) {
            // the complement is the same mixture with both dampings mirrored
            anti.map = flagged_ad_degrading_map(p, 1.0 - g, 1.0 - eta);
            anti.residual = map_residual(*anti.map, nc, n);
        } else {
            anti.note = "flag-weighted damping parameters outside the anti-degradable region";
        }
    } else {
        deg = transfer_direction(n, nc);
        anti = transfer_direction(nc, n);
    }

    cert.degrading_map = deg.map;
    cert.antidegrading_map = anti.map;
    cert.residual = std::max(deg.residual, anti.status == 1 ? anti.residual : 0.0);
    if (deg.status == 1 && anti.status == 1) {
        cert.verdict = Verdict::Both;
    } else if (deg.status == 1) {
        cert.verdict = Verdict::Degradable;
        cert.witness = anti.note;
        cert.residual = deg.residual;
    } else if (anti.status == 1) {
        cert.verdict = Verdict::AntiDegradable;
        cert.witness = deg.note;
        cert.residual = anti.residual;
    } else if (deg.status == 0 && anti.status == 0) {
        cert.verdict = Verdict::Neither;
        cert.witness = "degrading: " + deg.note + "; anti-degrading: " + anti.note;
    } else {
        cert.verdict = Verdict::Indeterminate;
        cert.witness = "degrading: " + deg.note + "; anti-degrading: " + anti.note;
    }
    return cert;
}

SimulationCheck simulation_additivity_check(const Channel& n, const Channel& nhat,
                                            const Channel& e, const Channel& d) {
    SimulationCheck out;
    const Channel sim = compose(d, compose(nhat, e));
    double r = 0.0;
    for (std::size_t i = 0; i < n.in_dim(); ++i)
        for (std::size_t j = 0; j < n.in_dim(); ++j) {
            const CMatrix u = CMatrix::unit(n.in_dim(), i, j);
            r = std::max(r, (sim.apply(u) - n.apply(u)).max_abs());
        }
    out.residual = r;
    out.simulation_ok = r < 1e-9;
    out.q1_n = q1(n).value;
    out.q1_hat = q1(nhat).value;
    out.domination_ok = out.q1_hat <= out.q1_n + 1e-6;
    return out;
}

// ------------------------------------------------------------- Smith-Yard

std::pair<CMatrix, std::size_t> smith_yard_state(const Ensemble& ens, const Channel& n) {
    ens.validate();
    const std::size_t da = ens.dim();
    if (da != n.in_dim()) throw std::invalid_argument("smith_yard_state: ensemble/channel dims");

    std::vector<HermEig> eigs;
    std::size_t dc = 0;
    std::vector<std::size_t> ranks;
    for (const CMatrix& rho : ens.states) {
        HermEig eg = hermitian_eig(rho.symmetrized());
        std::size_t r = 0;
        for (double v : eg.eigenvalues)
            if (v > 1e-12) ++r;
        ranks.push_back(r);
        dc += r;
        eigs.push_back(std::move(eg));
    }
    if (dc > 9) throw std::invalid_argument("smith_yard_state: reference system larger than 9");

    CMatrix rho_ac(da * dc, da * dc);
    std::size_t offset = 0;
    for (std::size_t x = 0; x < ens.states.size(); ++x) {
        // purification |psi_x> = sum_k sqrt(l_k) |v_k>_A |offset+k>_C
        CMatrix psi(da * dc, 1);
        for (std::size_t k = 0; k < ranks[x]; ++k) {
            const double w = std::sqrt(eigs[x].eigenvalues[k]);
            for (std::size_t a = 0; a < da; ++a)
                psi(a * dc + offset + k, 0) += w * eigs[x].eigenvectors(a, k);
        }
        rho_ac += cplx(ens.ps[x]) * (psi * psi.dagger());
        offset += ranks[x];
    }
    return {rho_ac.symmetrized(), dc};
}

// ------------------------------------------------------- rate estimation

std::vector<double> default_eps_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, double(i) / double(n - 1));
    return g;
}

RateEstimate log_singularity_rate(const std::function<CMatrix(double)>& family,
                                  std::vector<double> eps_grid) {
    if (eps_grid.size() < 6)
        throw std::invalid_argument("log_singularity_rate: need at least 6 grid points");
    std::sort(eps_grid.begin(), eps_grid.end());
    const CMatrix sigma0 = family(0.0);
    const double s0 = entropy(sigma0);
    std::vector<double> ds(eps_grid.size());
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        const CMatrix se = family(eps_grid[i]);
        if (trace_distance(se, sigma0) > 1e3 * eps_grid[i])
            throw std::invalid_argument("log_singularity_rate: family is not Lipschitz at scale eps");
        ds[i] = entropy(se) - s0;
    }
    double res_full = 0.0;
    const double r_full = least_squares_fit(eps_grid, ds, &res_full);
    // curvature from higher-order terms concentrates at the largest eps
    std::vector<double> eps_cut(eps_grid.begin(), eps_grid.end() - 2);
    std::vector<double> ds_cut(ds.begin(), ds.end() - 2);
    double res_cut = 0.0;
    const double r_cut = least_squares_fit(eps_cut, ds_cut, &res_cut);

    RateEstimate out;
    if (res_cut < res_full) {
        out.rate = r_cut;
        out.residual = res_cut;
        out.eps_grid = eps_cut;
    } else {
        out.rate = r_full;
        out.residual = res_full;
        out.eps_grid = eps_grid;
    }
    return out;
}

AmplificationReport platypus_amplification(double s, double t, double lambda,
                                           std::vector<double> eps_grid) {
    if (!(s > 0.0) || !(s + t < 1.0))
        throw std::invalid_argument("platypus_amplification: needs s > 0 and s + t < 1");
    if (eps_grid.empty()) eps_grid = default_eps_grid();

    AmplificationReport rep;
    const auto [u, q1v] = q1_platypus_restricted(s, t);
    rep.u_star = u;
    rep.q1_value = q1v;
    if (q1v <= 1e-6)
        throw std::invalid_argument(
            "platypus_amplification: the one-shot rate vanishes here; use the private-information "
            "construction with a half-erasure channel instead");

    rep.second_branch = s >= (1.0 - t) / 2.0;
    const Channel joint = tensor(platypus(s, t), erasure(2, lambda));
    const Channel joint_c = joint.complement();

    // rho(eps) = u|00><00| + (1-u)|psi_eps><psi_eps| on the 3x2 input
    auto rho_of = [&](double eps) {
        CMatrix psi(6, 1);
        if (rep.second_branch) {
            psi(2, 0) = std::sqrt(1.0 - eps);  // |10>
            psi(5, 0) = std::sqrt(eps);        // |21>
        } else {
            psi(4, 0) = std::sqrt(1.0 - eps);  // |20>
            psi(3, 0) = std::sqrt(eps);        // |11>
        }
        CMatrix rho = cplx(1.0 - u) * (psi * psi.dagger());
        rho(0, 0) += u;
        return rho;
    };

    const double q1_erasure = std::max(0.0, 1.0 - 2.0 * lambda);
    for (double eps : eps_grid) {
        rep.gain.push_back(coherent_information(rho_of(eps), joint) - q1v - q1_erasure);
    }
    rep.eps_grid = eps_grid;

    rep.r_b = log_singularity_rate([&](double e) { return joint.apply(rho_of(e)); }, eps_grid).rate;
    rep.r_e =
        log_singularity_rate([&](double e) { return joint_c.apply(rho_of(e)); }, eps_grid).rate;
    rep.r_b_analytic = (1.0 - u) * (1.0 - lambda);
    if (rep.second_branch) {
        rep.r_e_analytic = lambda * u * (1.0 - u) * s / (1.0 - (1.0 - s) * u);
        rep.lambda_bound = (1.0 - (1.0 - s) * u) / (1.0 + u - 2.0 * (1.0 - s) * u);
    } else {
        rep.r_e_analytic = lambda * u * (1.0 - u) * (1.0 - s - t) / (1.0 - (s + t) * u);
        rep.lambda_bound = (1.0 - (s + t) * u) / (1.0 + u - 2.0 * (s + t) * u);
    }
    return rep;
}

// -------------------------------------------------------- ratio estimators

RatioEstimate mi_ratio_R3(const Channel& n1, const Channel& n2, std::size_t dim_v,
                          std::size_t samples, bool local_refine, std::uint64_t seed) {
    if (n1.in_dim() != n2.in_dim())
        throw std::invalid_argument("mi_ratio_R3: channels must share the input space");
    const std::size_t da = n1.in_dim();
    const std::size_t d = dim_v * da;
    const Channel e1b = tensor(identity_channel(dim_v), n1);
    const Channel e1e = tensor(identity_channel(dim_v), n1.complement());
    const Channel e2b = tensor(identity_channel(dim_v), n2);
    const Channel e2e = tensor(identity_channel(dim_v), n2.complement());

    auto ratio = [&](const CMatrix& rho) -> std::optional<double> {
        const double den = mi_advantage(e2b, e2e, rho, dim_v);
        if (den < 1e-8) return std::nullopt;
        return mi_advantage(e1b, e1e, rho, dim_v) / den;
    };

    CounterRng rng(seed);
    RatioEstimate out;
    out.value = 1e300;
    std::vector<std::pair<double, CMatrix>> pool;
    for (std::size_t k = 0; k < samples; ++k) {
        CMatrix rho;
        switch (k % 3) {
            case 0:
                rho = random_density(rng, d);
                break;
            case 1:
                rho = random_density(rng, d, 1 + k % 2);
                break;
            default: {
                // entangled perturbation of a product state; the infimum
                // concentrates near products where both differences vanish
                const double eps = std::pow(10.0, -2.0 - 2.0 * rng.next_double());
                const CMatrix prod = kron(random_density(rng, dim_v), random_density(rng, da));
                const CMatrix psi = random_pure_vector(rng, d);
                rho = (cplx(1.0 - eps) * prod + cplx(eps) * (psi * psi.dagger())).symmetrized();
                break;
            }
        }
        const auto r = ratio(rho);
        if (!r) continue;
        ++out.samples_used;
        pool.emplace_back(*r, rho);
        if (*r < out.value) {
            out.value = *r;
            out.argmin = rho;
        }
    }
    if (pool.empty()) throw std::invalid_argument("mi_ratio_R3: denominator vanished on all samples");

    if (local_refine) {
        std::sort(pool.begin(), pool.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        auto obj = [&](const std::vector<double>& x) {
            const auto r = ratio(density_from_params(x, d));
            return r ? *r : 1e6;
        };
        for (std::size_t k = 0; k < std::min<std::size_t>(5, pool.size()); ++k) {
            // seed the simplex near the sampled state via its Cholesky-like factor
            const HermEig eg = hermitian_eig(pool[k].second);
            std::vector<double> x0;
            for (std::size_t i = 0; i < d; ++i) {
                x0.push_back(std::sqrt(std::max(eg.eigenvalues[i], 1e-6)));
                for (std::size_t j = 0; j < i; ++j) {
                    x0.push_back(0.01 * rng.next_gaussian());
                    x0.push_back(0.01 * rng.next_gaussian());
                }
            }
            const NmResult nm = nelder_mead(obj, x0, 0.05, 1e-10, 1500);
            if (nm.fx < out.value) {
                out.value = nm.fx;
                out.argmin = density_from_params(nm.x, d);
            }
        }
    }
    return out;
}

std::pair<double, double> contraction_coefficients(const Channel& n1, const Channel& n2,
                                                   std::size_t dim_v, std::size_t samples,
                                                   std::uint64_t seed) {
    if (n1.in_dim() != n2.in_dim())
        throw std::invalid_argument("contraction_coefficients: channels must share the input space");
    const std::size_t da = n1.in_dim();
    const std::size_t d = dim_v * da;
    const Channel e1 = tensor(identity_channel(dim_v), n1);
    const Channel e2 = tensor(identity_channel(dim_v), n2);
    CounterRng rng(seed);
    double sup = -1e300, inf = 1e300;
    for (std::size_t k = 0; k < samples; ++k) {
        CMatrix rho = k % 2 == 0 ? random_density(rng, d) : random_density(rng, d, 1 + k % 3);
        const double i1 = mutual_information(e1.apply(rho), dim_v, n1.out_dim());
        const double i2 = mutual_information(e2.apply(rho), dim_v, n2.out_dim());
        if (i1 < 1e-8 || i2 < 1e-8) continue;
        const double r = i1 / i2;
        sup = std::max(sup, r);
        inf = std::min(inf, r);
    }
    return {sup, inf};
}

ScalingFit epsilon_scaling_mi(double gamma, std::vector<double> eps_grid) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("epsilon_scaling_mi: gamma must be inside (0,1)");
    if (eps_grid.empty()) eps_grid = default_eps_grid(1e-4, 1e-2, 12);
    const Channel ext = tensor(identity_channel(2), amplitude_damping(gamma));

    ScalingFit fit;
    fit.eps_grid = eps_grid;
    fit.predicted = -(1.0 - gamma) / (4.0 * gamma);

    const std::size_t n = eps_grid.size();
    CMatrix a(n, 3), b(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double eps = eps_grid[i];
        CMatrix rho(4, 4);
        rho(1, 1) = rho(2, 2) = rho(1, 2) = rho(2, 1) = eps / 2.0;
        rho(3, 3) = 1.0 - eps;
        const double mi = mutual_information(ext.apply(rho), 2, 2);
        a(i, 0) = eps * eps * std::log2(eps);
        a(i, 1) = eps * eps;
        a(i, 2) = eps * eps * eps * std::log2(eps);
        b(i, 0) = mi;
    }
    const CMatrix x = pinv(a) * b;
    fit.c2_log = x(0, 0).real();
    double err = 0.0, norm = 0.0;
    const CMatrix pred = a * x;
    for (std::size_t i = 0; i < n; ++i) {
        err += std::norm(pred(i, 0) - b(i, 0));
        norm += std::norm(b(i, 0));
    }
    fit.residual = std::sqrt(err / std::max(norm, 1e-30));
    return fit;
}

namespace {

/// Exact orthogonal projector onto {J : choi_to_transfer(J) * T_from = T_to
/// and Tr_out J = I}, with the pseudo-inverse of the stacked constraint map
/// precomputed once per channel pair.
struct FactorConstraint {
    CMatrix m, mp, c;
    std::size_t din, dout, dd;

    FactorConstraint(const Channel& from, const Channel& to)
        : FactorConstraint(from.transfer(), to.transfer(), from.out_dim(), to.out_dim()) {}

    FactorConstraint(const CMatrix& tf, const CMatrix& tt, std::size_t din_, std::size_t dout_) {
        din = din_;
        dout = dout_;
        dd = din * dout;
        const std::size_t nfac = tt.rows() * tt.cols();
        const std::size_t nrow = nfac + din * din;
        m = CMatrix(nrow, dd * dd);
        c = CMatrix(nrow, 1);
        for (std::size_t a = 0; a < dd; ++a)
            for (std::size_t b = 0; b < dd; ++b) {
                const CMatrix r = choi_to_transfer(CMatrix::unit(dd, a, b), din, dout) * tf;
                const std::size_t col = a * dd + b;
                for (std::size_t rr = 0; rr < tt.rows(); ++rr)
                    for (std::size_t cc = 0; cc < tt.cols(); ++cc)
                        m(rr * tt.cols() + cc, col) = r(rr, cc);
                if (a % dout == b % dout) m(nfac + (a / dout) * din + (b / dout), col) += 1.0;
            }
        for (std::size_t rr = 0; rr < tt.rows(); ++rr)
            for (std::size_t cc = 0; cc < tt.cols(); ++cc) c(rr * tt.cols() + cc, 0) = tt(rr, cc);
        for (std::size_t i = 0; i < din; ++i) c(nfac + i * din + i, 0) = 1.0;
        mp = m.dagger() * pinv(m * m.dagger());
    }

    CMatrix vec(const CMatrix& j) const {
        CMatrix v(dd * dd, 1);
        for (std::size_t a = 0; a < dd; ++a)
            for (std::size_t b = 0; b < dd; ++b) v(a * dd + b, 0) = j(a, b);
        return v;
    }
    CMatrix unvec(const CMatrix& v) const {
        CMatrix j(dd, dd);
        for (std::size_t a = 0; a < dd; ++a)
            for (std::size_t b = 0; b < dd; ++b) j(a, b) = v(a * dd + b, 0);
        return j;
    }
    CMatrix project(const CMatrix& j) const {
        const CMatrix v = vec(j);
        return unvec(v - mp * (m * v - c));
    }
};

CMatrix psd_project(const CMatrix& j) {
    const HermEig eg = hermitian_eig(j.symmetrized());
    CMatrix out(j.rows(), j.cols());
    for (std::size_t k = 0; k < j.rows(); ++k) {
        const double l = eg.eigenvalues[k];
        if (l <= 0.0) continue;
        for (std::size_t a = 0; a < j.rows(); ++a)
            for (std::size_t b = 0; b < j.cols(); ++b)
                out(a, b) += cplx(l) * eg.eigenvectors(a, k) * std::conj(eg.eigenvectors(b, k));
    }
    return out;
}

}  // namespace

FeasibilityResult cptp_factor_feasibility(const Channel& from, const Channel& to,
                                          std::size_t max_iter) {
    if (from.in_dim() != to.in_dim())
        throw std::invalid_argument("cptp_factor_feasibility: inputs must share a space");
    if (from.out_dim() > 9 || to.out_dim() > 9)
        throw std::invalid_argument("cptp_factor_feasibility: output dims capped at 9");

    // Douglas-Rachford splitting between the PSD cone and the affine set; the
    // reflected-projection gap converges to zero exactly when a CPTP factor
    // exists, and stabilizes at the distance between the sets otherwise. A
    // stalled trajectory is restarted from a perturbed anchor before the
    // problem is declared infeasible: long pre-asymptotic stagnation of a
    // feasible instance is initialization-sensitive, while a genuinely
    // positive distance between the sets stalls every restart.
    const std::size_t din = from.out_dim(), dout = to.out_dim();
    const FactorConstraint aff(from, to);
    FeasibilityResult res;
    std::size_t used = 0;

    // Splitting iteration against a given constraint set; returns the best
    // gap seen, with a certificate through `sol` when the gap drops below tol.
    const auto douglas_rachford = [&](const FactorConstraint& a, CMatrix z, std::size_t budget,
                                      double tol, CMatrix* sol, std::size_t stall_window,
                                      double stall_floor) {
        double best_gap = 1e300;
        std::size_t plateau = 0;
        for (std::size_t it = 0; it < budget && used < max_iter; ++it) {
            const CMatrix p = psd_project(z);
            const CMatrix q = a.project(cplx(2.0) * p - z);
            const double gap = (p - q).max_abs();
            ++used;
            if (!std::isfinite(gap)) break;  // numerical breakdown, not a verdict
            if (gap < tol) {
                if (sol) *sol = psd_project(q);
                return gap;
            }
            if (gap > best_gap * (1.0 - 1e-4)) {
                if (++plateau > stall_window && best_gap > stall_floor) break;
            } else {
                plateau = 0;
            }
            best_gap = std::min(best_gap, gap);
            z += q - p;
        }
        return best_gap;
    };

    const CMatrix anchor = aff.unvec(aff.mp * aff.c);
    CMatrix sol;
    const double dr_gap = douglas_rachford(aff, anchor, max_iter, 1e-12, &sol, 500, 1e-8);
    res.iterations = used;
    res.violation = dr_gap;
    if (dr_gap < 1e-12) {
        res.feasible = true;
        res.map = channel_from_choi(sol, din, dout);
        return res;
    }

    // The splitting stagnates when every solution sits on the cone boundary,
    // so a small stalled gap is not yet a verdict. Mixing the target with a
    // depolarizing term moves any solution into the cone interior, where the
    // splitting converges linearly, while a genuinely infeasible instance
    // (distance >> delta) stays clearly infeasible after the mixing.
    if (dr_gap < 5e-2) {
        const double delta = 5e-3;
        const CMatrix& tf = from.transfer();
        const CMatrix& tt = to.transfer();
        CMatrix tdep(dout * dout, din * din);
        for (std::size_t i = 0; i < dout; ++i)
            for (std::size_t j = 0; j < din; ++j)
                tdep(i * dout + i, j * din + j) = 1.0 / double(dout);
        CMatrix tt_mix = tdep * tf;
        for (std::size_t r = 0; r < tt.rows(); ++r)
            for (std::size_t cc = 0; cc < tt.cols(); ++cc)
                tt_mix(r, cc) = cplx(1.0 - delta) * tt(r, cc) + cplx(delta) * tt_mix(r, cc);
        const FactorConstraint relaxed(tf, tt_mix, din, dout);
        const CMatrix anchor2 = relaxed.unvec(relaxed.mp * relaxed.c);
        CMatrix sol2;
        const double gap2 = douglas_rachford(relaxed, anchor2, 20000, 1e-9, &sol2, 8000, 1e-3);
        res.iterations = used;
        if (gap2 < 1e-9) {
            // The relaxed solution alone is not a verdict: an instance whose
            // distance to feasibility is positive but below delta also passes.
            // Un-mix it and restart the exact splitting next to it; only an
            // exact certificate counts.
            const CMatrix seed =
                cplx(1.0 / (1.0 - delta)) *
                (sol2 - cplx(delta / double(dout)) * CMatrix::identity(din * dout));
            const double gap3 = douglas_rachford(aff, psd_project(seed), 10000, 1e-12, &sol, 500, 1e-11);
            if (gap3 < 1e-12) {
                res.feasible = true;
                res.violation = gap3;
                res.map = channel_from_choi(sol, din, dout);
            }
        } else {
            res.violation = std::min(dr_gap, gap2);
        }
    }
    return res;
}

FixedPointReport unique_fixed_point_check(const Channel& n, std::size_t max_len) {
    if (n.in_dim() != n.out_dim())
        throw std::invalid_argument("unique_fixed_point_check: needs equal in/out dims");
    if (n.in_dim() > 6 || max_len > 4 || max_len < 1)
        throw std::invalid_argument("unique_fixed_point_check: d <= 6 and 1 <= max_len <= 4");
    const std::size_t d = n.in_dim();

    std::vector<CMatrix> words = n.kraus();
    std::vector<CMatrix> all = words;
    for (std::size_t len = 2; len <= max_len; ++len) {
        std::vector<CMatrix> next;
        for (const CMatrix& w : words)
            for (const CMatrix& k : n.kraus()) next.push_back(w * k);
        words = std::move(next);
        all.insert(all.end(), words.begin(), words.end());
    }

    // rank of the vectorized word list via the Gram spectrum
    CMatrix gram(all.size(), all.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = 0; j < all.size(); ++j) gram(i, j) = (all[i].dagger() * all[j]).trace();
    const HermEig eg = hermitian_eig(gram.symmetrized());
    const double cutoff = 1e-10 * std::max(eg.eigenvalues.front(), 1e-300);
    std::size_t rank = 0;
    for (double v : eg.eigenvalues)
        if (v > cutoff) ++rank;

    FixedPointReport rep;
    rep.span_dim = std::min(rank, d * d);
    rep.unique = rep.span_dim == d * d;

    // fixed state from the kernel of T - I (informational either way)
    const CMatrix m = n.transfer() - CMatrix::identity(d * d);
    const HermEig null_eig = hermitian_eig((m.dagger() * m).symmetrized());
    CMatrix v(d * d, 1);
    for (std::size_t i = 0; i < d * d; ++i) v(i, 0) = null_eig.eigenvectors(i, d * d - 1);
    CMatrix rho = unvec_col(v, d, d).symmetrized();
    const double tr = rho.trace().real();
    if (std::abs(tr) > 1e-8) {
        rho *= cplx(1.0 / tr);
        if ((n.apply(rho) - rho).max_abs() < 1e-8 && psd_check(rho, 1e-8).psd)
            rep.fixed_state = rho;
    }
    return rep;
}

}  // namespace qadd
