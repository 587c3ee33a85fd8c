#include "qadd/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "qadd/analysis.hpp"
#include "qadd/eig.hpp"
#include "qadd/info.hpp"
#include "qadd/zoo.hpp"

using nlohmann::json;

namespace qadd {

namespace {

std::string fmt10(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// Runs f(0..n-1) on a small worker pool; callers index into preallocated
/// storage so the result is independent of scheduling.
template <typename F>
void parallel_index(std::size_t n, F&& f) {
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
        });
    for (auto& t : pool) t.join();
}

struct TwoStateOpt {
    double p = 0.0, u = 0.0, value = 0.0;
};

double two_state_p1(const Channel& n, double p, double u) {
    Ensemble ens;
    ens.ps = {p, 1.0 - p};
    ens.states = {CMatrix::diag({1.0, 0.0, 0.0}), CMatrix::diag({0.0, u, 1.0 - u})};
    return private_information(ens, n);
}

/// Maximizes the two-state ensemble private information over (p, u).
TwoStateOpt optimize_two_state(const Channel& n) {
    TwoStateOpt best;
    const std::size_t m = 24;
    for (std::size_t i = 0; i <= m; ++i)
        for (std::size_t j = 0; j <= m; ++j) {
            const double p = double(i) / double(m), u = double(j) / double(m);
            const double v = two_state_p1(n, p, u);
            if (v > best.value) best = {p, u, v};
        }
    // local refinement through a smooth box parametrization
    double a = std::asin(std::sqrt(std::min(1.0, std::max(0.0, best.p))));
    double b = std::asin(std::sqrt(std::min(1.0, std::max(0.0, best.u))));
    double step = 0.06;
    for (int round = 0; round < 40; ++round) {
        bool moved = false;
        for (const auto& [da, db] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
            const double p = std::pow(std::sin(a + da), 2), u = std::pow(std::sin(b + db), 2);
            const double v = two_state_p1(n, p, u);
            if (v > best.value) {
                best = {p, u, v};
                a += da;
                b += db;
                moved = true;
            }
        }
        if (!moved) step *= 0.5;
        if (step < 1e-7) break;
    }
    return best;
}

std::string verdict_of(const RegionClass& rc) {
    if (rc.degradable && rc.anti_degradable) return "Both";
    if (rc.degradable) return "Degradable";
    if (rc.anti_degradable) return "AntiDegradable";
    return "Neither";
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    return default_eps_grid(lo, hi, n);
}

void check_steps(std::size_t steps) {
    if (steps < 2 || steps > 200)
        throw std::invalid_argument("surface steps must lie in [2, 200]");
}

}  // namespace

std::string run_coherent_info_surface(std::size_t s_steps, std::size_t t_steps) {
    check_steps(s_steps);
    check_steps(t_steps);
    std::ostringstream os;
    os << "s,t,u_star,q1\n";
    for (std::size_t i = 0; i < s_steps; ++i)
        for (std::size_t j = 0; j < t_steps; ++j) {
            const double s = double(i) / double(s_steps - 1);
            const double t = double(j) / double(t_steps - 1);
            if (s + t > 1.0 + 1e-9) continue;
            const auto [u, v] = q1_platypus_restricted(s, t);
            const double q = std::max(0.0, v);
            // re-validate the emitted value at the emitted optimizer
            const bool keep_one = (1.0 - s - t) <= s;
            const CMatrix rho = keep_one ? CMatrix::diag({u, 1.0 - u, 0.0})
                                         : CMatrix::diag({u, 0.0, 1.0 - u});
            if (std::abs(coherent_information(rho, platypus(s, t)) - v) > 1e-9)
                throw std::runtime_error("coherent surface failed re-validation");
            os << fmt10(s) << ',' << fmt10(t) << ',' << fmt10(u) << ',' << fmt10(q) << '\n';
        }
    return os.str();
}

std::string run_private_info_surface(std::size_t s_steps, std::size_t t_steps) {
    check_steps(s_steps);
    check_steps(t_steps);
    std::ostringstream os;
    os << "s,t,p_star,u_star,p1\n";
    for (std::size_t i = 0; i < s_steps; ++i)
        for (std::size_t j = 0; j < t_steps; ++j) {
            const double s = double(i) / double(s_steps - 1);
            const double t = double(j) / double(t_steps - 1);
            if (s + t > 1.0 + 1e-9) continue;
            const Channel n = platypus(s, t);
            const TwoStateOpt opt = optimize_two_state(n);
            if (std::abs(two_state_p1(n, opt.p, opt.u) - opt.value) > 1e-9)
                throw std::runtime_error("private surface failed re-validation");
            os << fmt10(s) << ',' << fmt10(t) << ',' << fmt10(opt.p) << ',' << fmt10(opt.u)
               << ',' << fmt10(opt.value) << '\n';
        }
    return os.str();
}

std::string run_flagged_region_scan(std::size_t p_steps, std::size_t g_steps,
                                    std::size_t e_steps) {
    if (p_steps < 1 || g_steps < 1 || e_steps < 1 || p_steps * g_steps * e_steps > 20000)
        throw std::invalid_argument("region scan grid too large");
    struct Point {
        double p, g, e;
    };
    std::vector<Point> pts;
    const double band = 0.02;
    for (std::size_t i = 0; i < p_steps; ++i)
        for (std::size_t j = 0; j < g_steps; ++j)
            for (std::size_t k = 0; k < e_steps; ++k) {
                const double p = (double(i) + 0.5) / double(p_steps);
                const double g = (double(j) + 0.5) / double(g_steps);
                const double e = (double(k) + 0.5) / double(e_steps);
                // skip points near a classification boundary
                if (std::abs(p - 0.5) < band || std::abs(g - 0.5) < band ||
                    std::abs(e - 0.5) < band || std::abs(g + e - 1.0) < band)
                    continue;
                pts.push_back({p, g, e});
            }

    std::vector<std::string> rows(pts.size());
    parallel_index(pts.size(), [&](std::size_t idx) {
        const auto [p, g, e] = pts[idx];
        const std::string analytic = verdict_of(flagged_ad_region(p, g, e));
        // the numeric side works on an anonymized copy so nothing about the
        // family can leak into the feasibility search
        const Channel n = Channel::from_kraus(flagged_ad(p, g, e).kraus());
        const bool deg = cptp_factor_feasibility(n, n.complement(), 60000).feasible;
        const bool anti = cptp_factor_feasibility(n.complement(), n, 60000).feasible;
        std::string numeric = deg && anti ? "Both"
                              : deg       ? "Degradable"
                              : anti      ? "AntiDegradable"
                                          : "Neither";
        std::ostringstream row;
        row << fmt10(p) << ',' << fmt10(g) << ',' << fmt10(e) << ',' << analytic << ','
            << numeric << ',' << (analytic == numeric ? 1 : 0) << '\n';
        rows[idx] = row.str();
    });

    std::ostringstream os;
    os << "p,gamma,eta,analytic,numeric,agree\n";
    for (const std::string& r : rows) os << r;
    return os.str();
}

std::string run_amplification_demo(double s, double t, double lambda,
                                   const std::vector<double>& eps_grid) {
    const AmplificationReport rep = platypus_amplification(s, t, lambda, eps_grid);
    double max_gain = -1e300;
    for (double g : rep.gain) max_gain = std::max(max_gain, g);

    json j;
    j["experiment"] = "amplification_demo";
    j["inputs"] = {{"s", s}, {"t", t}, {"lambda", lambda}};
    j["u_star"] = rep.u_star;
    j["q1"] = rep.q1_value;
    j["second_branch"] = rep.second_branch;
    j["lambda_bound"] = rep.lambda_bound;
    j["eps_grid"] = rep.eps_grid;
    j["gain"] = rep.gain;
    j["max_gain"] = max_gain;
    j["r_b"] = {{"fitted", rep.r_b}, {"analytic", rep.r_b_analytic}};
    j["r_e"] = {{"fitted", rep.r_e}, {"analytic", rep.r_e_analytic}};
    j["pass"] = {{"lambda_in_range", lambda >= 0.5 && lambda < rep.lambda_bound},
                 {"gain_positive", max_gain > 1e-4},
                 {"r_b_within_5pct", std::abs(rep.r_b / rep.r_b_analytic - 1.0) <= 0.05},
                 {"r_e_within_5pct", std::abs(rep.r_e / rep.r_e_analytic - 1.0) <= 0.05}};
    return j.dump(2) + "\n";
}

std::string run_smith_yard_demo(double s, double t, std::size_t d_c) {
    const Channel n = platypus(s, t);
    const TwoStateOpt opt = optimize_two_state(n);
    Ensemble ens;
    ens.ps = {opt.p, 1.0 - opt.p};
    ens.states = {CMatrix::diag({1.0, 0.0, 0.0}),
                  CMatrix::diag({0.0, opt.u, 1.0 - opt.u})};
    const auto [rho_ac, dc_used] = smith_yard_state(ens, n);
    if (d_c < dc_used)
        throw std::invalid_argument("smith_yard_demo: reference dimension below the ensemble rank sum");
    const Channel joint = tensor(n, erasure(dc_used, 0.5));
    const double ic = coherent_information(rho_ac, joint);
    const double q1n = std::max(0.0, q1_platypus_restricted(s, t).second);

    json j;
    j["experiment"] = "smith_yard_demo";
    j["inputs"] = {{"s", s}, {"t", t}, {"d_c", d_c}};
    j["ensemble"] = {{"p", opt.p}, {"u", opt.u}};
    j["p1_two_state"] = opt.value;
    j["half_p1"] = 0.5 * opt.value;
    j["d_c_used"] = dc_used;
    j["i_c_joint"] = ic;
    j["q1_channel"] = q1n;
    j["q1_half_erasure"] = 0.0;
    j["pass"] = {{"identity_ok", std::abs(ic - 0.5 * opt.value) <= 1e-8},
                 {"joint_rate_positive", ic > 1e-3},
                 {"superadditive", ic > q1n + 1e-6}};
    return j.dump(2) + "\n";
}

std::string run_scaling_demo(double gamma) {
    const ScalingFit fit = epsilon_scaling_mi(gamma, {});

    // spectrum of the perturbed output against its second-order expansion
    const Channel ext = tensor(Channel::from_kraus({CMatrix::identity(2)}),
                               amplitude_damping(gamma));
    json table = json::array();
    for (double eps : {1e-3, 1e-2}) {
        CMatrix rho(4, 4);
        rho(1, 1) = rho(2, 2) = rho(1, 2) = rho(2, 1) = eps / 2.0;
        rho(3, 3) = 1.0 - eps;
        const HermEig eg = hermitian_eig(ext.apply(rho).symmetrized());
        const double l2 = gamma + (1.0 - 2.0 * gamma) * eps / 2.0 +
                          (1.0 - gamma) * eps * eps / (4.0 * gamma);
        const double l3 = (1.0 - gamma) * eps / 2.0 - (1.0 - gamma) * eps * eps / (4.0 * gamma);
        table.push_back({{"eps", eps},
                         {"numeric", eg.eigenvalues},
                         {"expansion",
                          {(1.0 - eps) * (1.0 - gamma), l2, l3, eps * gamma / 2.0}}});
    }

    json j;
    j["experiment"] = "scaling_demo";
    j["inputs"] = {{"gamma", gamma}};
    j["fitted_c2_log"] = fit.c2_log;
    j["predicted_c2_log"] = fit.predicted;
    j["fit_residual"] = fit.residual;
    j["eps_grid"] = fit.eps_grid;
    j["eigenvalue_table"] = table;
    j["pass"] = {{"within_10pct", std::abs(fit.c2_log / fit.predicted - 1.0) <= 0.10}};
    return j.dump(2) + "\n";
}

std::string run_ratio_probe(double g1, double g2, std::size_t dim_v, std::size_t samples,
                            std::uint64_t seed) {
    const Channel n1 = amplitude_damping(g1), n2 = amplitude_damping(g2);
    const RatioEstimate r3 = mi_ratio_R3(n1, n2, dim_v, samples, true, seed);
    const auto [sup, inf] = contraction_coefficients(n1, n2, dim_v, samples, seed + 1);

    json j;
    j["experiment"] = "ratio_probe";
    j["inputs"] = {{"g1", g1}, {"g2", g2}, {"dim_v", dim_v}, {"samples", samples},
                   {"seed", seed}};
    j["r3_upper_bound"] = r3.value;
    j["samples_used"] = r3.samples_used;
    j["less_noisy_threshold"] = 1.0 / (1.0 + r3.value);
    j["contraction"] = {{"sup_estimate", sup}, {"inf_estimate", inf}};
    j["conjectured_contraction_inf"] = g2 * (1.0 - g1) / (g1 * (1.0 - g2));
    j["probe_only"] = true;
    j["note"] =
        "sampled bounds on quantities whose true infima need unbounded ancillas; the "
        "conjectured value is reported for comparison only and never asserted";
    return j.dump(2) + "\n";
}

namespace {

class ParamReader {
  public:
    explicit ParamReader(const std::map<std::string, std::string>& p) : params_(p) {}
    double num(const std::string& key, double fallback) {
        seen_.insert(key);
        auto it = params_.find(key);
        if (it == params_.end()) return fallback;
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size())
            throw std::invalid_argument("bad numeric value for param " + key);
        return v;
    }
    std::size_t count(const std::string& key, std::size_t fallback) {
        const double v = num(key, double(fallback));
        if (v < 0 || v != std::floor(v)) throw std::invalid_argument(key + " must be a count");
        return std::size_t(v);
    }
    void finish() const {
        for (const auto& [k, v] : params_)
            if (!seen_.count(k)) throw std::invalid_argument("unknown param: " + k);
    }

  private:
    const std::map<std::string, std::string>& params_;
    std::set<std::string> seen_;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output path: " + path);
    f << content;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
    json echo;
    echo["experiment"] = cfg.experiment;
    echo["seed"] = cfg.seed;
    echo["out"] = cfg.out_path;
    echo["params"] = json::object();
    for (const auto& [k, v] : cfg.params) echo["params"][k] = v;

    auto emit = [&](const std::string& body) {
        if (cfg.out_path.empty()) {
            std::fputs(body.c_str(), stdout);
            return;
        }
        write_file(cfg.out_path, body);
        write_file(cfg.out_path + ".config.json", echo.dump(2) + "\n");
    };

    try {
        ParamReader pr(cfg.params);
        std::string body;
        if (cfg.experiment == "coherent_surface") {
            body = run_coherent_info_surface(pr.count("s_steps", 21), pr.count("t_steps", 21));
        } else if (cfg.experiment == "private_surface") {
            body = run_private_info_surface(pr.count("s_steps", 11), pr.count("t_steps", 11));
        } else if (cfg.experiment == "flagged_region_scan") {
            body = run_flagged_region_scan(pr.count("p_steps", 9), pr.count("g_steps", 9),
                                           pr.count("e_steps", 9));
        } else if (cfg.experiment == "amplification_demo") {
            const auto grid = log_grid(pr.num("eps_lo", 1e-6), pr.num("eps_hi", 1e-2),
                                       pr.count("eps_n", 12));
            body = run_amplification_demo(pr.num("s", 0.3), pr.num("t", 0.2),
                                          pr.num("lambda", 0.5), grid);
        } else if (cfg.experiment == "smith_yard_demo") {
            body = run_smith_yard_demo(pr.num("s", 0.3), pr.num("t", 0.45), pr.count("d_c", 3));
        } else if (cfg.experiment == "scaling_demo") {
            body = run_scaling_demo(pr.num("gamma", 0.3));
        } else if (cfg.experiment == "ratio_probe") {
            body = run_ratio_probe(pr.num("g1", 0.2), pr.num("g2", 0.3), pr.count("dim_v", 2),
                                   pr.count("samples", 36), cfg.seed);
        } else {
            throw std::invalid_argument("unknown experiment: " + cfg.experiment);
        }
        pr.finish();
        emit(body);
        return 0;
    } catch (const std::invalid_argument& e) {
        json err;
        err["error"] = e.what();
        err["exit_code"] = 2;
        emit(err.dump(2) + "\n");
        return 2;
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        err["exit_code"] = 1;
        emit(err.dump(2) + "\n");
        return 1;
    }
}

}  // namespace qadd
