#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qadd {

/// A fully resolved experiment invocation. The seed pins all sampling, so an
/// identical config reproduces the output byte for byte.
struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> params;
    std::string out_path;
    std::uint64_t seed = 0;
};

// Surfaces (CSV, header row, 10-significant-digit floats, rows in grid order)

/// (s, t, u_star, q1) over the simplex grid; steps per axis capped at 200.
std::string run_coherent_info_surface(std::size_t s_steps, std::size_t t_steps);

/// (s, t, p_star, u_star, p1) maximizing the private information over the
/// two-state ensemble {|0><0|, u|1><1| + (1-u)|2><2|} with weights (p, 1-p).
std::string run_private_info_surface(std::size_t s_steps, std::size_t t_steps);

/// (p, gamma, eta, analytic, numeric, agree) comparing the inequality
/// classifier against the projection-based feasibility search; grid points
/// within 0.02 of a classification boundary are skipped.
std::string run_flagged_region_scan(std::size_t p_steps, std::size_t g_steps,
                                    std::size_t e_steps);

// Demos (JSON reports with inputs, analytic bounds, estimates, pass flags)

std::string run_amplification_demo(double s, double t, double lambda,
                                   const std::vector<double>& eps_grid);
std::string run_smith_yard_demo(double s, double t, std::size_t d_c);
std::string run_scaling_demo(double gamma);
std::string run_ratio_probe(double g1, double g2, std::size_t dim_v, std::size_t samples,
                            std::uint64_t seed);

/// Dispatches on cfg.experiment, writes the output plus a config echo next to
/// it. Returns 0 on success, 1 on internal errors, 2 on precondition
/// violations (which are also reported as JSON in the output file).
int run_experiment(const ExperimentConfig& cfg);

}  // namespace qadd
