#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qadd/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"channel capacity experiment runner"};

    std::string experiment;
    std::vector<std::string> params;
    std::string out_path;
    std::uint64_t seed = 0;

    app.add_option("experiment", experiment,
                   "one of: coherent_surface, private_surface, flagged_region_scan, "
                   "amplification_demo, smith_yard_demo, scaling_demo, ratio_probe")
        ->required();
    app.add_option("--param", params, "experiment parameter as key=value (repeatable)");
    app.add_option("--out", out_path, "output file (CSV or JSON); config echo written next to it");
    app.add_option("--seed", seed, "RNG seed pinning all sampling");

    CLI11_PARSE(app, argc, argv);

    qadd::ExperimentConfig cfg;
    cfg.experiment = experiment;
    cfg.out_path = out_path;
    cfg.seed = seed;
    for (const std::string& kv : params) {
        const auto pos = kv.find('=');
        if (pos == std::string::npos || pos == 0) {
            std::fprintf(stderr, "bad --param (expected key=value): %s\n", kv.c_str());
            return 2;
        }
        cfg.params[kv.substr(0, pos)] = kv.substr(pos + 1);
    }

    try {
        return qadd::run_experiment(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
