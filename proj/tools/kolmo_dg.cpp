#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "kolmo/config.hpp"
#include "kolmo/error.hpp"
#include "kolmo/experiments.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_runtime = 3;

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Space-time dG solver and verification lab for u_t - u_xx + x u_y = f"};
    std::string experiment, config_path, out_dir;
    bool test_constants = false;
    app.add_option("experiment", experiment, "run | decay | constants | coercivity | infsup | kappa | convergence")
        ->required();
    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_flag("--test-constants", test_constants, "use C_trace = C_grad = 1");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try {
        kolmo::RunConfig cfg = kolmo::load_config(config_path);
        cfg.experiment = kolmo::parse_experiment(experiment);
        if (!out_dir.empty())
            cfg.out_dir = out_dir;
        if (test_constants)
            cfg.test_constants = true;
        const kolmo::ExperimentResult r = kolmo::run_experiment(cfg);
        for (const kolmo::Check& c : r.checks)
            if (!c.pass())
                std::fprintf(stderr, "FAIL %s: margin %.6g < threshold %.6g\n", c.name.c_str(), c.margin, c.threshold);
        std::printf("%s: %zu checks, %s -> %s\n", kolmo::to_string(cfg.experiment).c_str(), r.checks.size(),
                    r.all_pass() ? "PASS" : "FAIL", cfg.out_dir.c_str());
        return kolmo::exit_code(r);
    } catch (const kolmo::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_runtime;
    }
}
