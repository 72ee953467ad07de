#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kolmo/config.hpp"

namespace kolmo {

/// One verdict of a summary: PASS iff margin >= threshold (margin > threshold when strict).
struct Check
{
    std::string name;
    double margin;
    double threshold;
    bool strict = false;

    bool pass() const { return strict ? margin > threshold : margin >= threshold; }
};

struct ExperimentResult
{
    nlohmann::json results = nlohmann::json::object();
    std::vector<Check> checks;
    std::vector<std::string> files; // written artifacts, relative to the output directory

    bool all_pass() const;
    nlohmann::json summary(const RunConfig& cfg) const;
};

/// Runs the configured experiment, writes its CSV/JSON artifacts and
/// summary.json into cfg.out_dir.
ExperimentResult run_experiment(const RunConfig& cfg);

/// 0 when every check passes, 1 otherwise.
int exit_code(const ExperimentResult& r);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace kolmo
