#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kolmo/hypolab.hpp"
#include "kolmo/march.hpp"
#include "kolmo/mesh.hpp"

namespace kolmo {

enum class Experiment { Run, Decay, Constants, Coercivity, Infsup, Kappa, Convergence };

const std::vector<std::string>& experiment_names();
std::string to_string(Experiment e);
/// Throws ConfigError naming the closest known experiment.
Experiment parse_experiment(const std::string& name);

/// Closest candidate by edit distance (empty if the list is empty).
std::string closest_name(const std::string& name, const std::vector<std::string>& candidates);

/// Initial state: a named preset or a polynomial sum_k c_k x^{i_k} y^{j_k}.
struct InitialCondition
{
    std::string preset = "sin"; // zero | constant | sin | manufactured | polynomial
    std::vector<std::array<double, 3>> terms; // (i, j, c) when preset == "polynomial"

    SpaceFunction function(const Domain& domain) const;
};

/// One (mesh, degree, step) instance of a sweep.
struct SweepPoint
{
    int n;
    int p;
    int q;
    double k;
};

struct Tolerances
{
    double margin = 1e-8;     // relative eigen-margin threshold of the check_* forms
    double identity = 1e-11;  // relative residual of the exact identities
    double decay = 1e-10;     // absolute slack of the decay inequalities
    double residual = 1e-11;  // normwise backward error of each slab solve
    double certificate = 1e-8; // relative slack of the sampled inf-sup certificate
    double eoc = 1.5;         // smallest accepted empirical order of convergence
};

struct RunConfig
{
    Experiment experiment = Experiment::Run;
    Domain domain;
    int nx = 0;
    int ny = 0;
    int p = 1;
    int q = 0;
    double k = 0.1;
    std::optional<int> steps;
    std::optional<double> t_final;
    InitialCondition initial;
    std::string forcing = "zero"; // zero | manufactured
    std::string coefficients = "full"; // full | semi | penalty
    std::string out_dir = "out";
    Tolerances tol;
    BoundWeights weights; // coercivity right-hand sides
    bool test_constants = false;

    // coercivity / infsup sweeps; empty means the single configured instance
    std::vector<int> sweep_n;
    std::vector<int> sweep_p;
    std::vector<int> sweep_q;
    std::vector<double> sweep_k;

    // convergence
    std::vector<int> levels{4, 8, 16};

    // infsup
    int slabs = 2;
    int samples = 100;
    unsigned long long seed = 20240601ULL;

    /// The uniform grid implied by k and either steps or t_final (default 10 steps).
    TimeGrid time_grid() const;
    std::vector<SweepPoint> sweep() const;
    nlohmann::json to_json() const;
};

/// Validates and fills defaults. Errors are ConfigError with the offending field path.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

} // namespace kolmo
