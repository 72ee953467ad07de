#pragma once

#include <functional>
#include <vector>

#include "kolmo/assembly.hpp"
#include "kolmo/io.hpp"

namespace kolmo {

/// Breakpoints 0 = t_0 < t_1 < ... < t_N = t_f.
class TimeGrid
{
public:
    explicit TimeGrid(std::vector<double> breakpoints);
    static TimeGrid uniform(double k, int steps);
    /// Uniform steps of length close to k that land exactly on t_f.
    static TimeGrid until(double t_final, double k);

    int num_steps() const { return static_cast<int>(t_.size()) - 1; }
    double t(int n) const { return t_[static_cast<std::size_t>(n)]; }
    double k(int n) const { return t(n) - t(n - 1); } // n = 1..N
    double t_final() const { return t_.back(); }
    bool is_uniform(double rtol = 1e-12) const;

private:
    std::vector<double> t_;
};

struct DecayRow
{
    int n;
    double t;
    double a_norm;        // ||U(t_n^-)||_{A,h}
    double l2_norm;       // ||U(t_n^-)||
    double jump_a_norm;   // ||[[U]]_{n-1}||_{A,h}
    double enh_integral;  // int_{I_n} |||U|||^2 dt
    double bound_product; // prod_m (1 + kappa k_m / (2 (q+1)^2))^{-1}
};

struct DecayTrace
{
    std::vector<DecayRow> rows;

    CsvTable table() const;
};

using SpaceFunction = std::function<double(double x, double y)>;

/// L2 projection onto the broken space (identity mass: plain quadrature moments).
Eigen::VectorXd project_initial(const DgSpace& space, const SpaceFunction& u0, int extra = 4);

struct MarchOptions
{
    int q = 0;
    SpaceTimeFunction forcing;       // empty means f = 0
    const FormSet* forms = nullptr;  // enables A-norm and enhanced-norm records
    double kappa = 0.0;              // rate used in the product bound
    double residual_tol = 1e-11;     // normwise backward error of each slab solve
    bool keep_slabs = false;
};

struct MarchResult
{
    Eigen::VectorXd last_slab;            // time-major coefficients on I_N
    Eigen::VectorXd final_state;          // U(t_N^-)
    std::vector<Eigen::VectorXd> slabs;   // all slabs when requested
    DecayTrace trace;
    /// Per step: ||U_n||_A^2 + kappa/2 int ||U||_A^2 - ||U_{n-1}||_A^2 (non-positive when the
    /// stability estimate holds); filled when forms are given.
    std::vector<double> stab_residuals;
    double max_backward_error = 0.0;
};

/// Solves the slab systems in sequence. `adg` is the spatial form; pass a zero
/// matrix to obtain pure L2 time-projection dynamics.
MarchResult march(const DgSpace& space, const SpMat& adg, const TimeGrid& grid, const Eigen::VectorXd& u0,
                  const MarchOptions& opt);

/// Values of the slab function with coefficients `slab` on [t0, t1] at (t, points).
std::vector<double> evaluate_solution(const DgSpace& space, int q, double t0, double t1, const Eigen::VectorXd& slab,
                                      double t, const std::vector<Point>& points);

/// L2(Omega) distance between the spatial function with coefficients u and g.
double l2_error(const DgSpace& space, const Eigen::VectorXd& u, const SpaceFunction& g, int extra = 4);

} // namespace kolmo
