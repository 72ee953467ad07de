#pragma once

#include <random>
#include <string>
#include <vector>

#include "kolmo/assembly.hpp"
#include "kolmo/march.hpp"

namespace kolmo {

/// Mesh, face classification, broken space and inverse constants of one
/// instance. Not copyable: the space refers to the mesh it owns.
class Discretisation
{
public:
    Discretisation(const Domain& domain, int nx, int ny, int p, bool test_constants = false);
    Discretisation(const Discretisation&) = delete;
    Discretisation& operator=(const Discretisation&) = delete;

    const Mesh& mesh() const { return mesh_; }
    const FaceClass& faces() const { return fc_; }
    const DgSpace& space() const { return space_; }
    const InverseConstants& constants() const { return constants_; }
    int degree() const { return space_.degree(); }

    CoeffSet semi_coeffs() const { return make_semi_coeffs(mesh_, fc_, degree(), constants_); }
    CoeffSet full_coeffs(int q, double k) const { return make_full_coeffs(mesh_, fc_, degree(), q, k, constants_); }
    FormSet forms(const CoeffSet& cs) const { return assemble_forms(mesh_, fc_, space_, cs); }

private:
    Mesh mesh_;
    FaceClass fc_;
    DgSpace space_;
    InverseConstants constants_;
};

/// Outcome of a quadratic-form positivity check lambda_min(Q) >= -tol * scale.
struct MarginReport
{
    double margin = 0.0;    // smallest eigenvalue of the symmetric check form
    double scale = 0.0;     // max of the spectral norms of its two sides
    double threshold = 0.0; // -tol * scale
    bool pass = false;

    double relative() const { return scale > 0.0 ? margin / scale : margin; }
};

MarginReport make_margin(double margin, double scale, double tol);

/// Largest relative residual of the upwind identity
/// sum_T [(x U_y, U) - <x n2 [[U]], U^+> - <x n2 U^+, U^+>_{Gamma_-}] = 1/2 ||U||_uw^2
/// over `samples` random coefficient vectors.
double verify_uw_identity(const Mesh& mesh, const FaceClass& fc, const DgSpace& space, int samples,
                          std::mt19937_64& rng);

/// Largest relative residual of
/// int (U_t, U) + <U(t^+) - U_prev, U(t^+)> = 1/2 (|U(t^+) - U_prev|^2 + |U(t^-)|^2 - |U_prev|^2).
double verify_slab_energy_identity(const DgSpace& space, int q, double k, int samples, std::mt19937_64& rng);

/// Weights of the right-hand sides of the positivity bounds. The defaults are
/// the bounds as stated: 1/2 on the L2 part of ||[[U]]||_A^2 and 2 on ||.||_uw^2
/// inside |||.|||^2.
struct BoundWeights
{
    double jump_l2 = 0.5;
    double uw = 2.0;
};

/// Joint form in (U, U_t): (U_t, V) + a_dG(U, V) - 1/2 d/dt ||U||_{A,h}^2 - 1/4 |||U|||^2.
Eigen::MatrixXd semi_positivity_form(const FormSet& forms, Eigen::MatrixXd* lhs = nullptr,
                                     Eigen::MatrixXd* rhs = nullptr, const BoundWeights& w = {});
MarginReport check_semi_positivity(const FormSet& forms, double tol = 1e-8, const BoundWeights& w = {});

/// Joint form in (slab coefficients, U(t_{n-1}^-)):
/// B_n(U, V) - 1/2(||U(t_n^-)||_A^2 - ||U_prev||_A^2 + ||[[U]]||_A^2) - 1/4 int |||U|||^2.
Eigen::MatrixXd full_coercivity_form(const FormSet& forms, const TemporalForms& tf, Eigen::MatrixXd* lhs = nullptr,
                                     Eigen::MatrixXd* rhs = nullptr, const BoundWeights& w = {});
MarginReport check_fulldiscrete_coercivity(const FormSet& forms, const TemporalForms& tf, double tol = 1e-8,
                                           const BoundWeights& w = {});

struct GapEstimate
{
    double kappa_num = 0.0;
    double kappa_formula = 0.0;
    double c_bpf = 0.0;
    double delta_max = 0.0;
    double h_bar_min = 0.0;
    double delta_branch = 0.0; // min_T 1/(228 delta_T^2)
    double mesh_branch = 0.0;  // h_bar_min^2 / (1024 p^2)
};

/// Smallest generalized eigenvalue of the enhanced norm (w_t = 0) against ||.||_{A,h}^2,
/// the numerical broken Poincare constant and the resulting lower bound for kappa.
GapEstimate estimate_kappa(const Discretisation& disc, const CoeffSet& cs);
/// Everything but kappa_num (which is left at zero).
GapEstimate estimate_kappa_formula(const Discretisation& disc, const CoeffSet& cs);
double broken_poincare_constant(const FormSet& forms);

struct InfSupReport
{
    int dofs = 0;
    double lambda_h = 0.0;        // smallest singular value in the |||.|||_st geometries
    double coercivity_min = 0.0;  // min B(U, V(U)) / |||U|||_st^2 (exact)
    double coercivity_sampled = 0.0;
    double ratio_max = 0.0;       // max |||V(U)|||_st / |||U|||_st (exact)
    double ratio_sampled = 0.0;
    double implied_lower = 0.0;   // coercivity_min / ratio_max
};

/// Space-time inf-sup quantities on `slabs` uniform slabs of length k.
InfSupReport compute_infsup(const Discretisation& disc, int q, double k, int slabs, int samples, std::mt19937_64& rng);

struct DecayReport
{
    DecayTrace trace;
    double kappa = 0.0;
    double tol = 0.0;
    std::vector<double> step_margin;  // bound * ||U_{n-1}||_A^2 - ||U_n||_A^2, passes at >= -tol
    std::vector<double> l2_factor;    // ||U_n|| / ||U_{n-1}||
    std::vector<double> a_factor;     // ||U_n||_A / ||U_{n-1}||_A
    double cumulative_margin = 0.0;   // prod bound * ||U_0||_A^2 - ||U_N||_A^2
    double exponential_limit = 0.0;   // exp(-kappa t_f / (4 (q+1)^2))
    double max_increase = 0.0;        // max_n (||U_n||_A - ||U_{n-1}||_A)
    bool steps_pass = false;
    bool cumulative_pass = false;
    bool monotone_pass = false;
};

/// f = 0 run checking the per-step and cumulative decay bounds with kappa_num of
/// the slab coefficient set.
DecayReport decay_experiment(const Discretisation& disc, int q, double k, int steps, const SpaceFunction& u0,
                             double tol = 1e-10);

/// Random-sample certification of the spatial inverse inequalities on one cell
/// shape (width / height = aspect). Ratios are taken against the bounds, so a
/// value above 1 is a violation.
struct InverseSampleReport
{
    int samples = 0;
    int violations = 0;
    double max_trace_ratio = 0.0;
    double max_grad_ratio = 0.0;
};

InverseSampleReport sample_inverse_inequalities(int p, const InverseConstants& c, double aspect, int samples,
                                                std::mt19937_64& rng, double rtol = 1e-12);

/// Sharp temporal constants on an interval of length k, from the extremal
/// Legendre combinations: sqrt(k) max |V(t^-)| / ||V|| and k max ||V'|| / ||V||.
struct TemporalConstantReport
{
    double trace_extremal = 0.0;
    double trace_constant = 0.0;
    double derivative_extremal = 0.0;
    double derivative_constant = 0.0;
};

TemporalConstantReport temporal_constants_check(int q, double k);

struct ConvergenceRow
{
    int n;
    double h;
    double k;
    double error;
    double eoc; // NaN on the first row
};

/// L2 errors at t_f for u = e^{-t} sin^2(pi x) sin(pi y) on (0,1)^2.
std::vector<ConvergenceRow> manufactured_convergence(const std::vector<int>& levels, int p, int q, double t_final,
                                                     double k_coarse, bool test_constants = false);

double manufactured_solution(double x, double y, double t);
double manufactured_forcing(double x, double y, double t);

} // namespace kolmo
