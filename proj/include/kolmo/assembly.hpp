#pragma once

#include <functional>
#include <span>

#include "kolmo/coeffs.hpp"
#include "kolmo/linalg.hpp"
#include "kolmo/mesh.hpp"
#include "kolmo/polyspace.hpp"

namespace kolmo {

/// Pieces of the spatial dG form. Rows index test functions, columns trial
/// functions; `adg` is their sum.
struct DgFormParts
{
    SpMat diffusion;    // (U_x, V_x)_T
    SpMat advection;    // (x U_y, V)_T
    SpMat consistency;  // -<{n1 U_x},[V]> - <{n1 V_x},[U]>
    SpMat penalty;      // <sigma [U],[V]>
    SpMat upwind_int;   // -<x n2 [[U]], V^+> on interior inflow faces
    SpMat upwind_bdry;  // -<x n2 U^+, V^+> on the inflow boundary

    SpMat sum() const;
};

DgFormParts assemble_adg_parts(const Mesh& mesh, const FaceClass& fc, const DgSpace& space,
                               std::span<const double> sigma_face);
SpMat assemble_adg(const Mesh& mesh, const FaceClass& fc, const DgSpace& space, const CoeffSet& coeffs);

/// ||.||_uw^2: |x n2|-weighted traces on the inflow and outflow boundary plus
/// upwind jumps on interior horizontal faces.
SpMat assemble_uw_gram(const Mesh& mesh, const FaceClass& fc, const DgSpace& space);

/// Spatial matrices of the method for one coefficient set (semi-discrete or one slab).
struct FormSet
{
    SpMat adg;
    SpMat mass;       // identity in the orthonormal basis
    SpMat grad_a;     // sum_T (A grad U, grad V)_T
    SpMat gram_ah;    // mass + grad_a
    SpMat gram_uw;    // ||.||_uw^2
    SpMat gram_jump;  // ||sqrt(sigma)[.]||^2 on interior faces
    SpMat gram_dx;    // sum_T ||U_x||_T^2
    SpMat gram_dy;    // sum_T ||U_y||_T^2
    SpMat gram_dg;    // ||.||_dG^2
    SpMat gram_enh0;  // enhanced norm squared without the streamline term
    SpMat gram_outflow; // sum_T ||sqrt(x n2 A) grad U||^2 on the outflow boundary of T
    SpMat gram_hess_a;  // sum_T ||sqrt(A) grad U_x||_T^2
    SpMat transport;  // coefficients of x U_y
    SpMat div_a;      // coefficients of -div(A grad U)
    SpMat tau;        // block diagonal tau_T
    SpMat poincare;   // broken gradient plus scaled jumps on interior and inflow/outflow boundary

    /// Enhanced norm Gram with w_t = 0 (streamline term evaluated on x w_y only).
    SpMat gram_enh_static() const;
    /// V(U) = U + tau x U_y - div(A grad U) for time-independent U.
    SpMat test_map_semi() const;
};

FormSet assemble_forms(const Mesh& mesh, const FaceClass& fc, const DgSpace& space, const CoeffSet& coeffs);

/// Temporal matrices on one slab in the orthonormal Legendre basis.
struct TemporalForms
{
    Eigen::MatrixXd deriv;  // D(b, a) = int psi_a' psi_b
    Eigen::VectorXd start;  // psi_a(t0^+)
    Eigen::VectorXd end;    // psi_a(t1^-)
};

TemporalForms temporal_forms(const TemporalBasis& basis);

/// The slab matrix of B_n on time-major slab coefficients, and the coupling
/// matrix E with rhs = E u_prev + forcing.
struct SlabSystem
{
    SpMat matrix;
    SpMat coupling;  // (start ⊗ I)
};

SlabSystem assemble_slab_matrix(const SpMat& adg, const TemporalForms& tf);

/// Space-time test map V(U) on one slab.
SpMat assemble_test_map(const FormSet& forms, const TemporalForms& tf);

using SpaceTimeFunction = std::function<double(double x, double y, double t)>;

/// Load vector int_{I_n} (f, V) dt for a slab, using a rule with `extra`
/// points beyond the exact-integration default.
Eigen::VectorXd assemble_slab_load(const DgSpace& space, const TemporalBasis& basis, const SpaceTimeFunction& f,
                                   int extra = 4);

/// Trace operators: spatial coefficients of U(t0^+) and U(t1^-).
SpMat start_trace_operator(const TemporalForms& tf, int ns);
SpMat end_trace_operator(const TemporalForms& tf, int ns);

/// Quadratic form int_{I_n} |||U|||^2 dt on slab coefficients.
SpMat slab_enhanced_gram(const FormSet& forms, const TemporalForms& tf);

} // namespace kolmo
