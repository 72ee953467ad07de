#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kolmo/mesh.hpp"

namespace kolmo {

/// Legendre polynomial P_n and its first two derivatives at s.
struct LegendreValue
{
    double value, d1, d2;
};
LegendreValue legendre(int n, double s);

/// One-dimensional Gauss-Legendre rule on [-1, 1].
struct QuadRule
{
    std::vector<double> points;
    std::vector<double> weights;
    int exactness; // highest polynomial degree integrated exactly

    std::size_t size() const { return points.size(); }
};

QuadRule gauss_legendre(int npoints);

/// Rules used for degree-(p, q) discretisations. The cell rule is the
/// tensor product of `line` with itself.
struct QuadratureSet
{
    QuadRule line;  // cell (tensor) and face rule, exact to 2p+3
    QuadRule time;  // temporal rule, exact to 2q+3
};

QuadratureSet make_quadrature(int p, int q);

struct Mode
{
    int i; // degree in the local x-coordinate
    int j; // degree in the local y-coordinate
};

/// Basis values and derivatives of all local modes at one point.
struct BasisEval
{
    Eigen::VectorXd value, dx, dy, dxx, dxy, dyy;
};

/**
 * Broken polynomial space of total degree <= p on a rectangular mesh.
 *
 * Each element carries the tensor Legendre products P_i(xi) P_j(eta) with
 * i + j <= p, scaled to be L2-orthonormal on the physical cell; the local
 * mass matrix is therefore the identity and the span is exactly P_p(T).
 * The space keeps a pointer to the mesh, which must outlive it.
 */
class DgSpace
{
public:
    DgSpace(const Mesh& mesh, int p);

    const Mesh& mesh() const { return *mesh_; }
    int degree() const { return p_; }
    int local_dim() const { return nloc_; }
    int num_dofs() const { return nloc_ * mesh_->num_elements(); }
    int dof(int element, int mode) const { return element * nloc_ + mode; }
    const std::vector<Mode>& modes() const { return modes_; }

    /// Values and derivatives (up to second order) of the local basis of
    /// element e at physical point (x, y).
    void evaluate(int e, double x, double y, BasisEval& out) const;
    BasisEval evaluate(int e, double x, double y) const;

    /// Value of the discrete function with global coefficients `u` at (x, y) in element e.
    double value(const Eigen::VectorXd& u, int e, double x, double y) const;

private:
    const Mesh* mesh_;
    int p_;
    int nloc_;
    std::vector<Mode> modes_;
};

/// Orthonormal Legendre basis of P_q on a time interval [t0, t1].
class TemporalBasis
{
public:
    TemporalBasis(int q, double t0, double t1);

    int degree() const { return q_; }
    int dim() const { return q_ + 1; }
    double t0() const { return t0_; }
    double t1() const { return t1_; }
    double length() const { return t1_ - t0_; }

    double value(int a, double t) const;
    double derivative(int a, double t) const;
    /// Values of all basis functions at t.
    Eigen::VectorXd values(double t) const;
    /// D(b, a) = int psi_a' psi_b dt, i.e. the coefficients of d/dt in the basis.
    Eigen::MatrixXd derivative_matrix() const;
    /// Traces at t0^+ and t1^-.
    Eigen::VectorXd start_trace() const { return values(t0_); }
    Eigen::VectorXd end_trace() const { return values(t1_); }

private:
    int q_;
    double t0_, t1_;
};

/// Space-time slab space: spatial dofs times (q + 1) temporal modes,
/// ordered time-major (index = a * Ns + i).
class SlabSpace
{
public:
    SlabSpace(const DgSpace& space, int q, double t0, double t1);

    const DgSpace& space() const { return *space_; }
    const TemporalBasis& time() const { return time_; }
    int q() const { return time_.degree(); }
    int num_spatial() const { return space_->num_dofs(); }
    int num_dofs() const { return time_.dim() * space_->num_dofs(); }
    int dof(int a, int i) const { return a * space_->num_dofs() + i; }

    /// Spatial coefficients of U(t) for slab coefficients u.
    Eigen::VectorXd at(const Eigen::VectorXd& u, double t) const;

private:
    const DgSpace* space_;
    TemporalBasis time_;
};

/// Inverse-inequality constants for one polynomial degree:
///   ||V||_{dT} <= c_trace p h^{-1/2} ||V||_T,  ||grad V||_T <= c_grad p^2 h^{-1} ||V||_T.
struct InverseConstants
{
    int p = 1;
    double c_trace = 1.0;
    double c_grad = 1.0;

    static InverseConstants unit(int p) { return {p, 1.0, 1.0}; }
};

/// Certified constants: largest generalized eigenvalues of the trace and
/// stiffness forms against the mass on each reference shape (width/height
/// ratio), maximised over the given shapes. For p = 0 the trace constant is
/// normalised with p = 1 and c_grad = 0.
InverseConstants compute_inverse_constants(int p, std::span<const double> aspect_ratios);
InverseConstants compute_inverse_constants(int p);

/// Constants valid for every cell of `mesh`.
InverseConstants inverse_constants_for(const Mesh& mesh, int p);

/// Temporal inverse constants as used symbolically: trace (q+1), derivative sqrt(12)(q+1)^2.
inline double temporal_trace_constant(int q) { return q + 1.0; }
double temporal_derivative_constant(int q);

} // namespace kolmo
