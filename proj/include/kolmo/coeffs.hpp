#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kolmo/mesh.hpp"
#include "kolmo/polyspace.hpp"

namespace kolmo {

/// Interior-penalty weight on a face shared by cells of diameters h_a, h_b:
/// 64 N (C_trace n1 p)^2 max(1/h_a, 1/h_b).
double sigma_face(double n1, double h_a, double h_b, int p, const InverseConstants& c);

/// Semi-discrete streamline weight tau_T. Requires p >= 1.
double tau_semi(double h, int p, double sigma_t, double x_n2, const InverseConstants& c);

/// Space-time streamline weight: min{tau_T, k / (64 (q+1)^2)}.
double tau_full(double tau_t, double k, int q);

/// Geometric inputs of the delta formula for one element.
struct DeltaInputs
{
    double h;
    int p;
    double tau;       // tau_T (semi) or tau_{T,n} (space-time)
    double x_n2;
    double n1;        // max over faces of T of n1^F
    double c_rho;
};

double delta_semi(const DeltaInputs& in, const InverseConstants& c);
/// Adds the 2 h^2 (q+1)^2 p^-4 / k term to R before taking the root.
double delta_full(const DeltaInputs& in, double k, int q, const InverseConstants& c);

/// The matrix A(delta) = [[alpha, beta], [beta, gamma]].
struct AMatrix
{
    double alpha, beta, gamma;

    Eigen::Matrix2d matrix() const
    {
        Eigen::Matrix2d a;
        a << alpha, beta, beta, gamma;
        return a;
    }
    double det() const { return alpha * gamma - beta * beta; }
};

AMatrix abc_from_delta(double delta);

/// Elementary bounds for a symmetric PSD 2x2 matrix [[a, b], [b, c]] with a >= c >= 0:
/// (ac - b^2)/(a + |b|) <= lambda_min <= lambda_max <= a + |b| <= 2a.
struct SpectralBounds2x2
{
    double a, b, c;
    double lower, upper;
};

SpectralBounds2x2 spectral_bounds(double a, double b, double c);

/// Per-element (and per-face) coefficients of the method. For space-time
/// sets, tau and delta are the slab values tau_{T,n}, delta_{T,n}.
struct CoeffSet
{
    int p = 1;
    int q = 0;
    double k = 0.0; // 0 for the semi-discrete set
    InverseConstants constants;
    double c_rho = 1.0;

    std::vector<double> sigma_face;  // per face; zero on boundary faces
    std::vector<double> sigma;       // per element: max over its faces
    std::vector<double> tau;
    std::vector<double> delta;
    std::vector<AMatrix> a;

    bool space_time() const { return k > 0.0; }
};

/// Penalty weights only (tau, delta and A left empty); valid for p = 0.
CoeffSet make_penalty_coeffs(const Mesh& mesh, const FaceClass& fc, int p, const InverseConstants& c);
CoeffSet make_semi_coeffs(const Mesh& mesh, const FaceClass& fc, int p, const InverseConstants& c);
CoeffSet make_full_coeffs(const Mesh& mesh, const FaceClass& fc, int p, int q, double k, const InverseConstants& c);

} // namespace kolmo
