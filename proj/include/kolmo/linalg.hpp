#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace kolmo {

using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// All eigenvalues of a symmetric matrix, ascending (LAPACK dsyevd).
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& a);

struct EigenDecomposition
{
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns
};
EigenDecomposition sym_eigen(const Eigen::MatrixXd& a);

/// Smallest / largest eigenvalue of a symmetric matrix (LAPACK dsyevr, index range).
double sym_min_eigenvalue(const Eigen::MatrixXd& a);
double sym_max_eigenvalue(const Eigen::MatrixXd& a);

/// Eigenvalues of the pencil (a, b) with b symmetric positive semidefinite.
/// Directions where b is below `null_tol` times its largest eigenvalue are
/// projected out before the reduced standard problem is solved.
Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                        double null_tol = 1e-12);

/// Singular values, descending (LAPACK dgesdd).
Eigen::VectorXd singular_values(const Eigen::MatrixXd& a);

/// Spectral norm by power iteration on a^T a (deterministic start vector).
double spectral_norm(const Eigen::MatrixXd& a, int max_iter = 500, double rtol = 1e-10);

inline Eigen::MatrixXd symmetric_part(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
SpMat kron(const Eigen::MatrixXd& a, const SpMat& b);

/// Block-diagonal sparse matrix with `blocks` copies of b.
SpMat block_identity_kron(int blocks, const SpMat& b);

} // namespace kolmo
