#include "kolmo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "kolmo/error.hpp"

namespace kolmo {

namespace {

void require_square(const Eigen::MatrixXd& a, const char* what)
{
    if (a.rows() != a.cols())
        throw NumericError(std::string(what) + ": matrix is not square");
    if (!a.allFinite())
        throw NumericError(std::string(what) + ": non-finite entries");
}

void check_info(lapack_int info, const char* what)
{
    if (info != 0)
        throw NumericError(std::string(what) + ": LAPACK info = " + std::to_string(info));
}

double sym_eigenvalue_at(const Eigen::MatrixXd& a, lapack_int index)
{
    require_square(a, "sym eigenvalue");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXd work = a;
    lapack_int m = 0;
    double w[1];
    std::vector<double> w_all(static_cast<std::size_t>(n));
    std::vector<lapack_int> isuppz(2);
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'N', 'I', 'L', n, work.data(), n, 0.0, 0.0, index, index,
                                           0.0, &m, w_all.data(), w, 1, isuppz.data());
    check_info(info, "dsyevr");
    if (m != 1)
        throw NumericError("dsyevr: eigenvalue not found");
    return w_all[0];
}

} // namespace

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& a)
{
    require_square(a, "sym_eigenvalues");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXd work = a;
    Eigen::VectorXd w(n);
    if (n == 0)
        return w;
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data()), "dsyevd");
    return w;
}

EigenDecomposition sym_eigen(const Eigen::MatrixXd& a)
{
    require_square(a, "sym_eigen");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    EigenDecomposition out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
    if (n == 0)
        return out;
    Eigen::MatrixXd work = a;
    lapack_int m = 0;
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    check_info(LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', n, work.data(), n, 0.0, 0.0, 0, 0, 0.0, &m,
                              out.values.data(), out.vectors.data(), n, isuppz.data()),
               "dsyevr");
    return out;
}

double sym_min_eigenvalue(const Eigen::MatrixXd& a)
{
    return sym_eigenvalue_at(a, 1);
}

double sym_max_eigenvalue(const Eigen::MatrixXd& a)
{
    return sym_eigenvalue_at(a, static_cast<lapack_int>(a.rows()));
}

Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double null_tol)
{
    require_square(a, "generalized_eigenvalues");
    require_square(b, "generalized_eigenvalues");
    if (a.rows() != b.rows())
        throw NumericError("generalized_eigenvalues: dimension mismatch");
    // Extended precision: the smallest eigenvalues of interest sit near eps * |a| in double.
    using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const MatL al = symmetric_part(a).cast<long double>();
    const MatL bl = symmetric_part(b).cast<long double>();
    const Eigen::SelfAdjointEigenSolver<MatL> eb(bl);
    if (eb.info() != Eigen::Success)
        throw NumericError("generalized_eigenvalues: eigensolver failed on the right-hand form");
    const long double top = eb.eigenvalues().cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < eb.eigenvalues().size(); ++i)
        if (eb.eigenvalues()[i] > null_tol * top)
            keep.push_back(i);
    if (keep.empty())
        throw NumericError("generalized_eigenvalues: right-hand form is numerically zero");
    MatL z(b.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        z.col(static_cast<Eigen::Index>(j)) = eb.eigenvectors().col(keep[j]) / std::sqrt(eb.eigenvalues()[keep[j]]);
    MatL reduced = z.transpose() * al * z;
    reduced = (0.5L * (reduced + MatL(reduced.transpose()))).eval();
    const Eigen::SelfAdjointEigenSolver<MatL> er(reduced, Eigen::EigenvaluesOnly);
    if (er.info() != Eigen::Success)
        throw NumericError("generalized_eigenvalues: eigensolver failed on the reduced form");
    return er.eigenvalues().cast<double>();
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& a)
{
    if (!a.allFinite())
        throw NumericError("singular_values: non-finite entries");
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    Eigen::MatrixXd work = a;
    Eigen::VectorXd s(std::min(m, n));
    if (s.size() == 0)
        return s;
    double dummy = 0.0;
    check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(), &dummy, 1, &dummy, 1), "dgesdd");
    return s;
}

double spectral_norm(const Eigen::MatrixXd& a, int max_iter, double rtol)
{
    if (a.size() == 0)
        return 0.0;
    Eigen::VectorXd v(a.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
    v.normalize();
    double est = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd w = a.transpose() * (a * v);
        const double nw = w.norm();
        if (nw == 0.0)
            return 0.0;
        v = w / nw;
        const double prev = est;
        est = std::sqrt(nw);
        if (std::abs(est - prev) <= rtol * est)
            break;
    }
    return est;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

SpMat kron(const Eigen::MatrixXd& a, const SpMat& b)
{
    Triplets t;
    t.reserve(static_cast<std::size_t>(a.size() * b.nonZeros()));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (a(i, j) == 0.0)
                continue;
            for (int k = 0; k < b.outerSize(); ++k)
                for (SpMat::InnerIterator it(b, k); it; ++it)
                    t.emplace_back(i * b.rows() + it.row(), j * b.cols() + it.col(), a(i, j) * it.value());
        }
    }
    SpMat out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

SpMat block_identity_kron(int blocks, const SpMat& b)
{
    return kron(Eigen::MatrixXd::Identity(blocks, blocks), b);
}

} // namespace kolmo
