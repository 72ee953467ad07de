#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "kolmo/error.hpp"
#include "kolmo/polyspace.hpp"
#include "oracle.hpp"

using namespace kolmo;

namespace {

// Monomial x^a y^b on the unit square: cell, edge and gradient moments in closed form.
struct MonomialForms
{
    Eigen::MatrixXd mass, stiffness, trace;
};

MonomialForms monomial_forms(int p)
{
    std::vector<std::pair<int, int>> m;
    for (int d = 0; d <= p; ++d)
        for (int j = 0; j <= d; ++j)
            m.emplace_back(d - j, j);
    const int n = static_cast<int>(m.size());
    auto cell = [](int a, int b) { return (a < 0 || b < 0) ? 0.0 : 1.0 / ((a + 1.0) * (b + 1.0)); };
    // integral over the four edges of x^a y^b
    auto edges = [](int a, int b) {
        double s = 0.0;
        s += (b == 0 ? 1.0 : 0.0) / (a + 1.0); // y = 0
        s += 1.0 / (a + 1.0);                  // y = 1
        s += (a == 0 ? 1.0 : 0.0) / (b + 1.0); // x = 0
        s += 1.0 / (b + 1.0);                  // x = 1
        return s;
    };
    MonomialForms f{Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto [a1, b1] = m[i];
            const auto [a2, b2] = m[j];
            f.mass(i, j) = cell(a1 + a2, b1 + b2);
            f.trace(i, j) = edges(a1 + a2, b1 + b2);
            f.stiffness(i, j) = a1 * a2 * cell(a1 + a2 - 2, b1 + b2) + b1 * b2 * cell(a1 + a2, b1 + b2 - 2);
        }
    return f;
}

double max_generalized(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

} // namespace

TEST_CASE("p = 0 basis is the normalised constant")
{
    const Mesh m = build_rect_mesh({0.0, 2.0, 0.0, 1.5}, 2, 3);
    const DgSpace s(m, 0);
    CHECK(s.local_dim() == 1);
    for (int e = 0; e < m.num_elements(); ++e) {
        const Point c = m.element(e).center();
        const BasisEval b = s.evaluate(e, c.x + 0.1, c.y - 0.05);
        CHECK(b.value[0] == doctest::Approx(1.0 / std::sqrt(m.element(e).area())));
        CHECK(b.dx[0] == 0.0);
        CHECK(b.dy[0] == 0.0);
    }
}

TEST_CASE("local dimension and modes are total degree")
{
    const Mesh m = build_rect_mesh({}, 1, 1);
    for (int p = 0; p <= 5; ++p) {
        const DgSpace s(m, p);
        CHECK(s.local_dim() == (p + 1) * (p + 2) / 2);
        for (const Mode& md : s.modes())
            CHECK(md.i + md.j <= p);
    }
}

TEST_CASE("derivatives match central differences")
{
    const Mesh m = build_rect_mesh({-1.0, 1.0, 0.0, 0.5}, 4, 2);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 0.9);
    for (int p : {2, 4}) {
        const DgSpace s(m, p);
        for (int e = 0; e < m.num_elements(); ++e) {
            const Element& el = m.element(e);
            const double x = el.x_lo + u(rng) * el.width(), y = el.y_lo + u(rng) * el.height();
            const double eps = 1e-6;
            const BasisEval b = s.evaluate(e, x, y);
            const BasisEval xp = s.evaluate(e, x + eps, y), xm = s.evaluate(e, x - eps, y);
            const BasisEval yp = s.evaluate(e, x, y + eps), ym = s.evaluate(e, x, y - eps);
            const double scale = std::max(1.0, b.value.cwiseAbs().maxCoeff());
            CHECK(((xp.value - xm.value) / (2 * eps) - b.dx).cwiseAbs().maxCoeff() < 1e-8 * scale * 10);
            CHECK(((yp.value - ym.value) / (2 * eps) - b.dy).cwiseAbs().maxCoeff() < 1e-8 * scale * 10);
            CHECK(((xp.dx - xm.dx) / (2 * eps) - b.dxx).cwiseAbs().maxCoeff() < 1e-6 * scale * 10);
            CHECK(((yp.dx - ym.dx) / (2 * eps) - b.dxy).cwiseAbs().maxCoeff() < 1e-6 * scale * 10);
            CHECK(((yp.dy - ym.dy) / (2 * eps) - b.dyy).cwiseAbs().maxCoeff() < 1e-6 * scale * 10);
        }
    }
}

TEST_CASE("local mass matrix is the identity")
{
    const Mesh m = build_rect_mesh({-0.5, 1.5, 0.25, 1.0}, 4, 3);
    for (int p = 0; p <= 6; ++p) {
        const DgSpace s(m, p);
        const int n = s.local_dim();
        for (int e = 0; e < m.num_elements(); ++e) {
            Eigen::MatrixXd mass(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    mass(i, j) = oracle::cell_integral(m, e, [&](double x, double y) {
                        const BasisEval b = s.evaluate(e, x, y);
                        return b.value[i] * b.value[j];
                    });
            CHECK((mass - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("Gauss rules integrate monomials exactly")
{
    for (int npts = 1; npts <= 10; ++npts) {
        const QuadRule r = gauss_legendre(npts);
        CHECK(r.exactness == 2 * npts - 1);
        for (int d = 0; d <= r.exactness; ++d) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i)
                s += r.weights[i] * std::pow(r.points[i], d);
            const double exact = d % 2 ? 0.0 : 2.0 / (d + 1.0);
            CHECK(std::abs(s - exact) < 1e-14);
        }
    }
}

TEST_CASE("degree-(p, q) rules")
{
    for (int p = 0; p <= 6; ++p) {
        const QuadratureSet qs = make_quadrature(p, p);
        CHECK(qs.line.exactness >= 2 * p + 1);
        CHECK(qs.time.exactness >= 2 * p + 1);
        double s = 0.0;
        for (std::size_t i = 0; i < qs.line.size(); ++i)
            s += 0.5 * qs.line.weights[i] * std::pow(0.5 * (qs.line.points[i] + 1.0), 2 * p);
        CHECK(std::abs(s - 1.0 / (2 * p + 1.0)) < 1e-14);
    }
    const Mesh m = build_rect_mesh({}, 1, 1);
    CHECK(oracle::cell_integral(m, 0, [](double x, double) { return x; }, 1) == doctest::Approx(0.5).epsilon(1e-15));
    const Face& bottom = m.face(m.element(0).faces[static_cast<int>(Side::bottom)]);
    CHECK(oracle::face_integral(bottom, [](double x, double) { return x; }, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("temporal basis")
{
    const TemporalBasis tb(3, 0.2, 0.45);
    const QuadRule r = gauss_legendre(6);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(4, 4), deriv = mass;
    for (std::size_t g = 0; g < r.size(); ++g) {
        const double t = 0.2 + 0.125 * (r.points[g] + 1.0);
        const double w = 0.125 * r.weights[g];
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                mass(a, b) += w * tb.value(a, t) * tb.value(b, t);
                deriv(b, a) += w * tb.derivative(a, t) * tb.value(b, t);
            }
    }
    CHECK((mass - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((deriv - tb.derivative_matrix()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(tb.end_trace()[2] == doctest::Approx(std::sqrt(5.0 / 0.25)));
    CHECK(tb.start_trace()[1] == doctest::Approx(-std::sqrt(3.0 / 0.25)));
}

TEST_CASE("slab evaluation rejects times outside the slab")
{
    const Mesh m = build_rect_mesh({}, 1, 1);
    const DgSpace s(m, 1);
    const SlabSpace ss(s, 1, 0.0, 0.1);
    const Eigen::VectorXd u = Eigen::VectorXd::Ones(ss.num_dofs());
    CHECK(ss.num_dofs() == 6);
    CHECK_NOTHROW(ss.at(u, 0.1));
    CHECK_THROWS_AS(ss.at(u, 0.2), DomainError);
}

TEST_CASE("inverse constants match a monomial-basis eigensolve")
{
    const double h = std::sqrt(2.0);
    for (int p = 1; p <= 4; ++p) {
        const InverseConstants c = compute_inverse_constants(p);
        const MonomialForms f = monomial_forms(p);
        const double grad = max_generalized(f.stiffness, f.mass);
        const double trace = max_generalized(f.trace, f.mass);
        CHECK(std::pow(c.c_grad * p * p / h, 2) == doctest::Approx(grad).epsilon(1e-9));
        CHECK(c.c_trace * c.c_trace * p * p / h == doctest::Approx(trace).epsilon(1e-9));
    }
    // constants alone give ||1||_dT^2 / ||1||_T^2 = perimeter / area = 4
    CHECK(compute_inverse_constants(1).c_trace >= 2.0);
    const InverseConstants c0 = compute_inverse_constants(0);
    CHECK(c0.c_grad == 0.0);
    CHECK(c0.c_trace * c0.c_trace / h == doctest::Approx(4.0));
}

TEST_CASE("anisotropic meshes take the worst cell shape")
{
    const Mesh m = build_rect_mesh({0.0, 2.0, 0.0, 1.0}, 2, 4);
    const InverseConstants mesh_c = inverse_constants_for(m, 2);
    const double shape = 4.0;
    const InverseConstants direct = compute_inverse_constants(2, std::span<const double>(&shape, 1));
    CHECK(mesh_c.c_trace == doctest::Approx(direct.c_trace));
    CHECK(mesh_c.c_grad == doctest::Approx(direct.c_grad));
}
