#include <doctest.h>

#include <cmath>
#include <random>

#include "kolmo/error.hpp"
#include "kolmo/hypolab.hpp"
#include "kolmo/march.hpp"
#include "oracle.hpp"

using namespace kolmo;

TEST_CASE("time grids")
{
    const TimeGrid g = TimeGrid::uniform(0.05, 40);
    CHECK(g.num_steps() == 40);
    CHECK(g.t_final() == doctest::Approx(2.0));
    CHECK(g.is_uniform());
    const TimeGrid h = TimeGrid::until(0.5, 0.07);
    CHECK(h.t_final() == 0.5);
    CHECK(h.k(1) <= 0.07);
    CHECK_THROWS_AS(TimeGrid({0.0, 0.2, 0.1}), ConfigError);
    CHECK_THROWS_AS(TimeGrid::uniform(-0.1, 4), ConfigError);
}

TEST_CASE("projection")
{
    std::mt19937_64 rng(4);
    const Mesh m = build_rect_mesh({-1.0, 1.0, 0.0, 2.0}, 4, 3);
    const DgSpace s(m, 3);
    const Eigen::VectorXd u = oracle::random_vector(s.num_dofs(), rng);
    const Eigen::VectorXd pu = project_initial(s, [&](double x, double y) { return s.value(u, m.locate(x, y), x, y); });
    CHECK((pu - u).cwiseAbs().maxCoeff() < 1e-13);

    const Eigen::VectorXd one = project_initial(s, [](double, double) { return 1.0; });
    for (int e = 0; e < m.num_elements(); ++e)
        for (int i = 1; i < s.local_dim(); ++i)
            CHECK(std::abs(one[s.dof(e, i)]) < 1e-14);

    // the projection error is orthogonal to the space
    const auto g = [](double x, double y) { return std::exp(x) * std::cos(3.0 * y); };
    const Eigen::VectorXd pg = project_initial(s, g, 10);
    for (int e = 0; e < m.num_elements(); ++e)
        for (int i = 0; i < s.local_dim(); ++i) {
            const double r = oracle::cell_integral(
                m, e, [&](double x, double y) { return (g(x, y) - s.value(pg, e, x, y)) * s.evaluate(e, x, y).value[i]; },
                14);
            CHECK(std::abs(r) < 1e-13);
        }
}

TEST_CASE("zero data stays zero")
{
    const Discretisation d({}, 4, 4, 2);
    const FormSet fs = d.forms(d.full_coeffs(1, 0.05));
    MarchOptions opt;
    opt.q = 1;
    opt.forms = &fs;
    const MarchResult r = march(d.space(), fs.adg, TimeGrid::uniform(0.05, 5), Eigen::VectorXd::Zero(d.space().num_dofs()), opt);
    CHECK(r.final_state.cwiseAbs().maxCoeff() == 0.0);
    for (const DecayRow& row : r.trace.rows) {
        CHECK(row.a_norm == 0.0);
        CHECK(row.l2_norm == 0.0);
    }
}

TEST_CASE("vanishing spatial form keeps the state")
{
    std::mt19937_64 rng(9);
    const Mesh m = build_rect_mesh({}, 3, 3);
    const DgSpace s(m, 2);
    const Eigen::VectorXd u0 = oracle::random_vector(s.num_dofs(), rng);
    SpMat zero(s.num_dofs(), s.num_dofs());
    for (int q = 0; q <= 2; ++q) {
        MarchOptions opt;
        opt.q = q;
        opt.keep_slabs = true;
        const MarchResult r = march(s, zero, TimeGrid::uniform(0.1, 4), u0, opt);
        CHECK((r.final_state - u0).cwiseAbs().maxCoeff() < 1e-12);
        const std::vector<double> v = evaluate_solution(s, q, 0.3, 0.4, r.slabs.back(), 0.35, {{0.2, 0.7}});
        CHECK(v[0] == doctest::Approx(s.value(u0, m.locate(0.2, 0.7), 0.2, 0.7)).epsilon(1e-12));
        for (const DecayRow& row : r.trace.rows)
            CHECK(row.l2_norm == doctest::Approx(u0.norm()).epsilon(1e-12));
    }
}

TEST_CASE("A-norm decays for sin initial data")
{
    const Discretisation d({}, 4, 4, 2);
    const FormSet fs = d.forms(d.full_coeffs(1, 0.05));
    MarchOptions opt;
    opt.q = 1;
    opt.forms = &fs;
    const auto u0 = project_initial(d.space(), [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); });
    const MarchResult r = march(d.space(), fs.adg, TimeGrid::uniform(0.05, 20), u0, opt);
    double prev = std::sqrt(u0.dot(fs.gram_ah * u0));
    for (const DecayRow& row : r.trace.rows) {
        CHECK(row.a_norm <= prev + 1e-12);
        prev = row.a_norm;
    }
    CHECK(r.max_backward_error < 1e-11);
    for (double s : r.stab_residuals)
        CHECK(s <= 1e-12);
}

TEST_CASE("evaluation")
{
    std::mt19937_64 rng(6);
    const Mesh m = build_rect_mesh({}, 2, 3);
    const DgSpace s(m, 2);
    const int ns = s.num_dofs();
    Eigen::VectorXd slab = Eigen::VectorXd::Zero(2 * ns);
    slab.head(ns) = project_initial(s, [](double, double) { return 3.0; }) * std::sqrt(0.2);
    for (double t : {0.0, 0.1, 0.2})
        CHECK(evaluate_solution(s, 1, 0.0, 0.2, slab, t, {{0.3, 0.4}, {0.9, 0.1}})[1] == doctest::Approx(3.0));
    CHECK_THROWS_AS(evaluate_solution(s, 1, 0.0, 0.2, slab, 0.5, {{0.3, 0.4}}), DomainError);

    slab = oracle::random_vector(2 * ns, rng);
    const TemporalBasis tb(1, 0.0, 0.2);
    const double x = 0.61, y = 0.77;
    const int e = m.locate(x, y);
    const BasisEval b = s.evaluate(e, x, y);
    double direct = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < s.local_dim(); ++i)
            direct += slab[a * ns + s.dof(e, i)] * tb.value(a, 0.2) * b.value[i];
    CHECK(evaluate_solution(s, 1, 0.0, 0.2, slab, 0.2, {{x, y}})[0] == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("space-time polynomial solutions are reproduced")
{
    struct Case
    {
        int p;
        std::function<double(double, double, double)> u, f;
    };
    const std::vector<Case> cases{
        {1, [](double, double y, double t) { return (1.0 - t) * y; },
         [](double x, double y, double t) { return -y + x * (1.0 - t); }},
        {4, [](double x, double y, double t) { return (1.0 - t) * y * x * x * (3.0 - 2.0 * x); },
         [](double x, double y, double t) {
             const double g = x * x * (3.0 - 2.0 * x);
             return -y * g - (1.0 - t) * y * (6.0 - 12.0 * x) + x * (1.0 - t) * g;
         }},
    };
    for (const Case& c : cases) {
        const Discretisation d({}, 3, 3, c.p);
        const FormSet fs = d.forms(d.semi_coeffs());
        MarchOptions opt;
        opt.q = 1;
        opt.forcing = c.f;
        const auto u0 = project_initial(d.space(), [&](double x, double y) { return c.u(x, y, 0.0); });
        const MarchResult r = march(d.space(), fs.adg, TimeGrid::uniform(0.1, 5), u0, opt);
        const double err = l2_error(d.space(), r.final_state, [&](double x, double y) { return c.u(x, y, 0.5); });
        CHECK(err < 1e-11);
    }
}
