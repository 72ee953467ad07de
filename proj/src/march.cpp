#include "kolmo/march.hpp"

#include <cmath>
#include <optional>

#include <Eigen/SparseLU>

#include "kolmo/error.hpp"

namespace kolmo {

TimeGrid::TimeGrid(std::vector<double> breakpoints) : t_(std::move(breakpoints))
{
    if (t_.size() < 2)
        throw ConfigError("time grid: need at least one step");
    if (t_.front() != 0.0)
        throw ConfigError("time grid: must start at t = 0");
    for (std::size_t i = 1; i < t_.size(); ++i)
        if (!(t_[i] > t_[i - 1]))
            throw ConfigError("time grid: breakpoints must be strictly increasing");
}

TimeGrid TimeGrid::uniform(double k, int steps)
{
    if (!(k > 0.0) || steps < 1)
        throw ConfigError("time grid: need k > 0 and at least one step");
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int n = 0; n <= steps; ++n)
        t[static_cast<std::size_t>(n)] = n * k;
    return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::until(double t_final, double k)
{
    if (!(t_final > 0.0) || !(k > 0.0))
        throw ConfigError("time grid: need t_f > 0 and k > 0");
    const int steps = std::max(1, static_cast<int>(std::ceil(t_final / k - 1e-9)));
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int n = 0; n <= steps; ++n)
        t[static_cast<std::size_t>(n)] = t_final * n / steps;
    return TimeGrid(std::move(t));
}

bool TimeGrid::is_uniform(double rtol) const
{
    for (int n = 2; n <= num_steps(); ++n)
        if (std::abs(k(n) - k(1)) > rtol * k(1))
            return false;
    return true;
}

CsvTable DecayTrace::table() const
{
    CsvTable t({"n", "t_n", "A_norm", "L2_norm", "jump_A_norm", "enh_integral", "bound_product"});
    for (const DecayRow& r : rows)
        t.row().add(r.n).add(r.t).add(r.a_norm).add(r.l2_norm).add(r.jump_a_norm).add(r.enh_integral).add(r.bound_product);
    return t;
}

Eigen::VectorXd project_initial(const DgSpace& space, const SpaceFunction& u0, int extra)
{
    const Mesh& mesh = space.mesh();
    const QuadRule rule = gauss_legendre(space.degree() + 2 + extra);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(space.num_dofs());
    BasisEval b;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const Element& el = mesh.element(e);
        for (std::size_t i = 0; i < rule.size(); ++i) {
            for (std::size_t j = 0; j < rule.size(); ++j) {
                const double x = el.x_lo + 0.5 * el.width() * (rule.points[i] + 1.0);
                const double y = el.y_lo + 0.5 * el.height() * (rule.points[j] + 1.0);
                const double w = 0.25 * el.area() * rule.weights[i] * rule.weights[j];
                space.evaluate(e, x, y, b);
                u.segment(space.dof(e, 0), space.local_dim()) += w * u0(x, y) * b.value;
            }
        }
    }
    return u;
}

double l2_error(const DgSpace& space, const Eigen::VectorXd& u, const SpaceFunction& g, int extra)
{
    const Mesh& mesh = space.mesh();
    const QuadRule rule = gauss_legendre(space.degree() + 2 + extra);
    double err = 0.0;
    BasisEval b;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const Element& el = mesh.element(e);
        const auto loc = u.segment(space.dof(e, 0), space.local_dim());
        for (std::size_t i = 0; i < rule.size(); ++i) {
            for (std::size_t j = 0; j < rule.size(); ++j) {
                const double x = el.x_lo + 0.5 * el.width() * (rule.points[i] + 1.0);
                const double y = el.y_lo + 0.5 * el.height() * (rule.points[j] + 1.0);
                const double w = 0.25 * el.area() * rule.weights[i] * rule.weights[j];
                space.evaluate(e, x, y, b);
                const double d = b.value.dot(loc) - g(x, y);
                err += w * d * d;
            }
        }
    }
    return std::sqrt(err);
}

namespace {

double quad_form(const SpMat& g, const Eigen::VectorXd& u)
{
    return u.dot(g * u);
}

double inf_norm(const SpMat& m)
{
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it)
            rows[it.row()] += std::abs(it.value());
    return rows.size() ? rows.maxCoeff() : 0.0;
}

} // namespace

MarchResult march(const DgSpace& space, const SpMat& adg, const TimeGrid& grid, const Eigen::VectorXd& u0,
                  const MarchOptions& opt)
{
    const int ns = space.num_dofs();
    if (adg.rows() != ns || adg.cols() != ns || u0.size() != ns)
        throw ConfigError("march: dimensions of the spatial form or initial state do not match the space");
    if (opt.q < 0)
        throw ConfigError("march: temporal degree must be non-negative");

    MarchResult res;
    Eigen::SparseLU<SpMat> lu;
    double factored_k = -1.0;
    SlabSystem sys;
    TemporalForms tf;
    std::optional<SpMat> enh;
    double bound = 1.0;
    const double qq = (opt.q + 1.0) * (opt.q + 1.0);

    Eigen::VectorXd prev = u0;
    if (opt.forms) {
        res.trace.rows.push_back({0, 0.0, std::sqrt(quad_form(opt.forms->gram_ah, prev)), prev.norm(), 0.0, 0.0, 1.0});
    } else {
        res.trace.rows.push_back({0, 0.0, std::nan(""), prev.norm(), std::nan(""), std::nan(""), 1.0});
    }

    for (int n = 1; n <= grid.num_steps(); ++n) {
        const double k = grid.k(n);
        const TemporalBasis basis(opt.q, grid.t(n - 1), grid.t(n));
        if (factored_k < 0.0 || std::abs(k - factored_k) > 1e-12 * k) {
            tf = temporal_forms(basis);
            sys = assemble_slab_matrix(adg, tf);
            sys.matrix.makeCompressed();
            lu.analyzePattern(sys.matrix);
            lu.factorize(sys.matrix);
            if (lu.info() != Eigen::Success)
                throw SolverError("march: factorisation failed on slab " + std::to_string(n));
            factored_k = k;
            if (opt.forms)
                enh = slab_enhanced_gram(*opt.forms, tf);
        }
        Eigen::VectorXd rhs = sys.coupling * prev;
        if (opt.forcing)
            rhs += assemble_slab_load(space, basis, opt.forcing);
        Eigen::VectorXd u = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !u.allFinite())
            throw SolverError("march: solve failed on slab " + std::to_string(n));
        const double denom = inf_norm(sys.matrix) * u.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>();
        const double berr = denom > 0.0 ? (sys.matrix * u - rhs).lpNorm<Eigen::Infinity>() / denom : 0.0;
        res.max_backward_error = std::max(res.max_backward_error, berr);
        if (berr > opt.residual_tol)
            throw SolverError("march: residual check failed on slab " + std::to_string(n));

        const Eigen::VectorXd end = end_trace_operator(tf, ns) * u;
        DecayRow row{n, grid.t(n), std::nan(""), end.norm(), std::nan(""), std::nan(""), std::nan("")};
        bound /= 1.0 + opt.kappa * k / (2.0 * qq);
        row.bound_product = bound;
        if (opt.forms) {
            const SpMat& gah = opt.forms->gram_ah;
            const Eigen::VectorXd start = start_trace_operator(tf, ns) * u;
            const Eigen::VectorXd jump = start - prev;
            row.a_norm = std::sqrt(quad_form(gah, end));
            row.jump_a_norm = std::sqrt(quad_form(gah, jump));
            row.enh_integral = quad_form(*enh, u);
            double a_int = 0.0;
            for (int a = 0; a <= opt.q; ++a)
                a_int += quad_form(gah, u.segment(static_cast<Eigen::Index>(a) * ns, ns));
            res.stab_residuals.push_back(quad_form(gah, end) + 0.5 * opt.kappa * a_int - quad_form(gah, prev));
        }
        res.trace.rows.push_back(row);
        if (opt.keep_slabs)
            res.slabs.push_back(u);
        prev = end;
        res.last_slab = std::move(u);
    }
    res.final_state = prev;
    return res;
}

std::vector<double> evaluate_solution(const DgSpace& space, int q, double t0, double t1, const Eigen::VectorXd& slab,
                                      double t, const std::vector<Point>& points)
{
    const SlabSpace ss(space, q, t0, t1);
    if (slab.size() != ss.num_dofs())
        throw ConfigError("evaluate_solution: slab vector has the wrong size");
    const Eigen::VectorXd u = ss.at(slab, t);
    std::vector<double> out;
    out.reserve(points.size());
    for (const Point& pt : points)
        out.push_back(space.value(u, space.mesh().locate(pt.x, pt.y), pt.x, pt.y));
    return out;
}

} // namespace kolmo
