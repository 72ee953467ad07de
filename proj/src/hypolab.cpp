#include "kolmo/hypolab.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>

#include "kolmo/error.hpp"

namespace kolmo {

Discretisation::Discretisation(const Domain& domain, int nx, int ny, int p, bool test_constants)
    : mesh_(build_rect_mesh(domain, nx, ny)),
      fc_(classify(mesh_)),
      space_(mesh_, p),
      constants_(test_constants ? InverseConstants::unit(p) : inverse_constants_for(mesh_, p))
{
}

MarginReport make_margin(double margin, double scale, double tol)
{
    MarginReport r;
    r.margin = margin;
    r.scale = scale;
    r.threshold = -tol * scale;
    r.pass = std::isfinite(margin) && margin >= r.threshold;
    return r;
}

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = nd(rng);
    return v;
}

double qf(const SpMat& g, const Eigen::VectorXd& u)
{
    return u.dot(g * u);
}

} // namespace

double verify_uw_identity(const Mesh& mesh, const FaceClass& fc, const DgSpace& space, int samples,
                          std::mt19937_64& rng)
{
    const std::vector<double> no_penalty(static_cast<std::size_t>(mesh.num_faces()), 0.0);
    const DgFormParts parts = assemble_adg_parts(mesh, fc, space, no_penalty);
    const SpMat uw = assemble_uw_gram(mesh, fc, space);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Eigen::VectorXd u = random_vector(space.num_dofs(), rng);
        const double a = qf(parts.advection, u);
        const double b = qf(parts.upwind_int, u);
        const double c = qf(parts.upwind_bdry, u);
        const double r = 0.5 * qf(uw, u);
        const double size = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(r);
        if (size > 0.0)
            worst = std::max(worst, std::abs(a + b + c - r) / size);
    }
    return worst;
}

double verify_slab_energy_identity(const DgSpace& space, int q, double k, int samples, std::mt19937_64& rng)
{
    const TemporalBasis basis(q, 0.0, k);
    const TemporalForms tf = temporal_forms(basis);
    const int ns = space.num_dofs();
    const SpMat zero(ns, ns);
    const SlabSystem sys = assemble_slab_matrix(zero, tf);
    const SlabSpace slab(space, q, 0.0, k);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Eigen::VectorXd u = random_vector(slab.num_dofs(), rng);
        const Eigen::VectorXd prev = random_vector(ns, rng);
        const double lhs = u.dot(sys.matrix * u) - u.dot(sys.coupling * prev);
        const Eigen::VectorXd plus = slab.at(u, 0.0);
        const Eigen::VectorXd minus = slab.at(u, k);
        const double rhs = 0.5 * ((plus - prev).squaredNorm() + minus.squaredNorm() - prev.squaredNorm());
        const double size = std::abs(lhs) + (plus - prev).squaredNorm() + minus.squaredNorm() + prev.squaredNorm();
        worst = std::max(worst, std::abs(lhs - rhs) / size);
    }
    return worst;
}

Eigen::MatrixXd semi_positivity_form(const FormSet& forms, Eigen::MatrixXd* lhs_out, Eigen::MatrixXd* rhs_out,
                                     const BoundWeights& w)
{
    const Eigen::MatrixXd a(forms.adg);
    const Eigen::MatrixXd m(forms.test_map_semi());
    const Eigen::MatrixXd tau(forms.tau);
    const Eigen::MatrixXd k(forms.transport);
    const Eigen::MatrixXd gah(forms.gram_ah);
    const Eigen::MatrixXd genh = Eigen::MatrixXd(forms.gram_enh0) + (w.uw - 2.0) * Eigen::MatrixXd(forms.gram_uw);
    const Eigen::Index n = a.rows();

    // Variables z = (u, w) with w standing for U_t.
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    lhs.topLeftCorner(n, n) = m.transpose() * a;
    lhs.bottomLeftCorner(n, n) = m + tau * a;
    lhs.bottomRightCorner(n, n) = tau;

    const Eigen::MatrixXd tk = tau * k;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    rhs.topLeftCorner(n, n) = 0.25 * genh + 0.125 * k.transpose() * tk;
    rhs.topRightCorner(n, n) = gah + 0.125 * tk.transpose();
    rhs.bottomLeftCorner(n, n) = 0.125 * tk;
    rhs.bottomRightCorner(n, n) = 0.125 * tau;

    lhs = symmetric_part(lhs);
    rhs = symmetric_part(rhs);
    if (lhs_out)
        *lhs_out = lhs;
    if (rhs_out)
        *rhs_out = rhs;
    return lhs - rhs;
}

MarginReport check_semi_positivity(const FormSet& forms, double tol, const BoundWeights& w)
{
    Eigen::MatrixXd lhs, rhs;
    const Eigen::MatrixXd q = semi_positivity_form(forms, &lhs, &rhs, w);
    return make_margin(sym_min_eigenvalue(q), std::max(spectral_norm(lhs), spectral_norm(rhs)), tol);
}

Eigen::MatrixXd full_coercivity_form(const FormSet& forms, const TemporalForms& tf, Eigen::MatrixXd* lhs_out,
                                     Eigen::MatrixXd* rhs_out, const BoundWeights& w)
{
    const int ns = static_cast<int>(forms.adg.rows());
    const SlabSystem sys = assemble_slab_matrix(forms.adg, tf);
    const Eigen::MatrixXd bm(sys.matrix);
    const Eigen::MatrixXd e(sys.coupling);
    const Eigen::MatrixXd mt(assemble_test_map(forms, tf));
    const Eigen::MatrixXd t0(start_trace_operator(tf, ns));
    const Eigen::MatrixXd t1(end_trace_operator(tf, ns));
    const Eigen::MatrixXd g(forms.gram_ah);
    const Eigen::MatrixXd ga(forms.grad_a);
    const Eigen::MatrixXd gj = 0.5 * ga + w.jump_l2 * Eigen::MatrixXd(forms.mass);
    const Eigen::Index n = bm.rows();
    const Eigen::MatrixXd enh = Eigen::MatrixXd(slab_enhanced_gram(forms, tf)) +
                                (w.uw - 2.0) * kron(Eigen::MatrixXd::Identity(n / ns, n / ns), Eigen::MatrixXd(forms.gram_uw));

    // Variables z = (u, u_prev).
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(n + ns, n + ns);
    lhs.topLeftCorner(n, n) = mt.transpose() * bm;
    lhs.topRightCorner(n, ns) = -mt.transpose() * e;

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + ns, n + ns);
    // 1/2 (|U(t_n^-)|_A^2 - |u_prev|_A^2) + (jump form)(U(t_{n-1}^+) - u_prev) + 1/4 int |||U|||^2
    rhs.topLeftCorner(n, n) = 0.5 * t1.transpose() * g * t1 + t0.transpose() * gj * t0 + 0.25 * enh;
    rhs.topRightCorner(n, ns) = -t0.transpose() * gj;
    rhs.bottomLeftCorner(ns, n) = -gj * t0;
    rhs.bottomRightCorner(ns, ns) = gj - 0.5 * g;

    lhs = symmetric_part(lhs);
    rhs = symmetric_part(rhs);
    if (lhs_out)
        *lhs_out = lhs;
    if (rhs_out)
        *rhs_out = rhs;
    return lhs - rhs;
}

MarginReport check_fulldiscrete_coercivity(const FormSet& forms, const TemporalForms& tf, double tol,
                                           const BoundWeights& w)
{
    Eigen::MatrixXd lhs, rhs;
    const Eigen::MatrixXd q = full_coercivity_form(forms, tf, &lhs, &rhs, w);
    return make_margin(sym_min_eigenvalue(q), std::max(spectral_norm(lhs), spectral_norm(rhs)), tol);
}

double broken_poincare_constant(const FormSet& forms)
{
    // Mass is the identity, so the largest eigenvalue of (M, P) is 1 / lambda_min(P).
    const double lmin = sym_min_eigenvalue(Eigen::MatrixXd(forms.poincare));
    if (!(lmin > 0.0))
        throw NumericError("broken Poincare form is not positive definite");
    return 1.0 / lmin;
}

GapEstimate estimate_kappa_formula(const Discretisation& disc, const CoeffSet& cs)
{
    if (disc.degree() < 1)
        throw ConfigError("kappa: requires p >= 1");
    GapEstimate g;
    g.c_bpf = broken_poincare_constant(disc.forms(cs));
    g.h_bar_min = regularity(disc.mesh()).h_bar_min;
    for (double d : cs.delta)
        g.delta_max = std::max(g.delta_max, d);
    g.delta_branch = 1.0 / (228.0 * g.delta_max * g.delta_max);
    const double p = disc.degree();
    g.mesh_branch = g.h_bar_min * g.h_bar_min / (1024.0 * p * p);
    g.kappa_formula = std::min(g.delta_branch, g.mesh_branch) / (2.0 * g.c_bpf);
    return g;
}

GapEstimate estimate_kappa(const Discretisation& disc, const CoeffSet& cs)
{
    GapEstimate g = estimate_kappa_formula(disc, cs);
    const FormSet forms = disc.forms(cs);
    g.kappa_num = generalized_eigenvalues(Eigen::MatrixXd(forms.gram_enh_static()), Eigen::MatrixXd(forms.gram_ah))[0];
    return g;
}

InfSupReport compute_infsup(const Discretisation& disc, int q, double k, int slabs, int samples, std::mt19937_64& rng)
{
    if (slabs < 1)
        throw ConfigError("infsup: need at least one slab");
    const int ns = disc.space().num_dofs();
    const int nslab = (q + 1) * ns;
    const int n = slabs * nslab;
    constexpr int max_dofs = 3000;
    if (n > max_dofs)
        throw ConfigError("infsup: " + std::to_string(n) + " dofs exceeds the dense limit of " + std::to_string(max_dofs));

    const CoeffSet cs = disc.full_coeffs(q, k);
    const FormSet forms = disc.forms(cs);
    const TemporalForms tf = temporal_forms(TemporalBasis(q, 0.0, k));
    const SlabSystem sys = assemble_slab_matrix(forms.adg, tf);
    const Eigen::MatrixXd bm(sys.matrix);
    const Eigen::MatrixXd e(sys.coupling);
    const Eigen::MatrixXd mt(assemble_test_map(forms, tf));
    const Eigen::MatrixXd t0(start_trace_operator(tf, ns));
    const Eigen::MatrixXd t1(end_trace_operator(tf, ns));
    const Eigen::MatrixXd g(forms.gram_ah);
    const Eigen::MatrixXd enh(slab_enhanced_gram(forms, tf));

    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd gst = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < slabs; ++s) {
        const int o = s * nslab;
        b.block(o, o, nslab, nslab) = bm;
        m.block(o, o, nslab, nslab) = mt;
        gst.block(o, o, nslab, nslab) += 0.25 * enh;
        if (s > 0) {
            const int op = o - nslab;
            b.block(o, op, nslab, nslab) = -e * t1;
            // 1/2 |U(t_s^+) - U(t_s^-)|_A^2
            gst.block(o, o, nslab, nslab) += 0.5 * t0.transpose() * g * t0;
            gst.block(op, op, nslab, nslab) += 0.5 * t1.transpose() * g * t1;
            gst.block(o, op, nslab, nslab) -= 0.5 * t0.transpose() * g * t1;
            gst.block(op, o, nslab, nslab) -= 0.5 * t1.transpose() * g * t0;
        }
    }
    gst.topLeftCorner(nslab, nslab) += 0.5 * t0.transpose() * g * t0;
    gst.bottomRightCorner(nslab, nslab) += 0.5 * t1.transpose() * g * t1;
    gst = symmetric_part(gst);

    // Symmetric diagonal equilibration S G S keeps the Cholesky factor accurate;
    // the Gram spans many orders of magnitude.
    const Eigen::VectorXd sc = gst.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd gs = sc.asDiagonal() * gst * sc.asDiagonal();
    const Eigen::LLT<Eigen::MatrixXd> llt(gs);
    if (llt.info() != Eigen::Success)
        throw NumericError("infsup: space-time Gram matrix is not positive definite");
    const auto l = llt.matrixL();
    const auto congruence = [&](const Eigen::MatrixXd& x) {
        Eigen::MatrixXd y = l.solve(sc.asDiagonal() * x * sc.asDiagonal());
        return Eigen::MatrixXd(l.solve(Eigen::MatrixXd(y.transpose())).transpose());
    };

    // C = L^{-1} S B S L^{-T}
    InfSupReport r;
    r.dofs = n;
    r.lambda_h = singular_values(congruence(b)).minCoeff();
    r.coercivity_min = sym_min_eigenvalue(symmetric_part(congruence(symmetric_part(m.transpose() * b))));

    // |||V(U)|||_st / |||U|||_st = |L^T S^{-1} M S L^{-T} y| / |y|
    const Eigen::MatrixXd lit = l.solve(Eigen::MatrixXd::Identity(n, n)).transpose();
    const Eigen::MatrixXd vm = llt.matrixU() * (sc.cwiseInverse().asDiagonal() * m * sc.asDiagonal() * lit);
    r.ratio_max = singular_values(vm).maxCoeff();
    r.implied_lower = r.coercivity_min / r.ratio_max;

    r.coercivity_sampled = std::numeric_limits<double>::infinity();
    r.ratio_sampled = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Eigen::VectorXd u = random_vector(n, rng);
        const Eigen::VectorXd v = m * u;
        const double uu = u.dot(gst * u);
        r.coercivity_sampled = std::min(r.coercivity_sampled, v.dot(b * u) / uu);
        r.ratio_sampled = std::max(r.ratio_sampled, std::sqrt(v.dot(gst * v) / uu));
    }
    return r;
}

DecayReport decay_experiment(const Discretisation& disc, int q, double k, int steps, const SpaceFunction& u0,
                             double tol)
{
    const CoeffSet cs = disc.full_coeffs(q, k);
    const FormSet forms = disc.forms(cs);
    DecayReport rep;
    rep.kappa = generalized_eigenvalues(Eigen::MatrixXd(forms.gram_enh_static()), Eigen::MatrixXd(forms.gram_ah))[0];

    MarchOptions opt;
    opt.q = q;
    opt.forms = &forms;
    opt.kappa = rep.kappa;
    const TimeGrid grid = TimeGrid::uniform(k, steps);
    const MarchResult res = march(disc.space(), forms.adg, grid, project_initial(disc.space(), u0), opt);
    rep.trace = res.trace;

    const double qq = (q + 1.0) * (q + 1.0);
    const double step_factor = 1.0 / (1.0 + rep.kappa * k / (2.0 * qq));
    rep.tol = tol;
    rep.steps_pass = true;
    rep.monotone_pass = true;
    const auto& rows = rep.trace.rows;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double a0 = rows[i - 1].a_norm, a1 = rows[i].a_norm;
        const double margin = step_factor * a0 * a0 - a1 * a1;
        rep.step_margin.push_back(margin);
        rep.steps_pass = rep.steps_pass && margin >= -tol;
        rep.max_increase = std::max(rep.max_increase, a1 - a0);
        rep.monotone_pass = rep.monotone_pass && a1 <= a0 + tol;
        rep.a_factor.push_back(a0 > 0.0 ? a1 / a0 : 0.0);
        rep.l2_factor.push_back(rows[i - 1].l2_norm > 0.0 ? rows[i].l2_norm / rows[i - 1].l2_norm : 0.0);
    }
    const double a_first = rows.front().a_norm, a_last = rows.back().a_norm;
    rep.cumulative_margin = rows.back().bound_product * a_first * a_first - a_last * a_last;
    rep.cumulative_pass = rep.cumulative_margin >= -tol;
    rep.exponential_limit = std::exp(-rep.kappa * grid.t_final() / (4.0 * qq));
    return rep;
}

InverseSampleReport sample_inverse_inequalities(int p, const InverseConstants& c, double aspect, int samples,
                                                std::mt19937_64& rng, double rtol)
{
    if (!(aspect > 0.0))
        throw ConfigError("inverse sampling: aspect ratio must be positive");
    const Mesh mesh = build_rect_mesh({0.0, aspect, 0.0, 1.0}, 1, 1);
    const DgSpace space(mesh, p);
    const Element& el = mesh.element(0);
    const double h = el.h;
    const double pt = std::max(p, 1);
    const double trace_bound = c.c_trace * c.c_trace * pt * pt / h;
    const double grad_bound = std::pow(c.c_grad * p * p / h, 2);

    // Independent quadrature: p + 3 points integrate every squared mode exactly.
    const QuadRule rule = gauss_legendre(p + 3);
    const int nl = space.local_dim();
    std::vector<BasisEval> cell, edge;
    std::vector<double> cell_w, edge_w;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double sx = 0.5 * (rule.points[i] + 1.0);
        for (std::size_t j = 0; j < rule.size(); ++j) {
            const double sy = 0.5 * (rule.points[j] + 1.0);
            cell.push_back(space.evaluate(0, aspect * sx, sy));
            cell_w.push_back(0.25 * aspect * rule.weights[i] * rule.weights[j]);
        }
        // bottom, top (length aspect) and left, right (length 1)
        for (double y : {0.0, 1.0}) {
            edge.push_back(space.evaluate(0, aspect * sx, y));
            edge_w.push_back(0.5 * aspect * rule.weights[i]);
        }
        for (double x : {0.0, aspect}) {
            edge.push_back(space.evaluate(0, x, sx));
            edge_w.push_back(0.5 * rule.weights[i]);
        }
    }

    InverseSampleReport r;
    r.samples = samples;
    std::normal_distribution<double> nd;
    Eigen::VectorXd v(nl);
    for (int s = 0; s < samples; ++s) {
        for (int i = 0; i < nl; ++i)
            v[i] = nd(rng);
        double l2 = 0.0, grad = 0.0, trace = 0.0;
        for (std::size_t k = 0; k < cell.size(); ++k) {
            const double u = cell[k].value.dot(v), ux = cell[k].dx.dot(v), uy = cell[k].dy.dot(v);
            l2 += cell_w[k] * u * u;
            grad += cell_w[k] * (ux * ux + uy * uy);
        }
        for (std::size_t k = 0; k < edge.size(); ++k) {
            const double u = edge[k].value.dot(v);
            trace += edge_w[k] * u * u;
        }
        const double tr = trace / (trace_bound * l2);
        const double gr = grad_bound > 0.0 ? grad / (grad_bound * l2) : (grad > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        r.max_trace_ratio = std::max(r.max_trace_ratio, tr);
        r.max_grad_ratio = std::max(r.max_grad_ratio, gr);
        if (tr > 1.0 + rtol || gr > 1.0 + rtol)
            ++r.violations;
    }
    return r;
}

TemporalConstantReport temporal_constants_check(int q, double k)
{
    const TemporalBasis basis(q, 0.0, k);
    const Eigen::VectorXd end = basis.end_trace();
    TemporalConstantReport r;
    // Orthonormal basis: max |V(t^-)|^2 / ||V||^2 is the top eigenvalue of e e^T.
    r.trace_extremal = std::sqrt(k * sym_max_eigenvalue(end * end.transpose()));
    r.trace_constant = temporal_trace_constant(q);
    const Eigen::MatrixXd d = basis.derivative_matrix();
    r.derivative_extremal = k * (q > 0 ? singular_values(d).maxCoeff() : 0.0);
    r.derivative_constant = temporal_derivative_constant(q);
    return r;
}

double manufactured_solution(double x, double y, double t)
{
    const double pi = std::numbers::pi;
    const double s = std::sin(pi * x);
    return std::exp(-t) * s * s * std::sin(pi * y);
}

double manufactured_forcing(double x, double y, double t)
{
    // u_t - u_xx + x u_y
    const double pi = std::numbers::pi;
    const double s = std::sin(pi * x);
    const double et = std::exp(-t);
    const double u_t = -et * s * s * std::sin(pi * y);
    const double u_xx = et * 2.0 * pi * pi * std::cos(2.0 * pi * x) * std::sin(pi * y);
    const double u_y = et * s * s * pi * std::cos(pi * y);
    return u_t - u_xx + x * u_y;
}

std::vector<ConvergenceRow> manufactured_convergence(const std::vector<int>& levels, int p, int q, double t_final,
                                                     double k_coarse, bool test_constants)
{
    if (levels.empty())
        throw ConfigError("convergence: no refinement levels");
    std::vector<ConvergenceRow> rows;
    for (int n : levels) {
        const Discretisation disc({0.0, 1.0, 0.0, 1.0}, n, n, p, test_constants);
        const CoeffSet cs = make_penalty_coeffs(disc.mesh(), disc.faces(), p, disc.constants());
        const SpMat adg = assemble_adg(disc.mesh(), disc.faces(), disc.space(), cs);
        const double k = k_coarse * levels.front() / n;
        const TimeGrid grid = TimeGrid::until(t_final, k);
        MarchOptions opt;
        opt.q = q;
        opt.forcing = manufactured_forcing;
        const Eigen::VectorXd u0 =
            project_initial(disc.space(), [](double x, double y) { return manufactured_solution(x, y, 0.0); });
        const MarchResult res = march(disc.space(), adg, grid, u0, opt);
        const double tf = grid.t_final();
        const double err =
            l2_error(disc.space(), res.final_state, [tf](double x, double y) { return manufactured_solution(x, y, tf); });
        ConvergenceRow row{n, std::sqrt(2.0) / n, grid.k(1), err, std::nan("")};
        if (!rows.empty())
            row.eoc = std::log(rows.back().error / err) / std::log(rows.back().h / row.h);
        rows.push_back(row);
    }
    return rows;
}

} // namespace kolmo
