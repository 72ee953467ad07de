#include "kolmo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <random>

#include <Eigen/Eigenvalues>

#include "kolmo/error.hpp"
#include "kolmo/hypolab.hpp"
#include "kolmo/io.hpp"
#include "kolmo/linalg.hpp"

namespace kolmo {

using nlohmann::json;

bool ExperimentResult::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

json ExperimentResult::summary(const RunConfig& cfg) const
{
    json checks_j = json::array();
    for (const Check& c : checks)
        checks_j.push_back(
            {{"name", c.name}, {"margin", c.margin}, {"threshold", c.threshold}, {"verdict", c.pass() ? "PASS" : "FAIL"}});
    return {{"experiment", to_string(cfg.experiment)},
            {"config", cfg.to_json()},
            {"results", results},
            {"files", files},
            {"paper_checks", checks_j},
            {"verdict", all_pass() ? "PASS" : "FAIL"}};
}

int exit_code(const ExperimentResult& r)
{
    return r.all_pass() ? 0 : 1;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::string tag(const SweepPoint& s)
{
    return "n=" + std::to_string(s.n) + ",p=" + std::to_string(s.p) + ",q=" + std::to_string(s.q) + ",k=" +
           format_real(s.k);
}

CoeffSet select_coeffs(const Discretisation& disc, const RunConfig& cfg, int q, double k)
{
    if (cfg.coefficients == "penalty")
        return make_penalty_coeffs(disc.mesh(), disc.faces(), disc.degree(), disc.constants());
    if (disc.degree() < 1)
        throw ConfigError("field 'coefficients': '" + cfg.coefficients + "' requires p >= 1 (use \"penalty\")");
    return cfg.coefficients == "semi" ? disc.semi_coeffs() : disc.full_coeffs(q, k);
}

std::string path_in(const RunConfig& cfg, const std::string& name)
{
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_table(ExperimentResult& r, const RunConfig& cfg, const std::string& name, const CsvTable& t)
{
    t.write(path_in(cfg, name));
    r.files.push_back(name);
}

ExperimentResult run_solver(const RunConfig& cfg)
{
    ExperimentResult r;
    const Discretisation disc(cfg.domain, cfg.nx, cfg.ny, cfg.p, cfg.test_constants);
    const TimeGrid grid = cfg.time_grid();
    const CoeffSet cs = select_coeffs(disc, cfg, cfg.q, grid.k(1));
    const SpMat adg = assemble_adg(disc.mesh(), disc.faces(), disc.space(), cs);
    std::optional<FormSet> forms;
    if (cfg.coefficients != "penalty")
        forms = disc.forms(cs);

    MarchOptions opt;
    opt.q = cfg.q;
    opt.residual_tol = cfg.tol.residual;
    opt.forms = forms ? &*forms : nullptr;
    if (cfg.forcing == "manufactured")
        opt.forcing = manufactured_forcing;
    const MarchResult res =
        march(disc.space(), adg, grid, project_initial(disc.space(), cfg.initial.function(cfg.domain)), opt);

    write_table(r, cfg, "trace.csv", res.trace.table());
    CsvTable sol({"T", "x", "y", "u"});
    for (int e = 0; e < disc.mesh().num_elements(); ++e) {
        const Element& el = disc.mesh().element(e);
        const double x = 0.5 * (el.x_lo + el.x_hi), y = 0.5 * (el.y_lo + el.y_hi);
        sol.row().add(e).add(x).add(y).add(disc.space().value(res.final_state, e, x, y));
    }
    write_table(r, cfg, "solution.csv", sol);

    r.results["steps"] = grid.num_steps();
    r.results["t_final"] = grid.t_final();
    r.results["l2_norm_final"] = res.final_state.norm();
    r.results["max_backward_error"] = res.max_backward_error;
    if (cfg.forcing == "manufactured" && cfg.initial.preset == "manufactured") {
        const double tf = grid.t_final();
        r.results["l2_error_final"] =
            l2_error(disc.space(), res.final_state, [tf](double x, double y) { return manufactured_solution(x, y, tf); });
    }
    r.checks.push_back({"slab_backward_error", -res.max_backward_error, -cfg.tol.residual});
    return r;
}

ExperimentResult run_decay(const RunConfig& cfg)
{
    if (cfg.forcing != "zero")
        throw ConfigError("field 'forcing': the decay experiment requires \"zero\"");
    if (cfg.t_final)
        throw ConfigError("field 't_final': the decay experiment uses uniform steps; give 'steps'");
    ExperimentResult r;
    const Discretisation disc(cfg.domain, cfg.nx, cfg.ny, cfg.p, cfg.test_constants);
    const int steps = cfg.steps.value_or(10);
    const DecayReport rep = decay_experiment(disc, cfg.q, cfg.k, steps, cfg.initial.function(cfg.domain), cfg.tol.decay);

    write_table(r, cfg, "decay.csv", rep.trace.table());
    const double qq = (cfg.q + 1.0) * (cfg.q + 1.0);
    CsvTable base({"n", "L2_factor", "A_factor", "step_bound_factor"});
    for (std::size_t i = 0; i < rep.a_factor.size(); ++i)
        base.row().add(static_cast<int>(i + 1)).add(rep.l2_factor[i]).add(rep.a_factor[i]).add(
            std::sqrt(1.0 / (1.0 + rep.kappa * cfg.k / (2.0 * qq))));
    write_table(r, cfg, "decay_baseline.csv", base);

    for (std::size_t i = 0; i < rep.step_margin.size(); ++i)
        r.checks.push_back({"step_bound[" + std::to_string(i + 1) + "]", rep.step_margin[i], -rep.tol});
    r.checks.push_back({"cumulative_bound", rep.cumulative_margin, -rep.tol});
    r.checks.push_back({"A_norm_monotone", -rep.max_increase, -rep.tol});

    const auto& last = rep.trace.rows.back();
    r.results["kappa_num"] = rep.kappa;
    r.results["steps"] = steps;
    r.results["t_final"] = last.t;
    r.results["A_norm_initial"] = rep.trace.rows.front().a_norm;
    r.results["A_norm_final"] = last.a_norm;
    r.results["bound_product"] = last.bound_product;
    r.results["exponential_limit"] = rep.exponential_limit;
    r.results["A_norm_squared_ratio"] =
        rep.trace.rows.front().a_norm > 0.0 ? std::pow(last.a_norm / rep.trace.rows.front().a_norm, 2) : 0.0;
    return r;
}

ExperimentResult run_constants(const RunConfig& cfg)
{
    ExperimentResult r;
    const Discretisation disc(cfg.domain, cfg.nx, cfg.ny, cfg.p, cfg.test_constants);
    const CoeffSet cs = select_coeffs(disc, cfg, cfg.q, cfg.k);
    write_table(r, cfg, "coeffs.csv", coeffs_table(disc.mesh(), cs));
    write_json(mesh_to_json(disc.mesh(), disc.faces()), path_in(cfg, "mesh.json"));
    r.files.push_back("mesh.json");

    CsvTable ct({"p", "C_trace", "C_grad"});
    std::mt19937_64 rng(cfg.seed);
    const double aspect = disc.mesh().element(0).width() / disc.mesh().element(0).height();
    for (int p = 0; p <= cfg.p; ++p) {
        const InverseConstants c =
            cfg.test_constants ? InverseConstants::unit(p) : inverse_constants_for(disc.mesh(), p);
        ct.row().add(p).add(c.c_trace).add(c.c_grad);
        if (!cfg.test_constants) {
            const InverseSampleReport s = sample_inverse_inequalities(p, c, aspect, 10000, rng);
            r.checks.push_back({"inverse_trace_p" + std::to_string(p), 1.0 - s.max_trace_ratio, -1e-12});
            r.checks.push_back({"inverse_grad_p" + std::to_string(p), 1.0 - s.max_grad_ratio, -1e-12});
        }
    }
    write_table(r, cfg, "constants.csv", ct);

    const TemporalConstantReport tc = temporal_constants_check(cfg.q, cfg.k);
    r.checks.push_back({"temporal_trace_equality", -std::abs(tc.trace_extremal - tc.trace_constant), -1e-10});
    r.checks.push_back({"temporal_derivative_bound", tc.derivative_constant - tc.derivative_extremal, 0.0});
    r.results["temporal"] = {{"trace_extremal", tc.trace_extremal},
                             {"trace_constant", tc.trace_constant},
                             {"derivative_extremal", tc.derivative_extremal},
                             {"derivative_constant", tc.derivative_constant}};

    if (!cs.a.empty()) {
        double worst = std::numeric_limits<double>::infinity();
        for (const AMatrix& a : cs.a) {
            const SpectralBounds2x2 b = spectral_bounds(a.alpha, a.beta, a.gamma);
            const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(a.matrix()).eigenvalues();
            worst = std::min({worst, (ev[0] - b.lower) / b.upper, (b.upper - ev[1]) / b.upper});
        }
        r.checks.push_back({"A_spectrum_bracketed", worst, -1e-12});
    }
    const Regularity reg = regularity(disc.mesh());
    r.results["c_rho"] = reg.c_rho;
    r.results["h_min"] = reg.h_min;
    r.results["h_bar_min"] = reg.h_bar_min;
    return r;
}

ExperimentResult run_coercivity(const RunConfig& cfg)
{
    ExperimentResult r;
    CsvTable t({"kind", "nx", "ny", "p", "q", "k", "margin", "scale", "threshold", "relative", "verdict"});
    const auto add = [&](const std::string& kind, const SweepPoint& s, const MarginReport& m) {
        t.row().add(kind).add(s.n).add(s.n).add(s.p);
        if (kind == "semi")
            t.add(std::string("")).add(std::string(""));
        else
            t.add(s.q).add(s.k);
        t.add(m.margin).add(m.scale).add(m.threshold).add(m.relative()).add(std::string(m.pass ? "PASS" : "FAIL"));
        r.checks.push_back({kind + "[" + (kind == "semi" ? "n=" + std::to_string(s.n) + ",p=" + std::to_string(s.p) : tag(s)) + "]",
                            m.margin, m.threshold});
    };
    std::map<std::pair<int, int>, bool> semi_done;
    std::vector<SweepPoint> points = cfg.sweep();
    std::stable_sort(points.begin(), points.end(),
                     [](const SweepPoint& a, const SweepPoint& b) { return std::tie(a.n, a.p) < std::tie(b.n, b.p); });
    for (const SweepPoint& s : points) {
        if (s.p < 1)
            throw ConfigError("field 'sweep.p': the coercivity checks require p >= 1");
        const Discretisation disc(cfg.domain, s.n, s.n, s.p, cfg.test_constants);
        if (!semi_done[{s.n, s.p}]) {
            semi_done[{s.n, s.p}] = true;
            add("semi", s, check_semi_positivity(disc.forms(disc.semi_coeffs()), cfg.tol.margin, cfg.weights));
        }
        const FormSet forms = disc.forms(disc.full_coeffs(s.q, s.k));
        add("full", s,
            check_fulldiscrete_coercivity(forms, temporal_forms(TemporalBasis(s.q, 0.0, s.k)), cfg.tol.margin,
                                                        cfg.weights));
    }
    write_table(r, cfg, "margins.csv", t);
    r.results["instances"] = points.size();
    return r;
}

ExperimentResult run_infsup(const RunConfig& cfg)
{
    ExperimentResult r;
    CsvTable t({"nx", "ny", "p", "q", "k", "dofs", "lambda_h", "coercivity_min", "coercivity_sampled", "ratio_max",
                "ratio_sampled", "implied_lower", "verdict"});
    std::mt19937_64 rng(cfg.seed);
    std::vector<double> lambdas;
    for (const SweepPoint& s : cfg.sweep()) {
        const Discretisation disc(cfg.domain, s.n, s.n, s.p, cfg.test_constants);
        const int dofs = cfg.slabs * (s.q + 1) * disc.space().num_dofs();
        t.row().add(s.n).add(s.n).add(s.p).add(s.q).add(s.k).add(dofs);
        if (dofs > 3000) {
            for (int i = 0; i < 6; ++i)
                t.add(std::string("nan"));
            t.add(std::string("SKIP"));
            continue;
        }
        const InfSupReport rep = compute_infsup(disc, s.q, s.k, cfg.slabs, cfg.samples, rng);
        const Check c{"certificate[" + tag(s) + "]", rep.coercivity_sampled - (1.0 - cfg.tol.certificate), 0.0};
        r.checks.push_back(c);
        t.add(rep.lambda_h).add(rep.coercivity_min).add(rep.coercivity_sampled).add(rep.ratio_max).add(
            rep.ratio_sampled).add(rep.implied_lower).add(std::string(c.pass() ? "PASS" : "FAIL"));
        lambdas.push_back(rep.lambda_h);
    }
    write_table(r, cfg, "infsup.csv", t);
    if (!lambdas.empty()) {
        const auto [lo, hi] = std::minmax_element(lambdas.begin(), lambdas.end());
        r.results["lambda_floor"] = *lo;
        r.results["lambda_max"] = *hi;
        r.checks.push_back({"lambda_floor_positive", *lo, 0.0, true});
        if (lambdas.size() > 1)
            r.checks.push_back({"lambda_variation_below_10", 10.0 - *hi / *lo, 0.0, true});
    }
    return r;
}

ExperimentResult run_kappa(const RunConfig& cfg)
{
    ExperimentResult r;
    CsvTable t({"nx", "ny", "p", "q", "k", "kappa_num", "kappa_formula", "C_bPF", "delta_max", "h_bar_min",
                "delta_branch", "mesh_branch", "verdict"});
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_p; // p -> (h, kappa_formula)
    for (const SweepPoint& s : cfg.sweep()) {
        const Discretisation disc(cfg.domain, s.n, s.n, s.p, cfg.test_constants);
        const CoeffSet cs = select_coeffs(disc, cfg, s.q, s.k);
        if (cs.a.empty())
            throw ConfigError("field 'coefficients': the kappa experiment needs \"semi\" or \"full\"");
        const GapEstimate g = estimate_kappa(disc, cs);
        const Check pos{"kappa_positive[" + tag(s) + "]", g.kappa_num, 0.0, true};
        const Check cmp{"kappa_num_vs_formula[" + tag(s) + "]", g.kappa_num - g.kappa_formula, 0.0};
        r.checks.push_back(pos);
        r.checks.push_back(cmp);
        t.row().add(s.n).add(s.n).add(s.p).add(s.q).add(s.k).add(g.kappa_num).add(g.kappa_formula).add(g.c_bpf).add(
            g.delta_max).add(g.h_bar_min).add(g.delta_branch).add(g.mesh_branch).add(
            std::string(pos.pass() && cmp.pass() ? "PASS" : "FAIL"));
        auto& [hs, ks] = by_p[s.p];
        if (std::find(hs.begin(), hs.end(), disc.mesh().element(0).h) == hs.end()) {
            hs.push_back(disc.mesh().element(0).h);
            ks.push_back(g.kappa_formula);
        }
    }
    write_table(r, cfg, "kappa.csv", t);
    for (const auto& [p, hk] : by_p) {
        if (hk.first.size() < 2)
            continue;
        const double slope = loglog_slope(hk.first, hk.second);
        r.results["kappa_formula_slope_p" + std::to_string(p)] = slope;
        r.checks.push_back({"kappa_formula_slope_p" + std::to_string(p), 0.2 - std::abs(slope - 4.0), 0.0});
    }
    return r;
}

ExperimentResult run_convergence(const RunConfig& cfg)
{
    const Domain& d = cfg.domain;
    if (d.x_lo != 0.0 || d.x_hi != 1.0 || d.y_lo != 0.0 || d.y_hi != 1.0)
        throw ConfigError("field 'domain': the manufactured solution is posed on the unit square");
    ExperimentResult r;
    const double tf = cfg.t_final.value_or(0.5);
    const auto rows = manufactured_convergence(cfg.levels, cfg.p, cfg.q, tf, cfg.k, cfg.test_constants);
    CsvTable t({"n", "h", "k", "error", "eoc"});
    for (const ConvergenceRow& row : rows) {
        t.row().add(row.n).add(row.h).add(row.k).add(row.error);
        if (std::isnan(row.eoc))
            t.add(std::string("nan"));
        else
            t.add(row.eoc);
    }
    write_table(r, cfg, "convergence.csv", t);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::string lv = std::to_string(rows[i - 1].n) + "->" + std::to_string(rows[i].n);
        r.checks.push_back({"error_decreases[" + lv + "]", rows[i - 1].error - rows[i].error, 0.0, true});
        r.checks.push_back({"eoc[" + lv + "]", rows[i].eoc, cfg.tol.eoc});
    }
    r.results["t_final"] = tf;
    r.results["final_error"] = rows.back().error;
    return r;
}

} // namespace

ExperimentResult run_experiment(const RunConfig& cfg)
{
    std::filesystem::create_directories(cfg.out_dir);
    ExperimentResult r;
    switch (cfg.experiment) {
    case Experiment::Run: r = run_solver(cfg); break;
    case Experiment::Decay: r = run_decay(cfg); break;
    case Experiment::Constants: r = run_constants(cfg); break;
    case Experiment::Coercivity: r = run_coercivity(cfg); break;
    case Experiment::Infsup: r = run_infsup(cfg); break;
    case Experiment::Kappa: r = run_kappa(cfg); break;
    case Experiment::Convergence: r = run_convergence(cfg); break;
    }
    r.files.push_back("summary.json");
    write_json(r.summary(cfg), path_in(cfg, "summary.json"));
    return r;
}

} // namespace kolmo
